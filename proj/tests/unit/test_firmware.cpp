#include <gtest/gtest.h>

#include <string>

#include "pogosim/demos.hpp"
#include "pogosim/firmware.hpp"
#include "test_programs.hpp"

using namespace pogosim;

namespace {

class SixSender final : public Program {
 public:
  void step(Api& api) override {
    const std::uint8_t b = 1;
    for (int i = 0; i < 6; ++i) accepted += api.send({&b, 1}) ? 1 : 0;
  }
  int accepted = 0;
};

class ReadTwice final : public Program {
 public:
  void step(Api& api) override {
    same = api.photosensors() == api.photosensors() && api.imu() == api.imu() && api.millis() == api.millis();
  }
  bool same = false;
};

ProgramRegistry registry_with(std::string name, ProgramFactory f) {
  ProgramRegistry r = fixtures::test_registry();
  r.add(std::move(name), std::move(f));
  return r;
}

}  // namespace

TEST(Controller, IdleDoesNothing) {
  const ProgramRegistry reg = ProgramRegistry::with_builtins();
  ControllerSlot slot;
  RobotIo io;
  io.leds[2] = {1, 2, 3};
  const LedArray before = io.leds;
  const auto res = tick_controller(slot, io, reg);
  EXPECT_TRUE(res.errors.empty());
  EXPECT_TRUE(io.outbox.empty());
  EXPECT_EQ(io.motors, MotorCommand{});
  EXPECT_EQ(io.leds, before);
}

TEST(Controller, SendCapIsFourPerTick) {
  const ProgramRegistry reg = registry_with("six", [] { return std::make_unique<SixSender>(); });
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "six", reg));
  RobotIo io;
  const auto res = tick_controller(slot, io, reg);
  EXPECT_EQ(io.outbox.size(), kMaxSendsPerTick);
  EXPECT_EQ(io.rejected_sends, 2u);
  EXPECT_EQ(dynamic_cast<SixSender&>(*slot.program).accepted, 4);
  ASSERT_EQ(res.errors.size(), 1u);
  EXPECT_NE(res.errors[0].find("2 frame(s) rejected"), std::string::npos);
  // The cap resets every tick.
  tick_controller(slot, io, reg);
  EXPECT_EQ(io.outbox.size(), kMaxSendsPerTick);
}

TEST(Controller, SendValidation) {
  RobotIo io;
  Api api(io);
  const std::vector<std::uint8_t> big(kMaxPayload + 1, 0);
  EXPECT_FALSE(api.send(big));
  EXPECT_FALSE(api.send({}, 0));
  EXPECT_FALSE(api.send({}, 0x10));
  EXPECT_TRUE(api.send(std::vector<std::uint8_t>(kMaxPayload, 0), face_bit(FaceId::left)));
  EXPECT_EQ(io.outbox.back().face_mask, face_bit(FaceId::left));
}

TEST(Controller, UnknownProgramRunsIdleAndLogsOnce) {
  const ProgramRegistry reg = ProgramRegistry::with_builtins();
  ControllerSlot slot;
  slot.program_id = "no_such_program";
  RobotIo io;
  const auto first = tick_controller(slot, io, reg);
  ASSERT_EQ(first.errors.size(), 1u);
  EXPECT_NE(first.errors[0].find("no_such_program"), std::string::npos);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(tick_controller(slot, io, reg).errors.empty());
  EXPECT_EQ(io.motors, MotorCommand{});
}

TEST(Controller, LoadUnknownProgramLeavesSlot) {
  const ProgramRegistry reg = fixtures::test_registry();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "counting", reg));
  EXPECT_FALSE(load_program(slot, "missing", reg));
  EXPECT_EQ(slot.program_id, "counting");
}

TEST(Controller, ExceptionHaltsOnlyThatRobot) {
  const ProgramRegistry reg = fixtures::test_registry();
  ControllerSlot bad;
  ControllerSlot good;
  ASSERT_TRUE(load_program(bad, "throwing", reg));
  ASSERT_TRUE(load_program(good, "constant_drive", reg));
  RobotIo bad_io;
  bad_io.params["throw_after"] = 2;
  RobotIo good_io;
  good_io.params = {{"left", 0.5}, {"right", 0.5}};
  for (int i = 0; i < 2; ++i) {
    EXPECT_FALSE(tick_controller(bad, bad_io, reg).halted_now);
    tick_controller(good, good_io, reg);
  }
  EXPECT_EQ(bad_io.motors.left, 1.0);
  const auto res = tick_controller(bad, bad_io, reg);
  EXPECT_TRUE(res.halted_now);
  EXPECT_TRUE(bad.halted);
  EXPECT_EQ(bad_io.motors, MotorCommand{});
  EXPECT_TRUE(tick_controller(bad, bad_io, reg).errors.empty());
  tick_controller(good, good_io, reg);
  EXPECT_EQ(good_io.motors, (MotorCommand{0.5, 0.5, 0.0}));
}

TEST(Controller, ReloadingSameProgramResetsState) {
  const ProgramRegistry reg = fixtures::test_registry();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "counting", reg));
  RobotIo io;
  for (int i = 0; i < 7; ++i) tick_controller(slot, io, reg);
  EXPECT_EQ(dynamic_cast<fixtures::CountingProgram&>(*slot.program).steps(), 7);
  ASSERT_TRUE(load_program(slot, "counting", reg));
  EXPECT_EQ(slot.program->save_state(), (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(slot.ticks_since_swap, 0u);
}

TEST(Controller, OutputsAreClamped) {
  const ProgramRegistry reg = fixtures::test_registry();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "constant_drive", reg));
  RobotIo io;
  io.params = {{"left", 5.0}, {"right", -3.0}};
  tick_controller(slot, io, reg);
  EXPECT_EQ(io.motors, (MotorCommand{1.0, 0.0, 0.0}));
  io.model = LocomotionModel::differential;
  tick_controller(slot, io, reg);
  EXPECT_EQ(io.motors, (MotorCommand{1.0, -1.0, 0.0}));
}

TEST(Controller, ReadsAreStableWithinTick) {
  const ProgramRegistry reg = registry_with("read_twice", [] { return std::make_unique<ReadTwice>(); });
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "read_twice", reg));
  RobotIo io;
  io.photo = {10, 20, 30};
  tick_controller(slot, io, reg);
  EXPECT_TRUE(dynamic_cast<ReadTwice&>(*slot.program).same);
}

TEST(Controller, SignalsArriveBeforeStep) {
  const ProgramRegistry reg = ProgramRegistry::with_builtins();
  ControllerSlot slot;
  ASSERT_TRUE(load_program(slot, "run_tumble", reg));
  RobotIo io;
  io.signals.push_back({kSignalStop, {}, SignalOrigin::shower});
  tick_controller(slot, io, reg);
  EXPECT_TRUE(io.signals.empty());
  EXPECT_EQ(io.motors, MotorCommand{});
  EXPECT_EQ(io.leds[0], palette_color(kSignalStop));
}

TEST(Api, ReceiveAnyFollowsFaceOrder) {
  RobotIo io;
  io.inbox[face_index(FaceId::back)].push_back({7, 1, MsgType::user, FaceId::back, {1}});
  io.inbox[face_index(FaceId::left)].push_back({8, 2, MsgType::user, FaceId::left, {2}});
  Api api(io);
  EXPECT_TRUE(api.has_message(FaceId::back));
  EXPECT_EQ(api.receive_any()->sender, 8u);
  EXPECT_EQ(api.receive_any()->sender, 7u);
  EXPECT_FALSE(api.receive_any().has_value());
  EXPECT_THROW(api.set_led(kLedCount, {}), std::out_of_range);
}
