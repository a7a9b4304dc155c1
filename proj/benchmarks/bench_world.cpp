#include <benchmark/benchmark.h>

#include <vector>

#include "pogosim/collisions.hpp"
#include "pogosim/ir.hpp"
#include "pogosim/rng.hpp"
#include "pogosim/world.hpp"

using namespace pogosim;

namespace {

WorldConfig grid_world(std::size_t count, const char* program) {
  WorldConfig cfg;
  cfg.arena = Polygon::rectangle(3.0, 3.0);
  const std::size_t side = 20;
  for (std::size_t i = 0; i < count; ++i) {
    RobotSpec r;
    r.pose = {-1.4 + 0.12 * static_cast<double>(i % side), -1.4 + 0.12 * static_cast<double>(i / side), 0.0};
    r.program = program;
    cfg.robots.push_back(r);
  }
  if (count > 0) cfg.robots[0].params["seed"] = 1.0;
  cfg.seed = 42;
  return cfg;
}

void BM_WorldStepIdle(benchmark::State& state) {
  World world(grid_world(static_cast<std::size_t>(state.range(0)), "idle"), ProgramRegistry::with_builtins());
  for (auto _ : state) world.step();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WorldStepIdle)->Arg(50)->Arg(200)->Arg(400);

void BM_WorldStepHopGradient(benchmark::State& state) {
  World world(grid_world(static_cast<std::size_t>(state.range(0)), "hop_gradient"), ProgramRegistry::with_builtins());
  for (auto _ : state) world.step();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WorldStepHopGradient)->Arg(50)->Arg(200);

void BM_WorldStepRunTumble(benchmark::State& state) {
  World world(grid_world(static_cast<std::size_t>(state.range(0)), "run_tumble"), ProgramRegistry::with_builtins());
  for (auto _ : state) world.step();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WorldStepRunTumble)->Arg(200);

void BM_Arbitrate(benchmark::State& state) {
  RngStream rng(1, 0, StreamId::channel);
  std::vector<Reception> rx(static_cast<std::size_t>(state.range(0)));
  for (Reception& r : rx) {
    r.t_start_ns = static_cast<std::int64_t>(rng.uniform(0.0, 33e6));
    r.t_end_ns = r.t_start_ns + 1'041'667;
    r.distance = rng.uniform(0.05, 0.25);
  }
  for (auto _ : state) benchmark::DoNotOptimize(arbitrate(rx, CollisionPolicy::capture));
}
BENCHMARK(BM_Arbitrate)->Arg(4)->Arg(16)->Arg(64);

void BM_EncodeDecodeFrame(benchmark::State& state) {
  IrFrame f;
  f.sender = 17;
  f.seq = 99;
  f.payload.assign(static_cast<std::size_t>(state.range(0)), 0xA5);
  for (auto _ : state) benchmark::DoNotOptimize(decode_frame(encode_frame(f)));
}
BENCHMARK(BM_EncodeDecodeFrame)->Arg(1)->Arg(64);

void BM_ResolveCollisions(benchmark::State& state) {
  const Polygon arena = Polygon::rectangle(2.0, 2.0);
  RngStream rng(5, 0, StreamId::init);
  std::vector<BodyDisc> initial(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < initial.size(); ++i) {
    initial[i].id = static_cast<EntityId>(i);
    initial[i].pose = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), 0.0};
  }
  for (auto _ : state) {
    std::vector<BodyDisc> bodies = initial;
    benchmark::DoNotOptimize(resolve_collisions(bodies, &arena, {}));
  }
}
BENCHMARK(BM_ResolveCollisions)->Arg(50)->Arg(200);

void BM_RngUniform(benchmark::State& state) {
  RngStream rng(7, 3, StreamId::motion_noise);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_RngUniform);

}  // namespace

BENCHMARK_MAIN();
