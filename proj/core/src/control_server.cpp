#include "pogosim/control_server.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <ostream>
#include <thread>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pogosim/metrics.hpp"
#include "pogosim/runner.hpp"
#include "pogosim/world.hpp"

namespace pogosim {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using SharedText = std::shared_ptr<const std::string>;

std::string envelope(std::string_view type, const Json& seq, Json payload) {
  return Json{{"type", type}, {"seq", seq}, {"payload", std::move(payload)}}.dump();
}

constexpr std::array<std::string_view, 8> kCommands = {
    "pause", "resume", "single_step", "set_timescale", "shower.set_pose", "shower.emit_signal", "shower.program",
    "inspect"};

}  // namespace

struct ControlServer::Impl {
  class Session;

  struct Request {
    std::weak_ptr<Session> session;
    std::string text;
  };

  Impl(ScenarioConfig c, ServeOptions o, ProgramRegistry r)
      : config(std::move(c)), options(o), registry(std::move(r)), writer(o.trace, config.trace_kinds) {
    tee.add(&writer);
    tee.add(&metrics);
  }

  // --- network side ---------------------------------------------------------

  class Session : public std::enable_shared_from_this<Session> {
   public:
    Session(tcp::socket socket, Impl& impl) : ws_(std::move(socket)), impl_(impl) {}

    void run() {
      net::dispatch(ws_.get_executor(), [self = shared_from_this()] {
        self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        self->ws_.async_accept(beast::bind_front_handler(&Session::on_accept, self));
      });
    }

    void send_reply(std::string text) {
      auto msg = std::make_shared<const std::string>(std::move(text));
      net::post(ws_.get_executor(), [self = shared_from_this(), msg] {
        self->replies_.push_back(msg);
        self->pump();
      });
    }

    void offer_snapshot(SharedText text) {
      net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)] {
        if (self->snapshot_) ++self->impl_.dropped_snapshots;
        self->snapshot_ = text;
        self->pump();
      });
    }

   private:
    void on_accept(beast::error_code ec) {
      if (ec) return;
      open_ = true;
      ws_.text(true);
      impl_.attach(shared_from_this());
      read();
    }

    void read() { ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this())); }

    void on_read(beast::error_code ec, std::size_t) {
      if (ec) {
        open_ = false;
        return;
      }
      impl_.enqueue({weak_from_this(), beast::buffers_to_string(buffer_.data())});
      buffer_.consume(buffer_.size());
      read();
    }

    void pump() {
      if (!open_ || writing_) return;
      if (!replies_.empty()) {
        current_ = replies_.front();
        replies_.pop_front();
      } else if (snapshot_) {
        current_ = std::move(snapshot_);
        snapshot_.reset();
      } else {
        return;
      }
      writing_ = true;
      ws_.async_write(net::buffer(*current_), beast::bind_front_handler(&Session::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
      writing_ = false;
      current_.reset();
      if (ec) {
        open_ = false;
        return;
      }
      pump();
    }

    websocket::stream<beast::tcp_stream> ws_;
    Impl& impl_;
    beast::flat_buffer buffer_;
    std::deque<SharedText> replies_;
    SharedText snapshot_;
    SharedText current_;
    bool open_ = false;
    bool writing_ = false;
  };

  void do_accept() {
    acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Session>(std::move(socket), *this)->run();
      do_accept();
    });
  }

  void attach(const std::shared_ptr<Session>& s) {
    SharedText latest;
    Json hello;
    {
      std::lock_guard lock(mutex);
      sessions.push_back(s);
      latest = latest_snapshot;
      Json commands = Json::array();
      for (std::string_view c : kCommands) commands.push_back(c);
      hello = {{"version", kControlProtocolVersion},
               {"tick", tick.load()},
               {"paused", paused.load()},
               {"commands", commands}};
    }
    s->send_reply(envelope("hello", 0, std::move(hello)));
    if (latest) s->offer_snapshot(latest);
  }

  void enqueue(Request r) {
    {
      std::lock_guard lock(mutex);
      inbox.push_back(std::move(r));
    }
    wake.notify_one();
  }

  // --- simulation side --------------------------------------------------------

  void reply(const Request& r, std::string text) {
    if (auto s = r.session.lock()) s->send_reply(std::move(text));
  }

  void publish() {
    auto text = std::make_shared<const std::string>(
        envelope("snapshot", snapshot_seq++, snapshot_to_json(world->snapshot())));
    std::vector<std::shared_ptr<Session>> live;
    {
      std::lock_guard lock(mutex);
      latest_snapshot = text;
      std::erase_if(sessions, [](const std::weak_ptr<Session>& w) { return w.expired(); });
      for (const auto& w : sessions) {
        if (auto s = w.lock()) live.push_back(std::move(s));
      }
    }
    for (const auto& s : live) s->offer_snapshot(text);
    last_publish = std::chrono::steady_clock::now();
  }

  void reset_pacing() {
    anchor_wall = std::chrono::steady_clock::now();
    anchor_tick = world->clock().tick();
  }

  void step_once() {
    const std::uint64_t k = world->clock().tick();
    if (!pending.empty()) {
      std::lock_guard lock(mutex);
      for (const IssuedCommand& c : pending) recorded.push_back({k, c});
    }
    world->step(pending);
    pending.clear();
    tick.store(world->clock().tick());
    digest_value.store(writer.digest().value());
  }

  void handle(const Request& r, bool& publish_now) {
    Json msg;
    try {
      msg = Json::parse(r.text);
    } catch (const nlohmann::json::parse_error& e) {
      reply(r, envelope("error", nullptr, {{"message", std::string("malformed message: ") + e.what()}}));
      return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      reply(r, envelope("error", msg.is_object() ? msg.value("seq", Json()) : Json(),
                        {{"message", "message must be an object with a string type"}}));
      return;
    }
    const Json seq = msg.value("seq", Json());
    const std::string type = msg["type"].get<std::string>();
    const Json payload = msg.contains("payload") ? msg["payload"] : Json::object();
    auto ack = [&](Json extra = Json::object()) {
      extra["command"] = type;
      extra["tick"] = world->clock().tick();
      reply(r, envelope("ack", seq, std::move(extra)));
    };
    auto fail = [&](const std::string& message) {
      reply(r, envelope("error", seq, {{"command", type}, {"message", message}}));
    };

    try {
      if (type == "pause") {
        paused.store(true);
        publish_now = true;
        ack();
      } else if (type == "resume") {
        paused.store(false);
        reset_pacing();
        ack();
      } else if (type == "single_step") {
        ++step_budget;
        publish_now = true;
        ack({{"apply_tick", world->clock().tick() + step_budget - 1}});
      } else if (type == "set_timescale") {
        if (!payload.is_object() || !payload.contains("factor") || !payload["factor"].is_number()) {
          fail("payload.factor must be a number");
          return;
        }
        const double factor = payload["factor"].get<double>();
        if (!(factor > 0.0) || !std::isfinite(factor)) {
          fail("timescale factor must be positive");
          return;
        }
        timescale = factor;
        reset_pacing();
        ack({{"factor", factor}});
      } else if (type == "inspect") {
        if (!payload.is_object() || !payload.contains("id") || !payload["id"].is_number_integer()) {
          fail("payload.id must be an integer");
          return;
        }
        const auto id = payload["id"].get<std::int64_t>();
        const auto info = id >= 0 && id <= kMaxEntityId ? world->inspect(static_cast<EntityId>(id)) : std::nullopt;
        if (!info) {
          fail("unknown entity id " + std::to_string(id));
          return;
        }
        ack({{"robot", *info}});
      } else if (type == "shower.set_pose" || type == "shower.emit_signal" || type == "shower.program") {
        Command cmd = command_from_json(type, payload);
        if (const auto* p = std::get_if<ShowerProgram>(&cmd); p && !registry.contains(p->program_id)) {
          fail("unknown program '" + p->program_id + "'");
          return;
        }
        pending.push_back({std::move(cmd), CommandSource::operator_console});
        ack({{"apply_tick", world->clock().tick() + (paused.load() ? step_budget : 0)}});
      } else {
        fail("unknown command");
      }
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const double dt = world->clock().dt();
    const auto min_publish_gap = std::chrono::duration<double>(1.0 / options.snapshot_hz);
    reset_pacing();
    publish();
    while (true) {
      std::deque<Request> batch;
      {
        std::lock_guard lock(mutex);
        if (stopping) break;
        batch.swap(inbox);
      }
      bool publish_now = false;
      for (const Request& r : batch) handle(r, publish_now);

      std::uint64_t due = 0;
      if (!paused.load()) {
        const double elapsed = std::chrono::duration<double>(clock::now() - anchor_wall).count() * timescale;
        const auto target = anchor_tick + static_cast<std::uint64_t>(std::floor(elapsed / dt + 1e-9));
        const std::uint64_t now_tick = world->clock().tick();
        if (target > now_tick) due = std::min<std::uint64_t>(target - now_tick, 256);
      }
      if (step_budget > 0) {
        due += step_budget;
        step_budget = 0;
      }
      for (std::uint64_t i = 0; i < due; ++i) step_once();
      if (publish_now || (due > 0 && clock::now() - last_publish >= min_publish_gap)) publish();

      if (due == 0 && !publish_now) {
        std::unique_lock lock(mutex);
        const auto wait = paused.load() ? std::chrono::milliseconds(20) : std::chrono::milliseconds(1);
        wake.wait_for(lock, wait, [this] { return stopping || !inbox.empty(); });
      }
    }
  }

  ScenarioConfig config;
  ServeOptions options;
  ProgramRegistry registry;
  TraceWriter writer;
  MetricsAccumulator metrics;
  TeeSink tee;
  std::unique_ptr<World> world;

  net::io_context ioc{1};
  std::optional<tcp::acceptor> acceptor;
  std::thread net_thread;
  std::thread sim_thread;
  bool started = false;
  bool stopped = false;

  mutable std::mutex mutex;
  std::condition_variable wake;
  std::deque<Request> inbox;
  bool stopping = false;
  std::vector<std::weak_ptr<Session>> sessions;
  SharedText latest_snapshot;
  std::vector<ScriptEntry> recorded;

  std::atomic<std::uint64_t> tick{0};
  std::atomic<bool> paused{false};
  std::atomic<std::uint64_t> digest_value{0};
  std::atomic<std::size_t> dropped_snapshots{0};

  // Owned by the simulation thread.
  std::vector<IssuedCommand> pending;
  std::uint64_t step_budget = 0;
  double timescale = 1.0;
  std::uint64_t snapshot_seq = 0;
  std::chrono::steady_clock::time_point anchor_wall;
  std::uint64_t anchor_tick = 0;
  std::chrono::steady_clock::time_point last_publish;
};

ControlServer::ControlServer(ScenarioConfig config, ServeOptions options, ProgramRegistry registry)
    : impl_(std::make_unique<Impl>(std::move(config), options, std::move(registry))) {
  if (!(options.timescale > 0.0)) throw std::invalid_argument("timescale must be positive");
  if (!(options.snapshot_hz > 0.0)) throw std::invalid_argument("snapshot rate must be positive");
  impl_->timescale = options.timescale;
  impl_->paused.store(options.start_paused);
}

ControlServer::~ControlServer() { stop(); }

void ControlServer::start() {
  Impl& d = *impl_;
  if (d.started) return;
  d.world = std::make_unique<World>(d.config.world, d.registry, &d.tee);
  d.digest_value.store(d.writer.digest().value());

  const tcp::endpoint endpoint(net::ip::make_address(d.options.address), d.options.port);
  d.acceptor.emplace(net::make_strand(d.ioc));
  d.acceptor->open(endpoint.protocol());
  d.acceptor->set_option(net::socket_base::reuse_address(true));
  d.acceptor->bind(endpoint);
  d.acceptor->listen(net::socket_base::max_listen_connections);
  d.do_accept();

  d.started = true;
  d.net_thread = std::thread([&d] { d.ioc.run(); });
  d.sim_thread = std::thread([&d] { d.sim_loop(); });
}

void ControlServer::stop() {
  Impl& d = *impl_;
  if (!d.started || d.stopped) return;
  d.stopped = true;
  {
    std::lock_guard lock(d.mutex);
    d.stopping = true;
  }
  d.wake.notify_all();
  d.sim_thread.join();

  const std::uint64_t ticks = d.world->clock().tick();
  if (ticks > 0) {
    d.metrics.finish(ticks - 1);
    write_summary_records(d.writer, d.metrics.summary());
  }
  if (d.options.trace != nullptr) d.options.trace->flush();
  d.digest_value.store(d.writer.digest().value());

  net::post(d.ioc, [&d] {
    beast::error_code ec;
    d.acceptor->close(ec);
  });
  d.ioc.stop();
  d.net_thread.join();
}

std::uint16_t ControlServer::port() const {
  return impl_->acceptor ? impl_->acceptor->local_endpoint().port() : 0;
}

std::uint64_t ControlServer::tick() const { return impl_->tick.load(); }
bool ControlServer::paused() const { return impl_->paused.load(); }

std::vector<ScriptEntry> ControlServer::recorded_script() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->recorded;
}

std::string ControlServer::digest() const { return digest_hex(impl_->digest_value.load()); }

std::size_t ControlServer::dropped_snapshots() const { return impl_->dropped_snapshots.load(); }

}  // namespace pogosim
