// pogosim command line: run, replay, metrics, serve.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "pogosim/control_server.hpp"
#include "pogosim/metrics.hpp"
#include "pogosim/replay.hpp"
#include "pogosim/runner.hpp"
#include "pogosim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTruncated = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

pogosim::ScenarioConfig load_with_script(const std::string& scenario, const std::string& script) {
  pogosim::ScenarioConfig cfg = pogosim::load_scenario(scenario);
  if (!script.empty()) {
    std::ifstream in = open_input(script);
    pogosim::Json j;
    try {
      j = pogosim::Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw pogosim::ScenarioError(pogosim::ScenarioError::Kind::syntax, "", script + ": " + e.what());
    }
    pogosim::append_script(cfg, j, "script-file");
  }
  return cfg;
}

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string trace;
  std::string metrics;
  std::optional<double> until;
  std::string script;
};

int cmd_run(const RunArgs& a) {
  const pogosim::ScenarioConfig cfg = load_with_script(a.scenario, a.script);
  std::ofstream trace_file;
  std::ofstream metrics_file;
  pogosim::RunOptions opts;
  opts.seed = a.seed;
  opts.until = a.until;
  if (!a.trace.empty()) {
    trace_file = open_output(a.trace);
    opts.trace = &trace_file;
  }
  if (!a.metrics.empty()) {
    metrics_file = open_output(a.metrics);
    opts.metrics = &metrics_file;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const pogosim::RunResult r = pogosim::run_headless(cfg, opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "ticks " << r.ticks << "\n";
  std::cout << "trace_lines " << r.trace_lines << "\n";
  std::cout << "wall_seconds " << wall << "\n";
  std::cout << "digest " << r.digest << "\n";
  return kExitOk;
}

int cmd_replay(const std::string& path, const std::string& kinds, bool snapshots) {
  std::ifstream in = open_input(path);
  const pogosim::ReplayResult r = pogosim::replay_trace(in, pogosim::parse_kind_list(kinds));
  if (snapshots) {
    for (const pogosim::SnapshotView& s : r.snapshots) std::cout << pogosim::snapshot_to_json(s).dump() << "\n";
  } else {
    for (const pogosim::TraceRecord& rec : r.records) std::cout << rec.to_line() << "\n";
  }
  if (r.truncated) {
    std::cerr << "trace truncated at line " << r.bad_line << " (" << r.error << "); last complete tick "
              << r.last_complete_tick << "\n";
    return kExitTruncated;
  }
  return kExitOk;
}

int cmd_metrics(const std::string& path) {
  std::ifstream in = open_input(path);
  const pogosim::TraceReadResult t = pogosim::read_trace(in);
  pogosim::write_metrics_csv(std::cout, pogosim::compute_metrics(t.records));
  if (t.truncated) {
    std::cerr << "trace truncated at line " << t.bad_line << "; metrics cover ticks up to " << t.last_complete_tick
              << "\n";
    return kExitTruncated;
  }
  return kExitOk;
}

struct ServeArgs {
  std::string scenario;
  std::uint16_t port = 8765;
  std::string address = "127.0.0.1";
  double timescale = 1.0;
  bool paused = false;
  std::string trace;
  std::string script_out;
};

int cmd_serve(const ServeArgs& a) {
  pogosim::ScenarioConfig cfg = pogosim::load_scenario(a.scenario);
  std::ofstream trace_file;
  pogosim::ServeOptions opts;
  opts.address = a.address;
  opts.port = a.port;
  opts.timescale = a.timescale;
  opts.start_paused = a.paused;
  if (!a.trace.empty()) {
    trace_file = open_output(a.trace);
    opts.trace = &trace_file;
  }
  pogosim::ControlServer server(std::move(cfg), opts);
  server.start();
  std::cout << "listening on ws://" << a.address << ":" << server.port() << "/" << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();

  if (!a.script_out.empty()) {
    std::ofstream out = open_output(a.script_out);
    out << pogosim::script_to_json(server.recorded_script()).dump(2) << "\n";
  }
  std::cout << "ticks " << server.tick() << "\n";
  std::cout << "digest " << server.digest() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic Pogobot swarm simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario headless and print the trace digest");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--trace", run.trace, "Write the JSON Lines trace here");
  run_cmd->add_option("--metrics", run.metrics, "Write metrics CSV here");
  run_cmd->add_option("--until", run.until, "Stop after this many simulated seconds");
  run_cmd->add_option("--script", run.script, "Extra command script (JSON list)");

  std::string replay_path;
  std::string replay_kinds;
  bool replay_snapshots = false;
  auto* replay_cmd = app.add_subcommand("replay", "Re-emit trace records or rebuilt snapshots");
  replay_cmd->add_option("trace", replay_path, "Trace file")->required();
  replay_cmd->add_option("--kinds", replay_kinds, "Comma separated record kinds to keep");
  replay_cmd->add_flag("--snapshots", replay_snapshots, "Print reconstructed snapshots instead of records");

  std::string metrics_path;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute metrics CSV from a trace");
  metrics_cmd->add_option("trace", metrics_path, "Trace file")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run a paced simulation behind a WebSocket control endpoint");
  serve_cmd->add_option("scenario", serve.scenario, "Scenario JSON file")->required();
  serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--address", serve.address, "Listen address");
  serve_cmd->add_option("--timescale", serve.timescale, "Simulated seconds per wall second")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_flag("--paused", serve.paused, "Start paused");
  serve_cmd->add_option("--trace", serve.trace, "Write the JSON Lines trace here");
  serve_cmd->add_option("--script-out", serve.script_out, "Write accepted operator commands here on exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*replay_cmd) return cmd_replay(replay_path, replay_kinds, replay_snapshots);
    if (*metrics_cmd) return cmd_metrics(metrics_path);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const pogosim::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
