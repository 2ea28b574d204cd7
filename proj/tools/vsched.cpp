// vsched: run, explore and diff designs, or serve the stepping protocol.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "vsched/transport.hpp"
#include "vsched/vsched.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDesign = 1;
constexpr int kExitLimit = 2;
constexpr int kExitUsage = 64;

struct Common {
  std::string file;
  std::string top;
  std::string mode = "repaired";
  std::string format = "text";
  vsched::Limits limits;
};

void add_common(CLI::App* app, Common& c, bool with_mode) {
  app->add_option("file", c.file, "design source")->required();
  app->add_option("--top", c.top, "top module (default: sole module, or `top`)");
  if (with_mode)
    app->add_option("--mode", c.mode, "scheduling semantics")
        ->check(CLI::IsMember({"repaired", "permissive"}))
        ->capture_default_str();
  app->add_option("--max-time", c.limits.max_time, "last simulation time that may run")->capture_default_str();
  app->add_option("--max-events", c.limits.max_events, "scheduler steps per run")->capture_default_str();
  app->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

vsched::Mode parse_mode(const std::string& m) {
  return m == "permissive" ? vsched::Mode::Permissive : vsched::Mode::Repaired;
}

std::optional<vsched::Loaded> load(const Common& c) {
  try {
    vsched::ElabOptions opts;
    opts.top = c.top;
    vsched::Loaded l = vsched::load_design(vsched::read_file(c.file), opts);
    for (const auto& w : l.elab.warnings) std::cerr << w.format(c.file) << "\n";
    return l;
  } catch (const vsched::Error& e) {
    std::cerr << e.format(c.file) << "\n";
    return std::nullopt;
  }
}

int exit_for(vsched::RunStatus s) {
  return s == vsched::RunStatus::Finished ? kExitOk : kExitLimit;
}

int cmd_run(const Common& c, std::optional<uint64_t> seed) {
  auto l = load(c);
  if (!l) return kExitDesign;
  auto prog = vsched::compile(*l, vsched::semantics_for(parse_mode(c.mode)));
  vsched::Trace t = seed ? vsched::run_seeded(prog, *seed, c.limits) : vsched::run_fifo(prog, c.limits);
  if (c.format == "json") {
    nlohmann::json j = vsched::trace_to_json(t);
    if (seed) j["seed"] = *seed;
    j["mode"] = c.mode;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& line : t.output) std::cout << line << "\n";
  }
  if (t.status == vsched::RunStatus::Finished) {
    if (t.reason == "$finish") std::cerr << c.file << ": $finish called at " << t.time << "\n";
  } else {
    std::cerr << c.file << ": error: " << t.reason << " (time " << t.time << ")\n";
  }
  return exit_for(t.status);
}

int cmd_explore(const Common& c, bool no_dedup) {
  auto l = load(c);
  if (!l) return kExitDesign;
  auto prog = vsched::compile(*l, vsched::semantics_for(parse_mode(c.mode)));
  vsched::ExplorationReport r = vsched::explore(prog, c.limits, !no_dedup);
  if (c.format == "json") std::cout << vsched::report_to_json(r).dump(2) << "\n";
  else std::cout << vsched::report_to_text(r);
  if (r.state_limit_hit) std::cerr << c.file << ": warning: state limit reached, report is partial\n";
  return r.state_limit_hit || r.run_limit_hit ? kExitLimit : kExitOk;
}

int cmd_diff(const Common& c) {
  auto l = load(c);
  if (!l) return kExitDesign;
  vsched::DiffReport d = vsched::diff_modes(l->elab, c.limits, l->normalized);
  if (c.format == "json") std::cout << vsched::diff_to_json(d).dump(2) << "\n";
  else std::cout << vsched::diff_to_text(d);
  return d.repaired.state_limit_hit || d.permissive.state_limit_hit || d.repaired.run_limit_hit ||
                 d.permissive.run_limit_hit
             ? kExitLimit
             : kExitOk;
}

int cmd_serve(std::optional<uint16_t> port) {
  if (!port) {
    vsched::serve_stream(std::cin, std::cout);
    return kExitOk;
  }
  try {
    vsched::ws::Server server(*port);
    std::cerr << "vsched: serving vv/1 over WebSocket on 127.0.0.1:" << server.port() << "\n";
    server.serve();
  } catch (const std::exception& e) {
    std::cerr << "vsched: error: " << e.what() << "\n";
    return kExitDesign;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable scheduling semantics for a synthesisable Verilog subset"};
  app.require_subcommand(1);

  Common run_c, explore_c, diff_c;
  std::optional<uint64_t> seed;
  bool no_dedup = false;
  std::optional<uint16_t> port;

  auto* run = app.add_subcommand("run", "simulate once and print the design's output");
  add_common(run, run_c, true);
  run->add_option("--seed", seed, "pick uniformly among enabled events (default: queue order)");

  auto* explore = app.add_subcommand("explore", "enumerate every schedule");
  add_common(explore, explore_c, true);
  explore->add_option("--max-states", explore_c.limits.max_states, "distinct states to visit")
      ->capture_default_str();
  explore->add_flag("--no-dedup", no_dedup, "do not merge converging schedules");

  auto* diff = app.add_subcommand("diff", "compare repaired and permissive reachable outputs");
  add_common(diff, diff_c, false);
  diff->add_option("--max-states", diff_c.limits.max_states, "distinct states to visit per mode")
      ->capture_default_str();

  auto* serve = app.add_subcommand("serve", "stepping session over stdio, or WebSocket with --port");
  serve->add_option("--port", port, "listen on 127.0.0.1:<port>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_c, seed);
    if (*explore) return cmd_explore(explore_c, no_dedup);
    if (*diff) return cmd_diff(diff_c);
    return cmd_serve(port);
  } catch (const vsched::Error& e) {
    std::cerr << "vsched: error: " << e.what() << "\n";
    return kExitLimit;
  }
}
