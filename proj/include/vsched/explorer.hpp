#pragma once

// Seeded runs, exhaustive schedule enumeration and repaired/permissive
// comparison.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "kernel.hpp"

namespace vsched {

struct Limits {
  uint64_t max_events = 1000000;  // choices per run (per path when exploring)
  uint64_t max_time = 10000;
  uint64_t max_states = 1000000;  // distinct states visited by explore
};

struct TraceStep {
  Choice choice;
  std::vector<std::string> lines;  // output produced by this step
};

struct Trace {
  std::vector<TraceStep> steps;
  RunStatus status = RunStatus::Running;
  std::string reason;
  uint64_t time = 0;
  std::vector<std::string> output;

  std::vector<Choice> choices() const {
    std::vector<Choice> out;
    for (const auto& s : steps) out.push_back(s.choice);
    return out;
  }
};

inline std::string output_text(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace detail {

// Applies `c` unless a limit forbids it, in which case the run stops with
// status Limit.
inline void guarded_apply(SimState& st, const Choice& c, uint64_t steps_taken, const Limits& lim) {
  if (steps_taken >= lim.max_events) {
    st.status = RunStatus::Limit;
    st.reason = "event limit of " + std::to_string(lim.max_events) + " reached";
    return;
  }
  if (c.kind == ChoiceKind::AdvanceTime && c.time > lim.max_time) {
    st.status = RunStatus::Limit;
    st.reason = "time limit of " + std::to_string(lim.max_time) + " reached";
    return;
  }
  apply(st, c);
}

inline void record_step(Trace& t, const Choice& c, const SimState& st, size_t before) {
  TraceStep s{c, {}};
  s.lines.assign(st.output.begin() + static_cast<std::ptrdiff_t>(before), st.output.end());
  t.steps.push_back(std::move(s));
}

inline void close_trace(Trace& t, const SimState& st) {
  t.status = st.status;
  t.reason = st.reason;
  t.time = st.time;
  t.output = st.output;
}

}  // namespace detail

// Runs to completion; `pick(choices)` returns an index into the enabled set.
template <class Pick>
Trace run_with(std::shared_ptr<const Program> prog, const Limits& lim, Pick&& pick,
               SimState* final_state = nullptr) {
  SimState st = initialize(std::move(prog));
  Trace t;
  while (st.status == RunStatus::Running) {
    auto cs = enabled_choices(st);
    if (cs.empty()) {
      size_t before = st.output.size();
      end_simulation(st, "event queue exhausted");
      if (st.output.size() > before && !t.steps.empty())
        for (size_t i = before; i < st.output.size(); ++i) t.steps.back().lines.push_back(st.output[i]);
      break;
    }
    const Choice c = cs[pick(cs) % cs.size()];
    size_t before = st.output.size();
    // A choice refused by a limit is still recorded so replays stop at the
    // same point.
    detail::guarded_apply(st, c, t.steps.size(), lim);
    detail::record_step(t, c, st, before);
  }
  detail::close_trace(t, st);
  if (final_state) *final_state = std::move(st);
  return t;
}

// Uniform choice from a 64-bit Mersenne Twister seeded with `seed`.
inline Trace run_seeded(std::shared_ptr<const Program> prog, uint64_t seed, const Limits& lim = {}) {
  std::mt19937_64 rng(seed);
  return run_with(std::move(prog), lim, [&](const std::vector<Choice>& cs) {
    return static_cast<size_t>(rng() % cs.size());
  });
}

// Always the first enabled choice: queue order.
inline Trace run_fifo(std::shared_ptr<const Program> prog, const Limits& lim = {}) {
  return run_with(std::move(prog), lim, [](const std::vector<Choice>&) { return size_t{0}; });
}

// Re-executes recorded choices from the initial state.
inline Trace replay(std::shared_ptr<const Program> prog, const std::vector<Choice>& choices,
                    const Limits& lim = {}, SimState* final_state = nullptr) {
  size_t next = 0;
  Trace t = run_with(std::move(prog), lim, [&](const std::vector<Choice>& cs) -> size_t {
    if (next >= choices.size()) throw KernelError("replay ran out of recorded choices");
    const Choice& want = choices[next++];
    auto it = std::find(cs.begin(), cs.end(), want);
    if (it == cs.end()) throw KernelError("recorded choice " + want.str() + " is not enabled");
    return static_cast<size_t>(it - cs.begin());
  }, final_state);
  if (next != choices.size()) throw KernelError("replay finished before using every recorded choice");
  return t;
}

struct Outcome {
  RunStatus status = RunStatus::Finished;
  std::string output;   // newline-terminated lines
  uint64_t schedules = 0;
  Trace witness;
};

struct ExplorationReport {
  std::string mode;
  std::vector<Outcome> outcomes;  // sorted by (status, output)
  uint64_t schedules = 0;         // saturates at uint64 max
  uint64_t states = 0;
  bool dedup = true;
  bool state_limit_hit = false;
  bool run_limit_hit = false;  // some schedule hit the event or time limit
  bool cycle = false;          // a schedule revisits a state on its own path

  bool complete() const { return !state_limit_hit && !run_limit_hit && !cycle; }

  std::vector<std::string> outputs() const {
    std::vector<std::string> out;
    for (const auto& o : outcomes) out.push_back(o.output);
    return out;
  }
  const Outcome* find(const std::string& output) const {
    for (const auto& o : outcomes)
      if (o.output == output) return &o;
    return nullptr;
  }
};

namespace detail {

inline uint64_t sat_add(uint64_t a, uint64_t b) {
  return a > std::numeric_limits<uint64_t>::max() - b ? std::numeric_limits<uint64_t>::max() : a + b;
}

class Explorer {
 public:
  using Visit = std::function<void(const SimState&)>;

  Explorer(std::shared_ptr<const Program> prog, const Limits& lim, bool dedup, Visit visit)
      : prog_(std::move(prog)), lim_(lim), dedup_(dedup), visit_(std::move(visit)) {}

  ExplorationReport run() {
    ExplorationReport rep;
    rep.dedup = dedup_;
    rep.mode = prog_->semantics() == Semantics::repaired()     ? "repaired"
               : prog_->semantics() == Semantics::permissive() ? "permissive"
                                                               : "custom";
    Counts root = explore_from(initialize(prog_));
    for (const auto& [id, n] : root) rep.schedules = sat_add(rep.schedules, n);
    for (size_t i = 0; i < keys_.size(); ++i) {
      Outcome o;
      o.status = keys_[i].first;
      o.output = keys_[i].second;
      auto it = root.find(static_cast<int>(i));
      o.schedules = it == root.end() ? 0 : it->second;
      o.witness = replay(prog_, witnesses_[i], lim_);
      rep.outcomes.push_back(std::move(o));
    }
    std::sort(rep.outcomes.begin(), rep.outcomes.end(), [](const Outcome& a, const Outcome& b) {
      return std::tie(a.status, a.output) < std::tie(b.status, b.output);
    });
    rep.states = states_;
    rep.state_limit_hit = state_limit_hit_;
    rep.run_limit_hit = run_limit_hit_;
    rep.cycle = cycle_;
    return rep;
  }

 private:
  using Counts = std::map<int, uint64_t>;  // outcome id -> schedules
  struct Entry {
    bool done = false;
    Counts counts;
  };
  struct Frame {
    SimState st;
    std::vector<Choice> choices;
    size_t next = 0;
    Counts acc;
  };

  std::shared_ptr<const Program> prog_;
  Limits lim_;
  bool dedup_;
  Visit visit_;
  std::unordered_map<SimState, Entry> memo_;
  std::vector<std::pair<RunStatus, std::string>> keys_;
  std::vector<std::vector<Choice>> witnesses_;
  std::vector<Choice> path_;
  uint64_t states_ = 0;
  bool state_limit_hit_ = false, run_limit_hit_ = false, cycle_ = false;

  int outcome_id(const SimState& st) {
    std::pair<RunStatus, std::string> key{st.status, output_text(st.output)};
    for (size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] == key) return static_cast<int>(i);
    keys_.push_back(std::move(key));
    witnesses_.push_back(path_);
    return static_cast<int>(keys_.size() - 1);
  }

  // Settles a state: ends it if nothing is enabled. Returns its choices.
  std::vector<Choice> settle(SimState& st) {
    if (st.status != RunStatus::Running) return {};
    auto cs = enabled_choices(st);
    if (cs.empty()) end_simulation(st, "event queue exhausted");
    return cs;
  }

  static void merge(Counts& into, const Counts& from) {
    for (const auto& [id, n] : from) into[id] = sat_add(into[id], n);
  }

  Counts terminal(const SimState& st) {
    if (st.status == RunStatus::Limit) run_limit_hit_ = true;
    if (visit_) visit_(st);
    return Counts{{outcome_id(st), 1}};
  }

  Counts explore_from(SimState init) {
    std::vector<Frame> stack;
    Counts result;
    // Either returns the counts of a settled child or pushes it as a frame.
    auto enter = [&](SimState st) -> std::optional<Counts> {
      auto cs = settle(st);
      if (st.status != RunStatus::Running) return terminal(st);
      auto it = memo_.find(st);
      if (it != memo_.end()) {
        if (!it->second.done) {
          cycle_ = true;
          return Counts{};
        }
        return it->second.counts;
      }
      if (states_ >= lim_.max_states) {
        state_limit_hit_ = true;
        return Counts{};
      }
      ++states_;
      memo_.emplace(st, Entry{});
      stack.push_back(Frame{std::move(st), std::move(cs), 0, {}});
      return std::nullopt;
    };

    if (auto c = enter(std::move(init))) return *c;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == f.choices.size()) {
        Counts done = std::move(f.acc);
        auto it = memo_.find(f.st);
        if (dedup_) {
          it->second.done = true;
          it->second.counts = done;
        } else {
          memo_.erase(it);
        }
        stack.pop_back();
        if (!path_.empty()) path_.pop_back();
        if (stack.empty()) result = std::move(done);
        else merge(stack.back().acc, done);
        continue;
      }
      const Choice c = f.choices[f.next++];
      SimState child = f.st;
      detail::guarded_apply(child, c, path_.size(), lim_);
      path_.push_back(c);
      if (child.status == RunStatus::Limit) {
        merge(stack.back().acc, terminal(child));
        path_.pop_back();
        continue;
      }
      if (auto counts = enter(std::move(child))) {
        merge(stack.back().acc, *counts);
        path_.pop_back();
      }
    }
    return result;
  }
};

}  // namespace detail

// `on_terminal` sees every terminal state reached, once per arrival.
inline ExplorationReport explore(std::shared_ptr<const Program> prog, const Limits& lim = {},
                                 bool dedup = true,
                                 std::function<void(const SimState&)> on_terminal = {}) {
  return detail::Explorer(std::move(prog), lim, dedup, std::move(on_terminal)).run();
}

struct DiffReport {
  ExplorationReport repaired, permissive;
  std::vector<std::string> permissive_only;  // outputs
  std::vector<std::string> repaired_only;
};

inline DiffReport diff_modes(const ElabDesign& elab, const Limits& lim = {}, const std::string& source = {}) {
  DiffReport d;
  d.repaired = explore(make_program(elab, Semantics::repaired(), source), lim);
  d.permissive = explore(make_program(elab, Semantics::permissive(), source), lim);
  for (const auto& o : d.permissive.outcomes)
    if (!d.repaired.find(o.output)) d.permissive_only.push_back(o.output);
  for (const auto& o : d.repaired.outcomes)
    if (!d.permissive.find(o.output)) d.repaired_only.push_back(o.output);
  return d;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline nlohmann::json choice_to_json(const Choice& c) {
  switch (c.kind) {
    case ChoiceKind::ExecuteActive: return {{"kind", "active"}, {"index", c.index}};
    case ChoiceKind::AdvanceRegion: return {{"kind", "region"}};
    case ChoiceKind::AdvanceTime: return {{"kind", "time"}, {"time", c.time}};
    case ChoiceKind::EndOfSlotMonitor: return {{"kind", "monitor"}};
  }
  return {};
}

inline Choice choice_from_json(const nlohmann::json& j) {
  const std::string k = j.at("kind").get<std::string>();
  if (k == "active") return Choice::execute(j.at("index").get<size_t>());
  if (k == "region") return Choice::advance_region();
  if (k == "time") return Choice::advance_time(j.at("time").get<uint64_t>());
  if (k == "monitor") return Choice::monitor();
  throw KernelError("unknown choice kind '" + k + "'");
}

inline nlohmann::json trace_to_json(const Trace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) steps.push_back({{"choice", choice_to_json(s.choice)}, {"lines", s.lines}});
  return {{"status", run_status_name(t.status)},
          {"reason", t.reason},
          {"time", t.time},
          {"steps", std::move(steps)},
          {"output", t.output}};
}

inline nlohmann::json report_to_json(const ExplorationReport& r) {
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : r.outcomes)
    outs.push_back({{"status", run_status_name(o.status)},
                    {"output", o.output},
                    {"schedules", o.schedules},
                    {"witness", trace_to_json(o.witness)}});
  return {{"mode", r.mode},
          {"schedules", r.schedules},
          {"states", r.states},
          {"distinct_outputs", r.outcomes.size()},
          {"dedup", r.dedup},
          {"state_limit_hit", r.state_limit_hit},
          {"run_limit_hit", r.run_limit_hit},
          {"cycle", r.cycle},
          {"outcomes", std::move(outs)}};
}

inline nlohmann::json diff_to_json(const DiffReport& d) {
  return {{"repaired", report_to_json(d.repaired)},
          {"permissive", report_to_json(d.permissive)},
          {"permissive_only", d.permissive_only},
          {"repaired_only", d.repaired_only}};
}

inline std::string indent_output(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out += "    | " + line + "\n";
  return out;
}

inline std::string report_to_text(const ExplorationReport& r) {
  std::ostringstream os;
  os << "mode: " << r.mode << "\n";
  os << "schedules: " << r.schedules << "\n";
  os << "states: " << r.states << "\n";
  os << "distinct outputs: " << r.outcomes.size() << "\n";
  if (r.state_limit_hit) os << "warning: state limit reached, report is partial\n";
  if (r.run_limit_hit) os << "warning: some schedules hit the event or time limit\n";
  if (r.cycle) os << "warning: some schedules loop without progress\n";
  for (size_t i = 0; i < r.outcomes.size(); ++i) {
    const Outcome& o = r.outcomes[i];
    os << "outcome " << (i + 1) << ": " << run_status_name(o.status) << ", " << o.schedules
       << " schedule(s), witness " << o.witness.steps.size() << " step(s)\n";
    os << indent_output(o.output);
  }
  return os.str();
}

inline std::string diff_to_text(const DiffReport& d) {
  std::ostringstream os;
  os << "repaired: " << d.repaired.outcomes.size() << " distinct output(s), " << d.repaired.schedules
     << " schedule(s)\n";
  os << "permissive: " << d.permissive.outcomes.size() << " distinct output(s), "
     << d.permissive.schedules << " schedule(s)\n";
  os << "permissive only: " << d.permissive_only.size() << "\n";
  for (const auto& o : d.permissive_only) os << "  -\n" << indent_output(o);
  os << "repaired only: " << d.repaired_only.size() << "\n";
  for (const auto& o : d.repaired_only) os << "  -\n" << indent_output(o);
  return os.str();
}

}  // namespace vsched
