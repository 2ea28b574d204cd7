#pragma once

// Interactive stepping: serialisable snapshots of a running simulation and a
// command handler speaking the "vv/1" JSON envelope.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "explorer.hpp"
#include "frontend.hpp"

namespace vsched {

inline constexpr const char* kProtocol = "vv/1";

struct SnapEvent {
  std::string kind;
  std::string text;
  std::string choice;  // empty unless enabled
  bool operator==(const SnapEvent&) const = default;
};

struct SnapSlot {
  uint64_t time = 0;
  std::vector<SnapEvent> active, inactive, nba;
  std::string choice;  // advance-region id, when enabled
  bool operator==(const SnapSlot&) const = default;
};

struct SnapObject {
  std::string name, kind, value;
  bool operator==(const SnapObject&) const = default;
};

struct SnapDriver {
  std::string target, expr, value;
  bool operator==(const SnapDriver&) const = default;
};

struct SnapProcess {
  int index = 0;
  std::string kind;
  std::string loc;     // of the statement at pc; empty once finished
  std::string stmt;    // head of that statement
  std::string status;
  bool operator==(const SnapProcess&) const = default;
};

struct SnapMonitor {
  int process = 0;
  std::string loc;
  std::string stmt;
  bool dirty = false;
  std::string choice;
  bool operator==(const SnapMonitor&) const = default;
};

struct SnapChoice {
  std::string id, label;
  bool operator==(const SnapChoice&) const = default;
};

struct Snapshot {
  std::string protocol = kProtocol;
  uint64_t rev = 0;
  uint64_t time = 0;
  std::string status, reason, mode;
  std::vector<SnapObject> objects;
  std::vector<SnapDriver> drivers;
  std::vector<SnapProcess> processes;
  std::vector<SnapSlot> queue;
  std::optional<SnapMonitor> monitor;
  std::vector<SnapChoice> choices;
  std::string time_choice;  // advance-time id, when enabled
  std::vector<std::string> output;
  std::vector<std::string> warnings;
  std::string source;
  bool operator==(const Snapshot&) const = default;
};

inline void to_json(nlohmann::json& j, const SnapEvent& e) {
  j = {{"kind", e.kind}, {"text", e.text}, {"choice", e.choice}};
}
inline void from_json(const nlohmann::json& j, SnapEvent& e) {
  j.at("kind").get_to(e.kind);
  j.at("text").get_to(e.text);
  j.at("choice").get_to(e.choice);
}
inline void to_json(nlohmann::json& j, const SnapSlot& s) {
  j = {{"time", s.time}, {"active", s.active}, {"inactive", s.inactive}, {"nba", s.nba}, {"choice", s.choice}};
}
inline void from_json(const nlohmann::json& j, SnapSlot& s) {
  j.at("time").get_to(s.time);
  j.at("active").get_to(s.active);
  j.at("inactive").get_to(s.inactive);
  j.at("nba").get_to(s.nba);
  j.at("choice").get_to(s.choice);
}
inline void to_json(nlohmann::json& j, const SnapObject& o) {
  j = {{"name", o.name}, {"kind", o.kind}, {"value", o.value}};
}
inline void from_json(const nlohmann::json& j, SnapObject& o) {
  j.at("name").get_to(o.name);
  j.at("kind").get_to(o.kind);
  j.at("value").get_to(o.value);
}
inline void to_json(nlohmann::json& j, const SnapDriver& d) {
  j = {{"target", d.target}, {"expr", d.expr}, {"value", d.value}};
}
inline void from_json(const nlohmann::json& j, SnapDriver& d) {
  j.at("target").get_to(d.target);
  j.at("expr").get_to(d.expr);
  j.at("value").get_to(d.value);
}
inline void to_json(nlohmann::json& j, const SnapProcess& p) {
  j = {{"index", p.index}, {"kind", p.kind}, {"loc", p.loc}, {"stmt", p.stmt}, {"status", p.status}};
}
inline void from_json(const nlohmann::json& j, SnapProcess& p) {
  j.at("index").get_to(p.index);
  j.at("kind").get_to(p.kind);
  j.at("loc").get_to(p.loc);
  j.at("stmt").get_to(p.stmt);
  j.at("status").get_to(p.status);
}
inline void to_json(nlohmann::json& j, const SnapMonitor& m) {
  j = {{"process", m.process}, {"loc", m.loc}, {"stmt", m.stmt}, {"dirty", m.dirty}, {"choice", m.choice}};
}
inline void from_json(const nlohmann::json& j, SnapMonitor& m) {
  j.at("process").get_to(m.process);
  j.at("loc").get_to(m.loc);
  j.at("stmt").get_to(m.stmt);
  j.at("dirty").get_to(m.dirty);
  j.at("choice").get_to(m.choice);
}
inline void to_json(nlohmann::json& j, const SnapChoice& c) { j = {{"id", c.id}, {"label", c.label}}; }
inline void from_json(const nlohmann::json& j, SnapChoice& c) {
  j.at("id").get_to(c.id);
  j.at("label").get_to(c.label);
}
inline void to_json(nlohmann::json& j, const Snapshot& s) {
  j = {{"protocol", s.protocol},
       {"rev", s.rev},
       {"time", s.time},
       {"status", s.status},
       {"reason", s.reason},
       {"mode", s.mode},
       {"objects", s.objects},
       {"drivers", s.drivers},
       {"processes", s.processes},
       {"queue", s.queue},
       {"monitor", s.monitor ? nlohmann::json(*s.monitor) : nlohmann::json(nullptr)},
       {"choices", s.choices},
       {"time_choice", s.time_choice},
       {"output", s.output},
       {"warnings", s.warnings},
       {"source", s.source}};
}
inline void from_json(const nlohmann::json& j, Snapshot& s) {
  j.at("protocol").get_to(s.protocol);
  j.at("rev").get_to(s.rev);
  j.at("time").get_to(s.time);
  j.at("status").get_to(s.status);
  j.at("reason").get_to(s.reason);
  j.at("mode").get_to(s.mode);
  j.at("objects").get_to(s.objects);
  j.at("drivers").get_to(s.drivers);
  j.at("processes").get_to(s.processes);
  j.at("queue").get_to(s.queue);
  if (j.at("monitor").is_null()) s.monitor.reset();
  else s.monitor = j.at("monitor").get<SnapMonitor>();
  j.at("choices").get_to(s.choices);
  j.at("time_choice").get_to(s.time_choice);
  j.at("output").get_to(s.output);
  j.at("warnings").get_to(s.warnings);
  j.at("source").get_to(s.source);
}

// ---------------------------------------------------------------------------
// Building snapshots
// ---------------------------------------------------------------------------

inline std::string choice_id(uint64_t rev, const Choice& c) {
  std::string p = std::to_string(rev) + ":";
  switch (c.kind) {
    case ChoiceKind::ExecuteActive: return p + "a" + std::to_string(c.index);
    case ChoiceKind::AdvanceRegion: return p + "region";
    case ChoiceKind::AdvanceTime: return p + "time";
    case ChoiceKind::EndOfSlotMonitor: return p + "monitor";
  }
  return p;
}

inline std::string describe_event(const Program& prog, const Event& e) {
  auto storage = [&](int s) { return prog.storages()[static_cast<size_t>(s)].name; };
  switch (e.kind) {
    case EventKind::ContUpdate: {
      const ProgDriver& d = prog.drivers()[static_cast<size_t>(e.index)];
      return storage(d.storage) + " <- " + e.value.str() + " (driver " + std::to_string(e.index) + ")";
    }
    case EventKind::BlockUpdate:
      return storage(e.target) + " = " + e.value.str() + " then resume " +
             prog.processes()[static_cast<size_t>(e.index)].label;
    case EventKind::NBA: return storage(e.target) + " <= " + e.value.str();
    case EventKind::Evaluation:
    case EventKind::DelayedEvaluation: return prog.processes()[static_cast<size_t>(e.index)].label;
    case EventKind::Group: {
      std::string out = "[";
      for (size_t i = 0; i < e.group.size(); ++i) {
        if (i) out += ", ";
        out += storage(e.group[i].target) + " <= " + e.group[i].value.str();
      }
      return out + "]";
    }
  }
  return "?";
}

inline std::string describe_choice(const SimState& st, const Choice& c) {
  switch (c.kind) {
    case ChoiceKind::ExecuteActive: {
      const Event& e = st.queue.at(st.time).active[c.index];
      return std::string(event_kind_name(e.kind)) + " " + describe_event(*st.prog, e);
    }
    case ChoiceKind::AdvanceRegion: {
      const TimeSlot& s = st.queue.at(st.time);
      return s.inactive.empty() ? "move nba region to active" : "move inactive region to active";
    }
    case ChoiceKind::AdvanceTime: return "advance time to " + std::to_string(c.time);
    case ChoiceKind::EndOfSlotMonitor: return "emit monitor";
  }
  return "?";
}

inline Snapshot make_snapshot(const SimState& st, uint64_t rev, const std::vector<Warning>& warnings = {},
                              const std::string& file = "design") {
  const Program& prog = *st.prog;
  Snapshot s;
  s.rev = rev;
  s.time = st.time;
  s.status = run_status_name(st.status);
  s.reason = st.reason;
  s.mode = prog.semantics() == Semantics::repaired()     ? "repaired"
           : prog.semantics() == Semantics::permissive() ? "permissive"
                                                         : "custom";
  for (size_t i = 0; i < prog.elab().objects.size(); ++i) {
    const ElabObject& o = prog.elab().objects[i];
    std::string kind = data_kind_name(o.kind);
    if (o.array) kind += "[]";
    s.objects.push_back({o.name, kind, st.env[static_cast<size_t>(prog.storage_of(static_cast<int>(i)))].str()});
  }
  for (size_t d = 0; d < prog.drivers().size(); ++d) {
    const ProgDriver& pd = prog.drivers()[d];
    s.drivers.push_back({prog.elab().objects[static_cast<size_t>(pd.src->target)].name,
                         print_expr(pd.src->rhs), st.driver_vals[d].str()});
  }
  for (size_t p = 0; p < prog.processes().size(); ++p) {
    const ProgProcess& pp = prog.processes()[p];
    const ProcState& ps = st.procs[p];
    SnapProcess sp;
    sp.index = static_cast<int>(p);
    sp.kind = proc_kind_name(pp.src->kind);
    if (ps.pc >= 0 && ps.status != ProcStatus::Finished) {
      const Stmt& at = *pp.flat[static_cast<size_t>(ps.pc)].stmt;
      sp.loc = at.loc.str();
      sp.stmt = stmt_head(at);
    }
    sp.status = proc_status_name(ps.status);
    s.processes.push_back(std::move(sp));
  }

  const auto choices = enabled_choices(st);
  auto enabled = [&](const Choice& c) {
    return std::find(choices.begin(), choices.end(), c) != choices.end();
  };
  for (const auto& [t, slot] : st.queue) {
    SnapSlot ss;
    ss.time = t;
    const bool current = t == st.time;
    for (size_t i = 0; i < slot.active.size(); ++i) {
      const Event& e = slot.active[i];
      Choice c = Choice::execute(i);
      ss.active.push_back({event_kind_name(e.kind), describe_event(prog, e),
                           current && enabled(c) ? choice_id(rev, c) : ""});
    }
    for (const auto& e : slot.inactive) ss.inactive.push_back({event_kind_name(e.kind), describe_event(prog, e), ""});
    for (const auto& e : slot.nba) ss.nba.push_back({event_kind_name(e.kind), describe_event(prog, e), ""});
    if (current && enabled(Choice::advance_region())) ss.choice = choice_id(rev, Choice::advance_region());
    s.queue.push_back(std::move(ss));
  }
  if (st.monitor) {
    const ProgProcess& pp = prog.processes()[static_cast<size_t>(st.monitor->pid)];
    const Stmt& m = *pp.flat[static_cast<size_t>(st.monitor->pc)].stmt;
    SnapMonitor sm{st.monitor->pid, m.loc.str(), stmt_head(m), st.monitor->dirty, ""};
    if (enabled(Choice::monitor())) sm.choice = choice_id(rev, Choice::monitor());
    s.monitor = sm;
  }
  for (const auto& c : choices) {
    s.choices.push_back({choice_id(rev, c), describe_choice(st, c)});
    if (c.kind == ChoiceKind::AdvanceTime) s.time_choice = choice_id(rev, c);
  }
  s.output = st.output;
  for (const auto& w : warnings) s.warnings.push_back(w.format(file));
  s.source = prog.source();
  return s;
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

class SessionError : public std::runtime_error {
 public:
  SessionError(std::string code, const std::string& message, std::vector<std::string> diagnostics = {})
      : std::runtime_error(message), code_(std::move(code)), diagnostics_(std::move(diagnostics)) {}
  const std::string& code() const { return code_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::string code_;
  std::vector<std::string> diagnostics_;
};

class Session {
 public:
  bool loaded() const { return prog_ != nullptr; }
  const SimState& state() const { return st_; }
  uint64_t rev() const { return rev_; }

  // A failed load leaves any previously loaded design in place.
  Snapshot load(const std::string& source, const std::string& top = {}, Mode mode = Mode::Repaired,
                const std::string& file = "design") {
    std::shared_ptr<const Program> prog;
    std::vector<Warning> warnings;
    try {
      ElabOptions opts;
      opts.top = top;
      Loaded l = load_design(source, opts);
      warnings = l.elab.warnings;
      prog = compile(l, semantics_for(mode));
    } catch (const Error& e) {
      throw SessionError("load", e.what(), {e.format(file)});
    }
    prog_ = std::move(prog);
    warnings_ = std::move(warnings);
    file_ = file;
    return reset();
  }

  Snapshot reset() {
    require_loaded();
    st_ = initialize(prog_);
    finish_if_quiescent(st_);
    ++rev_;
    return snapshot();
  }

  Snapshot snapshot() const {
    require_loaded();
    return make_snapshot(st_, rev_, warnings_, file_);
  }

  Snapshot step(const std::string& id) {
    require_loaded();
    if (st_.status != RunStatus::Running)
      throw SessionError("finished", "simulation is " + std::string(run_status_name(st_.status)));
    const auto colon = id.find(':');
    if (colon == std::string::npos) throw SessionError("unknown-choice", "malformed choice id '" + id + "'");
    if (id.substr(0, colon) != std::to_string(rev_))
      throw SessionError("stale-choice", "choice id '" + id + "' is from an older snapshot");
    for (const auto& c : enabled_choices(st_)) {
      if (choice_id(rev_, c) != id) continue;
      apply(st_, c);
      finish_if_quiescent(st_);
      ++rev_;
      return snapshot();
    }
    throw SessionError("unknown-choice", "choice id '" + id + "' is not enabled");
  }

  // One request envelope in, one response envelope out.
  nlohmann::json handle(const nlohmann::json& req) {
    nlohmann::json id = req.is_object() && req.contains("id") ? req["id"] : nlohmann::json(nullptr);
    try {
      if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string())
        throw SessionError("bad-request", "request needs a string \"cmd\"");
      const std::string cmd = req["cmd"].get<std::string>();
      Snapshot snap;
      if (cmd == "load") {
        if (!req.contains("source") || !req["source"].is_string())
          throw SessionError("bad-request", "load needs a string \"source\"");
        Mode mode = Mode::Repaired;
        if (req.contains("mode")) {
          const std::string m = req["mode"].get<std::string>();
          if (m == "permissive") mode = Mode::Permissive;
          else if (m != "repaired") throw SessionError("bad-request", "unknown mode '" + m + "'");
        }
        snap = load(req["source"].get<std::string>(), req.value("top", std::string()), mode,
                    req.value("file", std::string("design")));
      } else if (cmd == "step") {
        if (!req.contains("choice") || !req["choice"].is_string())
          throw SessionError("bad-request", "step needs a string \"choice\"");
        snap = step(req["choice"].get<std::string>());
      } else if (cmd == "reset") {
        snap = reset();
      } else if (cmd == "snapshot") {
        snap = snapshot();
      } else {
        throw SessionError("bad-request", "unknown command '" + cmd + "'");
      }
      return {{"id", id}, {"ok", snap}};
    } catch (const SessionError& e) {
      return {{"id", id},
              {"err", {{"code", e.code()}, {"message", e.what()}, {"diagnostics", e.diagnostics()}}}};
    } catch (const nlohmann::json::exception& e) {
      return {{"id", id}, {"err", {{"code", "bad-request"}, {"message", e.what()}, {"diagnostics", {}}}}};
    }
  }

  // Raw line in, raw line out; malformed JSON is answered, not fatal.
  std::string handle_line(const std::string& line) {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      return nlohmann::json{{"id", nullptr},
                            {"err", {{"code", "bad-json"}, {"message", e.what()}, {"diagnostics", {}}}}}
          .dump();
    }
    return handle(req).dump();
  }

 private:
  std::shared_ptr<const Program> prog_;
  SimState st_;
  std::vector<Warning> warnings_;
  std::string file_ = "design";
  uint64_t rev_ = 0;

  void require_loaded() const {
    if (!prog_) throw SessionError("not-loaded", "no design loaded");
  }
};

}  // namespace vsched
