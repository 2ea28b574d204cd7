#pragma once

// Simulation state: a compiled program shared by every state, and the
// value-typed SimState that the kernel transforms.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elaborate.hpp"

namespace vsched {

// Which of the scheduling repairs are in force.
struct Semantics {
  bool preemption = false;   // yield to the scheduler after every statement
  bool group_nba = true;     // move the nba region to active as one group
  bool always_start = true;  // combinational always blocks run once at time 0

  static Semantics repaired() { return {false, true, true}; }
  static Semantics permissive() { return {true, false, true}; }
  bool operator==(const Semantics&) const = default;
};

enum class Mode { Repaired, Permissive };

inline Semantics semantics_for(Mode m) {
  return m == Mode::Repaired ? Semantics::repaired() : Semantics::permissive();
}

inline const char* mode_name(Mode m) { return m == Mode::Repaired ? "repaired" : "permissive"; }

// Rise, fall and turn-off delays; a missing spec is all zero.
struct DelayTriple {
  uint64_t rise = 0, fall = 0, turnoff = 0;

  static DelayTriple from_spec(const DelaySpec& d) {
    if (d.empty()) return {};
    if (d.size() == 1) return {d[0], d[0], d[0]};
    if (d.size() == 2) return {d[0], d[1], std::min(d[0], d[1])};
    return {d[0], d[1], d[2]};
  }
  DelayTriple operator+(const DelayTriple& o) const {
    return {rise + o.rise, fall + o.fall, turnoff + o.turnoff};
  }
  // Chosen by the new value's least significant bit.
  uint64_t for_value(const Value& v) const {
    switch (v.lsb()) {
      case Bit::One: return rise;
      case Bit::Zero: return fall;
      case Bit::Z: return turnoff;
      case Bit::X: return std::min({rise, fall, turnoff});
    }
    return 0;
  }
};

struct WatchTerm {
  EdgeQual edge = EdgeQual::None;
  const Expr* expr = nullptr;
  std::vector<int> reads;  // storages, sorted
};

struct FlatStmt {
  const Stmt* stmt = nullptr;
  int next = -1;                   // continuation once this statement completes
  std::vector<WatchTerm> watch;    // EventCtl, Wait
  std::vector<int> reads;          // union of watch reads, or $monitor argument reads
};

struct ProgProcess {
  const ElabProcess* src = nullptr;
  std::vector<FlatStmt> flat;  // indexed by pc
  int start_pc = 0;
  std::string label;
};

struct Storage {
  std::string name;            // alias-class representative
  bool net = false;
  NetType type = NetType::Wire;
  uint32_t width = 1;
  std::vector<int> objects;
  std::vector<int> drivers;
  Value init;
};

struct ProgDriver {
  const ElabDriver* src = nullptr;
  int storage = -1;
  uint32_t width = 1;
  DelayTriple delay;
};

// Everything static about a simulation. Immutable after construction and
// shared by all states derived from one initialisation.
class Program {
 public:
  Program(ElabDesign elab, Semantics sem, std::string source = {})
      : elab_(std::move(elab)), sem_(sem), source_(std::move(source)) {
    build();
  }
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;

  const ElabDesign& elab() const { return elab_; }
  const Semantics& semantics() const { return sem_; }
  const std::string& source() const { return source_; }

  const std::vector<Storage>& storages() const { return storages_; }
  const std::vector<ProgDriver>& drivers() const { return drivers_; }
  const std::vector<ProgProcess>& processes() const { return procs_; }
  int storage_of(int object) const { return obj_storage_[static_cast<size_t>(object)]; }
  const std::vector<int>& driver_readers(int storage) const {
    return readers_[static_cast<size_t>(storage)];
  }
  int storage_index(const std::string& name) const {
    int o = elab_.object_index(name);
    return o < 0 ? -1 : storage_of(o);
  }

 private:
  ElabDesign elab_;
  Semantics sem_;
  std::string source_;
  std::vector<Storage> storages_;
  std::vector<int> obj_storage_;
  std::vector<ProgDriver> drivers_;
  std::vector<ProgProcess> procs_;
  std::vector<std::vector<int>> readers_;

  std::vector<int> expr_reads(const Expr& e) const {
    std::vector<int> out;
    for_each_ident(e, [&](const Expr& id) { out.push_back(storage_of(id.ref)); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static std::vector<int> merge_sorted(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  }

  void build() {
    const size_t n = elab_.objects.size();
    obj_storage_.assign(n, -1);
    for (size_t i = 0; i < n; ++i) {
      const int r = elab_.find(static_cast<int>(i));
      if (obj_storage_[static_cast<size_t>(r)] < 0) {
        obj_storage_[static_cast<size_t>(r)] = static_cast<int>(storages_.size());
        Storage s;
        s.name = elab_.objects[static_cast<size_t>(r)].name;
        s.width = elab_.objects[static_cast<size_t>(r)].width;
        storages_.push_back(std::move(s));
      }
      obj_storage_[i] = obj_storage_[static_cast<size_t>(r)];
    }
    for (size_t i = 0; i < n; ++i) {
      const ElabObject& o = elab_.objects[i];
      Storage& s = storages_[static_cast<size_t>(obj_storage_[i])];
      s.objects.push_back(static_cast<int>(i));
      if (is_net(o.kind) && !s.net) {
        s.net = true;
        s.type = net_type_of(o.kind);
      }
    }
    for (auto& s : storages_) {
      s.init = Value::x(s.width);
      if (s.net) continue;
      for (int o : s.objects) {
        const ElabObject& obj = elab_.objects[static_cast<size_t>(o)];
        if (obj.init && !obj.array) {
          s.init = eval_const(*obj.init, s.width);
          break;
        }
      }
    }

    readers_.assign(storages_.size(), {});
    for (size_t d = 0; d < elab_.drivers.size(); ++d) {
      const ElabDriver& src = elab_.drivers[d];
      ProgDriver pd;
      pd.src = &src;
      pd.storage = storage_of(src.target);
      pd.width = storages_[static_cast<size_t>(pd.storage)].width;
      pd.delay = DelayTriple::from_spec(src.delay) +
                 DelayTriple::from_spec(elab_.objects[static_cast<size_t>(src.target)].delay);
      storages_[static_cast<size_t>(pd.storage)].drivers.push_back(static_cast<int>(d));
      for (int s : expr_reads(src.rhs)) readers_[static_cast<size_t>(s)].push_back(static_cast<int>(d));
      drivers_.push_back(pd);
    }

    for (size_t p = 0; p < elab_.processes.size(); ++p) {
      const ElabProcess& src = elab_.processes[p];
      ProgProcess pp;
      pp.src = &src;
      pp.flat.resize(static_cast<size_t>(count_stmts(src.body)));
      flatten(pp, src.body, is_always_family(src.kind) ? src.body.pc : -1);
      if (src.combinational && (sem_.always_start || src.kind == ProcKind::AlwaysComb)) {
        const Stmt& ctl = src.body.kind == StmtKind::Seq ? src.body.body[0] : src.body;
        pp.start_pc = ctl.body[0].pc;
      } else {
        pp.start_pc = src.body.pc;
      }
      const Scope& scope = elab_.scopes[static_cast<size_t>(src.scope)];
      pp.label = std::string(proc_kind_name(src.kind)) + " at " + src.loc.str();
      if (!scope.prefix.empty()) pp.label += " in " + scope.prefix.substr(0, scope.prefix.size() - 1);
      procs_.push_back(std::move(pp));
    }
  }

  void flatten(ProgProcess& pp, const Stmt& s, int next) {
    FlatStmt& f = pp.flat[static_cast<size_t>(s.pc)];
    f.stmt = &s;
    f.next = next;
    switch (s.kind) {
      case StmtKind::Seq:
        for (size_t i = 0; i < s.body.size(); ++i)
          flatten(pp, s.body[i], i + 1 < s.body.size() ? s.body[i + 1].pc : next);
        break;
      case StmtKind::If:
        for (const auto& b : s.body) flatten(pp, b, next);
        break;
      case StmtKind::EventCtl:
        if (s.event.star) {
          // Every identifier the controlled body reads, as a plain change term.
          std::vector<const Expr*> seen;
          for (const auto& child : s.body)
            for_each_read_expr(child, [&](const Expr& e) {
              for_each_ident(e, [&](const Expr& id) {
                for (const Expr* prev : seen)
                  if (prev->ref == id.ref) return;
                seen.push_back(&id);
              });
            });
          for (const Expr* id : seen) f.watch.push_back({EdgeQual::None, id, expr_reads(*id)});
        } else {
          for (const auto& t : s.event.terms) f.watch.push_back({t.edge, &t.expr, expr_reads(t.expr)});
        }
        for (const auto& w : f.watch) f.reads = merge_sorted(std::move(f.reads), w.reads);
        for (const auto& b : s.body) flatten(pp, b, next);
        break;
      case StmtKind::Wait: {
        std::vector<const Expr*> seen;
        for_each_ident(s.expr, [&](const Expr& id) {
          for (const Expr* prev : seen)
            if (prev->ref == id.ref) return;
          seen.push_back(&id);
        });
        for (const Expr* id : seen) f.watch.push_back({EdgeQual::None, id, expr_reads(*id)});
        for (const auto& w : f.watch) f.reads = merge_sorted(std::move(f.reads), w.reads);
        for (const auto& b : s.body) flatten(pp, b, next);
        break;
      }
      case StmtKind::DelayCtl:
        for (const auto& b : s.body) flatten(pp, b, next);
        break;
      case StmtKind::SysTask:
        for (const auto& a : s.args)
          if (a.kind == TaskArg::Kind::Expr) f.reads = merge_sorted(std::move(f.reads), expr_reads(a.expr));
        break;
      default:
        break;
    }
  }
};

// ---------------------------------------------------------------------------
// Events, regions, state
// ---------------------------------------------------------------------------

enum class EventKind { ContUpdate, BlockUpdate, NBA, Evaluation, DelayedEvaluation, Group };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ContUpdate: return "ContUpdate";
    case EventKind::BlockUpdate: return "BlockUpdate";
    case EventKind::NBA: return "NBA";
    case EventKind::Evaluation: return "Evaluation";
    case EventKind::DelayedEvaluation: return "DelayedEvaluation";
    case EventKind::Group: return "Group";
  }
  return "?";
}

struct Event {
  EventKind kind = EventKind::Evaluation;
  int index = -1;   // driver (ContUpdate) or process (BlockUpdate, evaluations)
  int target = -1;  // storage (BlockUpdate, NBA)
  Value value;
  std::vector<Event> group;

  static Event cont_update(int driver, Value v) { return {EventKind::ContUpdate, driver, -1, std::move(v), {}}; }
  static Event block_update(int pid, int target, Value v) {
    return {EventKind::BlockUpdate, pid, target, std::move(v), {}};
  }
  static Event nba(int target, Value v) { return {EventKind::NBA, -1, target, std::move(v), {}}; }
  static Event evaluation(int pid) { return {EventKind::Evaluation, pid, -1, Value(), {}}; }
  static Event delayed_evaluation(int pid) {
    return {EventKind::DelayedEvaluation, pid, -1, Value(), {}};
  }
  static Event make_group(std::vector<Event> nbas) {
    return {EventKind::Group, -1, -1, Value(), std::move(nbas)};
  }

  bool operator==(const Event& o) const {
    return kind == o.kind && index == o.index && target == o.target && value == o.value &&
           group == o.group;
  }
};

enum class Region { Active, Inactive, Nba };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Active: return "active";
    case Region::Inactive: return "inactive";
    case Region::Nba: return "nba";
  }
  return "?";
}

struct TimeSlot {
  std::vector<Event> active, inactive, nba;

  bool empty() const { return active.empty() && inactive.empty() && nba.empty(); }
  std::vector<Event>& region(Region r) {
    return r == Region::Active ? active : r == Region::Inactive ? inactive : nba;
  }
  bool operator==(const TimeSlot&) const = default;
};

enum class ProcStatus { Running, Waiting, Finished };

inline const char* proc_status_name(ProcStatus s) {
  switch (s) {
    case ProcStatus::Running: return "running";
    case ProcStatus::Waiting: return "waiting";
    case ProcStatus::Finished: return "finished";
  }
  return "?";
}

struct ProcState {
  int pc = 0;
  ProcStatus status = ProcStatus::Running;
  int wait_pc = -1;          // statement whose watch is armed while waiting
  std::vector<Value> watch;  // last seen value per watch term
  bool operator==(const ProcState&) const = default;
};

struct MonitorState {
  int pid = -1;
  int pc = -1;                     // the $monitor statement
  std::optional<std::vector<Value>> last;  // values at the last emission
  bool dirty = true;
  bool operator==(const MonitorState&) const = default;
};

enum class RunStatus { Running, Finished, Error, Limit };

inline const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Finished: return "finished";
    case RunStatus::Error: return "error";
    case RunStatus::Limit: return "limit";
  }
  return "?";
}

struct SimState {
  std::shared_ptr<const Program> prog;
  uint64_t time = 0;
  std::vector<Value> env;          // per storage
  std::vector<Value> driver_vals;  // per driver
  std::vector<ProcState> procs;
  std::map<uint64_t, TimeSlot> queue;  // never holds an empty slot
  std::optional<MonitorState> monitor;
  std::vector<std::string> output;
  RunStatus status = RunStatus::Running;
  std::string reason;

  const Value& value_of(const std::string& name) const {
    int s = prog->storage_index(name);
    if (s < 0) throw KernelError("no object named '" + name + "'");
    return env[static_cast<size_t>(s)];
  }

  bool operator==(const SimState& o) const {
    return prog == o.prog && time == o.time && env == o.env && driver_vals == o.driver_vals &&
           procs == o.procs && queue == o.queue && monitor == o.monitor && output == o.output &&
           status == o.status && reason == o.reason;
  }
};

enum class ChoiceKind { ExecuteActive, AdvanceRegion, AdvanceTime, EndOfSlotMonitor };

struct Choice {
  ChoiceKind kind = ChoiceKind::ExecuteActive;
  size_t index = 0;   // ExecuteActive
  uint64_t time = 0;  // AdvanceTime

  static Choice execute(size_t i) { return {ChoiceKind::ExecuteActive, i, 0}; }
  static Choice advance_region() { return {ChoiceKind::AdvanceRegion, 0, 0}; }
  static Choice advance_time(uint64_t t) { return {ChoiceKind::AdvanceTime, 0, t}; }
  static Choice monitor() { return {ChoiceKind::EndOfSlotMonitor, 0, 0}; }

  std::string str() const {
    switch (kind) {
      case ChoiceKind::ExecuteActive: return "active[" + std::to_string(index) + "]";
      case ChoiceKind::AdvanceRegion: return "advance-region";
      case ChoiceKind::AdvanceTime: return "advance-time(" + std::to_string(time) + ")";
      case ChoiceKind::EndOfSlotMonitor: return "monitor";
    }
    return "?";
  }
  bool operator==(const Choice&) const = default;
};

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

namespace detail {
inline void hash_mix(size_t& seed, size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}
inline void hash_event(size_t& h, const Event& e) {
  hash_mix(h, static_cast<size_t>(e.kind));
  hash_mix(h, static_cast<size_t>(e.index + 1));
  hash_mix(h, static_cast<size_t>(e.target + 1));
  hash_mix(h, std::hash<Value>{}(e.value));
  hash_mix(h, e.group.size());
  for (const auto& g : e.group) hash_event(h, g);
}
}  // namespace detail

}  // namespace vsched

template <>
struct std::hash<vsched::SimState> {
  size_t operator()(const vsched::SimState& s) const noexcept {
    using vsched::detail::hash_mix;
    size_t h = std::hash<const void*>{}(s.prog.get());
    hash_mix(h, s.time);
    for (const auto& v : s.env) hash_mix(h, std::hash<vsched::Value>{}(v));
    for (const auto& v : s.driver_vals) hash_mix(h, std::hash<vsched::Value>{}(v));
    for (const auto& p : s.procs) {
      hash_mix(h, static_cast<size_t>(p.pc + 1));
      hash_mix(h, static_cast<size_t>(p.status));
      hash_mix(h, static_cast<size_t>(p.wait_pc + 1));
      for (const auto& v : p.watch) hash_mix(h, std::hash<vsched::Value>{}(v));
    }
    for (const auto& [t, slot] : s.queue) {
      hash_mix(h, t);
      for (const auto* r : {&slot.active, &slot.inactive, &slot.nba}) {
        hash_mix(h, r->size());
        for (const auto& e : *r) vsched::detail::hash_event(h, e);
      }
    }
    if (s.monitor) {
      hash_mix(h, static_cast<size_t>(s.monitor->pc + 1));
      hash_mix(h, s.monitor->dirty);
      if (s.monitor->last)
        for (const auto& v : *s.monitor->last) hash_mix(h, std::hash<vsched::Value>{}(v));
    }
    hash_mix(h, s.output.size());
    for (const auto& line : s.output) hash_mix(h, std::hash<std::string>{}(line));
    hash_mix(h, static_cast<size_t>(s.status));
    return h;
  }
};
