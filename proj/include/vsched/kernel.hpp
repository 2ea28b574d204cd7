#pragma once

// The stratified event-queue scheduler. Every nondeterministic decision is a
// Choice; apply() performs exactly one.

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "format.hpp"
#include "state.hpp"

namespace vsched {

inline constexpr uint64_t kActivationBudget = 100000;
inline constexpr uint64_t kSlotEventBudget = 1000000;

enum class ActivationOutcome { Blocked, Preempted, Terminated, Finished, Error };

inline std::shared_ptr<const Program> make_program(ElabDesign elab, Semantics sem,
                                                   std::string source = {}) {
  return std::make_shared<const Program>(std::move(elab), sem, std::move(source));
}

inline void schedule(SimState& st, uint64_t at, Region region, Event e) {
  if (at < st.time)
    throw KernelError("cannot schedule at time " + std::to_string(at) + " before current time " +
                      std::to_string(st.time));
  if (region == Region::Nba && e.kind != EventKind::NBA)
    throw KernelError("only NBA events may enter the nba region");
  st.queue[at].region(region).push_back(std::move(e));
}

namespace detail {

class Exec {
 public:
  explicit Exec(SimState& st) : st_(st), prog_(*st.prog) {}

  bool finish_requested = false;

  const Value& lookup(const Expr& id) const {
    return st_.env[static_cast<size_t>(prog_.storage_of(id.ref))];
  }
  Value eval(const Expr& e) const {
    return eval_expr(e, [this](const Expr& id) -> const Value& { return lookup(id); });
  }
  Value eval_target(const Expr& e, uint32_t width) const {
    return eval_for_target(e, [this](const Expr& id) -> const Value& { return lookup(id); }, width);
  }

  void write(int s, Value v) {
    Value& cur = st_.env[static_cast<size_t>(s)];
    if (cur == v) return;
    cur = std::move(v);
    notify(s);
  }

  // Re-resolves a storage from its drivers after one of them changed.
  void update_from_drivers(int s) {
    const Storage& sto = prog_.storages()[static_cast<size_t>(s)];
    if (sto.net) {
      std::vector<Value> vals;
      vals.reserve(sto.drivers.size());
      for (int d : sto.drivers) vals.push_back(st_.driver_vals[static_cast<size_t>(d)]);
      write(s, resolve_net(sto.type, vals, sto.width));
    } else if (!sto.drivers.empty()) {
      write(s, st_.driver_vals[static_cast<size_t>(sto.drivers.front())]);
    }
  }

  void cancel_driver_updates(int d) {
    for (auto it = st_.queue.begin(); it != st_.queue.end();) {
      auto& active = it->second.active;
      active.erase(std::remove_if(active.begin(), active.end(),
                                  [d](const Event& e) {
                                    return e.kind == EventKind::ContUpdate && e.index == d;
                                  }),
                   active.end());
      if (it->second.empty()) it = st_.queue.erase(it);
      else ++it;
    }
  }

  // Inertial: a pending update is replaced; nothing is queued when the new
  // value is already driven.
  void reevaluate_driver(int d) {
    const ProgDriver& pd = prog_.drivers()[static_cast<size_t>(d)];
    Value v = eval_target(pd.src->rhs, pd.width);
    cancel_driver_updates(d);
    if (v == st_.driver_vals[static_cast<size_t>(d)]) return;
    uint64_t at = st_.time + pd.delay.for_value(v);
    schedule(st_, at, Region::Active, Event::cont_update(d, std::move(v)));
  }

  void notify(int s) {
    for (int d : prog_.driver_readers(s)) reevaluate_driver(d);
    for (size_t pid = 0; pid < st_.procs.size(); ++pid) {
      ProcState& p = st_.procs[pid];
      if (p.status != ProcStatus::Waiting) continue;
      const FlatStmt& f = prog_.processes()[pid].flat[static_cast<size_t>(p.wait_pc)];
      if (!std::binary_search(f.reads.begin(), f.reads.end(), s)) continue;
      check_watch(static_cast<int>(pid), f, s);
    }
    if (st_.monitor && !st_.monitor->dirty) {
      const FlatStmt& f =
          prog_.processes()[static_cast<size_t>(st_.monitor->pid)].flat[static_cast<size_t>(st_.monitor->pc)];
      if (std::binary_search(f.reads.begin(), f.reads.end(), s)) st_.monitor->dirty = true;
    }
  }

  static bool edge_matches(EdgeQual q, EdgeKind k) {
    switch (q) {
      case EdgeQual::None: return k != EdgeKind::None;
      case EdgeQual::Posedge: return k == EdgeKind::Posedge;
      case EdgeQual::Negedge: return k == EdgeKind::Negedge;
      case EdgeQual::Edge: return k == EdgeKind::Posedge || k == EdgeKind::Negedge;
    }
    return false;
  }

  void check_watch(int pid, const FlatStmt& f, int s) {
    ProcState& p = st_.procs[static_cast<size_t>(pid)];
    for (size_t i = 0; i < f.watch.size(); ++i) {
      const WatchTerm& t = f.watch[i];
      if (!std::binary_search(t.reads.begin(), t.reads.end(), s)) continue;
      Value nv = eval(*t.expr);
      if (edge_matches(t.edge, edge_kind(p.watch[i], nv))) {
        wake(pid);
        return;
      }
      p.watch[i] = std::move(nv);
    }
  }

  void wake(int pid) {
    ProcState& p = st_.procs[static_cast<size_t>(pid)];
    p.status = ProcStatus::Running;
    p.wait_pc = -1;
    p.watch.clear();
    schedule(st_, st_.time, Region::Active, Event::evaluation(pid));
  }

  void arm_watch(int pid, int pc) {
    ProcState& p = st_.procs[static_cast<size_t>(pid)];
    const FlatStmt& f = prog_.processes()[static_cast<size_t>(pid)].flat[static_cast<size_t>(pc)];
    p.status = ProcStatus::Waiting;
    p.wait_pc = pc;
    p.watch.clear();
    for (const auto& t : f.watch) p.watch.push_back(eval(*t.expr));
  }

  void emit(const std::string& text) {
    size_t start = 0;
    for (;;) {
      size_t nl = text.find('\n', start);
      st_.output.push_back(text.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }

  std::string render(const Stmt& s) {
    return render_task_args(s.args, st_.time, [this](const Expr& e) { return eval(e); });
  }

  void monitor_emit() {
    MonitorState& m = *st_.monitor;
    const Stmt& s = *prog_.processes()[static_cast<size_t>(m.pid)].flat[static_cast<size_t>(m.pc)].stmt;
    std::vector<Value> vals;
    for (const auto& a : s.args)
      if (a.kind == TaskArg::Kind::Expr) vals.push_back(eval(a.expr));
    if (!m.last || *m.last != vals) {
      emit(render(s));
      m.last = std::move(vals);
    }
    m.dirty = false;
  }

  void fail(const std::string& reason) {
    st_.status = RunStatus::Error;
    st_.reason = reason;
  }

  ActivationOutcome run_activation(int pid, bool in_final = false) {
    ProcState& p = st_.procs[static_cast<size_t>(pid)];
    const ProgProcess& pp = prog_.processes()[static_cast<size_t>(pid)];
    const bool preempt = prog_.semantics().preemption && !in_final;
    uint64_t steps = 0;
    for (;;) {
      if (p.pc < 0) {
        p.status = ProcStatus::Finished;
        return ActivationOutcome::Terminated;
      }
      if (++steps > kActivationBudget) {
        fail("activation budget of " + std::to_string(kActivationBudget) +
             " statements exceeded in process " + pp.label);
        return ActivationOutcome::Error;
      }
      const FlatStmt& f = pp.flat[static_cast<size_t>(p.pc)];
      const Stmt& s = *f.stmt;
      auto timing_in_final = [&]() {
        fail("timing control in final block (" + pp.label + ")");
        return ActivationOutcome::Error;
      };
      switch (s.kind) {
        case StmtKind::Seq:
          p.pc = s.body.empty() ? f.next : s.body[0].pc;
          continue;  // structural; never a preemption point
        case StmtKind::If:
          p.pc = truthy(eval(s.expr)) ? s.body[0].pc : s.body[1].pc;
          break;
        case StmtKind::Blocking: {
          const int target = prog_.storage_of(s.target_ref);
          Value v = eval_target(s.expr, prog_.storages()[static_cast<size_t>(target)].width);
          if (s.delay) {
            if (in_final) return timing_in_final();
            p.pc = f.next;
            uint64_t d = *s.delay;
            schedule(st_, st_.time + d, d == 0 ? Region::Inactive : Region::Active,
                     Event::block_update(pid, target, std::move(v)));
            return ActivationOutcome::Blocked;
          }
          write(target, std::move(v));
          p.pc = f.next;
          break;
        }
        case StmtKind::Nonblocking: {
          const int target = prog_.storage_of(s.target_ref);
          Value v = eval_target(s.expr, prog_.storages()[static_cast<size_t>(target)].width);
          if (s.delay && in_final) return timing_in_final();
          schedule(st_, st_.time + s.delay.value_or(0), Region::Nba, Event::nba(target, std::move(v)));
          p.pc = f.next;
          break;
        }
        case StmtKind::EventCtl:
          if (in_final) return timing_in_final();
          arm_watch(pid, p.pc);
          p.pc = s.body[0].pc;
          return ActivationOutcome::Blocked;
        case StmtKind::DelayCtl: {
          if (in_final) return timing_in_final();
          uint64_t d = s.delay.value_or(0);
          p.pc = s.body[0].pc;
          if (d == 0) schedule(st_, st_.time, Region::Inactive, Event::evaluation(pid));
          else schedule(st_, st_.time + d, Region::Active, Event::delayed_evaluation(pid));
          return ActivationOutcome::Blocked;
        }
        case StmtKind::Wait:
          if (in_final) return timing_in_final();
          if (truthy(eval(s.expr))) {
            p.pc = s.body[0].pc;
            break;
          }
          arm_watch(pid, p.pc);  // pc stays on the wait to re-check on wake
          return ActivationOutcome::Blocked;
        case StmtKind::SysTask:
          p.pc = f.next;
          if (s.task == SysTask::Display) {
            emit(render(s));
          } else if (s.task == SysTask::Monitor) {
            st_.monitor = MonitorState{pid, s.pc, std::nullopt, true};
          } else if (!in_final) {
            finish_requested = true;
            return ActivationOutcome::Finished;
          }
          break;
      }
      if (preempt) {
        if (p.pc < 0) {
          p.status = ProcStatus::Finished;
          return ActivationOutcome::Terminated;
        }
        schedule(st_, st_.time, Region::Active, Event::evaluation(pid));
        return ActivationOutcome::Preempted;
      }
    }
  }

  void execute_event(const Event& e) {
    switch (e.kind) {
      case EventKind::ContUpdate: {
        st_.driver_vals[static_cast<size_t>(e.index)] = e.value;
        update_from_drivers(prog_.drivers()[static_cast<size_t>(e.index)].storage);
        break;
      }
      case EventKind::BlockUpdate:
        write(e.target, e.value);
        run_activation(e.index);
        break;
      case EventKind::NBA: write(e.target, e.value); break;
      case EventKind::Evaluation:
      case EventKind::DelayedEvaluation: run_activation(e.index); break;
      case EventKind::Group:
        for (const auto& nba : e.group) write(nba.target, nba.value);
        break;
    }
  }

  void end_simulation(const std::string& reason) {
    if (st_.status != RunStatus::Running) return;
    for (size_t pid = 0; pid < prog_.processes().size(); ++pid) {
      const ProgProcess& pp = prog_.processes()[pid];
      if (pp.src->kind != ProcKind::Final) continue;
      st_.procs[pid].pc = pp.start_pc;
      st_.procs[pid].status = ProcStatus::Running;
      if (run_activation(static_cast<int>(pid), true) == ActivationOutcome::Error) return;
    }
    if (st_.monitor && st_.monitor->dirty) monitor_emit();
    st_.status = RunStatus::Finished;
    st_.reason = reason;
  }

 private:
  SimState& st_;
  const Program& prog_;
};

}  // namespace detail

// FIRST initialisation: variables hold their initialisers before anything
// runs, drivers start at x, and every non-final process is queued at time 0.
inline SimState initialize(std::shared_ptr<const Program> prog) {
  SimState st;
  st.prog = prog;
  const auto& storages = prog->storages();
  st.driver_vals.reserve(prog->drivers().size());
  for (const auto& d : prog->drivers()) st.driver_vals.push_back(Value::x(d.width));
  for (const auto& s : storages) {
    if (s.net) {
      std::vector<Value> vals;
      for (int d : s.drivers) vals.push_back(st.driver_vals[static_cast<size_t>(d)]);
      st.env.push_back(resolve_net(s.type, vals, s.width));
    } else {
      st.env.push_back(s.init);
    }
  }
  for (size_t pid = 0; pid < prog->processes().size(); ++pid) {
    const ProgProcess& pp = prog->processes()[pid];
    ProcState ps;
    ps.pc = pp.start_pc;
    st.procs.push_back(ps);
    if (pp.src->kind != ProcKind::Final)
      schedule(st, 0, Region::Active, Event::evaluation(static_cast<int>(pid)));
  }
  detail::Exec ex(st);
  for (size_t d = 0; d < prog->drivers().size(); ++d) {
    const ProgDriver& pd = prog->drivers()[d];
    Value v = ex.eval_target(pd.src->rhs, pd.width);
    if (v != st.driver_vals[d])
      schedule(st, pd.delay.for_value(v), Region::Active, Event::cont_update(static_cast<int>(d), std::move(v)));
  }
  return st;
}

inline std::vector<Choice> enabled_choices(const SimState& st) {
  std::vector<Choice> out;
  if (st.status != RunStatus::Running) return out;
  auto it = st.queue.find(st.time);
  if (it != st.queue.end()) {
    const TimeSlot& slot = it->second;
    if (!slot.active.empty()) {
      for (size_t i = 0; i < slot.active.size(); ++i) out.push_back(Choice::execute(i));
      return out;
    }
    if (!slot.inactive.empty() || !slot.nba.empty()) {
      out.push_back(Choice::advance_region());
      return out;
    }
  }
  if (st.monitor && st.monitor->dirty) {
    out.push_back(Choice::monitor());
    return out;
  }
  auto next = st.queue.upper_bound(st.time);
  if (next != st.queue.end()) out.push_back(Choice::advance_time(next->first));
  return out;
}

inline bool is_enabled(const SimState& st, const Choice& c) {
  auto cs = enabled_choices(st);
  return std::find(cs.begin(), cs.end(), c) != cs.end();
}

inline void end_simulation(SimState& st, const std::string& reason) {
  detail::Exec(st).end_simulation(reason);
}

inline ActivationOutcome run_activation(SimState& st, int pid) {
  detail::Exec ex(st);
  ActivationOutcome out = ex.run_activation(pid);
  if (ex.finish_requested) ex.end_simulation("$finish");
  return out;
}

// Performs one choice in place.
inline void apply(SimState& st, const Choice& c) {
  if (st.status != RunStatus::Running) throw KernelError("simulation is not running");
  if (!is_enabled(st, c)) throw KernelError("choice " + c.str() + " is not enabled");
  detail::Exec ex(st);
  switch (c.kind) {
    case ChoiceKind::ExecuteActive: {
      auto it = st.queue.find(st.time);
      Event e = std::move(it->second.active[c.index]);
      it->second.active.erase(it->second.active.begin() + static_cast<std::ptrdiff_t>(c.index));
      if (it->second.empty()) st.queue.erase(it);
      ex.execute_event(e);
      break;
    }
    case ChoiceKind::AdvanceRegion: {
      TimeSlot& slot = st.queue.at(st.time);
      if (!slot.inactive.empty()) {
        for (auto& e : slot.inactive) slot.active.push_back(std::move(e));
        slot.inactive.clear();
      } else if (st.prog->semantics().group_nba) {
        slot.active.push_back(Event::make_group(std::move(slot.nba)));
        slot.nba.clear();
      } else {
        for (auto& e : slot.nba) slot.active.push_back(std::move(e));
        slot.nba.clear();
      }
      break;
    }
    case ChoiceKind::EndOfSlotMonitor: ex.monitor_emit(); break;
    case ChoiceKind::AdvanceTime: st.time = c.time; break;
  }
  if (ex.finish_requested) ex.end_simulation("$finish");
}

inline SimState execute_choice(SimState st, const Choice& c) {
  apply(st, c);
  return st;
}

// Ends the run when nothing is enabled; returns whether it did.
inline bool finish_if_quiescent(SimState& st) {
  if (st.status != RunStatus::Running || !enabled_choices(st).empty()) return false;
  end_simulation(st, "event queue exhausted");
  return true;
}

}  // namespace vsched
