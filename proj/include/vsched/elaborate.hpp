#pragma once

// Flattens a module hierarchy into objects, drivers and processes over
// hierarchical names. Ports become continuous assignments (input, output)
// or alias merges (inout, coerced ports).

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ast.hpp"
#include "eval.hpp"
#include "format.hpp"
#include "normalize.hpp"

namespace vsched {

enum class VarInit { First, Initial };

struct ElabOptions {
  std::string top;
  // Initial turns variable initialisers into synthesised initial blocks
  // that race with the design; only tests use it.
  VarInit var_init = VarInit::First;
};

struct ElabObject {
  std::string name;
  DataKind kind = DataKind::Logic;
  uint32_t width = 1;
  std::optional<Expr> init;  // variables only
  DelaySpec delay;           // net declaration delay
  SourceLoc loc;
  int scope = 0;
  bool array = false;
};

enum class DriverOrigin { User, Port };

struct ElabDriver {
  int target = -1;
  Expr rhs;
  DelaySpec delay;
  DriverOrigin origin = DriverOrigin::User;
  int scope = 0;
  SourceLoc loc;
};

struct ElabProcess {
  ProcKind kind = ProcKind::Initial;
  Stmt body;
  bool combinational = false;
  int scope = 0;
  SourceLoc loc;
};

struct PortBinding {
  int child_scope = 0;
  int parent_scope = 0;
  std::string port;
  Direction dir = Direction::Input;
  int inner = -1;
  int outer = -1;          // outer object when connected to an identifier
  bool connected = false;
  int driver = -1;         // port-induced driver, if any
  SourceLoc port_loc;
};

struct Scope {
  std::string prefix;  // "" for the top, "inst." for children
  std::string module;
};

struct ElabDesign {
  std::string top;
  std::vector<Scope> scopes;
  std::vector<ElabObject> objects;
  std::vector<ElabDriver> drivers;
  std::vector<ElabProcess> processes;
  std::vector<PortBinding> ports;
  std::vector<int> alias;  // union-find parents over objects
  std::vector<Warning> warnings;

  int find(int o) const {
    while (alias[static_cast<size_t>(o)] != o) o = alias[static_cast<size_t>(o)];
    return o;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    alias[static_cast<size_t>(b)] = a;
  }
  int object_index(const std::string& name) const {
    for (size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == name) return static_cast<int>(i);
    return -1;
  }
  std::vector<int> alias_class(int o) const {
    std::vector<int> out;
    const int r = find(o);
    for (size_t i = 0; i < objects.size(); ++i)
      if (find(static_cast<int>(i)) == r) out.push_back(static_cast<int>(i));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Top selection
// ---------------------------------------------------------------------------

// Explicit name, else the sole module, else `top`, else the only module
// nobody instantiates.
inline std::string select_top(const Design& d, const std::string& requested) {
  if (!requested.empty()) {
    if (!d.find(requested)) throw ElabError("unknown top module '" + requested + "'");
    return requested;
  }
  if (d.modules.empty()) throw ElabError("design contains no modules");
  if (d.modules.size() == 1) return d.modules[0].name;
  if (d.find("top")) return "top";
  std::set<std::string> used;
  for (const auto& m : d.modules)
    for (const auto& it : m.items)
      if (auto* inst = std::get_if<Instance>(&it)) used.insert(inst->module);
  std::vector<std::string> roots;
  for (const auto& m : d.modules)
    if (!used.count(m.name)) roots.push_back(m.name);
  if (roots.size() == 1) return roots[0];
  throw ElabError("cannot choose a top module; use --top");
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

namespace detail {

// Leading-event-control shape: the body is one event control whose terms
// carry no edge qualifier, and nothing under it blocks on time or events.
inline bool is_combinational_shape(const Stmt& body) {
  const Stmt* s = &body;
  if (s->kind == StmtKind::Seq) {
    if (s->body.size() != 1) return false;
    s = &s->body[0];
  }
  if (s->kind != StmtKind::EventCtl) return false;
  if (!s->event.star)
    for (const auto& t : s->event.terms)
      if (t.edge != EdgeQual::None) return false;
  bool timing = false;
  for (const auto& child : s->body)
    for_each_stmt(child, [&](const Stmt& c) {
      if (c.kind == StmtKind::EventCtl || c.kind == StmtKind::DelayCtl ||
          c.kind == StmtKind::Wait || c.delay.has_value())
        timing = true;
    });
  return !timing;
}

class Elaborator {
 public:
  Elaborator(const Design& d, const ElabOptions& opts) : design_(d), opts_(opts) {}

  ElabDesign run() {
    out_.top = select_top(design_, opts_.top);
    const ModuleDecl* top = design_.find(out_.top);
    std::vector<std::string> stack;
    instantiate(*top, "", stack);
    out_.alias.resize(out_.objects.size());
    for (size_t i = 0; i < out_.alias.size(); ++i) out_.alias[i] = static_cast<int>(i);
    for (const auto& [a, b] : pending_merges_) out_.merge(a, b);
    if (opts_.var_init == VarInit::Initial) synthesize_initialisers();
    return std::move(out_);
  }

 private:
  const Design& design_;
  const ElabOptions& opts_;
  ElabDesign out_;
  std::vector<std::pair<int, int>> pending_merges_;

  using Names = std::unordered_map<std::string, int>;

  int add_object(ElabObject o) {
    out_.objects.push_back(std::move(o));
    return static_cast<int>(out_.objects.size() - 1);
  }

  // Variable initialisers are constants, evaluated before time 0.
  static void check_initialiser(const ElabObject& o) {
    if (o.init && o.init->kind != ExprKind::ArrayLit) eval_const(*o.init, o.width);
  }

  static int lookup(const Names& names, const std::string& n, SourceLoc loc) {
    auto it = names.find(n);
    if (it == names.end()) throw ElabError("undeclared identifier '" + n + "'", loc);
    return it->second;
  }

  void resolve_expr(Expr& e, const Names& names) {
    if (e.kind == ExprKind::ArrayLit)
      throw ElabError("array literal is only allowed as a variable initialiser", e.loc);
    for_each_ident_mut(e, [&](Expr& id) {
      int o = lookup(names, id.name, id.loc);
      if (out_.objects[static_cast<size_t>(o)].array)
        throw ElabError("array '" + id.name + "' cannot be used in an expression", id.loc);
      id.ref = o;
      id.name = out_.objects[static_cast<size_t>(o)].name;
    });
    std::function<void(const Expr&)> check_arrays = [&](const Expr& x) {
      if (x.kind == ExprKind::ArrayLit)
        throw ElabError("array literal is only allowed as a variable initialiser", x.loc);
      for (const auto& a : x.args) check_arrays(a);
    };
    check_arrays(e);
  }

  void resolve_stmt(Stmt& s, const Names& names) {
    switch (s.kind) {
      case StmtKind::If:
      case StmtKind::Wait: resolve_expr(s.expr, names); break;
      case StmtKind::Blocking:
      case StmtKind::Nonblocking: {
        int o = lookup(names, s.target, s.target_loc);
        if (out_.objects[static_cast<size_t>(o)].array)
          throw ElabError("array '" + s.target + "' cannot be assigned", s.target_loc);
        s.target_ref = o;
        s.target = out_.objects[static_cast<size_t>(o)].name;
        resolve_expr(s.expr, names);
        break;
      }
      case StmtKind::EventCtl:
        for (auto& t : s.event.terms) resolve_expr(t.expr, names);
        break;
      case StmtKind::SysTask:
        validate_task_args(s);
        for (auto& a : s.args)
          if (a.kind == TaskArg::Kind::Expr) resolve_expr(a.expr, names);
        break;
      default: break;
    }
    for (auto& child : s.body) resolve_stmt(child, names);
  }

  Names instantiate(const ModuleDecl& m, const std::string& prefix,
                    std::vector<std::string>& stack) {
    if (std::find(stack.begin(), stack.end(), m.name) != stack.end())
      throw ElabError("instantiation cycle through module '" + m.name + "'", m.loc);
    stack.push_back(m.name);
    const int scope = static_cast<int>(out_.scopes.size());
    out_.scopes.push_back({prefix, m.name});
    Names names;

    for (const auto& p : m.ports) {
      ElabObject o;
      o.name = prefix + p.name;
      o.kind = p.kind;
      o.width = p.width();
      o.loc = p.loc;
      o.scope = scope;
      o.array = p.array.has_value();
      if (p.init && !is_net(p.kind)) o.init = p.init;
      check_initialiser(o);
      names[p.name] = add_object(std::move(o));
    }
    for (const auto& it : m.items) {
      if (auto* d = std::get_if<Decl>(&it)) {
        ElabObject o;
        o.name = prefix + d->name;
        o.kind = d->kind;
        o.width = d->width();
        o.delay = d->delay;
        o.loc = d->loc;
        o.scope = scope;
        o.array = d->array.has_value();
        if (d->init && !is_net(d->kind)) o.init = d->init;
        if (o.init && o.init->kind == ExprKind::ArrayLit && !o.array)
          throw ElabError("array literal initialiser on scalar '" + d->name + "'", d->loc);
        check_initialiser(o);
        names[d->name] = add_object(std::move(o));
      }
    }

    // Initialisers on nets are continuous assignments.
    auto add_net_init = [&](const std::string& local, const Expr& init, SourceLoc loc) {
      ElabDriver drv;
      drv.target = names.at(local);
      drv.rhs = init;
      resolve_expr(drv.rhs, names);
      drv.origin = DriverOrigin::User;
      drv.scope = scope;
      drv.loc = loc;
      out_.drivers.push_back(std::move(drv));
    };
    for (const auto& p : m.ports)
      if (p.init && is_net(p.kind)) add_net_init(p.name, *p.init, p.loc);

    for (const auto& it : m.items) {
      if (auto* d = std::get_if<Decl>(&it)) {
        if (d->init && is_net(d->kind)) {
          if (d->array) throw ElabError("net array initialiser", d->loc);
          add_net_init(d->name, *d->init, d->loc);
        }
      } else if (auto* a = std::get_if<ContAssign>(&it)) {
        ElabDriver drv;
        drv.target = lookup(names, a->target, a->target_loc);
        if (out_.objects[static_cast<size_t>(drv.target)].array)
          throw ElabError("array '" + a->target + "' cannot be assigned", a->target_loc);
        drv.rhs = a->rhs;
        resolve_expr(drv.rhs, names);
        drv.delay = a->delay;
        drv.origin = DriverOrigin::User;
        drv.scope = scope;
        drv.loc = a->loc;
        out_.drivers.push_back(std::move(drv));
      } else if (auto* p = std::get_if<Process>(&it)) {
        ElabProcess proc;
        proc.kind = p->kind;
        proc.loc = p->loc;
        proc.scope = scope;
        Stmt body = normalize_body(p->body);
        resolve_stmt(body, names);
        if (p->kind == ProcKind::AlwaysComb) {
          Stmt ctl;
          ctl.kind = StmtKind::EventCtl;
          ctl.loc = p->loc;
          ctl.event.star = true;
          ctl.body.push_back(std::move(body));
          std::vector<Stmt> items;
          items.push_back(std::move(ctl));
          body = normalize_body(Stmt::seq(std::move(items), p->loc));
          proc.combinational = true;
        } else if (p->kind == ProcKind::Always || p->kind == ProcKind::AlwaysFF ||
                   p->kind == ProcKind::AlwaysLatch) {
          proc.combinational = is_combinational_shape(body);
        }
        proc.body = std::move(body);
        out_.processes.push_back(std::move(proc));
      } else if (auto* inst = std::get_if<Instance>(&it)) {
        elaborate_instance(*inst, names, prefix, scope, stack);
      }
    }
    stack.pop_back();
    return names;
  }

  void elaborate_instance(const Instance& inst, const Names& parent, const std::string& prefix,
                          int parent_scope, std::vector<std::string>& stack) {
    const ModuleDecl* child = design_.find(inst.module);
    if (!child) throw ElabError("unknown module '" + inst.module + "'", inst.loc);
    for (const auto& c : inst.conns)
      if (!child->find_port(c.port))
        throw ElabError("module '" + inst.module + "' has no port '" + c.port + "'", c.loc);
    const int child_scope = static_cast<int>(out_.scopes.size());
    Names inner = instantiate(*child, prefix + inst.name + ".", stack);

    for (const auto& p : child->ports) {
      PortBinding pb;
      pb.child_scope = child_scope;
      pb.parent_scope = parent_scope;
      pb.port = p.name;
      pb.dir = p.dir;
      pb.inner = inner.at(p.name);
      pb.port_loc = p.loc;
      const Connection* conn = nullptr;
      for (const auto& c : inst.conns)
        if (c.port == p.name) conn = &c;
      if (conn && conn->expr) {
        pb.connected = true;
        Expr outer_expr = *conn->expr;
        resolve_expr(outer_expr, parent);
        const ElabObject& in_obj = out_.objects[static_cast<size_t>(pb.inner)];
        if (in_obj.array) throw ElabError("array port '" + p.name + "' cannot be connected", conn->loc);
        if (outer_expr.kind == ExprKind::Ident) {
          pb.outer = outer_expr.ref;
          const ElabObject& out_obj = out_.objects[static_cast<size_t>(pb.outer)];
          if (out_obj.width != in_obj.width)
            throw ElabError("width mismatch connecting port '" + p.name + "' (" +
                                std::to_string(in_obj.width) + " bits) to '" + out_obj.name +
                                "' (" + std::to_string(out_obj.width) + " bits)",
                            conn->loc);
        }
        switch (p.dir) {
          case Direction::Input: {
            ElabDriver drv;
            drv.target = pb.inner;
            drv.rhs = std::move(outer_expr);
            drv.origin = DriverOrigin::Port;
            drv.scope = parent_scope;
            drv.loc = conn->loc;
            pb.driver = static_cast<int>(out_.drivers.size());
            out_.drivers.push_back(std::move(drv));
            break;
          }
          case Direction::Output: {
            if (pb.outer < 0)
              throw ElabError("output port '" + p.name + "' must connect to an identifier", conn->loc);
            ElabDriver drv;
            drv.target = pb.outer;
            drv.rhs = Expr::ident(in_obj.name, conn->loc);
            drv.rhs.ref = pb.inner;
            drv.origin = DriverOrigin::Port;
            drv.scope = parent_scope;
            drv.loc = conn->loc;
            pb.driver = static_cast<int>(out_.drivers.size());
            out_.drivers.push_back(std::move(drv));
            break;
          }
          case Direction::Inout:
            if (pb.outer < 0)
              throw ElabError("inout port '" + p.name + "' must connect to an identifier", conn->loc);
            pending_merges_.emplace_back(pb.inner, pb.outer);
            break;
        }
      }
      out_.ports.push_back(std::move(pb));
    }
  }

  void synthesize_initialisers() {
    std::vector<ElabProcess> extra;
    for (size_t i = 0; i < out_.objects.size(); ++i) {
      ElabObject& o = out_.objects[i];
      if (!o.init || o.array || is_net(o.kind)) continue;
      Stmt assign;
      assign.kind = StmtKind::Blocking;
      assign.loc = o.loc;
      assign.target = o.name;
      assign.target_loc = o.loc;
      assign.target_ref = static_cast<int32_t>(i);
      assign.expr = *o.init;
      std::vector<Stmt> items;
      items.push_back(std::move(assign));
      ElabProcess p;
      p.kind = ProcKind::Initial;
      p.loc = o.loc;
      p.scope = o.scope;
      p.body = normalize_body(Stmt::seq(std::move(items), o.loc));
      extra.push_back(std::move(p));
      o.init.reset();
    }
    for (auto& p : extra) out_.processes.push_back(std::move(p));
  }
};

inline std::set<int> process_targets(const ElabProcess& p) {
  std::set<int> out;
  for_each_stmt(p.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::Blocking || s.kind == StmtKind::Nonblocking) out.insert(s.target_ref);
  });
  return out;
}

}  // namespace detail

inline ElabDesign elaborate(const Design& d, const ElabOptions& opts = {}) {
  return detail::Elaborator(d, opts).run();
}

// Coerces ports used against their declared direction into alias
// connections, with one warning per coerced port.
inline ElabDesign check_coercion(ElabDesign e) {
  std::vector<std::set<int>> writes;
  for (const auto& p : e.processes) writes.push_back(detail::process_targets(p));

  auto written_in_scope = [&](int obj, int scope) {
    for (const auto& drv : e.drivers)
      if (drv.origin == DriverOrigin::User && drv.scope == scope && drv.target == obj) return true;
    for (size_t i = 0; i < e.processes.size(); ++i)
      if (e.processes[i].scope == scope && writes[i].count(obj)) return true;
    return false;
  };

  std::set<int> dropped;
  for (auto& pb : e.ports) {
    bool coerce = false;
    if (pb.dir == Direction::Input) {
      coerce = written_in_scope(pb.inner, pb.child_scope);
    } else if (pb.dir == Direction::Output && pb.outer >= 0) {
      coerce = written_in_scope(pb.outer, pb.parent_scope);
    }
    if (!coerce) continue;
    if (pb.connected && pb.outer < 0) {
      e.warnings.push_back({pb.port_loc, "port '" + pb.port +
                                             "' is written inside its module but connected to "
                                             "an expression; not coerced"});
      continue;
    }
    if (pb.driver >= 0) dropped.insert(pb.driver);
    if (pb.outer >= 0) e.merge(pb.inner, pb.outer);
    pb.driver = -1;
    e.warnings.push_back({pb.port_loc, "port '" + pb.port + "' coerced to inout"});
  }

  if (!dropped.empty()) {
    std::vector<int> remap(e.drivers.size(), -1);
    std::vector<ElabDriver> kept;
    for (size_t i = 0; i < e.drivers.size(); ++i) {
      if (dropped.count(static_cast<int>(i))) continue;
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(std::move(e.drivers[i]));
    }
    e.drivers = std::move(kept);
    for (auto& pb : e.ports)
      if (pb.driver >= 0) pb.driver = remap[static_cast<size_t>(pb.driver)];
  }
  return e;
}

// Rejects designs whose writers conflict with object kinds: processes may
// not write nets, and a variable has either one continuous driver or only
// procedural writers.
inline void validate(const ElabDesign& e) {
  const size_t n = e.objects.size();
  std::vector<bool> class_is_net(n, false);
  for (size_t i = 0; i < n; ++i)
    if (is_net(e.objects[i].kind)) class_is_net[static_cast<size_t>(e.find(static_cast<int>(i)))] = true;

  std::vector<int> driver_count(n, 0);
  for (size_t d = 0; d < e.drivers.size(); ++d) {
    size_t r = static_cast<size_t>(e.find(e.drivers[d].target));
    if (!class_is_net[r]) {
      if (++driver_count[r] > 1)
        throw ElabError("variable '" + e.objects[static_cast<size_t>(e.drivers[d].target)].name +
                            "' has more than one continuous driver",
                        e.drivers[d].loc);
    }
  }
  for (const auto& p : e.processes) {
    const ElabProcess* proc = &p;
    std::optional<ElabError> err;
    for_each_stmt(proc->body, [&](const Stmt& s) {
      if (err || (s.kind != StmtKind::Blocking && s.kind != StmtKind::Nonblocking)) return;
      size_t r = static_cast<size_t>(e.find(s.target_ref));
      if (class_is_net[r])
        err = ElabError("procedural assignment to net '" + s.target + "'", s.target_loc);
      else if (driver_count[r] > 0)
        err = ElabError("variable '" + s.target +
                            "' is written by a process and by a continuous assignment",
                        s.target_loc);
    });
    if (err) throw *err;
  }
  for (size_t i = 0; i < n; ++i) {
    const int r = e.find(static_cast<int>(i));
    if (r != static_cast<int>(i) && e.objects[i].width != e.objects[static_cast<size_t>(r)].width)
      throw ElabError("alias of '" + e.objects[i].name + "' with '" +
                          e.objects[static_cast<size_t>(r)].name + "' has mismatched widths",
                      e.objects[i].loc);
  }
}

// parse output -> checked, validated design.
inline ElabDesign elaborate_checked(const Design& d, const ElabOptions& opts = {}) {
  ElabDesign e = check_coercion(elaborate(normalize(d), opts));
  validate(e);
  return e;
}

}  // namespace vsched
