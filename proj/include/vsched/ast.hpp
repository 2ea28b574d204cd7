#pragma once

// Syntax tree for the supported Verilog subset. Nodes are plain values:
// copying a tree deep-copies it, and equality ignores source positions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "logic.hpp"
#include "source.hpp"

namespace vsched {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind { BitLit, DecLit, Ident, Unary, Binary, ArrayLit };

enum class UnOp { LogNot, BitNot };

enum class BinOp { BitAnd, BitOr, BitXor, LogAnd, LogOr, Add, Sub, Eq, Ne, Lt, Gt };

inline const char* op_text(UnOp op) { return op == UnOp::LogNot ? "!" : "~"; }

inline const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::BitAnd: return "&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::LogAnd: return "&&";
    case BinOp::LogOr: return "||";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Gt: return ">";
  }
  return "?";
}

struct Expr {
  ExprKind kind = ExprKind::DecLit;
  SourceLoc loc;
  Value bits;            // BitLit
  bool sized = true;     // BitLit: written as N'b... rather than 'b...
  uint64_t number = 0;   // DecLit
  std::string name;      // Ident
  UnOp unop = UnOp::LogNot;
  BinOp binop = BinOp::Add;
  std::vector<Expr> args;  // operands, or array elements
  int32_t ref = -1;        // Ident: object index once elaborated

  static Expr bit_lit(Value v, bool sized = true, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::BitLit;
    e.bits = std::move(v);
    e.sized = sized;
    e.loc = loc;
    return e;
  }
  static Expr dec_lit(uint64_t n, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::DecLit;
    e.number = n;
    e.loc = loc;
    return e;
  }
  static Expr ident(std::string name, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::Ident;
    e.name = std::move(name);
    e.loc = loc;
    return e;
  }
  static Expr unary(UnOp op, Expr operand, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::Unary;
    e.unop = op;
    e.args.push_back(std::move(operand));
    e.loc = loc;
    return e;
  }
  static Expr binary(BinOp op, Expr lhs, Expr rhs, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.binop = op;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    e.loc = loc;
    return e;
  }
  static Expr array(std::vector<Expr> elems, SourceLoc loc = {}) {
    Expr e;
    e.kind = ExprKind::ArrayLit;
    e.args = std::move(elems);
    e.loc = loc;
    return e;
  }

  bool operator==(const Expr& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case ExprKind::BitLit: return bits == o.bits && sized == o.sized;
      case ExprKind::DecLit: return number == o.number;
      case ExprKind::Ident: return name == o.name;
      case ExprKind::Unary: return unop == o.unop && args == o.args;
      case ExprKind::Binary: return binop == o.binop && args == o.args;
      case ExprKind::ArrayLit: return args == o.args;
    }
    return false;
  }
};

// Decimal literals take 32 bits when they fit and 64 otherwise.
inline uint32_t dec_lit_width(uint64_t n) { return n <= 0xffffffffull ? 32 : 64; }

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class EdgeQual { None, Edge, Posedge, Negedge };

inline const char* edge_qual_text(EdgeQual q) {
  switch (q) {
    case EdgeQual::None: return "";
    case EdgeQual::Edge: return "edge";
    case EdgeQual::Posedge: return "posedge";
    case EdgeQual::Negedge: return "negedge";
  }
  return "";
}

struct EventTerm {
  EdgeQual edge = EdgeQual::None;
  Expr expr;
  bool operator==(const EventTerm&) const = default;
};

struct EventExpr {
  bool star = false;
  std::vector<EventTerm> terms;
  bool operator==(const EventExpr&) const = default;
};

enum class SysTask { Display, Monitor, Finish };

inline const char* sys_task_name(SysTask t) {
  switch (t) {
    case SysTask::Display: return "$display";
    case SysTask::Monitor: return "$monitor";
    case SysTask::Finish: return "$finish";
  }
  return "?";
}

struct TaskArg {
  enum class Kind { Expr, String, Time } kind = Kind::Expr;
  vsched::Expr expr;  // Kind::Expr
  std::string text;   // Kind::String, unescaped
  bool operator==(const TaskArg&) const = default;
};

enum class StmtKind { Seq, If, Blocking, Nonblocking, EventCtl, DelayCtl, Wait, SysTask };

struct Stmt {
  StmtKind kind = StmtKind::Seq;
  SourceLoc loc;
  int pc = -1;               // dense pre-order index, set by normalize
  std::vector<Stmt> body;    // Seq: items; If: then, else; controls: optional body
  Expr expr;                 // If/Wait condition, assignment rhs
  std::string target;        // assignments
  SourceLoc target_loc;
  int32_t target_ref = -1;   // object index once elaborated
  std::optional<uint64_t> delay;  // intra-assignment delay, or the #n amount
  EventExpr event;           // EventCtl
  SysTask task = SysTask::Display;
  std::vector<TaskArg> args;

  static Stmt seq(std::vector<Stmt> items = {}, SourceLoc loc = {}) {
    Stmt s;
    s.kind = StmtKind::Seq;
    s.body = std::move(items);
    s.loc = loc;
    return s;
  }

  bool has_body() const {
    return (kind == StmtKind::EventCtl || kind == StmtKind::DelayCtl || kind == StmtKind::Wait) &&
           !body.empty();
  }

  bool operator==(const Stmt& o) const {
    if (kind != o.kind || pc != o.pc || body != o.body) return false;
    switch (kind) {
      case StmtKind::Seq: return true;
      case StmtKind::If:
      case StmtKind::Wait: return expr == o.expr;
      case StmtKind::Blocking:
      case StmtKind::Nonblocking: return target == o.target && delay == o.delay && expr == o.expr;
      case StmtKind::EventCtl: return event == o.event;
      case StmtKind::DelayCtl: return delay == o.delay;
      case StmtKind::SysTask: return task == o.task && args == o.args;
    }
    return false;
  }
};

// ---------------------------------------------------------------------------
// Modules
// ---------------------------------------------------------------------------

enum class Direction { Input, Output, Inout };

inline const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Input: return "input";
    case Direction::Output: return "output";
    case Direction::Inout: return "inout";
  }
  return "?";
}

enum class DataKind { Logic, Wire, Wand, Wor };

inline const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::Logic: return "logic";
    case DataKind::Wire: return "wire";
    case DataKind::Wand: return "wand";
    case DataKind::Wor: return "wor";
  }
  return "?";
}

inline bool is_net(DataKind k) { return k != DataKind::Logic; }

inline NetType net_type_of(DataKind k) {
  return k == DataKind::Wand ? NetType::Wand : k == DataKind::Wor ? NetType::Wor : NetType::Wire;
}

struct Range {
  int64_t msb = 0;
  int64_t lsb = 0;
  uint32_t width() const {
    return static_cast<uint32_t>((msb > lsb ? msb - lsb : lsb - msb) + 1);
  }
  bool operator==(const Range&) const = default;
};

// Rise, fall and optional turn-off components of a `#m` delay.
using DelaySpec = std::vector<uint64_t>;

struct PortDecl {
  Direction dir = Direction::Input;
  DataKind kind = DataKind::Wire;
  std::optional<Range> range;
  std::string name;
  std::optional<Range> array;
  std::optional<Expr> init;
  SourceLoc loc;

  uint32_t width() const { return range ? range->width() : 1; }
  bool operator==(const PortDecl& o) const {
    return dir == o.dir && kind == o.kind && range == o.range && name == o.name &&
           array == o.array && init == o.init;
  }
};

// Variable or net declaration of a single name.
struct Decl {
  DataKind kind = DataKind::Logic;
  std::optional<Range> range;
  DelaySpec delay;  // nets only
  std::string name;
  std::optional<Range> array;
  std::optional<Expr> init;
  SourceLoc loc;

  uint32_t width() const { return range ? range->width() : 1; }
  bool operator==(const Decl& o) const {
    return kind == o.kind && range == o.range && delay == o.delay && name == o.name &&
           array == o.array && init == o.init;
  }
};

enum class ProcKind { Initial, Final, Always, AlwaysComb, AlwaysFF, AlwaysLatch };

inline const char* proc_kind_name(ProcKind k) {
  switch (k) {
    case ProcKind::Initial: return "initial";
    case ProcKind::Final: return "final";
    case ProcKind::Always: return "always";
    case ProcKind::AlwaysComb: return "always_comb";
    case ProcKind::AlwaysFF: return "always_ff";
    case ProcKind::AlwaysLatch: return "always_latch";
  }
  return "?";
}

inline bool is_always_family(ProcKind k) {
  return k != ProcKind::Initial && k != ProcKind::Final;
}

struct Process {
  ProcKind kind = ProcKind::Initial;
  Stmt body;
  SourceLoc loc;
  bool operator==(const Process& o) const { return kind == o.kind && body == o.body; }
};

struct ContAssign {
  std::string target;
  DelaySpec delay;
  Expr rhs;
  SourceLoc loc;
  SourceLoc target_loc;
  bool operator==(const ContAssign& o) const {
    return target == o.target && delay == o.delay && rhs == o.rhs;
  }
};

struct Connection {
  std::string port;
  std::optional<Expr> expr;  // empty for `.p()`
  SourceLoc loc;
  bool operator==(const Connection& o) const { return port == o.port && expr == o.expr; }
};

struct Instance {
  std::string module;
  std::string name;
  std::vector<Connection> conns;
  SourceLoc loc;
  bool operator==(const Instance& o) const {
    return module == o.module && name == o.name && conns == o.conns;
  }
};

using Item = std::variant<Decl, Process, ContAssign, Instance>;

struct ModuleDecl {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<Item> items;
  SourceLoc loc;

  const PortDecl* find_port(const std::string& n) const {
    for (const auto& p : ports)
      if (p.name == n) return &p;
    return nullptr;
  }
  bool operator==(const ModuleDecl& o) const {
    return name == o.name && ports == o.ports && items == o.items;
  }
};

struct Design {
  std::vector<ModuleDecl> modules;
  std::map<std::string, size_t> index;

  const ModuleDecl* find(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? nullptr : &modules[it->second];
  }
  bool operator==(const Design& o) const { return modules == o.modules; }
};

// ---------------------------------------------------------------------------
// Traversal helpers
// ---------------------------------------------------------------------------

template <class F>
void for_each_ident(const Expr& e, F&& f) {
  if (e.kind == ExprKind::Ident) f(e);
  for (const auto& a : e.args) for_each_ident(a, f);
}

template <class F>
void for_each_ident_mut(Expr& e, F&& f) {
  if (e.kind == ExprKind::Ident) f(e);
  for (auto& a : e.args) for_each_ident_mut(a, f);
}

// Every expression a statement tree reads: conditions, right-hand sides,
// event terms and system task arguments. Assignment targets are not reads.
template <class F>
void for_each_read_expr(const Stmt& s, F&& f) {
  switch (s.kind) {
    case StmtKind::If:
    case StmtKind::Wait:
    case StmtKind::Blocking:
    case StmtKind::Nonblocking: f(s.expr); break;
    case StmtKind::EventCtl:
      for (const auto& t : s.event.terms) f(t.expr);
      break;
    case StmtKind::SysTask:
      for (const auto& a : s.args)
        if (a.kind == TaskArg::Kind::Expr) f(a.expr);
      break;
    default: break;
  }
  for (const auto& child : s.body) for_each_read_expr(child, f);
}

template <class F>
void for_each_stmt(const Stmt& s, F&& f) {
  f(s);
  for (const auto& child : s.body) for_each_stmt(child, f);
}

template <class F>
void for_each_stmt_mut(Stmt& s, F&& f) {
  f(s);
  for (auto& child : s.body) for_each_stmt_mut(child, f);
}

// Identifiers read anywhere in a statement, in first-occurrence order.
inline std::vector<std::string> static_sensitivity(const Stmt& s) {
  std::vector<std::string> names;
  for_each_read_expr(s, [&](const Expr& e) {
    for_each_ident(e, [&](const Expr& id) {
      if (std::find(names.begin(), names.end(), id.name) == names.end()) names.push_back(id.name);
    });
  });
  return names;
}

}  // namespace vsched
