#pragma once

// Canonical form consumed by elaboration and shown to users, plus a printer
// whose output parses back to the same tree.

#include <sstream>
#include <string>

#include "ast.hpp"

namespace vsched {

namespace detail {

inline Stmt as_body(Stmt s);

inline void normalize_stmt(Stmt& s) {
  switch (s.kind) {
    case StmtKind::Seq:
      for (auto& child : s.body) normalize_stmt(child);
      break;
    case StmtKind::If:
      s.body[0] = as_body(std::move(s.body[0]));
      if (s.body.size() < 2) s.body.push_back(Stmt::seq({}, s.loc));
      else s.body[1] = as_body(std::move(s.body[1]));
      break;
    case StmtKind::EventCtl:
    case StmtKind::DelayCtl:
    case StmtKind::Wait:
      if (s.body.empty()) s.body.push_back(Stmt::seq({}, s.loc));
      else s.body[0] = as_body(std::move(s.body[0]));
      break;
    default:
      break;
  }
}

// Statements in body positions are sequences.
inline Stmt as_body(Stmt s) {
  if (s.kind != StmtKind::Seq) {
    SourceLoc loc = s.loc;
    std::vector<Stmt> items;
    items.push_back(std::move(s));
    s = Stmt::seq(std::move(items), loc);
  }
  normalize_stmt(s);
  return s;
}

inline void number_pcs(Stmt& s, int& next) {
  s.pc = next++;
  for (auto& child : s.body) number_pcs(child, next);
}

}  // namespace detail

inline int count_stmts(const Stmt& s) {
  int n = 1;
  for (const auto& child : s.body) n += count_stmts(child);
  return n;
}

// Normalises one process body and numbers its statements in pre-order.
inline Stmt normalize_body(Stmt body) {
  body = detail::as_body(std::move(body));
  int next = 0;
  detail::number_pcs(body, next);
  return body;
}

inline Design normalize(Design d) {
  for (auto& m : d.modules)
    for (auto& item : m.items)
      if (auto* p = std::get_if<Process>(&item)) p->body = normalize_body(std::move(p->body));
  return d;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

inline std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

inline std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::BitLit:
      return (e.sized ? std::to_string(e.bits.width()) : std::string()) + "'b" + e.bits.str();
    case ExprKind::DecLit: return std::to_string(e.number);
    case ExprKind::Ident: return e.name;
    case ExprKind::Unary: return op_text(e.unop) + print_expr(e.args[0]);
    case ExprKind::Binary:
      return "(" + print_expr(e.args[0]) + " " + op_text(e.binop) + " " + print_expr(e.args[1]) + ")";
    case ExprKind::ArrayLit: {
      std::string out = "'{";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(e.args[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

inline std::string print_event(const EventExpr& ev) {
  if (ev.star) return "@(*)";
  std::string out = "@(";
  for (size_t i = 0; i < ev.terms.size(); ++i) {
    if (i) out += " or ";
    if (ev.terms[i].edge != EdgeQual::None) out += std::string(edge_qual_text(ev.terms[i].edge)) + " ";
    out += print_expr(ev.terms[i].expr);
  }
  return out + ")";
}

inline std::string print_delay(const DelaySpec& d) {
  if (d.empty()) return "";
  if (d.size() == 1) return "#" + std::to_string(d[0]);
  std::string out = "#(";
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(d[i]);
  }
  return out + ")";
}

inline std::string print_task_arg(const TaskArg& a) {
  switch (a.kind) {
    case TaskArg::Kind::String: return escape_string(a.text);
    case TaskArg::Kind::Time: return "$time";
    case TaskArg::Kind::Expr: return print_expr(a.expr);
  }
  return "?";
}

// One-line summary of a statement's head, used for process locations.
inline std::string stmt_head(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Seq: return "begin";
    case StmtKind::If: return "if (" + print_expr(s.expr) + ")";
    case StmtKind::Blocking:
    case StmtKind::Nonblocking: {
      std::string out = s.target + (s.kind == StmtKind::Blocking ? " = " : " <= ");
      if (s.delay) out += "#" + std::to_string(*s.delay) + " ";
      return out + print_expr(s.expr) + ";";
    }
    case StmtKind::EventCtl: return print_event(s.event);
    case StmtKind::DelayCtl: return "#" + std::to_string(s.delay.value_or(0));
    case StmtKind::Wait: return "wait (" + print_expr(s.expr) + ")";
    case StmtKind::SysTask: {
      std::string out = sys_task_name(s.task);
      if (s.task == SysTask::Finish && s.args.empty()) return out + ";";
      out += "(";
      for (size_t i = 0; i < s.args.size(); ++i) {
        if (i) out += ", ";
        out += print_task_arg(s.args[i]);
      }
      return out + ");";
    }
  }
  return "?";
}

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case StmtKind::Seq:
      if (s.body.empty()) {
        os << "begin end\n";
        return;
      }
      os << "begin\n";
      for (const auto& child : s.body) {
        os << pad << "  ";
        print_stmt(os, child, indent + 1);
      }
      os << pad << "end\n";
      return;
    case StmtKind::If:
      os << stmt_head(s) << " ";
      print_stmt(os, s.body[0], indent);
      if (s.body.size() > 1) {
        os << pad << "else ";
        print_stmt(os, s.body[1], indent);
      }
      return;
    case StmtKind::EventCtl:
    case StmtKind::DelayCtl:
    case StmtKind::Wait:
      os << stmt_head(s);
      if (s.body.empty()) {
        os << ";\n";
      } else {
        os << " ";
        print_stmt(os, s.body[0], indent);
      }
      return;
    default:
      os << stmt_head(s) << "\n";
  }
}

inline std::string print_stmt(const Stmt& s) {
  std::ostringstream os;
  print_stmt(os, s, 0);
  return os.str();
}

inline std::string print_range(const std::optional<Range>& r) {
  if (!r) return "";
  return "[" + std::to_string(r->msb) + ":" + std::to_string(r->lsb) + "]";
}

inline std::string print_module(const ModuleDecl& m) {
  std::ostringstream os;
  os << "module " << m.name;
  if (!m.ports.empty()) {
    os << "(";
    for (size_t i = 0; i < m.ports.size(); ++i) {
      const PortDecl& p = m.ports[i];
      os << (i ? ",\n  " : "\n  ") << direction_name(p.dir) << " " << data_kind_name(p.kind);
      if (p.range) os << " " << print_range(p.range);
      os << " " << p.name;
      if (p.array) os << " " << print_range(p.array);
      if (p.init) os << " = " << print_expr(*p.init);
    }
    os << ")";
  }
  os << ";\n";
  for (const auto& item : m.items) {
    if (auto* d = std::get_if<Decl>(&item)) {
      os << "  " << data_kind_name(d->kind);
      if (d->range) os << " " << print_range(d->range);
      if (!d->delay.empty()) os << " " << print_delay(d->delay);
      os << " " << d->name;
      if (d->array) os << " " << print_range(d->array);
      if (d->init) os << " = " << print_expr(*d->init);
      os << ";\n";
    } else if (auto* a = std::get_if<ContAssign>(&item)) {
      os << "  assign ";
      if (!a->delay.empty()) os << print_delay(a->delay) << " ";
      os << a->target << " = " << print_expr(a->rhs) << ";\n";
    } else if (auto* p = std::get_if<Process>(&item)) {
      os << "  " << proc_kind_name(p->kind) << " ";
      print_stmt(os, p->body, 1);
    } else if (auto* inst = std::get_if<Instance>(&item)) {
      os << "  " << inst->module << " " << inst->name << "(";
      for (size_t i = 0; i < inst->conns.size(); ++i) {
        const Connection& c = inst->conns[i];
        os << (i ? ", " : "") << "." << c.port << "(" << (c.expr ? print_expr(*c.expr) : "") << ")";
      }
      os << ");\n";
    }
  }
  os << "endmodule\n";
  return os.str();
}

inline std::string print_design(const Design& d) {
  std::string out;
  for (size_t i = 0; i < d.modules.size(); ++i) {
    if (i) out += "\n";
    out += print_module(d.modules[i]);
  }
  return out;
}

}  // namespace vsched
