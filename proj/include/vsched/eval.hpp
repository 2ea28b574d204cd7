#pragma once

// Expression evaluation. Operand widths follow Verilog's context rules:
// arithmetic and bitwise operands are extended to the widest of the operands
// and the surrounding context, comparisons size their operands against each
// other, and logical operators are self-determined.

#include <map>
#include <string>

#include "ast.hpp"
#include "source.hpp"

namespace vsched {

// `lookup(ident_expr)` returns the identifier's current value.
template <class Lookup>
uint32_t self_width(const Expr& e, Lookup&& lookup) {
  switch (e.kind) {
    case ExprKind::BitLit: return e.bits.width();
    case ExprKind::DecLit: return dec_lit_width(e.number);
    case ExprKind::Ident: return lookup(e).width();
    case ExprKind::Unary:
      return e.unop == UnOp::BitNot ? self_width(e.args[0], lookup) : 1;
    case ExprKind::Binary:
      switch (e.binop) {
        case BinOp::BitAnd:
        case BinOp::BitOr:
        case BinOp::BitXor:
        case BinOp::Add:
        case BinOp::Sub:
          return std::max(self_width(e.args[0], lookup), self_width(e.args[1], lookup));
        default: return 1;
      }
    case ExprKind::ArrayLit: throw ElabError("array literal used as a value", e.loc);
  }
  return 1;
}

// Evaluates `e` in a context of at least `ctx` bits. The result is
// max(ctx, self_width(e)) bits wide.
template <class Lookup>
Value eval_expr(const Expr& e, Lookup&& lookup, uint32_t ctx = 0) {
  switch (e.kind) {
    case ExprKind::BitLit: return e.bits.width() < ctx ? e.bits.resized(ctx) : e.bits;
    case ExprKind::DecLit:
      return Value::from_uint(std::max(ctx, dec_lit_width(e.number)), e.number);
    case ExprKind::Ident: {
      const Value& v = lookup(e);
      return v.width() < ctx ? v.resized(ctx) : v;
    }
    case ExprKind::Unary: {
      if (e.unop == UnOp::BitNot) {
        uint32_t w = std::max(ctx, self_width(e.args[0], lookup));
        return op_not(eval_expr(e.args[0], lookup, w));
      }
      Value r = op_logical_not(eval_expr(e.args[0], lookup));
      return ctx > 1 ? r.resized(ctx) : r;
    }
    case ExprKind::Binary: {
      const Expr& l = e.args[0];
      const Expr& r = e.args[1];
      switch (e.binop) {
        case BinOp::BitAnd:
        case BinOp::BitOr:
        case BinOp::BitXor:
        case BinOp::Add:
        case BinOp::Sub: {
          uint32_t w = std::max({ctx, self_width(l, lookup), self_width(r, lookup)});
          Value a = eval_expr(l, lookup, w), b = eval_expr(r, lookup, w);
          switch (e.binop) {
            case BinOp::BitAnd: return op_and(a, b);
            case BinOp::BitOr: return op_or(a, b);
            case BinOp::BitXor: return op_xor(a, b);
            case BinOp::Add: return op_add(a, b);
            default: return op_sub(a, b);
          }
        }
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Gt: {
          uint32_t w = std::max(self_width(l, lookup), self_width(r, lookup));
          Value a = eval_expr(l, lookup, w), b = eval_expr(r, lookup, w);
          Value out = e.binop == BinOp::Eq   ? op_eq(a, b)
                      : e.binop == BinOp::Ne ? op_ne(a, b)
                      : e.binop == BinOp::Lt ? op_lt(a, b)
                                             : op_gt(a, b);
          return ctx > 1 ? out.resized(ctx) : out;
        }
        case BinOp::LogAnd:
        case BinOp::LogOr: {
          Value a = eval_expr(l, lookup), b = eval_expr(r, lookup);
          Value out = e.binop == BinOp::LogAnd ? op_logical_and(a, b) : op_logical_or(a, b);
          return ctx > 1 ? out.resized(ctx) : out;
        }
      }
      break;
    }
    case ExprKind::ArrayLit: throw ElabError("array literal used as a value", e.loc);
  }
  return Value::x(std::max<uint32_t>(ctx, 1));
}

// Evaluates for assignment to a `width`-bit target: context-sized, then
// truncated.
template <class Lookup>
Value eval_for_target(const Expr& e, Lookup&& lookup, uint32_t width) {
  return eval_expr(e, lookup, width).resized(width);
}

using Env = std::map<std::string, Value>;

// Convenience overload over a name-keyed environment.
inline Value eval_expr(const Expr& e, const Env& env) {
  auto lookup = [&](const Expr& id) -> const Value& {
    auto it = env.find(id.name);
    if (it == env.end()) throw ElabError("unbound identifier '" + id.name + "'", id.loc);
    return it->second;
  };
  return eval_expr(e, lookup);
}

// Evaluates a constant expression; any identifier is an error.
inline Value eval_const(const Expr& e, uint32_t width) {
  auto lookup = [](const Expr& id) -> const Value& {
    throw ElabError("initialiser must be constant but references '" + id.name + "'", id.loc);
  };
  return eval_for_target(e, lookup, width);
}

}  // namespace vsched
