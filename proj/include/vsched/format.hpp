#pragma once

// Rendering of $display/$monitor argument lists.

#include <string>
#include <vector>

#include "ast.hpp"

namespace vsched {

struct FormatPiece {
  std::string literal;  // text emitted before the directive
  bool directive = false;
  Radix radix = Radix::Default;
};

// Splits a format string into literal runs and directives. Field widths
// (`%0d`, `%4b`) are accepted and ignored.
inline std::vector<FormatPiece> parse_format(const std::string& fmt, SourceLoc loc = {}) {
  std::vector<FormatPiece> out;
  std::string lit;
  for (size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      lit.push_back(fmt[i]);
      continue;
    }
    ++i;
    if (i < fmt.size() && fmt[i] == '%') {
      lit.push_back('%');
      continue;
    }
    while (i < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[i]))) ++i;
    if (i >= fmt.size()) throw SyntaxError("format string ends inside a directive", loc);
    FormatPiece p;
    p.literal = std::move(lit);
    lit.clear();
    p.directive = true;
    switch (std::tolower(static_cast<unsigned char>(fmt[i]))) {
      case 'b': p.radix = Radix::Binary; break;
      case 'd': p.radix = Radix::Decimal; break;
      case 't': p.radix = Radix::Time; break;
      default: throw UnsupportedError(std::string("format directive %") + fmt[i], loc);
    }
    out.push_back(std::move(p));
  }
  if (!lit.empty()) out.push_back({lit, false, Radix::Default});
  return out;
}

inline bool is_format_call(const std::vector<TaskArg>& args) {
  return !args.empty() && args[0].kind == TaskArg::Kind::String &&
         args[0].text.find('%') != std::string::npos;
}

// Checks directive/argument agreement; run once at elaboration.
inline void validate_task_args(const Stmt& s) {
  if (!is_format_call(s.args)) return;
  size_t directives = 0;
  for (const auto& p : parse_format(s.args[0].text, s.loc)) directives += p.directive;
  if (directives != s.args.size() - 1)
    throw ElabError(std::string(sys_task_name(s.task)) + " format has " + std::to_string(directives) +
                        " directive(s) but " + std::to_string(s.args.size() - 1) + " argument(s)",
                    s.loc);
  for (size_t i = 1; i < s.args.size(); ++i)
    if (s.args[i].kind == TaskArg::Kind::String)
      throw UnsupportedError("string argument to a format directive", s.loc);
}

inline Value time_value(uint64_t t) { return Value::from_uint(64, t); }

// `eval(expr)` yields an argument's value.
template <class Eval>
std::string render_task_args(const std::vector<TaskArg>& args, uint64_t now, Eval&& eval) {
  auto arg_value = [&](const TaskArg& a) {
    return a.kind == TaskArg::Kind::Time ? time_value(now) : eval(a.expr);
  };
  std::string out;
  if (is_format_call(args)) {
    size_t next = 1;
    for (const auto& p : parse_format(args[0].text)) {
      out += p.literal;
      if (!p.directive) continue;
      const TaskArg& a = args[next++];
      Radix r = p.radix;
      if (r == Radix::Default) r = Radix::Decimal;
      out += format_value(arg_value(a), r);
    }
    return out;
  }
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ' ';
    const TaskArg& a = args[i];
    if (a.kind == TaskArg::Kind::String) out += a.text;
    else if (a.kind == TaskArg::Kind::Time) out += std::to_string(now);
    else out += format_value(eval(a.expr));
  }
  return out;
}

}  // namespace vsched
