#pragma once

// Recursive-descent parser for the supported subset. Anything outside the
// subset raises UnsupportedError naming the construct; it is never skipped.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ast.hpp"
#include "lexer.hpp"

namespace vsched {

namespace detail {

inline const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> words = {
      "module", "endmodule", "input", "output", "inout", "logic", "reg", "wire", "wand",
      "wor", "initial", "final", "always", "always_comb", "always_ff", "always_latch",
      "assign", "begin", "end", "if", "else", "posedge", "negedge", "edge", "or", "wait",
  };
  return words;
}

// Keywords of the full language that this subset rejects.
inline const std::set<std::string, std::less<>>& unsupported_words() {
  static const std::set<std::string, std::less<>> words = {
      "for", "while", "repeat", "forever", "do", "case", "casez", "casex", "endcase",
      "generate", "endgenerate", "genvar", "parameter", "localparam", "defparam", "function",
      "endfunction", "task", "endtask", "fork", "join", "join_any", "join_none", "disable",
      "force", "release", "deassign", "integer", "real", "time", "bit", "byte", "int",
      "shortint", "longint", "signed", "unsigned", "tri", "tri0", "tri1", "triand", "trior",
      "trireg", "supply0", "supply1", "uwire", "buf", "not", "and", "nand", "nor", "xor",
      "xnor", "bufif0", "bufif1", "notif0", "notif1", "pullup", "pulldown", "tran", "rtran",
      "specify", "endspecify", "primitive", "endprimitive", "interface", "endinterface",
      "package", "endpackage", "class", "endclass", "typedef", "struct", "enum", "union",
      "program", "endprogram", "unique", "priority", "return", "break", "continue",
      "automatic", "static", "const", "var", "import", "export", "localparam", "event",
      "macromodule", "config", "endconfig", "table", "endtable", "default",
  };
  return words;
}

}  // namespace detail

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Design parse_design() {
    Design d;
    while (!at_end()) {
      const Token& t = cur();
      if (t.word("module")) {
        ModuleDecl m = parse_module();
        if (d.index.count(m.name))
          throw SyntaxError("duplicate module '" + m.name + "'", m.loc);
        d.index[m.name] = d.modules.size();
        d.modules.push_back(std::move(m));
      } else {
        reject_or_fail("module");
      }
    }
    return d;
  }

  Expr parse_standalone_expr() {
    Expr e = parse_expr();
    if (!at_end()) fail("expected end of expression");
    return e;
  }

  Stmt parse_standalone_stmt() {
    Stmt s = parse_stmt();
    if (!at_end()) fail("expected end of statement");
    return s;
  }

 private:
  std::vector<Token> toks_;
  size_t i_ = 0;

  // -- token helpers --------------------------------------------------------

  const Token& cur() const { return toks_[i_]; }
  const Token& peek(size_t k = 1) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == Tok::End; }
  Token take() {
    Token t = cur();
    if (!at_end()) ++i_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, cur().loc); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      default: return "'" + t.text + "'";
    }
  }

  // Raises the most useful diagnostic for an unexpected token.
  [[noreturn]] void reject_or_fail(const std::string& expected) const {
    const Token& t = cur();
    if (t.kind == Tok::Ident && detail::unsupported_words().count(t.text))
      throw UnsupportedError(t.text, t.loc);
    if (t.kind == Tok::Directive) throw UnsupportedError("compiler directive " + t.text, t.loc);
    fail("expected " + expected + ", found " + describe(t));
  }

  bool accept_punct(std::string_view p) {
    if (cur().punct(p)) {
      ++i_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    if (cur().word(w)) {
      ++i_;
      return true;
    }
    return false;
  }
  Token expect_punct(std::string_view p) {
    if (!cur().punct(p)) reject_or_fail("'" + std::string(p) + "'");
    return take();
  }
  void expect_word(std::string_view w) {
    if (!cur().word(w)) reject_or_fail("'" + std::string(w) + "'");
    take();
  }

  Token expect_ident(const char* what = "identifier") {
    const Token& t = cur();
    if (t.kind != Tok::Ident || detail::reserved_words().count(t.text)) reject_or_fail(what);
    if (detail::unsupported_words().count(t.text)) throw UnsupportedError(t.text, t.loc);
    return take();
  }

  uint64_t parse_natural() {
    const Token& t = cur();
    if (t.kind == Tok::BasedLit) throw UnsupportedError("based literal as a constant", t.loc);
    if (t.kind != Tok::Number) reject_or_fail("number");
    std::string digits;
    for (char c : t.text)
      if (c != '_') digits.push_back(c);
    uint64_t n = 0;
    for (char c : digits) {
      uint64_t d = static_cast<uint64_t>(c - '0');
      if (n > (UINT64_MAX - d) / 10) fail("number too large");
      n = n * 10 + d;
    }
    take();
    return n;
  }

  // -- modules --------------------------------------------------------------

  ModuleDecl parse_module() {
    ModuleDecl m;
    m.loc = cur().loc;
    expect_word("module");
    m.name = expect_ident("module name").text;
    if (cur().punct("#")) throw UnsupportedError("parameter port list", cur().loc);
    if (accept_punct("(")) {
      if (!cur().punct(")")) parse_ports(m);
      expect_punct(")");
    }
    expect_punct(";");
    while (!cur().word("endmodule")) {
      if (at_end()) fail("missing 'endmodule'");
      parse_item(m);
    }
    take();
    check_unique_names(m);
    return m;
  }

  void check_unique_names(const ModuleDecl& m) {
    std::set<std::string> seen;
    auto note = [&](const std::string& n, SourceLoc loc) {
      if (!seen.insert(n).second) throw SyntaxError("duplicate declaration of '" + n + "'", loc);
    };
    for (const auto& p : m.ports) note(p.name, p.loc);
    for (const auto& it : m.items) {
      if (auto* d = std::get_if<Decl>(&it)) note(d->name, d->loc);
      if (auto* inst = std::get_if<Instance>(&it)) note(inst->name, inst->loc);
    }
  }

  std::optional<Range> parse_opt_range() {
    if (!cur().punct("[")) return std::nullopt;
    SourceLoc loc = take().loc;
    Range r;
    r.msb = static_cast<int64_t>(parse_natural());
    if (!cur().punct(":")) throw UnsupportedError("single-index declaration range", loc);
    take();
    r.lsb = static_cast<int64_t>(parse_natural());
    expect_punct("]");
    return r;
  }

  static bool is_direction(const Token& t) {
    return t.word("input") || t.word("output") || t.word("inout");
  }

  std::optional<DataKind> accept_data_kind() {
    const Token& t = cur();
    if (t.word("logic") || t.word("reg")) {
      take();
      return DataKind::Logic;
    }
    if (t.word("wire")) {
      take();
      if (cur().word("logic")) take();
      return DataKind::Wire;
    }
    if (t.word("wand")) {
      take();
      return DataKind::Wand;
    }
    if (t.word("wor")) {
      take();
      return DataKind::Wor;
    }
    return std::nullopt;
  }

  void parse_ports(ModuleDecl& m) {
    if (!is_direction(cur())) {
      if (cur().kind == Tok::Ident && !detail::reserved_words().count(cur().text) &&
          !detail::unsupported_words().count(cur().text))
        throw UnsupportedError("non-ANSI port list", cur().loc);
      reject_or_fail("port direction");
    }
    Direction dir = Direction::Input;
    DataKind kind = DataKind::Wire;
    std::optional<Range> range;
    for (;;) {
      if (is_direction(cur())) {
        const std::string d = take().text;
        dir = d == "input" ? Direction::Input : d == "output" ? Direction::Output : Direction::Inout;
        kind = accept_data_kind().value_or(DataKind::Wire);
        if (cur().word("signed") || cur().word("unsigned"))
          throw UnsupportedError(cur().text, cur().loc);
        range = parse_opt_range();
      }
      PortDecl p;
      p.dir = dir;
      p.kind = kind;
      p.range = range;
      Token name = expect_ident("port name");
      p.name = name.text;
      p.loc = name.loc;
      p.array = parse_opt_range();
      if (accept_punct("=")) p.init = parse_expr();
      m.ports.push_back(std::move(p));
      if (!accept_punct(",")) break;
    }
  }

  DelaySpec parse_delay_spec() {
    SourceLoc loc = expect_punct("#").loc;
    DelaySpec spec;
    if (accept_punct("(")) {
      spec.push_back(parse_natural());
      while (accept_punct(",")) spec.push_back(parse_natural());
      expect_punct(")");
    } else {
      spec.push_back(parse_natural());
    }
    if (spec.size() > 3) throw SyntaxError("delay has more than three components", loc);
    return spec;
  }

  void parse_item(ModuleDecl& m) {
    const Token& t = cur();
    if (t.kind == Tok::Directive) reject_or_fail("module item");
    if (is_direction(t)) throw UnsupportedError("non-ANSI port declaration", t.loc);
    if (t.word("logic") || t.word("reg") || t.word("wire") || t.word("wand") || t.word("wor")) {
      parse_decl(m);
      return;
    }
    if (t.word("assign")) {
      parse_assign(m);
      return;
    }
    static const std::pair<const char*, ProcKind> procs[] = {
        {"initial", ProcKind::Initial},         {"final", ProcKind::Final},
        {"always", ProcKind::Always},           {"always_comb", ProcKind::AlwaysComb},
        {"always_ff", ProcKind::AlwaysFF},      {"always_latch", ProcKind::AlwaysLatch},
    };
    for (const auto& [word, kind] : procs) {
      if (t.word(word)) {
        Process p;
        p.kind = kind;
        p.loc = take().loc;
        p.body = parse_stmt();
        m.items.emplace_back(std::move(p));
        return;
      }
    }
    if (t.kind == Tok::Ident && !detail::reserved_words().count(t.text) &&
        !detail::unsupported_words().count(t.text) && peek().kind == Tok::Ident) {
      parse_instance(m);
      return;
    }
    if (t.kind == Tok::Ident && !detail::reserved_words().count(t.text) &&
        !detail::unsupported_words().count(t.text) && peek().punct("#"))
      throw UnsupportedError("parameterised instantiation", t.loc);
    reject_or_fail("module item");
  }

  void parse_decl(ModuleDecl& m) {
    DataKind kind = *accept_data_kind();
    if (cur().word("signed") || cur().word("unsigned"))
      throw UnsupportedError(cur().text, cur().loc);
    std::optional<Range> range = parse_opt_range();
    DelaySpec delay;
    if (cur().punct("#")) {
      if (!is_net(kind)) throw SyntaxError("delay on a variable declaration", cur().loc);
      delay = parse_delay_spec();
    }
    for (;;) {
      Decl d;
      d.kind = kind;
      d.range = range;
      d.delay = delay;
      Token name = expect_ident("declaration name");
      d.name = name.text;
      d.loc = name.loc;
      d.array = parse_opt_range();
      if (accept_punct("=")) d.init = parse_expr();
      m.items.emplace_back(std::move(d));
      if (!accept_punct(",")) break;
    }
    expect_punct(";");
  }

  void parse_assign(ModuleDecl& m) {
    SourceLoc loc = take().loc;
    DelaySpec front;
    if (cur().punct("#")) front = parse_delay_spec();
    for (;;) {
      ContAssign a;
      a.loc = loc;
      Token target = expect_ident("assignment target");
      a.target = target.text;
      a.target_loc = target.loc;
      if (cur().punct("[")) throw UnsupportedError("bit-select", cur().loc);
      expect_punct("=");
      DelaySpec back;
      if (cur().punct("#")) back = parse_delay_spec();
      if (!front.empty() && !back.empty())
        throw SyntaxError("continuous assignment has two delays", target.loc);
      a.delay = front.empty() ? back : front;
      a.rhs = parse_expr();
      m.items.emplace_back(std::move(a));
      if (!accept_punct(",")) break;
    }
    expect_punct(";");
  }

  void parse_instance(ModuleDecl& m) {
    Instance inst;
    Token mod = take();
    inst.module = mod.text;
    Token name = expect_ident("instance name");
    inst.name = name.text;
    inst.loc = name.loc;
    if (cur().punct("[")) throw UnsupportedError("instance array", cur().loc);
    expect_punct("(");
    if (!cur().punct(")")) {
      for (;;) {
        if (!cur().punct(".")) throw UnsupportedError("positional port connection", cur().loc);
        SourceLoc loc = take().loc;
        if (cur().punct("*")) throw UnsupportedError(".* connection", loc);
        Connection c;
        c.loc = loc;
        Token port = expect_ident("port name");
        c.port = port.text;
        if (accept_punct("(")) {
          if (!cur().punct(")")) c.expr = parse_expr();
          expect_punct(")");
        } else {
          c.expr = Expr::ident(port.text, port.loc);
        }
        for (const auto& prev : inst.conns)
          if (prev.port == c.port) throw SyntaxError("port '" + c.port + "' connected twice", loc);
        inst.conns.push_back(std::move(c));
        if (!accept_punct(",")) break;
      }
    }
    expect_punct(")");
    expect_punct(";");
    m.items.emplace_back(std::move(inst));
  }

  // -- statements -------------------------------------------------------------

  // Body of a control statement: `;` means none.
  std::vector<Stmt> parse_opt_body() {
    if (accept_punct(";")) return {};
    std::vector<Stmt> body;
    body.push_back(parse_stmt());
    return body;
  }

  Stmt parse_stmt() {
    const Token& t = cur();
    Stmt s;
    s.loc = t.loc;
    if (t.punct(";")) {
      take();
      return Stmt::seq({}, s.loc);
    }
    if (t.word("begin")) {
      take();
      if (cur().punct(":")) throw UnsupportedError("named block", cur().loc);
      s.kind = StmtKind::Seq;
      while (!cur().word("end")) {
        if (at_end()) fail("missing 'end'");
        s.body.push_back(parse_stmt());
      }
      take();
      return s;
    }
    if (t.word("if")) {
      take();
      s.kind = StmtKind::If;
      expect_punct("(");
      s.expr = parse_expr();
      expect_punct(")");
      s.body.push_back(parse_stmt());
      if (accept_word("else")) s.body.push_back(parse_stmt());
      return s;
    }
    if (t.punct("@")) {
      take();
      s.kind = StmtKind::EventCtl;
      s.event = parse_event_control();
      s.body = parse_opt_body();
      return s;
    }
    if (t.punct("#")) {
      take();
      s.kind = StmtKind::DelayCtl;
      if (accept_punct("(")) {
        s.delay = parse_natural();
        expect_punct(")");
      } else {
        s.delay = parse_natural();
      }
      s.body = parse_opt_body();
      return s;
    }
    if (t.word("wait")) {
      take();
      s.kind = StmtKind::Wait;
      expect_punct("(");
      s.expr = parse_expr();
      expect_punct(")");
      s.body = parse_opt_body();
      return s;
    }
    if (t.kind == Tok::SysIdent) return parse_sys_task();
    if (t.kind == Tok::Ident && !detail::reserved_words().count(t.text) &&
        !detail::unsupported_words().count(t.text)) {
      Token target = take();
      s.target = target.text;
      s.target_loc = target.loc;
      if (cur().punct("[")) throw UnsupportedError("bit-select", cur().loc);
      if (cur().punct("(")) throw UnsupportedError("task call", target.loc);
      if (accept_punct("=")) {
        s.kind = StmtKind::Blocking;
      } else if (accept_punct("<=")) {
        s.kind = StmtKind::Nonblocking;
      } else if (cur().punct("++") || cur().punct("+") || cur().punct("-")) {
        throw UnsupportedError("increment or compound assignment", cur().loc);
      } else {
        reject_or_fail("'=' or '<='");
      }
      if (accept_punct("#")) {
        if (accept_punct("(")) {
          s.delay = parse_natural();
          expect_punct(")");
        } else {
          s.delay = parse_natural();
        }
      } else if (cur().punct("@")) {
        throw UnsupportedError("intra-assignment event control", cur().loc);
      }
      s.expr = parse_expr();
      expect_punct(";");
      return s;
    }
    reject_or_fail("statement");
  }

  EventExpr parse_event_control() {
    EventExpr ev;
    if (accept_punct("*")) {
      ev.star = true;
      return ev;
    }
    if (cur().kind == Tok::Ident && !detail::reserved_words().count(cur().text)) {
      Token id = take();
      ev.terms.push_back({EdgeQual::None, Expr::ident(id.text, id.loc)});
      return ev;
    }
    expect_punct("(");
    if (accept_punct("*")) {
      expect_punct(")");
      ev.star = true;
      return ev;
    }
    for (;;) {
      EventTerm term;
      if (accept_word("posedge")) term.edge = EdgeQual::Posedge;
      else if (accept_word("negedge")) term.edge = EdgeQual::Negedge;
      else if (accept_word("edge")) term.edge = EdgeQual::Edge;
      term.expr = parse_expr();
      ev.terms.push_back(std::move(term));
      if (accept_punct(",") || accept_word("or")) continue;
      break;
    }
    if (cur().word("iff")) throw UnsupportedError("iff", cur().loc);
    expect_punct(")");
    return ev;
  }

  Stmt parse_sys_task() {
    Token name = take();
    Stmt s;
    s.kind = StmtKind::SysTask;
    s.loc = name.loc;
    if (name.text == "$display") s.task = SysTask::Display;
    else if (name.text == "$monitor") s.task = SysTask::Monitor;
    else if (name.text == "$finish") s.task = SysTask::Finish;
    else throw UnsupportedError("system task " + name.text, name.loc);
    if (accept_punct("(")) {
      if (!cur().punct(")")) {
        for (;;) {
          s.args.push_back(parse_task_arg());
          if (!accept_punct(",")) break;
        }
      }
      expect_punct(")");
    }
    if (s.task == SysTask::Finish) {
      // `$finish(n)` accepts one diagnostic-level constant, which has no effect.
      if (s.args.size() > 1 ||
          (s.args.size() == 1 && (s.args[0].kind != TaskArg::Kind::Expr ||
                                  s.args[0].expr.kind != ExprKind::DecLit)))
        throw SyntaxError("$finish takes at most one numeric argument", name.loc);
      s.args.clear();
    }
    expect_punct(";");
    return s;
  }

  TaskArg parse_task_arg() {
    TaskArg a;
    if (cur().kind == Tok::String) {
      a.kind = TaskArg::Kind::String;
      a.text = take().text;
      return a;
    }
    if (cur().kind == Tok::SysIdent && cur().text == "$time" &&
        (peek().punct(",") || peek().punct(")"))) {
      take();
      a.kind = TaskArg::Kind::Time;
      return a;
    }
    a.kind = TaskArg::Kind::Expr;
    a.expr = parse_expr();
    return a;
  }

  // -- expressions ------------------------------------------------------------

  // Binary precedence levels, loosest first.
  static int binary_level(const Token& t, BinOp& op) {
    if (t.kind != Tok::Punct) return -1;
    static const std::pair<const char*, std::pair<BinOp, int>> table[] = {
        {"||", {BinOp::LogOr, 0}}, {"&&", {BinOp::LogAnd, 1}}, {"|", {BinOp::BitOr, 2}},
        {"^", {BinOp::BitXor, 3}}, {"&", {BinOp::BitAnd, 4}},  {"==", {BinOp::Eq, 5}},
        {"!=", {BinOp::Ne, 5}},    {"<", {BinOp::Lt, 6}},      {">", {BinOp::Gt, 6}},
        {"+", {BinOp::Add, 7}},    {"-", {BinOp::Sub, 7}},
    };
    for (const auto& [text, entry] : table) {
      if (t.text == text) {
        op = entry.first;
        return entry.second;
      }
    }
    return -1;
  }

  static bool unsupported_operator(const Token& t) {
    static const std::set<std::string, std::less<>> ops = {
        "*", "/", "%", "**", "<<", ">>", "<<<", ">>>", ">=", "===", "!==", "~&", "~|",
        "~^", "^~", "?", "->", "<=",
    };
    return t.kind == Tok::Punct && ops.count(t.text);
  }

  Expr parse_expr() { return parse_binary(0); }

  Expr parse_binary(int min_level) {
    Expr lhs = parse_unary();
    for (;;) {
      BinOp op;
      int level = binary_level(cur(), op);
      if (level < 0) {
        // The nonblocking `<=` is consumed before any expression starts, so
        // here it can only be the relational operator.
        if (unsupported_operator(cur()))
          throw UnsupportedError("operator " + cur().text, cur().loc);
        return lhs;
      }
      if (level < min_level) return lhs;
      SourceLoc loc = take().loc;
      Expr rhs = parse_binary(level + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs), loc);
    }
  }

  Expr parse_unary() {
    const Token& t = cur();
    if (t.punct("!") || t.punct("~")) {
      SourceLoc loc = take().loc;
      UnOp op = t.text == "!" ? UnOp::LogNot : UnOp::BitNot;
      return Expr::unary(op, parse_unary(), loc);
    }
    if (t.punct("&") || t.punct("|") || t.punct("^") || t.punct("~&") || t.punct("~|") ||
        t.punct("~^") || t.punct("^~"))
      throw UnsupportedError("reduction operator " + t.text, t.loc);
    if (t.punct("-") || t.punct("+")) throw UnsupportedError("unary " + t.text, t.loc);
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = cur();
    if (t.punct("(")) {
      take();
      Expr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Tok::Number) {
      SourceLoc loc = t.loc;
      return Expr::dec_lit(parse_natural(), loc);
    }
    if (t.kind == Tok::BasedLit) return parse_based(take());
    if (t.punct("'{")) {
      SourceLoc loc = take().loc;
      std::vector<Expr> elems;
      if (!cur().punct("}")) {
        for (;;) {
          elems.push_back(parse_expr());
          if (!accept_punct(",")) break;
        }
      }
      expect_punct("}");
      return Expr::array(std::move(elems), loc);
    }
    if (t.punct("{")) throw UnsupportedError("concatenation", t.loc);
    if (t.kind == Tok::String) throw SyntaxError("string literal outside a system task", t.loc);
    if (t.kind == Tok::SysIdent) {
      if (t.text == "$time") throw SyntaxError("$time is only allowed as a system task argument", t.loc);
      throw UnsupportedError("system function " + t.text, t.loc);
    }
    if (t.kind == Tok::Ident && !detail::reserved_words().count(t.text)) {
      if (detail::unsupported_words().count(t.text)) throw UnsupportedError(t.text, t.loc);
      Token id = take();
      if (cur().punct("[")) throw UnsupportedError("bit-select", cur().loc);
      if (cur().punct("(")) throw UnsupportedError("function call", id.loc);
      return Expr::ident(id.text, id.loc);
    }
    reject_or_fail("expression");
  }

  Expr parse_based(const Token& t) {
    const std::string& s = t.text;
    size_t q = s.find('\'');
    std::string size_text = s.substr(0, q);
    size_t b = q + 1;
    if (s[b] == 's' || s[b] == 'S') throw UnsupportedError("signed literal", t.loc);
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(s[b])));
    if (base == 'h' || base == 'o' || base == 'd')
      throw UnsupportedError(std::string("'") + base + " literal", t.loc);
    if (base != 'b') throw SyntaxError("unknown literal base '" + std::string(1, s[b]) + "'", t.loc);
    std::string digits;
    for (char c : s.substr(b + 1)) {
      if (c == '_') continue;
      auto bit = bit_from_char(c);
      if (!bit) throw SyntaxError("invalid binary digit '" + std::string(1, c) + "'", t.loc);
      digits.push_back(bit_char(*bit));
    }
    if (size_text.empty())
      return Expr::bit_lit(*Value::from_string(digits), false, t.loc);
    uint64_t width = 0;
    for (char c : size_text) {
      if (c == '_') continue;
      width = width * 10 + static_cast<uint64_t>(c - '0');
      if (width > (1u << 20)) throw SyntaxError("literal width too large", t.loc);
    }
    if (width == 0) throw SyntaxError("literal width must be positive", t.loc);
    if (digits.size() > width)
      throw SyntaxError("literal has more digits than its width " + std::to_string(width), t.loc);
    char fill = (digits[0] == 'x' || digits[0] == 'z') ? digits[0] : '0';
    digits = std::string(width - digits.size(), fill) + digits;
    return Expr::bit_lit(*Value::from_string(digits), true, t.loc);
  }
};

inline Design parse(std::string_view source) { return Parser(source).parse_design(); }

inline Expr parse_expression(std::string_view source) {
  return Parser(source).parse_standalone_expr();
}

inline Stmt parse_statement(std::string_view source) {
  return Parser(source).parse_standalone_stmt();
}

}  // namespace vsched
