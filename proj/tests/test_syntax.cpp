#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "vsched/frontend.hpp"
#include "vsched/lexer.hpp"
#include "vsched/normalize.hpp"
#include "vsched/parser.hpp"

using namespace vsched;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(VSCHED_DESIGNS))
    if (e.path().extension() == ".sv") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

const Stmt& first_body(const Design& d, size_t item = 0) {
  return std::get<Process>(d.modules[0].items[item]).body;
}

template <class E>
void expect_throws_at(const std::string& src, uint32_t line, uint32_t col) {
  try {
    parse(src);
    ADD_FAILURE() << "no error for: " << src;
  } catch (const E& e) {
    EXPECT_EQ(e.loc().line, line) << e.what();
    EXPECT_EQ(e.loc().col, col) << e.what();
  } catch (const Error& e) {
    ADD_FAILURE() << "wrong error kind: " << e.what();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

TEST(Lexer, TokensCommentsAndPositions) {
  auto toks = tokenize("module m; // c\n /* block\n */ logic a; endmodule");
  ASSERT_GE(toks.size(), 7u);
  EXPECT_EQ(toks[0].text, "module");
  EXPECT_EQ(toks[0].loc.line, 1u);
  EXPECT_EQ(toks[0].loc.col, 1u);
  EXPECT_EQ(toks[3].text, "logic");
  EXPECT_EQ(toks[3].loc.line, 3u);
  EXPECT_EQ(toks[3].loc.col, 5u);
  EXPECT_EQ(toks.back().kind, Tok::End);
}

TEST(Lexer, StringEscapesAndBasedLiterals) {
  auto toks = tokenize(R"($display("a\tb\n\"q\"", 4 'b1x0z))");
  EXPECT_EQ(toks[0].kind, Tok::SysIdent);
  EXPECT_EQ(toks[2].kind, Tok::String);
  EXPECT_EQ(toks[2].text, "a\tb\n\"q\"");
  EXPECT_EQ(toks[4].kind, Tok::BasedLit);
}

TEST(Lexer, RejectsRealsAndUnbasedUnsized) {
  EXPECT_THROW(tokenize("1.5"), UnsupportedError);
  EXPECT_THROW(tokenize("'1"), UnsupportedError);
}

// ---------------------------------------------------------------------------
// Literals and expressions
// ---------------------------------------------------------------------------

TEST(Literals, SizedBinary) {
  EXPECT_EQ(parse_expression("4'b1x0z").bits.str(), "1x0z");
  EXPECT_EQ(parse_expression("4'b1").bits.str(), "0001");
  EXPECT_EQ(parse_expression("2'bx").bits.str(), "xx");
  EXPECT_EQ(parse_expression("3'bz1").bits.str(), "zz1");
  EXPECT_EQ(parse_expression("4'b1_0_1").bits.str(), "0101");
  EXPECT_THROW(parse_expression("2'b101"), Error);
}

TEST(Literals, UnsizedBinaryTakesDigitCount) {
  Expr e = parse_expression("'b101");
  EXPECT_FALSE(e.sized);
  EXPECT_EQ(e.bits.str(), "101");
}

TEST(Literals, DecimalIs32BitsUnlessTooLarge) {
  Expr e = parse_expression("12");
  EXPECT_EQ(e.kind, ExprKind::DecLit);
  EXPECT_EQ(e.number, 12u);
  EXPECT_EQ(dec_lit_width(12), 32u);
  EXPECT_EQ(dec_lit_width(0x100000000ull), 64u);
}

TEST(Literals, OtherBasesAreUnsupported) {
  EXPECT_THROW(parse_expression("8'hff"), UnsupportedError);
  EXPECT_THROW(parse_expression("8'd3"), UnsupportedError);
  EXPECT_THROW(parse_expression("4'sb1"), UnsupportedError);
}

TEST(Expressions, PrecedenceLoosestFirst) {
  auto E = [](const char* s) { return print_expr(parse_expression(s)); };
  EXPECT_EQ(E("a | b & c"), "(a | (b & c))");
  EXPECT_EQ(E("a ^ b | c"), "((a ^ b) | c)");
  EXPECT_EQ(E("a & b ^ c"), "((a & b) ^ c)");
  EXPECT_EQ(E("a + b == c"), "((a + b) == c)");
  EXPECT_EQ(E("a < b == c > d"), "((a < b) == (c > d))");
  EXPECT_EQ(E("a && b || c && d"), "((a && b) || (c && d))");
  EXPECT_EQ(E("a || b | c"), "(a || (b | c))");
  EXPECT_EQ(E("!a + ~b"), "(!a + ~b)");
  EXPECT_EQ(E("a - b - c"), "((a - b) - c)");
  EXPECT_EQ(E("a == b & c"), "((a == b) & c)");
}

TEST(Expressions, UnsupportedOperators) {
  for (const char* s : {"a * b", "a / b", "a << 1", "a >> 1", "a ? b : c", "&a", "-a", "a <= b",
                        "a >= b", "{a, b}", "a[0]", "f(a)", "$random"})
    EXPECT_THROW(parse_expression(s), UnsupportedError) << s;
}

// ---------------------------------------------------------------------------
// Statements and modules
// ---------------------------------------------------------------------------

TEST(Statements, ControlsAndAssignments) {
  Stmt s = parse_statement("@(posedge clk or negedge rst, x) q <= #2 d;");
  ASSERT_EQ(s.kind, StmtKind::EventCtl);
  ASSERT_EQ(s.event.terms.size(), 3u);
  EXPECT_EQ(s.event.terms[0].edge, EdgeQual::Posedge);
  EXPECT_EQ(s.event.terms[1].edge, EdgeQual::Negedge);
  EXPECT_EQ(s.event.terms[2].edge, EdgeQual::None);
  ASSERT_EQ(s.body.size(), 1u);
  EXPECT_EQ(s.body[0].kind, StmtKind::Nonblocking);
  EXPECT_EQ(*s.body[0].delay, 2u);

  EXPECT_TRUE(parse_statement("@* a = b;").event.star);
  EXPECT_TRUE(parse_statement("@(*) a = b;").event.star);
  EXPECT_EQ(parse_statement("@clk a = b;").event.terms.size(), 1u);
  EXPECT_EQ(parse_statement("#5;").kind, StmtKind::DelayCtl);
  EXPECT_EQ(parse_statement("wait (a) b = 1;").kind, StmtKind::Wait);
  EXPECT_EQ(parse_statement(";").kind, StmtKind::Seq);
  EXPECT_EQ(parse_statement("$finish(0);").task, SysTask::Finish);
}

TEST(Statements, UnsupportedStatementForms) {
  for (const char* s : {"for (;;) a = 1;", "case (a) endcase", "a++;", "a += 1;", "a = @(b) c;",
                        "begin : blk end", "$write(\"x\");", "t(a);", "forever a = 1;"})
    EXPECT_THROW(parse_statement(s), UnsupportedError) << s;
}

TEST(Modules, PortsDeclarationsAndItems) {
  Design d = parse(R"(
module m(input logic clk, input wire [3:0] d, output logic [3:0] q, inout wire io);
  wire #(1, 2) w;
  wand a, b;
  logic [1:0] r = 2'b01;
  logic mem [0:3];
  assign #3 w = clk;
  assign a = #1 clk;
  always_ff @(posedge clk) q <= d;
  initial r = 2'b10;
  final $display("%b", r);
endmodule
)");
  ASSERT_EQ(d.modules.size(), 1u);
  const ModuleDecl& m = d.modules[0];
  ASSERT_EQ(m.ports.size(), 4u);
  EXPECT_EQ(m.ports[0].kind, DataKind::Logic);
  EXPECT_EQ(m.ports[1].width(), 4u);
  EXPECT_EQ(m.ports[2].dir, Direction::Output);
  EXPECT_EQ(m.ports[3].dir, Direction::Inout);
  const auto& w = std::get<Decl>(m.items[0]);
  EXPECT_EQ(w.delay, (DelaySpec{1, 2}));
  EXPECT_EQ(std::get<Decl>(m.items[2]).kind, DataKind::Wand);
  EXPECT_TRUE(std::get<Decl>(m.items[3]).init.has_value());
  EXPECT_TRUE(std::get<Decl>(m.items[4]).array.has_value());
  EXPECT_EQ(std::get<ContAssign>(m.items[5]).delay, (DelaySpec{3}));
  EXPECT_EQ(std::get<ContAssign>(m.items[6]).delay, (DelaySpec{1}));
  EXPECT_EQ(std::get<Process>(m.items[7]).kind, ProcKind::AlwaysFF);
  EXPECT_EQ(std::get<Process>(m.items[9]).kind, ProcKind::Final);
}

TEST(Modules, PortKindDefaultsToWireAndRegIsLogic) {
  Design d = parse("module m(input a, output reg b); reg c; endmodule");
  EXPECT_EQ(d.modules[0].ports[0].kind, DataKind::Wire);
  EXPECT_EQ(d.modules[0].ports[1].kind, DataKind::Logic);
  EXPECT_EQ(std::get<Decl>(d.modules[0].items[0]).kind, DataKind::Logic);
}

TEST(Modules, Instances) {
  Design d = parse("module c(input a, output b); endmodule module t; wire x, y; c u(.a(x), .b); c v(.a(), .b(y)); endmodule");
  const auto& u = std::get<Instance>(d.modules[1].items[2]);
  ASSERT_EQ(u.conns.size(), 2u);
  EXPECT_EQ(u.conns[1].port, "b");
  ASSERT_TRUE(u.conns[1].expr.has_value());
  EXPECT_EQ(u.conns[1].expr->name, "b");
  const auto& v = std::get<Instance>(d.modules[1].items[3]);
  EXPECT_FALSE(v.conns[0].expr.has_value());
  EXPECT_THROW(parse("module t; c u(x, y); endmodule"), UnsupportedError);
  EXPECT_THROW(parse("module t; c u(.*); endmodule"), UnsupportedError);
}

TEST(Modules, DoubleDelayOnAssignIsAnError) {
  EXPECT_THROW(parse("module m; wire w; assign #1 w = #2 1'b0; endmodule"), Error);
}

TEST(Modules, DuplicateNamesAreErrors) {
  EXPECT_THROW(parse("module m; endmodule module m; endmodule"), Error);
  EXPECT_THROW(parse("module m; logic a; wire a; endmodule"), Error);
}

TEST(Diagnostics, SyntaxErrorsCarryPositions) {
  expect_throws_at<SyntaxError>("module m;\n  logic a\nendmodule", 3, 1);
  expect_throws_at<UnsupportedError>("module m;\n  initial for (;;) ;\nendmodule", 2, 11);
  try {
    parse("module m;\n  initial a = 1 +;\nendmodule");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.format("f.sv").rfind("f.sv:2:", 0), 0u) << e.format("f.sv");
  }
}

TEST(Diagnostics, UnsupportedKeywordsNamed) {
  try {
    parse("module m; initial begin case (a) endcase end endmodule");
    FAIL();
  } catch (const UnsupportedError& e) {
    EXPECT_NE(std::string(e.what()).find("'case'"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Normalisation and printing
// ---------------------------------------------------------------------------

TEST(Normalize, BodiesBecomeSequencesWithDensePreorderPcs) {
  Design d = normalize(parse("module m; logic a, b; always @(a) if (a) b = 1; initial #1; endmodule"));
  const Stmt& body = first_body(d, 2);
  // Seq[0] > EventCtl[1] > Seq[2] > If[3] > (Seq[4] > Blocking[5]), Seq[6]
  ASSERT_EQ(body.kind, StmtKind::Seq);
  EXPECT_EQ(body.pc, 0);
  const Stmt& ctl = body.body[0];
  EXPECT_EQ(ctl.pc, 1);
  const Stmt& inner = ctl.body[0];
  EXPECT_EQ(inner.kind, StmtKind::Seq);
  const Stmt& iff = inner.body[0];
  ASSERT_EQ(iff.kind, StmtKind::If);
  ASSERT_EQ(iff.body.size(), 2u);
  EXPECT_EQ(iff.body[0].kind, StmtKind::Seq);
  EXPECT_EQ(iff.body[0].body[0].pc, 5);
  EXPECT_TRUE(iff.body[1].body.empty());
  EXPECT_EQ(iff.body[1].pc, 6);
  EXPECT_EQ(count_stmts(body), 7);

  const Stmt& init = first_body(d, 3);
  EXPECT_EQ(init.body[0].kind, StmtKind::DelayCtl);
  ASSERT_EQ(init.body[0].body.size(), 1u);
  EXPECT_TRUE(init.body[0].body[0].body.empty());
}

TEST(Normalize, Idempotent) {
  for (const auto& p : corpus()) {
    Design once = normalize(parse(read_file(p.string())));
    EXPECT_EQ(normalize(once), once) << p;
  }
}

TEST(Printer, CorpusRoundTrips) {
  for (const auto& p : corpus()) {
    Design n = normalize(parse(read_file(p.string())));
    const std::string text = print_design(n);
    Design back = normalize(parse(text));
    EXPECT_EQ(back, n) << p << "\n" << text;
    EXPECT_EQ(print_design(back), text) << p;
  }
}

namespace {

Expr random_expr(std::mt19937& rng, int depth) {
  static const char* names[] = {"a", "b", "c", "d"};
  if (depth == 0 || rng() % 4 == 0) {
    switch (rng() % 3) {
      case 0: return Expr::ident(names[rng() % 4]);
      case 1: return Expr::dec_lit(rng() % 100);
      default: {
        std::string bits;
        const int w = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < w; ++i) bits.push_back("01xz"[rng() % 4]);
        return Expr::bit_lit(*Value::from_string(bits));
      }
    }
  }
  if (rng() % 5 == 0) return Expr::unary(rng() % 2 ? UnOp::LogNot : UnOp::BitNot, random_expr(rng, depth - 1));
  static const BinOp ops[] = {BinOp::BitAnd, BinOp::BitOr, BinOp::BitXor, BinOp::LogAnd, BinOp::LogOr, BinOp::Add,
                              BinOp::Sub,    BinOp::Eq,    BinOp::Ne,     BinOp::Lt,     BinOp::Gt};
  return Expr::binary(ops[rng() % 11], random_expr(rng, depth - 1), random_expr(rng, depth - 1));
}

}  // namespace

TEST(Printer, RandomExpressionsRoundTrip) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    Expr e = random_expr(rng, 5);
    const std::string text = print_expr(e);
    EXPECT_EQ(parse_expression(text), e) << text;
  }
}

TEST(Printer, EscapesStrings) {
  Stmt s = parse_statement(R"($display("tab\there \"q\" back\\slash\n");)");
  Stmt back = parse_statement(print_stmt(s));
  EXPECT_EQ(back.args, s.args);
}
