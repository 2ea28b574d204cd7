#include <gtest/gtest.h>

#include "vsched/frontend.hpp"

using namespace vsched;

namespace {

ElabDesign elab(const std::string& src, ElabOptions opts = {}) {
  return elaborate_checked(parse(src), opts);
}

std::string elab_error(const std::string& src, ElabOptions opts = {}) {
  try {
    elab(src, opts);
  } catch (const ElabError& e) {
    return e.what();
  }
  return "";
}

const ElabObject& obj(const ElabDesign& e, const std::string& name) {
  int i = e.object_index(name);
  if (i < 0) throw std::runtime_error("no object " + name);
  return e.objects[static_cast<size_t>(i)];
}

}  // namespace

TEST(TopSelection, ExplicitSoleTopOrUninstantiated) {
  EXPECT_EQ(select_top(parse("module a; endmodule"), ""), "a");
  EXPECT_EQ(select_top(parse("module a; endmodule module top; endmodule"), ""), "top");
  EXPECT_EQ(select_top(parse("module c; endmodule module p; c u(); endmodule"), ""), "p");
  EXPECT_EQ(select_top(parse("module a; endmodule module b; endmodule"), "b"), "b");
  EXPECT_THROW(select_top(parse("module a; endmodule module b; endmodule"), ""), ElabError);
  EXPECT_THROW(select_top(parse("module a; endmodule"), "zz"), ElabError);
}

TEST(Hierarchy, InstanceObjectsArePrefixed) {
  ElabDesign e = elab(R"(
module leaf(input logic i, output logic o); assign o = ~i; endmodule
module mid(input logic i, output logic o); logic t; leaf l(.i(i), .o(t)); assign o = t; endmodule
module top; logic x, y; mid m(.i(x), .o(y)); endmodule)");
  EXPECT_EQ(e.top, "top");
  for (const char* n : {"x", "y", "m.i", "m.o", "m.t", "m.l.i", "m.l.o"}) EXPECT_GE(e.object_index(n), 0) << n;
  ASSERT_EQ(e.scopes.size(), 3u);
  EXPECT_EQ(e.scopes[2].prefix, "m.l.");
  // inner = outer for inputs, outer = inner for outputs
  int port_drivers = 0;
  for (const auto& d : e.drivers)
    if (d.origin == DriverOrigin::Port) ++port_drivers;
  EXPECT_EQ(port_drivers, 4);
  EXPECT_TRUE(e.warnings.empty());
}

TEST(Hierarchy, DriverExpressionsUseHierarchicalNames) {
  ElabDesign e = elab("module c(input logic i, output logic o); assign o = i; endmodule module top; logic a, b; c u(.i(a), .o(b)); endmodule");
  bool saw = false;
  for (const auto& d : e.drivers)
    if (d.origin == DriverOrigin::User) {
      EXPECT_EQ(print_expr(d.rhs), "u.i");
      EXPECT_EQ(e.objects[static_cast<size_t>(d.target)].name, "u.o");
      saw = true;
    }
  EXPECT_TRUE(saw);
}

TEST(Hierarchy, InoutPortsAlias) {
  ElabDesign e = elab("module c(inout wire p); endmodule module top; wire w; c u(.p(w)); endmodule");
  EXPECT_EQ(e.find(e.object_index("u.p")), e.find(e.object_index("w")));
}

TEST(Hierarchy, ExpressionConnectionsToInputs) {
  ElabDesign e = elab("module c(input logic [1:0] i); endmodule module top; logic a, b; c u(.i(a + b)); endmodule");
  ASSERT_EQ(e.drivers.size(), 1u);
  EXPECT_EQ(print_expr(e.drivers[0].rhs), "(a + b)");
}

TEST(Hierarchy, Errors) {
  EXPECT_NE(elab_error("module top; nosuch u(); endmodule").find("unknown module"), std::string::npos);
  EXPECT_NE(elab_error("module c(input logic i); endmodule module top; logic a; c u(.j(a)); endmodule")
                .find("no port"),
            std::string::npos);
  EXPECT_NE(elab_error("module c(input logic [1:0] i); endmodule module top; logic a; c u(.i(a)); endmodule")
                .find("width mismatch"),
            std::string::npos);
  EXPECT_NE(elab_error("module c(output logic o); endmodule module top; logic a, b; c u(.o(a & b)); endmodule")
                .find("identifier"),
            std::string::npos);
  EXPECT_NE(elab_error("module a; b u(); endmodule module b; a u(); endmodule module top; a x(); endmodule")
                .find("cycle"),
            std::string::npos);
}

TEST(Processes, AlwaysCombIsWrappedInStarControl) {
  ElabDesign e = elab("module top; logic a, b; always_comb b = a; endmodule");
  ASSERT_EQ(e.processes.size(), 1u);
  const ElabProcess& p = e.processes[0];
  EXPECT_TRUE(p.combinational);
  ASSERT_EQ(p.body.kind, StmtKind::Seq);
  ASSERT_EQ(p.body.body[0].kind, StmtKind::EventCtl);
  EXPECT_TRUE(p.body.body[0].event.star);
}

TEST(Processes, CombinationalShapeDetection) {
  auto comb = [](const char* body) {
    ElabDesign e = elab(std::string("module top; logic a, b, c; ") + body + " endmodule");
    return e.processes[0].combinational;
  };
  EXPECT_TRUE(comb("always @(a, b) c = a + b;"));
  EXPECT_TRUE(comb("always @(*) c = a;"));
  EXPECT_TRUE(comb("always @* begin c = a; if (b) c = b; end"));
  EXPECT_FALSE(comb("always @(posedge a) c = b;"));
  EXPECT_FALSE(comb("always @(a) #1 c = b;"));
  EXPECT_FALSE(comb("always @(a) c = #1 b;"));
  EXPECT_FALSE(comb("always begin @(a) c = b; @(b) c = a; end"));
  EXPECT_FALSE(comb("always if (a) c = b;"));
}

TEST(Validation, WriterConflicts) {
  EXPECT_NE(elab_error("module top; wire w; initial w = 1; endmodule").find("procedural assignment to net"),
            std::string::npos);
  EXPECT_NE(elab_error("module top; logic v; assign v = 1; assign v = 0; endmodule").find("more than one"),
            std::string::npos);
  EXPECT_NE(elab_error("module top; logic v; assign v = 1; initial v = 0; endmodule").find("process"),
            std::string::npos);
  // several drivers on a net are fine
  EXPECT_NO_THROW(elab("module top; wire w; assign w = 1; assign w = 0; endmodule"));
}

TEST(Validation, ArraysAreDeclarationOnly) {
  EXPECT_NO_THROW(elab("module top; logic m [0:1] = '{1'b0, 1'b1}; endmodule"));
  EXPECT_NE(elab_error("module top; logic m [0:1]; logic a; initial a = m; endmodule").find("array"),
            std::string::npos);
  EXPECT_NE(elab_error("module top; logic m [0:1]; initial m = 1; endmodule").find("array"), std::string::npos);
}

TEST(Validation, UndeclaredAndNonConstant) {
  EXPECT_NE(elab_error("module top; initial a = 1; endmodule").find("undeclared"), std::string::npos);
  EXPECT_NE(elab_error("module top; logic a; logic b = a; endmodule").find("constant"), std::string::npos);
}

TEST(Validation, FormatArgumentCounts) {
  EXPECT_THROW(elab("module top; logic a; initial $display(\"%b %b\", a); endmodule"), ElabError);
  EXPECT_THROW(elab("module top; logic a; initial $display(\"%b\", a, a); endmodule"), ElabError);
  EXPECT_THROW(elab("module top; logic a; initial $display(\"%h\", a); endmodule"), UnsupportedError);
  EXPECT_NO_THROW(elab("module top; logic a; initial $display(\"%0d%%\", a); endmodule"));
}

TEST(Initialisers, FirstKeepsThemOnObjects) {
  ElabDesign e = elab("module top; logic [1:0] a = 2'b10; wire w = 1'b1; endmodule");
  EXPECT_TRUE(obj(e, "a").init.has_value());
  EXPECT_TRUE(e.processes.empty());
  // a net initialiser becomes a driver
  ASSERT_EQ(e.drivers.size(), 1u);
  EXPECT_EQ(e.drivers[0].origin, DriverOrigin::User);
}

TEST(Initialisers, InitialSwitchSynthesisesProcesses) {
  ElabOptions o;
  o.var_init = VarInit::Initial;
  ElabDesign e = elab("module top; logic a = 1; initial $display(\"%b\", a); endmodule", o);
  EXPECT_FALSE(obj(e, "a").init.has_value());
  ASSERT_EQ(e.processes.size(), 2u);
  EXPECT_EQ(e.processes[1].kind, ProcKind::Initial);
}

TEST(Coercion, WrittenInputBecomesInoutWithOneWarning) {
  Loaded l = load_design(read_file(std::string(VSCHED_DESIGNS) + "/coercion_in.sv"));
  ASSERT_EQ(l.elab.warnings.size(), 1u);
  EXPECT_EQ(l.elab.warnings[0].message, "port 'i' coerced to inout");
  EXPECT_EQ(l.elab.warnings[0].loc.line, 2u);
  EXPECT_EQ(l.elab.find(l.elab.object_index("u.i")), l.elab.find(l.elab.object_index("w")));
  for (const auto& d : l.elab.drivers) {
    if (d.origin == DriverOrigin::Port) {
      EXPECT_NE(l.elab.objects[static_cast<size_t>(d.target)].name, "u.i") << "port driver not dropped";
    }
  }
}

TEST(Coercion, OutputDrivenFromParentIsCoerced) {
  Loaded l = load_design(read_file(std::string(VSCHED_DESIGNS) + "/coercion_out.sv"));
  ASSERT_EQ(l.elab.warnings.size(), 1u);
  EXPECT_EQ(l.elab.warnings[0].message, "port 'outp' coerced to inout");
}

TEST(Coercion, ReadingAnOutputIsNotCoerced) {
  Loaded l = load_design(read_file(std::string(VSCHED_DESIGNS) + "/output_read.sv"));
  EXPECT_TRUE(l.elab.warnings.empty());
}

TEST(Coercion, ExpressionConnectionIsReportedNotCoerced) {
  ElabDesign e = elab("module c(input wire i); assign i = 1'b1; endmodule module top; wire a, b; c u(.i(a & b)); endmodule");
  ASSERT_EQ(e.warnings.size(), 1u);
  EXPECT_NE(e.warnings[0].message.find("not coerced"), std::string::npos);
}

TEST(Coercion, WarningFormat) {
  Warning w{{3, 7}, "port 'p' coerced to inout"};
  EXPECT_EQ(w.format("d.sv"), "d.sv:3:7: warning: port 'p' coerced to inout");
}
