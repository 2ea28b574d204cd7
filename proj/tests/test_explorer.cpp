#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "vsched/explorer.hpp"
#include "vsched/frontend.hpp"

#include "cp_cases.hpp"

using namespace vsched;
using cp::cp_cases;
using cp::CpCase;
namespace fs = std::filesystem;

namespace {

const std::string kDesigns = VSCHED_DESIGNS;

std::shared_ptr<const Program> prog_file(const std::string& name, Mode m = Mode::Repaired, ElabOptions o = {}) {
  return compile(read_file(kDesigns + "/" + name), semantics_for(m), o);
}

std::shared_ptr<const Program> prog(const std::string& src, Mode m = Mode::Repaired) {
  return compile(src, semantics_for(m));
}

// Independent enumeration: plain recursion over every enabled choice, no
// memo, counting each complete path.
void brute_force(const SimState& st, std::map<std::pair<RunStatus, std::string>, uint64_t>& out) {
  auto cs = enabled_choices(st);
  if (st.status != RunStatus::Running || cs.empty()) {
    SimState end = st;
    finish_if_quiescent(end);
    ++out[{end.status, output_text(end.output)}];
    return;
  }
  for (const auto& c : cs) brute_force(execute_choice(st, c), out);
}

std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(kDesigns))
    if (e.path().extension() == ".sv") out.push_back(fs::relative(e.path(), kDesigns).string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

class CpQuiescence : public ::testing::TestWithParam<size_t> {};

TEST_P(CpQuiescence, EveryScheduleSettlesToTheFunction) {
  const CpCase& c = cp_cases()[GetParam()];
  size_t terminals = 0;
  ExplorationReport r = explore(prog_file(std::string("cp/") + c.file), {}, true, [&](const SimState& st) {
    ++terminals;
    EXPECT_EQ(st.status, RunStatus::Finished);
    EXPECT_TRUE(c.holds(st)) << c.file;
  });
  EXPECT_TRUE(r.complete());
  EXPECT_GT(terminals, 0u);
  ASSERT_EQ(r.outcomes.size(), 1u) << report_to_text(r);
  EXPECT_EQ(r.outcomes[0].output, c.output);
  EXPECT_GT(r.schedules, 1u);
}

INSTANTIATE_TEST_SUITE_P(Corpus, CpQuiescence, ::testing::Range<size_t>(0, 13),
                         [](const auto& info) {
                           std::string n = cp_cases()[info.param].file;
                           return n.substr(0, n.find('.'));
                         });

TEST(CpQuiescence, CorpusIsCovered) {
  size_t n = 0;
  for (const auto& f : corpus())
    if (f.rfind("cp/", 0) == 0) ++n;
  EXPECT_EQ(n, cp_cases().size());
}

TEST(Explore, PermissiveBreaksInterleave3) {
  ExplorationReport rep = explore(prog_file("cp/interleave3.sv"));
  ExplorationReport per = explore(prog_file("cp/interleave3.sv", Mode::Permissive));
  EXPECT_FALSE(rep.find("a = 10, b = 01\n"));
  EXPECT_TRUE(per.find("a = 10, b = 01\n"));
}

TEST(Explore, MatchesBruteForceEnumeration) {
  for (const char* f : {"two_initials.sv", "three_initials.sv", "nbinterleave1.sv", "nbinterleave2.sv",
                        "var_init.sv", "cp/interleave1.sv", "cp/interleave3.sv", "continterleave.sv",
                        "single_process.sv", "wait_stmt.sv", "always_start.sv"})
    for (Mode m : {Mode::Repaired, Mode::Permissive}) {
      auto p = prog_file(f, m);
      std::map<std::pair<RunStatus, std::string>, uint64_t> expect;
      brute_force(initialize(p), expect);
      ExplorationReport r = explore(p);
      std::map<std::pair<RunStatus, std::string>, uint64_t> got;
      uint64_t total = 0;
      for (const auto& o : r.outcomes) got[{o.status, o.output}] = o.schedules;
      for (const auto& [k, n] : expect) total += n;
      EXPECT_EQ(got, expect) << f << " " << mode_name(m);
      EXPECT_EQ(r.schedules, total) << f << " " << mode_name(m);
    }
}

TEST(Explore, DedupDoesNotChangeTheReport) {
  // without merging every visit is a state, so large designs stop at the cap
  // and are left out of the comparison
  Limits lim;
  lim.max_states = 200000;
  size_t compared = 0, runs = 0;
  for (const auto& f : corpus()) {
    if (f == "infiniteloop.sv") continue;
    for (Mode m : {Mode::Repaired, Mode::Permissive}) {
      ++runs;
      auto p = prog_file(f, m);
      ExplorationReport a = explore(p, lim, true), b = explore(p, lim, false);
      ASSERT_TRUE(a.complete()) << f;
      if (!b.complete()) continue;
      ++compared;
      ASSERT_EQ(a.outcomes.size(), b.outcomes.size()) << f;
      for (size_t i = 0; i < a.outcomes.size(); ++i) {
        EXPECT_EQ(a.outcomes[i].output, b.outcomes[i].output) << f;
        EXPECT_EQ(a.outcomes[i].schedules, b.outcomes[i].schedules) << f;
      }
      EXPECT_EQ(a.schedules, b.schedules) << f;
      EXPECT_LE(a.states, b.states) << f;
    }
  }
  EXPECT_GE(compared * 4, runs * 3) << compared << " of " << runs;
}

TEST(Explore, RepairedOutputsArePermissiveOutputs) {
  for (const auto& f : corpus()) {
    Loaded l = load_design(read_file(kDesigns + "/" + f));
    DiffReport d = diff_modes(l.elab, {}, l.normalized);
    EXPECT_TRUE(d.repaired_only.empty()) << f << "\n" << diff_to_text(d);
  }
}

TEST(Explore, WitnessesReplayToTheirOutcome) {
  for (const auto& f : corpus())
    for (Mode m : {Mode::Repaired, Mode::Permissive}) {
      auto p = prog_file(f, m);
      ExplorationReport r = explore(p);
      for (const auto& o : r.outcomes) {
        Trace t = replay(p, o.witness.choices());
        EXPECT_EQ(t.status, o.status) << f;
        EXPECT_EQ(output_text(t.output), o.output) << f;
        EXPECT_EQ(output_text(o.witness.output), o.output) << f;
      }
    }
}

TEST(Explore, SeededRunsLandOnExploredOutcomes) {
  for (const auto& f : corpus()) {
    if (f == "infiniteloop.sv") continue;
    for (Mode m : {Mode::Repaired, Mode::Permissive}) {
      auto p = prog_file(f, m);
      ExplorationReport r = explore(p);
      for (uint64_t seed = 0; seed < 30; ++seed) {
        Trace t = run_seeded(p, seed);
        const Outcome* o = r.find(output_text(t.output));
        ASSERT_TRUE(o) << f << " seed " << seed;
        EXPECT_EQ(o->status, t.status);
      }
    }
  }
}

TEST(Explore, IndependentInitialBlocks) {
  ExplorationReport two = explore(prog_file("two_initials.sv"));
  EXPECT_EQ(two.schedules, 2u);
  EXPECT_EQ(two.outcomes.size(), 1u);
  EXPECT_EQ(explore(prog_file("three_initials.sv")).schedules, 6u);
}

TEST(Explore, SchedulesCountFactorially) {
  // k independent one-statement initial blocks give k! schedules
  uint64_t fact = 1;
  for (int k = 1; k <= 6; ++k) {
    fact *= static_cast<uint64_t>(k);
    std::string src = "module top; logic [7:0] v;";
    for (int i = 0; i < k; ++i) src += " initial v = " + std::to_string(i) + ";";
    src += " endmodule";
    ExplorationReport r = explore(prog(src));
    EXPECT_EQ(r.schedules, fact) << k;
    EXPECT_EQ(r.outcomes.size(), 1u);
  }
}

TEST(Explore, NbaAndVarInitOutcomes) {
  EXPECT_EQ(explore(prog_file("nbinterleave1.sv")).outputs(), std::vector<std::string>{"1\n"});
  EXPECT_EQ(explore(prog_file("nbinterleave2.sv")).outputs(), std::vector<std::string>{"a = 1\n"});
  EXPECT_EQ(explore(prog_file("nbinterleave2_blocking.sv")).outputs(), std::vector<std::string>{"a = 1\n"});
  EXPECT_EQ(explore(prog_file("var_init.sv")).outputs(), std::vector<std::string>{"1\n"});
  ElabOptions o;
  o.var_init = VarInit::Initial;
  auto outs = explore(prog_file("var_init.sv", Mode::Repaired, o)).outputs();
  EXPECT_EQ(outs, (std::vector<std::string>{"1\n", "x\n"}));
}

TEST(Explore, CycleIsReported) {
  ExplorationReport r = explore(prog_file("infiniteloop.sv", Mode::Permissive));
  EXPECT_TRUE(r.cycle);
  EXPECT_FALSE(r.complete());
}

TEST(Limits, StateLimit) {
  Limits lim;
  lim.max_states = 3;
  ExplorationReport r = explore(prog_file("three_initials.sv"), lim);
  EXPECT_TRUE(r.state_limit_hit);
  EXPECT_LE(r.states, 3u);
}

TEST(Limits, TimeAndEventLimitsStopRuns) {
  Limits lim;
  lim.max_time = 5;
  Trace t = run_fifo(prog_file("net_delay.sv"), lim);
  EXPECT_EQ(t.status, RunStatus::Limit);
  EXPECT_EQ(t.reason, "time limit of 5 reached");
  EXPECT_EQ(t.output, std::vector<std::string>{"w = x"});
  // replay reproduces a limited run, including the refused step
  Trace back = replay(prog_file("net_delay.sv"), t.choices(), lim);
  EXPECT_EQ(back.status, RunStatus::Limit);

  Limits ev;
  ev.max_events = 2;
  Trace e = run_fifo(prog_file("single_process.sv"), ev);
  EXPECT_EQ(e.status, RunStatus::Limit);
  EXPECT_EQ(e.reason, "event limit of 2 reached");
  ExplorationReport r = explore(prog_file("single_process.sv"), ev);
  EXPECT_TRUE(r.run_limit_hit);
}

TEST(Runs, SeededRunsAreDeterministic) {
  auto p = prog_file("cp/interleave3.sv", Mode::Permissive);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::string a = trace_to_json(run_seeded(p, seed)).dump();
    EXPECT_EQ(a, trace_to_json(run_seeded(p, seed)).dump());
  }
}

TEST(Runs, ReplayRejectsForeignChoices) {
  auto p = prog_file("two_initials.sv");
  EXPECT_THROW(replay(p, {Choice::execute(5)}), KernelError);
  EXPECT_THROW(replay(p, {Choice::execute(0)}), KernelError);
  Trace t = run_fifo(p);
  auto cs = t.choices();
  cs.push_back(Choice::advance_region());
  EXPECT_THROW(replay(p, cs), KernelError);
}

TEST(Json, ChoicesRoundTrip) {
  for (const Choice& c : {Choice::execute(3), Choice::advance_region(), Choice::advance_time(17), Choice::monitor()})
    EXPECT_EQ(choice_from_json(choice_to_json(c)), c);
  EXPECT_THROW(choice_from_json({{"kind", "jump"}}), KernelError);
}

TEST(Json, ReportShape) {
  nlohmann::json j = report_to_json(explore(prog_file("two_initials.sv")));
  EXPECT_EQ(j["mode"], "repaired");
  EXPECT_EQ(j["schedules"], 2);
  EXPECT_EQ(j["distinct_outputs"], 1);
  EXPECT_EQ(j["outcomes"][0]["status"], "finished");
  EXPECT_TRUE(j["outcomes"][0]["witness"]["steps"].is_array());
}
