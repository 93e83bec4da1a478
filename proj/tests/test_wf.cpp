#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "djc/global_step.hpp"
#include "djc/parser.hpp"
#include "djc/validate.hpp"
#include "djc/wf.hpp"

#include "gen.hpp"

using namespace djc;

namespace {

RunResult run_src(const std::string& src, std::uint64_t seed,
                  bool ckpts = false,
                  std::vector<MigrationDirective> migs = {}) {
  Program p = parse_program(src);
  REQUIRE(validate_program(p).empty());
  RunConfig cfg;
  cfg.sourceText = src;
  cfg.seed = seed;
  cfg.checkpoints = ckpts;
  cfg.migrations = std::move(migs);
  Simulator sim(p, cfg);
  RunResult rr = sim.run();
  REQUIRE(rr.exitCode == 0);
  return rr;
}

void expect_clean(const WfReport& rep, const char* what) {
  CAPTURE(what);
  for (const auto& v : rep.violations) {
    CAPTURE(v.rule);
    CAPTURE(v.msg);
    CHECK(false);
  }
  CHECK(rep.clean());
}

}  // namespace

TEST_CASE("corpus runs validate cleanly") {
  const auto& corpus = gen::drf_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CAPTURE(i);
    for (std::uint64_t seed : {0u, 5u}) {
      CAPTURE(seed);
      RunResult rr = run_src(corpus[i], seed, true);
      expect_clean(check(rr.trace), "action rules");
      expect_clean(check_wfh(rr.trace, rr.checkpoints), "snapshot rules");
    }
  }
}

TEST_CASE("generated runs validate cleanly, snapshots included") {
  for (int i = 0; i < 25; ++i) {
    gen::GenConfig gc;
    gc.seed = 9000 + i;
    std::string src = gen::random_program(gc);
    CAPTURE(gc.seed);
    RunResult rr = run_src(src, 3 * i + 1, true);
    expect_clean(check(rr.trace), "action rules");
    expect_clean(check_wfh(rr.trace, rr.checkpoints), "snapshot rules");
  }
}

TEST_CASE("forced migrations validate cleanly") {
  const std::string src = R"(class D { x : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let u : Nat = d.x := 5 in
    let a : Nat = d.x in
    let b : Nat = d.x := 6 in
    let c : Nat = d.x in
    ()
})";
  // find the first write's step, then migrate right after it
  RunResult plain = run_src(src, 0);
  std::uint64_t wStep = 0;
  RefId mainT = kNullRef;
  for (const Action& a : plain.trace.actions)
    if (a.kind == ActionKind::W && a.value == Value::nat(5)) {
      wStep = a.step;
      mainT = a.thread;
    }
  REQUIRE(mainT != kNullRef);

  MigrationDirective mig;
  mig.step = wStep + 1;
  mig.thread = mainT;
  mig.dst = 1;
  RunResult rr = run_src(src, 0, true, {mig});
  bool sawM = false;
  for (const Action& a : rr.trace.actions) sawM = sawM || a.kind == ActionKind::M;
  REQUIRE(sawM);
  expect_clean(check(rr.trace), "action rules");
  expect_clean(check_wfh(rr.trace, rr.checkpoints), "snapshot rules");
}

TEST_CASE("a prefix of a valid trace is still valid") {
  RunResult rr = run_src(gen::guarded_counter_program(3), 4);
  expect_clean(check(rr.trace), "full trace");
  Trace pre = rr.trace;
  while (!pre.actions.empty() &&
         pre.actions.back().kind != ActionKind::Fi)
    pre.actions.pop_back();
  REQUIRE(!pre.actions.empty());
  pre.actions.pop_back();  // drop the final finish as well
  expect_clean(check(pre), "prefix trace");
}

TEST_CASE("an empty action list is vacuously well-formed") {
  Trace t;
  t.program = "class Main { run() : Unit = () }";
  expect_clean(check(t), "empty trace");
}

TEST_CASE("an unparseable embedded program raises a trace error") {
  Trace t;
  t.program = "class { nope";
  CHECK_THROWS_AS(check(t), TraceError);
}

TEST_CASE("rule filtering honors the requested subset") {
  RunResult rr = run_src(gen::drf_corpus()[0], 1);
  Trace t = rr.trace;
  // corrupt a read so WF-1 fires
  bool bent = false;
  for (Action& a : t.actions)
    if (a.kind == ActionKind::R && a.prov.W) {
      a.value = Value::nat(123456);
      bent = true;
      break;
    }
  REQUIRE(bent);

  WfReport all = check(t);
  bool sawWf1 = false;
  for (const auto& v : all.violations) sawWf1 = sawWf1 || v.rule == "WF-1";
  CHECK(sawWf1);

  WfOptions onlyWf2;
  onlyWf2.only = {"WF-2"};
  expect_clean(check(t, onlyWf2), "filtered to an unrelated rule");

  WfOptions onlyWf1;
  onlyWf1.only = {"WF-1"};
  WfReport narrowed = check(t, onlyWf1);
  CHECK(!narrowed.clean());
  for (const auto& v : narrowed.violations) CHECK(v.rule == "WF-1");
}

TEST_CASE("strict cache-action spacing holds on engine traces") {
  WfOptions strict;
  strict.saCacheOps = true;
  for (int i = 0; i < 10; ++i) {
    gen::GenConfig gc;
    gc.seed = 12000 + i;
    std::string src = gen::random_program(gc);
    CAPTURE(gc.seed);
    RunResult rr = run_src(src, i, false);
    expect_clean(check(rr.trace, strict), "strict spacing");
  }
}

TEST_CASE("snapshot checking requires the boot snapshot") {
  RunResult rr = run_src(gen::drf_corpus()[0], 2, true);
  REQUIRE(!rr.checkpoints.empty());
  std::vector<Checkpoint> noBoot(rr.checkpoints.begin() + 1,
                                 rr.checkpoints.end());
  CHECK_THROWS_AS(check_wfh(rr.trace, noBoot), TraceError);

  std::vector<Checkpoint> shuffled = rr.checkpoints;
  REQUIRE(shuffled.size() >= 3);
  std::swap(shuffled[1], shuffled[2]);
  CHECK_THROWS_AS(check_wfh(rr.trace, shuffled), TraceError);
}

TEST_CASE("violation lines serialize rule, uids, and message") {
  WfViolation v;
  v.rule = "WF-7";
  v.uids = {3, 9};
  v.msg = "example";
  std::string line = violation_line(v);
  CHECK(line.find("WF-7") != std::string::npos);
  CHECK(line.find("example") != std::string::npos);
  CHECK(line.find('9') != std::string::npos);
}
