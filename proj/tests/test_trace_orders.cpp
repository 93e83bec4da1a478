#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "djc/global_step.hpp"
#include "djc/parser.hpp"
#include "djc/trace.hpp"
#include "djc/validate.hpp"

#include "gen.hpp"

using namespace djc;

namespace {

RunResult run_src(const std::string& src, std::uint64_t seed = 0,
                  bool ckpts = false) {
  Program p = parse_program(src);
  REQUIRE(validate_program(p).empty());
  RunConfig cfg;
  cfg.sourceText = src;
  cfg.seed = seed;
  cfg.checkpoints = ckpts;
  Simulator sim(p, cfg);
  RunResult rr = sim.run();
  REQUIRE(rr.exitCode == 0);
  return rr;
}

std::size_t idx_of(const Trace& t, ActionKind k, int nth = 0) {
  int seen = 0;
  for (std::size_t i = 0; i < t.actions.size(); ++i)
    if (t.actions[i].kind == k && seen++ == nth) return i;
  FAIL("no action of requested kind");
  return 0;
}

bool has_edge(const std::vector<std::pair<std::size_t, std::size_t>>& es,
              std::size_t a, std::size_t b) {
  return std::find(es.begin(), es.end(), std::make_pair(a, b)) != es.end();
}

const std::string kHandoff = R"(class D { x : Nat; }
class T {
  d : D;
  init = this.d := d;
  run() : Unit =
    let o : D = this.d in
    let u : Nat = o.x := 7 in
    ()
}
class Main {
  run() : Unit =
    let o : D = new D(0) in
    let t : T = new T(o) in
    let u0 : Unit = t.start() in
    let u1 : Unit = t.join() in
    let a : Nat = o.x in
    ()
})";

}  // namespace

TEST_CASE("position order is a total order with the prologue first") {
  RunResult rr = run_src(kHandoff, 3);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);
  REQUIRE(o.n == t.actions.size());

  // byPosition is a permutation and posRank is its inverse
  std::set<std::size_t> seen(o.byPosition.begin(), o.byPosition.end());
  CHECK(seen.size() == o.n);
  for (std::size_t k = 0; k < o.n; ++k) CHECK(o.posRank[o.byPosition[k]] == k);

  // all prologue actions rank before every non-prologue action
  std::size_t maxPro = 0, minMain = o.n;
  for (std::size_t i = 0; i < o.n; ++i) {
    if (t.actions[i].prologue) maxPro = std::max(maxPro, o.posRank[i]);
    else minMain = std::min(minMain, o.posRank[i]);
  }
  CHECK(maxPro < minMain);

  // non-prologue ranks are monotone in (step, ord)
  for (std::size_t k = 0; k + 1 < o.n; ++k) {
    const Action& a = t.actions[o.byPosition[k]];
    const Action& b = t.actions[o.byPosition[k + 1]];
    if (a.prologue || b.prologue) continue;
    CHECK(std::make_pair(a.step, a.ord) <= std::make_pair(b.step, b.ord));
  }
}

TEST_CASE("program order groups by thread, prologue first, uid-ordered") {
  RunResult rr = run_src(kHandoff, 5);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);

  std::size_t total = 0;
  for (const auto& [tid, list] : o.poThreads) {
    total += list.size();
    bool inMain = false;
    Uid lastUid = 0;
    bool first = true;
    for (std::size_t i : list) {
      CHECK(t.actions[i].thread == tid);
      if (!t.actions[i].prologue) inMain = true;
      else CHECK(!inMain);  // prologue block precedes the rest
      if (!first) CHECK(t.actions[i].uid > lastUid);
      lastUid = t.actions[i].uid;
      first = false;
    }
  }
  CHECK(total == o.n);
}

TEST_CASE("synchronization order lists exactly the sync actions by position") {
  RunResult rr = run_src(kHandoff, 7);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);

  std::size_t nSync = 0;
  for (const Action& a : t.actions)
    if (a.is_sync()) ++nSync;
  CHECK(o.so.size() == nSync);
  for (std::size_t k = 0; k + 1 < o.so.size(); ++k)
    CHECK(o.posRank[o.so[k]] < o.posRank[o.so[k + 1]]);
  for (std::size_t i : o.so) CHECK(t.actions[i].is_sync());
}

TEST_CASE("engine traces carry no position ties") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    gen::GenConfig gc;
    gc.seed = 4200 + seed;
    std::string src = gen::random_program(gc);
    RunResult rr = run_src(src, seed);
    TraceOrders o = compute_orders(rr.trace);
    CAPTURE(gc.seed);
    CHECK(o.syncTies.empty());
  }
}

TEST_CASE("synchronizes-with covers the expected edge families") {
  RunResult rr = run_src(kHandoff, 11);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);

  // spawn -> start and finish -> join for the worker thread
  std::size_t sWorker = 0;
  bool found = false;
  for (std::size_t i = 0; i < o.n; ++i)
    if (t.actions[i].kind == ActionKind::S && t.actions[i].cls == "T") {
      sWorker = i;
      found = true;
    }
  REQUIRE(found);
  std::size_t sp = idx_of(t, ActionKind::Sp);
  std::size_t fi = idx_of(t, ActionKind::Fi);  // worker finishes before main
  std::size_t j = idx_of(t, ActionKind::J);
  CHECK(t.actions[fi].thread == t.actions[j].target.ref);
  CHECK(has_edge(o.sw, sp, sWorker));
  CHECK(has_edge(o.sw, fi, j));

  // every initialization synchronizes with every later start
  for (std::size_t i = 0; i < o.n; ++i)
    if (t.actions[i].kind == ActionKind::In && o.posRank[i] < o.posRank[sWorker])
      CHECK(has_edge(o.sw, i, sWorker));

  // hb respects those edges and is transitive through program order
  std::size_t w = idx_of(t, ActionKind::W);   // worker's store to o.x
  std::size_t r = 0;
  for (std::size_t i = 0; i < o.n; ++i)
    if (t.actions[i].kind == ActionKind::R &&
        t.actions[i].thread != t.actions[w].thread)
      r = i;
  REQUIRE(r != 0);
  CHECK(o.happens_before(w, fi));   // po within the worker
  CHECK(o.happens_before(w, r));    // w -> fi -> j -> r
  CHECK(!o.happens_before(r, w));
}

TEST_CASE("volatile write synchronizes with the read that observes it") {
  RunResult rr = run_src(R"(class D { volatile v : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let u : Nat = d.v := 3 in
    let a : Nat = d.v in
    ()
})");
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);
  std::size_t vw = idx_of(t, ActionKind::Vw);
  std::size_t vr = idx_of(t, ActionKind::Vr);
  CHECK(has_edge(o.sw, vw, vr));
}

TEST_CASE("unlock synchronizes with the next lock of the same monitor") {
  RunResult rr = run_src(R"(class D { x : Nat; }
class T {
  d : D;
  init = this.d := d;
  run() : Unit =
    let o : D = this.d in
    let u0 : Unit = o.monitorenter in
    let u1 : Nat = o.x := 1 in
    let u2 : Unit = o.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let o : D = new D(0) in
    let t : T = new T(o) in
    let u0 : Unit = t.start() in
    let u1 : Unit = o.monitorenter in
    let u2 : Unit = o.monitorexit in
    let u3 : Unit = t.join() in
    ()
})",
                         13);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);

  // collect L/U on the shared monitor in position order
  std::vector<std::size_t> lus;
  for (std::size_t k : o.so) {
    ActionKind kk = t.actions[k].kind;
    if (kk == ActionKind::L || kk == ActionKind::U) lus.push_back(k);
  }
  REQUIRE(lus.size() == 4);
  CHECK(t.actions[lus[0]].kind == ActionKind::L);
  CHECK(t.actions[lus[1]].kind == ActionKind::U);
  CHECK(t.actions[lus[2]].kind == ActionKind::L);
  CHECK(t.actions[lus[3]].kind == ActionKind::U);
  CHECK(has_edge(o.sw, lus[1], lus[2]));
  CHECK(!has_edge(o.sw, lus[3], lus[0]));
}

TEST_CASE("cache edges are tracked separately from happens-before") {
  RunResult rr = run_src(kHandoff, 17);
  const Trace& t = rr.trace;
  TraceOrders o = compute_orders(t);
  REQUIRE(!o.cacheEdges.empty());
  for (auto [b, f] : o.cacheEdges) {
    CHECK(t.actions[f].kind == ActionKind::F);
    CHECK((t.actions[b].kind == ActionKind::B ||
           t.actions[b].kind == ActionKind::W ||
           t.actions[b].kind == ActionKind::In));
    CHECK(!has_edge(o.sw, b, f));
  }
}

TEST_CASE("trace files round-trip exactly") {
  gen::GenConfig gc;
  gc.seed = 31337;
  std::string src = gen::random_program(gc);
  RunResult rr = run_src(src, 9, true);

  std::stringstream ss;
  write_trace(ss, rr.trace);
  Trace back = read_trace(ss);

  CHECK(back.program == rr.trace.program);
  REQUIRE(back.actions.size() == rr.trace.actions.size());
  for (std::size_t i = 0; i < back.actions.size(); ++i) {
    const Action& a = rr.trace.actions[i];
    const Action& b = back.actions[i];
    CAPTURE(i);
    CHECK(a.uid == b.uid);
    CHECK(a.step == b.step);
    CHECK(a.ord == b.ord);
    CHECK(a.core == b.core);
    CHECK(a.thread == b.thread);
    CHECK(a.kind == b.kind);
    CHECK(a.target == b.target);
    CHECK(a.value == b.value);
    CHECK(a.prologue == b.prologue);
    CHECK(a.cls == b.cls);
    CHECK(a.prov.W == b.prov.W);
    CHECK(a.prov.Cs == b.prov.Cs);
    CHECK(a.prov.Ab == b.prov.Ab);
    CHECK(a.prov.Ai == b.prov.Ai);
    CHECK(a.prov.Bf == b.prov.Bf);
  }

  // a second serialization is byte-identical
  std::stringstream ss2;
  write_trace(ss2, back);
  std::stringstream ss3;
  write_trace(ss3, rr.trace);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("checkpoint files round-trip exactly") {
  gen::GenConfig gc;
  gc.seed = 777;
  std::string src = gen::random_program(gc);
  RunResult rr = run_src(src, 2, true);
  REQUIRE(!rr.checkpoints.empty());
  CHECK(rr.checkpoints.front().step == -1);  // boot snapshot

  std::stringstream ss;
  write_checkpoints(ss, rr.checkpoints);
  std::vector<Checkpoint> back = read_checkpoints(ss);
  REQUIRE(back.size() == rr.checkpoints.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].step == rr.checkpoints[i].step);
    CHECK(back[i].cores == rr.checkpoints[i].cores);
    CHECK(back[i].post == rr.checkpoints[i].post);
  }
}

TEST_CASE("target strings parse back to the same target") {
  std::vector<Target> ts = {Target::variable(4, "x"), Target::object(9),
                            Target::core_id(3)};
  for (const Target& t : ts) {
    Target back = target_from_string(target_to_string(t));
    CHECK(back == t);
  }
}
