#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "djc/syncmgr.hpp"

using namespace djc::syncmgr;

namespace {

std::vector<Event> grants(const std::vector<Event>& log) {
  std::vector<Event> out;
  for (const Event& e : log)
    if (e.kind == Event::Kind::Grant) out.push_back(e);
  return out;
}

std::vector<Event> faults(const std::vector<Event>& log) {
  std::vector<Event> out;
  for (const Event& e : log)
    if (e.kind == Event::Kind::Fault) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("enter requests are granted in arrival order") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 7, 1);
  pool.submit(MsgKind::MonEnterReq, 7, 2);
  pool.submit(MsgKind::MonEnterReq, 7, 3);
  CHECK(pool.owns(7, 1));
  CHECK(grants(pool.log()).size() == 1);

  pool.submit(MsgKind::MonExitReq, 7, 1);
  CHECK(pool.owns(7, 2));
  pool.submit(MsgKind::MonExitReq, 7, 2);
  CHECK(pool.owns(7, 3));
  pool.submit(MsgKind::MonExitReq, 7, 3);
  CHECK(!pool.record(7)->held);

  std::vector<Event> gs = grants(pool.log());
  REQUIRE(gs.size() == 3);
  CHECK(gs[0].thread == 1);
  CHECK(gs[1].thread == 2);
  CHECK(gs[2].thread == 3);
  CHECK(faults(pool.log()).empty());
}

TEST_CASE("reentrant entry regrants the owner and counts releases") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 4, 1);
  pool.submit(MsgKind::MonEnterReq, 4, 1);  // reentrant
  CHECK(pool.record(4)->count == 2);
  pool.submit(MsgKind::MonEnterReq, 4, 2);  // queued

  pool.submit(MsgKind::MonExitReq, 4, 1);
  CHECK(pool.owns(4, 1));  // still held once
  CHECK(pool.record(4)->count == 1);
  pool.submit(MsgKind::MonExitReq, 4, 1);
  CHECK(pool.owns(4, 2));  // released, queued thread granted
  CHECK(faults(pool.log()).empty());
}

TEST_CASE("exit and wait by a non-owner are protocol faults") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonExitReq, 9, 5);  // monitor never held
  pool.submit(MsgKind::MonEnterReq, 9, 1);
  pool.submit(MsgKind::MonExitReq, 9, 2);  // held by t1, not t2
  pool.submit(MsgKind::WaitReq, 9, 2);     // still not the owner
  std::vector<Event> fs = faults(pool.log());
  REQUIRE(fs.size() == 3);
  CHECK(fs[0].thread == 5);
  CHECK(fs[1].thread == 2);
  CHECK(fs[2].thread == 2);
  CHECK(pool.owns(9, 1));  // ownership undisturbed
}

TEST_CASE("wait releases the monitor fully even when held reentrantly") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 3, 1);
  pool.submit(MsgKind::MonEnterReq, 3, 1);
  CHECK(pool.record(3)->count == 2);
  pool.submit(MsgKind::MonEnterReq, 3, 2);  // queued behind t1
  pool.submit(MsgKind::WaitReq, 3, 1);      // full release, not count-1
  CHECK(pool.owns(3, 2));
  REQUIRE(pool.record(3)->waiters.size() == 1);
  CHECK(pool.record(3)->waiters.front() == 1);
}

TEST_CASE("notify moves the longest waiter to the back of the enter queue") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 5, 1);
  pool.submit(MsgKind::WaitReq, 5, 1);      // t1 waits, monitor free
  pool.submit(MsgKind::MonEnterReq, 5, 2);  // t2 takes it
  pool.submit(MsgKind::MonEnterReq, 5, 3);  // t3 queued
  pool.submit(MsgKind::Notify, 5, 2);       // wakes t1 behind t3

  bool sawWake = false;
  for (const Event& e : pool.log())
    if (e.kind == Event::Kind::Wake) {
      sawWake = true;
      CHECK(e.thread == 1);
    }
  CHECK(sawWake);
  CHECK(pool.record(5)->waiters.empty());

  pool.submit(MsgKind::MonExitReq, 5, 2);
  CHECK(pool.owns(5, 3));  // t3 queued first, ahead of the woken t1
  pool.submit(MsgKind::MonExitReq, 5, 3);
  CHECK(pool.owns(5, 1));
  pool.submit(MsgKind::MonExitReq, 5, 1);
  CHECK(faults(pool.log()).empty());
}

TEST_CASE("notify on an empty wait set is a no-op") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 5, 1);
  pool.submit(MsgKind::Notify, 5, 1);
  for (const Event& e : pool.log()) CHECK(e.kind != Event::Kind::Wake);
}

TEST_CASE("notifyAll wakes every waiter in waiting order") {
  ManagerPool pool(1);
  for (std::uint64_t t : {1, 2, 3}) {
    pool.submit(MsgKind::MonEnterReq, 6, t);
    pool.submit(MsgKind::WaitReq, 6, t);
  }
  pool.submit(MsgKind::MonEnterReq, 6, 9);
  pool.submit(MsgKind::NotifyAll, 6, 9);
  std::vector<std::uint64_t> woken;
  for (const Event& e : pool.log())
    if (e.kind == Event::Kind::Wake) woken.push_back(e.thread);
  CHECK(woken == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(pool.record(6)->waiters.empty());

  // they re-enter in wake order as the monitor bounces
  pool.submit(MsgKind::MonExitReq, 6, 9);
  CHECK(pool.owns(6, 1));
  pool.submit(MsgKind::MonExitReq, 6, 1);
  CHECK(pool.owns(6, 2));
  pool.submit(MsgKind::MonExitReq, 6, 2);
  CHECK(pool.owns(6, 3));
}

TEST_CASE("a timed-out waiter is removed without a wake") {
  ManagerPool pool(1);
  pool.submit(MsgKind::MonEnterReq, 2, 1);
  pool.submit(MsgKind::WaitReq, 2, 1);
  REQUIRE(pool.record(2)->waiters.size() == 1);
  pool.submit(MsgKind::WaitTimeoutRemove, 2, 1);
  CHECK(pool.record(2)->waiters.empty());

  pool.submit(MsgKind::MonEnterReq, 2, 3);
  pool.submit(MsgKind::Notify, 2, 3);
  for (const Event& e : pool.log()) CHECK(e.kind != Event::Kind::Wake);
}

TEST_CASE("object records are allocated lazily") {
  ManagerPool pool(2);
  CHECK(pool.record(11) == nullptr);
  pool.submit(MsgKind::MonEnterReq, 11, 1);
  REQUIRE(pool.record(11) != nullptr);
  CHECK(pool.record(11)->held);
}

TEST_CASE("objects are distributed over managers by reference") {
  CHECK(assign_manager(0, 3) == 0);
  CHECK(assign_manager(7, 3) == 1);
  CHECK(assign_manager(8, 3) == 2);
  CHECK(assign_manager(9, 1) == 0);

  ManagerPool pool(3);
  for (std::uint64_t obj = 0; obj < 9; ++obj)
    pool.submit(MsgKind::MonEnterReq, obj, 100 + obj);
  for (std::uint32_t mid = 0; mid < 3; ++mid) {
    const ManagerState& m = pool.manager(mid);
    CHECK(m.records.size() == 3);
    for (const auto& [obj, rec] : m.records)
      CHECK(assign_manager(obj, 3) == mid);
  }
  // independent monitors don't contend: every request was granted
  CHECK(grants(pool.log()).size() == 9);
}

TEST_CASE("the join protocol hands the descriptor from target to joiner") {
  std::vector<ScriptEvent> script = join_protocol(1, 2, 7, false);
  REQUIRE(script.size() == 6);
  SimResult res = simulate(script, 2);
  CHECK(!res.faulted);

  std::vector<Event> gs = grants(res.events);
  REQUIRE(gs.size() == 3);
  CHECK(gs[0].thread == 1);  // joiner takes the descriptor
  CHECK(gs[1].thread == 2);  // target enters after the wait released it
  CHECK(gs[2].thread == 1);  // joiner reacquires after notifyAll + exit

  bool woke = false;
  for (const Event& e : res.events)
    if (e.kind == Event::Kind::Wake && e.thread == 1) woke = true;
  CHECK(woke);

  // a dead target short-circuits the whole exchange
  CHECK(join_protocol(1, 2, 7, true).empty());
}

TEST_CASE("scripts parse with comments and blanks, and reject junk") {
  std::vector<ScriptEvent> sc = parse_script_text(
      "// header comment\n"
      "t1 enter r7\n"
      "\n"
      "t1 wait r7\n"
      "t2 notifyAll r7\n"
      "t2 timeoutRemove r7\n");
  REQUIRE(sc.size() == 4);
  CHECK(sc[0].kind == MsgKind::MonEnterReq);
  CHECK(sc[1].kind == MsgKind::WaitReq);
  CHECK(sc[2].kind == MsgKind::NotifyAll);
  CHECK(sc[3].kind == MsgKind::WaitTimeoutRemove);
  CHECK(sc[0].thread == 1);
  CHECK(sc[0].object == 7);

  CHECK_THROWS_AS(parse_script_text("x1 enter r7\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_script_text("t1 frobnicate r7\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_script_text("t1 enter r7 extra\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_script_text("t1 enter\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_script_text("t1 enter rX\n"), std::runtime_error);
}

TEST_CASE("event lines render grants, wakes, and faults") {
  std::vector<ScriptEvent> sc = parse_script_text(
      "t1 enter r7\n"
      "t2 exit r7\n");
  SimResult res = simulate(sc, 1);
  REQUIRE(res.faulted);
  std::vector<std::string> ls = res.lines();
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "grant r7 -> t1 @0");
  CHECK(ls[1].find("fault") == 0);
  CHECK(ls[1].find("t2") != std::string::npos);
}
