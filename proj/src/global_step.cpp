#include "djc/global_step.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace djc {

bool thread_done(const MachineState& st, const ThreadTerm& tt) {
  return tt.finished_shape() && st.heap.allocated(tt.thread) &&
         st.heap.at(tt.thread).object.lifecycle == Lifecycle::Finished;
}

MachineState boot_machine(const Program& prog, std::uint32_t wbThreshold,
                          MemoryMode mode) {
  const ClassDef* mainCd = prog.find_class("Main");
  if (!mainCd) throw std::logic_error("boot: program has no Main class");
  if (!mainCd->fields.empty())
    throw std::logic_error("boot: entry class must not declare fields");
  MachineState st;
  st.wbThreshold = wbThreshold;
  st.mode = mode;
  RefId mainRef = st.allocate(*mainCd, kNullRef);
  st.heap.at(mainRef).object.lifecycle = Lifecycle::Spawned;
  ThreadTerm main;
  main.core = 0;
  main.thread = mainRef;
  main.startMarker = true;
  st.threads.push_back(std::move(main));
  return st;
}

CoreId choose_spawn_core(const MachineState& st, const Program&,
                         std::uint32_t nCores) {
  std::vector<std::uint32_t> live(nCores, 0);
  for (const auto& tt : st.threads)
    if (tt.core < nCores && !thread_done(st, tt)) live[tt.core] += 1;
  CoreId best = 0;
  for (CoreId c = 0; c < nCores; ++c) {
    if (live[c] == 0) return c;
    if (live[c] < live[best]) best = c;
  }
  return best;
}

std::string format_schedule(const std::vector<GlobalTransition>& sched) {
  std::ostringstream out;
  for (const auto& g : sched) {
    out << "step " << g.step << ": core " << g.core << " rule "
        << rule_name(g.rule) << " target r" << g.thread;
    if (g.rule == Rule::Migrate) out << " dst c" << g.migrateDst;
    out << "\n";
  }
  return out.str();
}

std::vector<GlobalTransition> parse_schedule(std::istream& in) {
  std::vector<GlobalTransition> sched;
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("schedule line " + std::to_string(lineNo) +
                             ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw.rfind("//", 0) == 0) continue;
    if (kw != "step") fail("expected 'step'");
    GlobalTransition g;
    std::string stepTok, coreKw, ruleKw, ruleName, targetKw, targetTok;
    std::uint32_t core = 0;
    if (!(ls >> stepTok >> coreKw >> core >> ruleKw >> ruleName >> targetKw >>
          targetTok))
      fail("expected 'step <n>: core <c> rule <name> target r<id>'");
    if (stepTok.empty() || stepTok.back() != ':') fail("expected '<n>:'");
    g.step = std::stoull(stepTok.substr(0, stepTok.size() - 1));
    if (coreKw != "core" || ruleKw != "rule" || targetKw != "target")
      fail("malformed schedule entry");
    g.core = core;
    auto rule = rule_from_name(ruleName);
    if (!rule) fail("unknown rule '" + ruleName + "'");
    g.rule = *rule;
    if (targetTok.size() < 2 || targetTok[0] != 'r')
      fail("expected thread token 'r<id>'");
    g.thread = static_cast<RefId>(std::stoul(targetTok.substr(1)));
    if (g.rule == Rule::Migrate) {
      std::string dstKw, dstTok;
      if (!(ls >> dstKw >> dstTok) || dstKw != "dst" || dstTok.size() < 2 ||
          dstTok[0] != 'c')
        fail("migration entry needs 'dst c<k>'");
      g.migrateDst = static_cast<CoreId>(std::stoul(dstTok.substr(1)));
    }
    sched.push_back(g);
  }
  return sched;
}

Simulator::Simulator(Program prog, RunConfig cfg)
    : prog_(std::move(prog)), cfg_(std::move(cfg)) {
  if (cfg_.cores < 1 || cfg_.cores > 512)
    throw std::invalid_argument("core count must be in 1..512");
  if (cfg_.managers < 1)
    throw std::invalid_argument("need at least one synchronization manager");
  if (cfg_.wbThreshold < 1)
    throw std::invalid_argument("write-buffer threshold must be >= 1");
  boot_ = boot_machine(prog_, cfg_.wbThreshold);
}

std::vector<Simulator::Candidate> Simulator::candidates(
    const MachineState& st, const StepOptions& opts) const {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < st.threads.size(); ++i) {
    NextStep ns = next_step(st, prog_, st.threads[i], opts);
    if (ns.enabled) out.push_back({i, std::move(ns)});
  }
  return out;
}

RunResult Simulator::run() { return drive(nullptr); }

RunResult Simulator::replay(const std::vector<GlobalTransition>& schedule) {
  return drive(&schedule);
}

RunResult Simulator::drive(const std::vector<GlobalTransition>* replaySched) {
  RunResult res;
  res.trace.program = cfg_.sourceText;
  MachineState st = boot_;
  StepOptions opts;
  opts.policy = cfg_.policy;
  opts.fuseVolatile = true;

  std::mt19937_64 rng(cfg_.seed);
  syncmgr::ManagerPool pool(cfg_.managers);
  std::set<std::pair<RefId, RefId>> pendingReq;  // (thread, monitor)

  std::vector<MigrationDirective> migrations = cfg_.migrations;
  std::stable_sort(migrations.begin(), migrations.end(),
                   [](const MigrationDirective& a,
                      const MigrationDirective& b) { return a.step < b.step; });
  std::size_t nextMig = 0;

  if (cfg_.checkpoints) {
    Checkpoint boot;
    boot.step = -1;
    boot.post = state_snapshot(st);
    res.checkpoints.push_back(std::move(boot));
  }

  auto fail = [&](int code, std::string why) {
    res.exitCode = code;
    res.diagnostics = std::move(why);
    res.finalState = st;
    return res;
  };

  for (std::uint64_t step = 0;; ++step) {
    if (step >= cfg_.maxSteps)
      return fail(4, "step budget exhausted after " +
                         std::to_string(cfg_.maxSteps) + " transitions");

    // Forced migration directives consume this transition.
    bool migrate = false;
    MigrationDirective mig;
    if (replaySched) {
      if (step < replaySched->size() &&
          (*replaySched)[step].rule == Rule::Migrate) {
        migrate = true;
        mig.step = step;
        mig.thread = (*replaySched)[step].thread;
        mig.dst = (*replaySched)[step].migrateDst;
      }
    } else if (nextMig < migrations.size() &&
               migrations[nextMig].step <= step) {
      migrate = true;
      mig = migrations[nextMig++];
    }
    if (migrate) {
      ThreadTerm* tt = st.find_thread(mig.thread);
      if (!tt)
        return fail(2, "migration directive at step " + std::to_string(step) +
                           " names unknown thread r" +
                           std::to_string(mig.thread));
      if (mig.dst >= cfg_.cores)
        return fail(2, "migration destination c" + std::to_string(mig.dst) +
                           " out of range");
      CoreId src = tt->core;
      try {
        StepResult sr = apply_migrate(st, mig.thread, mig.dst, step,
                                      /*flushSource=*/true);
        for (auto& a : sr.actions) res.trace.actions.push_back(std::move(a));
      } catch (const std::logic_error& e) {
        return fail(2, std::string("migration failed at step ") +
                           std::to_string(step) + ": " + e.what());
      }
      GlobalTransition g;
      g.step = step;
      g.core = src;
      g.rule = Rule::Migrate;
      g.thread = mig.thread;
      g.migrateDst = mig.dst;
      res.schedule.push_back(g);
      if (cfg_.checkpoints) {
        Checkpoint cp;
        cp.step = static_cast<std::int64_t>(step);
        cp.cores = {src};
        cp.post = state_snapshot(st);
        res.checkpoints.push_back(std::move(cp));
      }
      continue;
    }

    std::vector<Candidate> cand = candidates(st, opts);

    bool allDone = true;
    for (const auto& tt : st.threads)
      if (!thread_done(st, tt)) allDone = false;
    if (allDone) {
      if (replaySched && step < replaySched->size())
        return fail(2, "replay schedule has " +
                           std::to_string(replaySched->size()) +
                           " entries but execution finished after " +
                           std::to_string(step));
      res.exitCode = 0;
      res.finalState = st;
      return res;
    }

    if (cand.empty()) {
      std::ostringstream why;
      why << "no thread can step (deadlock)";
      for (const auto& tt : st.threads) {
        if (thread_done(st, tt)) continue;
        NextStep ns = next_step(st, prog_, tt, opts);
        why << "\n  r" << tt.thread << " on c" << tt.core << ": " << ns.why
            << (ns.permanentlyStuck ? " (permanent)" : "");
      }
      return fail(3, why.str());
    }

    std::size_t choice = 0;
    if (replaySched) {
      if (step >= replaySched->size())
        return fail(2, "replay schedule ended at step " +
                           std::to_string(step) +
                           " but execution has not finished");
      const GlobalTransition& want = (*replaySched)[step];
      bool found = false;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        const ThreadTerm& tt = st.threads[cand[i].threadIndex];
        if (tt.thread == want.thread) {
          choice = i;
          found = true;
          break;
        }
      }
      if (!found)
        return fail(2, "replay mismatch at step " + std::to_string(step) +
                           ": thread r" + std::to_string(want.thread) +
                           " is not schedulable here");
      const Candidate& c = cand[choice];
      const ThreadTerm& tt = st.threads[c.threadIndex];
      if (c.ns.rule != want.rule || tt.core != want.core)
        return fail(2, std::string("replay mismatch at step ") +
                           std::to_string(step) + ": recorded rule " +
                           rule_name(want.rule) + " on c" +
                           std::to_string(want.core) + ", machine offers " +
                           rule_name(c.ns.rule) + " on c" +
                           std::to_string(tt.core));
    } else {
      // Grant gating: contended monitor entry goes through the managers;
      // only the grant holder's enter is eligible.
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        const Candidate& c = cand[i];
        if (c.ns.rule == Rule::MonitorEnter) {
          RefId t = st.threads[c.threadIndex].thread;
          RefId obj = c.ns.targetRef;
          if (!pool.owns(obj, t) && !pendingReq.count({t, obj})) {
            pool.submit(syncmgr::MsgKind::MonEnterReq, obj, t,
                        st.threads[c.threadIndex].core);
            pendingReq.insert({t, obj});
          }
          if (!pool.owns(obj, t)) continue;
        }
        eligible.push_back(i);
      }
      if (eligible.empty())
        return fail(2, "scheduler invariant broken: enabled threads exist "
                       "but none is eligible");
      choice = eligible[static_cast<std::size_t>(rng() % eligible.size())];
    }

    const Candidate& picked = cand[choice];
    RefId thread = st.threads[picked.threadIndex].thread;
    CoreId core = st.threads[picked.threadIndex].core;
    CoreId spawnCore = picked.ns.rule == Rule::Spawn
                           ? choose_spawn_core(st, prog_, cfg_.cores)
                           : 0;

    StepResult sr = apply_step(st, prog_, thread, step, opts, spawnCore);
    for (auto& a : sr.actions) res.trace.actions.push_back(std::move(a));

    if (!replaySched) {
      switch (sr.programRule) {
        case Rule::MonitorEnter:
          pendingReq.erase({thread, picked.ns.targetRef});
          break;
        case Rule::NestedMonitorEnter:
          pool.submit(syncmgr::MsgKind::MonEnterReq, picked.ns.targetRef,
                      thread, core);
          break;
        case Rule::MonitorExit:
        case Rule::NestedMonitorExit:
          pool.submit(syncmgr::MsgKind::MonExitReq, picked.ns.targetRef,
                      thread, core);
          break;
        default:
          break;
      }
    }

    GlobalTransition g;
    g.step = step;
    g.core = core;
    g.rule = sr.programRule;
    g.thread = thread;
    res.schedule.push_back(g);

    if (cfg_.checkpoints) {
      Checkpoint cp;
      cp.step = static_cast<std::int64_t>(step);
      cp.cores = {core};
      cp.post = state_snapshot(st);
      res.checkpoints.push_back(std::move(cp));
    }
  }
}

ExploreResult Simulator::explore(const Program& prog,
                                 const ExploreConfig& cfg) {
  ExploreResult res;
  StepOptions opts;
  opts.policy = cfg.policy;
  opts.fuseVolatile = false;  // branch over the volatile lock phases too

  std::unordered_map<std::uint64_t, std::uint64_t> visitedDepth;

  std::function<void(MachineState, std::uint64_t)> dfs =
      [&](MachineState st, std::uint64_t depth) {
        if (res.statesExplored >= cfg.maxStates) {
          res.partial = true;
          return;
        }
        res.statesExplored += 1;

        std::vector<std::pair<RefId, NextStep>> cand;
        for (const auto& tt : st.threads) {
          NextStep ns = next_step(st, prog, tt, opts);
          if (ns.enabled) cand.emplace_back(tt.thread, std::move(ns));
        }

        if (cand.empty()) {
          bool allDone = true;
          for (const auto& tt : st.threads)
            if (!thread_done(st, tt)) allDone = false;
          if (allDone) {
            res.terminalStates += 1;
            res.finalHeaps.insert(heap_fingerprint(st));
          } else {
            res.deadlockFound = true;
            if (res.deadlockDiags.size() < 10) {
              std::ostringstream why;
              why << "deadlock at depth " << depth << ":";
              for (const auto& tt : st.threads) {
                if (thread_done(st, tt)) continue;
                NextStep ns = next_step(st, prog, tt, opts);
                why << " [r" << tt.thread << ": " << ns.why << "]";
              }
              res.deadlockDiags.push_back(why.str());
            }
          }
          return;
        }

        if (depth >= cfg.maxDepth) {
          res.partial = true;
          return;
        }

        for (const auto& [thread, ns] : cand) {
          MachineState next = st;
          CoreId spawnCore = ns.rule == Rule::Spawn
                                 ? choose_spawn_core(next, prog, cfg.cores)
                                 : 0;
          apply_step(next, prog, thread, depth, opts, spawnCore);
          std::uint64_t h = state_hash(next);
          auto it = visitedDepth.find(h);
          if (it != visitedDepth.end() && it->second <= depth + 1) continue;
          visitedDepth[h] = depth + 1;
          dfs(std::move(next), depth + 1);
        }
      };

  dfs(boot_machine(prog, cfg.wbThreshold), 0);
  return res;
}

}  // namespace djc
