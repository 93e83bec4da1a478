#include "djc/sc.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>

namespace djc {

namespace {

struct Access {
  RefId thread;
  RefId ref;
  std::string field;
  bool write;
};

/// The non-volatile variable the candidate's next step touches, if any.
std::optional<Access> footprint(RefId thread, const NextStep& ns) {
  switch (ns.rule) {
    case Rule::Field:
    case Rule::FieldDirty:
      return Access{thread, ns.targetRef, ns.targetField, false};
    case Rule::Assign:
      return Access{thread, ns.targetRef, ns.targetField, true};
    default:
      return std::nullopt;
  }
}

}  // namespace

ScAnalysis analyze_sc(const Program& prog, const ScConfig& cfg) {
  ScAnalysis res;
  StepOptions opts;
  opts.policy = WritePolicy::Buffered;  // irrelevant on a coherent machine
  opts.fuseVolatile = true;

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

        // Race detection: two co-enabled conflicting accesses to the same
        // non-volatile variable from different threads.
        for (std::size_t i = 0; i < cand.size() && !res.racy; ++i) {
          auto a = footprint(cand[i].first, cand[i].second);
          if (!a) continue;
          for (std::size_t j = i + 1; j < cand.size(); ++j) {
            auto b = footprint(cand[j].first, cand[j].second);
            if (!b) continue;
            if (a->ref == b->ref && a->field == b->field &&
                a->thread != b->thread && (a->write || b->write)) {
              res.racy = true;
              RaceWitness w;
              w.ref = a->ref;
              w.field = a->field;
              w.thread1 = a->thread;
              w.thread2 = b->thread;
              std::ostringstream d;
              d << "co-enabled " << (a->write ? "write" : "read") << " and "
                << (b->write ? "write" : "read") << " of r" << a->ref << "."
                << a->field << " by r" << a->thread << " and r" << b->thread
                << " at depth " << depth;
              w.detail = d.str();
              res.witness = w;
              break;
            }
          }
        }

        if (cand.empty()) {
          bool allDone = true;
          for (const auto& tt : st.threads)
            if (!thread_done(st, tt)) allDone = false;
          if (allDone)
            res.outcomes.insert(heap_fingerprint(st));
          else
            res.deadlockFound = true;
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

  dfs(boot_machine(prog, 16, MemoryMode::Direct), 0);
  return res;
}

}  // namespace djc
