#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "djc/global_step.hpp"

namespace djc {

struct ScConfig {
  std::uint32_t cores = 8;
  std::uint64_t maxDepth = 100000;
  std::uint64_t maxStates = 2000000;
};

struct RaceWitness {
  RefId ref = kNullRef;
  std::string field;
  RefId thread1 = kNullRef;
  RefId thread2 = kNullRef;
  std::string detail;
};

/// Result of enumerating all interleavings on an idealized coherent machine
/// (reads and writes act directly on the heap; no caches, write buffers, or
/// cache-maintenance actions; volatile accesses take a single step).
///
/// `outcomes` holds the terminal heap fingerprints — the set of final heaps
/// permitted under sequential consistency. `racy` reports whether any
/// reachable state co-enables two conflicting accesses to the same
/// non-volatile variable from different threads (at least one of them a
/// write); volatile accesses never count. A program with `racy == false` is
/// data-race-free, and its relaxed-machine outcomes must coincide with
/// `outcomes`.
struct ScAnalysis {
  std::set<std::string> outcomes;
  bool racy = false;
  std::optional<RaceWitness> witness;
  bool deadlockFound = false;
  bool partial = false;
  std::uint64_t statesExplored = 0;
};

ScAnalysis analyze_sc(const Program& prog, const ScConfig& cfg = {});

inline std::set<std::string> sc_outcomes(const Program& prog,
                                         const ScConfig& cfg = {}) {
  return analyze_sc(prog, cfg).outcomes;
}

inline bool is_drf(const Program& prog, const ScConfig& cfg = {}) {
  return !analyze_sc(prog, cfg).racy;
}

}  // namespace djc
