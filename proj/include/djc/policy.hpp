#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "djc/global_step.hpp"

namespace djc {

/// A write-back policy under comparison: either every write is flushed to
/// the heap as it happens, or writes coalesce in the buffer until a flush
/// point (synchronization, thread exit, or the buffer reaching `threshold`
/// distinct variables).
struct PolicyConfig {
  WritePolicy policy = WritePolicy::Buffered;
  std::uint32_t threshold = 16;

  std::string name() const {
    return policy == WritePolicy::Eager
               ? "eager"
               : "buffered" + std::to_string(threshold);
  }
};

/// Operation counts extracted from one trace.
struct OpMetrics {
  std::uint64_t writebacks = 0;     // non-prologue write-backs
  std::uint64_t fetches = 0;        // fetches
  std::uint64_t invalidations = 0;  // invalidations
  std::uint64_t bulkRuns = 0;       // maximal batches of write-backs that
                                    // walk one object's fields in
                                    // declaration order
  std::uint64_t syncActions = 0;    // synchronization actions
};

/// Counts the trace's memory-system operations. `bulkRuns` groups the B
/// actions (in emission order) into maximal runs on a single object whose
/// field declaration indices step by one; each run counts once, so fewer
/// runs for the same write-backs means better batching.
OpMetrics measure(const Trace& tr, const Program& prog);

/// Runs `source` under the given policy, overriding the policy fields of
/// `base`.
RunResult run_with_policy(const std::string& source, const PolicyConfig& pc,
                          RunConfig base);

/// Runs every (policy, seed) pair and renders one CSV table:
///   policy,seed,writebacks,fetches,invalidations,bulkRuns,syncActions
/// Throws std::runtime_error when a run fails or two policies reach
/// different final heaps for the same seed.
std::string compare_policies_csv(const std::string& source,
                                 const std::vector<PolicyConfig>& policies,
                                 const std::vector<std::uint64_t>& seeds,
                                 RunConfig base);

}  // namespace djc
