#pragma once

#include <set>
#include <string>
#include <vector>

#include "djc/trace.hpp"

namespace djc {

struct WfViolation {
  std::string rule;  // "WF-7", "WFE-1", "WFH-3", ...
  std::vector<Uid> uids;
  std::string msg;
};

std::string violation_line(const WfViolation& v);  // one JSON object

struct WfOptions {
  /// Count fetch/write-back actions as synchronization actions for the
  /// per-position uniqueness rule (they stay out of the synchronization
  /// order itself).
  bool saCacheOps = false;
  /// Restrict checking to these rule ids (empty: all rules).
  std::set<std::string> only;
};

struct WfReport {
  std::vector<WfViolation> violations;
  bool clean() const { return violations.empty(); }
};

/// Validates a trace against the action well-formedness rules (WF-1..20)
/// and the execution-extension rules (WFE-1/2). Throws TraceError when the
/// embedded program cannot be parsed.
WfReport check(const Trace& t, const WfOptions& opts = {});

/// Validates per-transition machine-state snapshots against the trace
/// (heap/cache/buffer agreement rules WFH-1..9 plus the snapshot halves of
/// WF-17/WF-18). `cps` must include the boot snapshot (step -1).
WfReport check_wfh(const Trace& t, const std::vector<Checkpoint>& cps,
                   const WfOptions& opts = {});

}  // namespace djc
