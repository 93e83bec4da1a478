#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "djc/action.hpp"
#include "djc/state.hpp"

namespace djc {

/// A complete recorded execution: the source text of the program that was
/// run (the trace file is self-contained and replayable) plus the flattened
/// action sequence in emission order.
struct Trace {
  std::string program;
  std::vector<Action> actions;
};

/// Raised on malformed trace / checkpoint files.
struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One machine-state snapshot, taken after a global transition (or at boot,
/// with step == -1 and no cores).
struct Checkpoint {
  std::int64_t step = -1;
  std::vector<CoreId> cores;
  nlohmann::ordered_json post;
};

void write_trace(std::ostream& os, const Trace& t);
Trace read_trace(std::istream& is);

nlohmann::ordered_json state_snapshot(const MachineState& s);
void write_checkpoints(std::ostream& os, const std::vector<Checkpoint>& cps);
std::vector<Checkpoint> read_checkpoints(std::istream& is);

/// Derived orders over a trace.
///
/// Position: the global display order used by the synchronization order —
/// initialization-prologue actions first (by uid), then everything else by
/// (step, ord). Two distinct actions may collide on the same position key;
/// every adjacent tie is recorded and the checker decides which pairs are
/// order violations (always sync/sync pairs; optionally pairs involving
/// cache-maintenance actions when they are treated as synchronized).
///
/// Program order (po): per thread, prologue actions first then the rest,
/// uid-ordered within each group.
///
/// sw: synchronizes-with edges (initialization → start, volatile write →
/// the reads that see it, unlock → next lock of the same monitor, spawn →
/// start, finish → join, interrupt → detection). Cache edges (write-back →
/// the fetches that carry it) are kept separately and do not feed
/// happens-before.
///
/// hb: transitive closure of po ∪ sw.
struct TraceOrders {
  std::vector<std::size_t> posRank;     // action index -> position
  std::vector<std::size_t> byPosition;  // positions -> action index
  std::vector<std::pair<std::size_t, std::size_t>> syncTies;
  std::vector<std::size_t> so;  // sync action indices, position order
  std::map<RefId, std::vector<std::size_t>> poThreads;
  std::vector<std::pair<std::size_t, std::size_t>> sw;
  std::vector<std::pair<std::size_t, std::size_t>> cacheEdges;
  std::map<Uid, std::size_t> byUid;  // first action with each uid

  std::size_t n = 0;
  std::vector<std::uint64_t> hbBits;  // n rows of ceil(n/64) words
  std::size_t words = 0;

  bool happens_before(std::size_t i, std::size_t j) const {
    return (hbBits[i * words + j / 64] >> (j % 64)) & 1u;
  }
  bool po(const Trace& t, std::size_t i, std::size_t j) const;
  std::size_t pos(std::size_t i) const { return posRank[i]; }
};

TraceOrders compute_orders(const Trace& t);

/// Render / parse the string form used in trace files for targets.
std::string target_to_string(const Target& t);
Target target_from_string(const std::string& s);

}  // namespace djc
