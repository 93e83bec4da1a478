#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "djc/action.hpp"
#include "djc/ast.hpp"
#include "djc/value.hpp"

namespace djc {

enum class Lifecycle : std::uint8_t { Spawned, Started, Finished, Interrupted };

const char* lifecycle_name(Lifecycle s);

struct ObjectRecord {
  std::string cls;
  std::map<std::string, Value> fields;
  std::optional<Lifecycle> lifecycle;
};

/// Monitor state: free, or held `count` times by `owner`.
struct LockState {
  RefId owner = kNullRef;  // kNullRef == free
  std::uint32_t count = 0;

  bool free() const { return owner == kNullRef; }
  bool held_by(RefId t) const { return owner == t; }
};

struct HeapEntry {
  ObjectRecord object;
  LockState monitor;
};

struct Heap {
  std::map<RefId, HeapEntry> entries;
  /// Synthetic per-volatile-variable locks r.f.l; absent key == free.
  std::map<std::pair<RefId, std::string>, RefId> volatileLocks;

  bool allocated(RefId r) const { return entries.count(r) != 0; }
  HeapEntry& at(RefId r) { return entries.at(r); }
  const HeapEntry& at(RefId r) const { return entries.at(r); }
};

/// Per-core object cache. Snapshot copies of heap objects, restricted to
/// their non-volatile fields (volatile accesses never go through the cache).
/// Entry metadata remembers, per field, the uid of the action that put the
/// current value into the cache (a fetch or a write-back) for provenance.
struct CacheEntry {
  std::map<std::string, Value> fields;
  std::map<std::string, Uid> fieldSource;  // caching action (F or W) per field
  std::map<std::string, Uid> fieldWriter;  // write action whose value this is
  Uid fetchUid = 0;   // last F that (re)filled the entry
  Uid lastUpdate = 0; // last F or B that touched the entry
};

struct ObjectCache {
  std::map<RefId, CacheEntry> entries;
  std::vector<RefId> fetchOrder;  // first-fetch order, for invalidation order

  bool cached(RefId r) const { return entries.count(r) != 0; }
};

/// Per-core write buffer of dirty non-volatile fields. A rewrite of a
/// buffered field moves the entry to the back of the flush order, so flush
/// order is last-write order.
struct BufferEntry {
  RefId ref = kNullRef;
  std::string field;
  Value value;
  RefId writer = kNullRef;  // thread whose write created the entry
  Uid writeUid = 0;         // uid of that write action
};

struct WriteBuffer {
  std::vector<BufferEntry> entries;  // flush order: front first

  const BufferEntry* find(RefId r, const std::string& f) const {
    for (const auto& e : entries)
      if (e.ref == r && e.field == f) return &e;
    return nullptr;
  }
  bool dirty(RefId r, const std::string& f) const { return find(r, f); }
  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// A runnable thread: the object it animates, the core it runs on, and its
/// body (the start marker or an expression).
struct ThreadTerm {
  CoreId core = 0;
  RefId thread = kNullRef;
  bool startMarker = false;
  ExprPtr body;  // null while startMarker

  bool finished_shape() const {
    return !startMarker && body && body->kind == Expr::Kind::Lit &&
           body->val.isUnit();
  }
};

/// How reads and writes touch memory.
///  Cached: the full model (write buffer + object cache + heap).
///  Direct: an idealized coherent machine; reads/writes go straight to the
///          heap and no cache-maintenance actions exist. Used by the
///          sequential-consistency oracle.
enum class MemoryMode : std::uint8_t { Cached, Direct };

struct MachineState {
  Heap heap;
  std::map<CoreId, ObjectCache> caches;
  std::map<CoreId, WriteBuffer> buffers;
  std::vector<ThreadTerm> threads;
  RefId nextRef = 1;
  Uid nextUid = 1;
  std::uint32_t wbThreshold = 16;
  MemoryMode mode = MemoryMode::Cached;

  /// Provenance bookkeeping: last write action (In/W/Vw) whose value each
  /// heap slot currently holds, and the last write-back action per variable.
  std::map<std::pair<RefId, std::string>, Uid> heapWriter;
  std::map<std::pair<RefId, std::string>, Uid> lastWriteBack;

  /// Variables declared volatile; they bypass caches and write buffers.
  std::set<std::pair<RefId, std::string>> volatileVars;

  /// Interleaving-independent object names: each object is named by its
  /// allocating thread's canonical name plus a per-thread counter. Used for
  /// final-heap fingerprints comparable across schedules.
  std::map<RefId, std::string> canonName;
  std::map<RefId, std::uint32_t> allocCounter;

  ObjectCache& cache(CoreId c) { return caches[c]; }
  WriteBuffer& buffer(CoreId c) { return buffers[c]; }

  ThreadTerm* find_thread(RefId t) {
    for (auto& tt : threads)
      if (tt.thread == t) return &tt;
    return nullptr;
  }
  const ThreadTerm* find_thread(RefId t) const {
    for (const auto& tt : threads)
      if (tt.thread == t) return &tt;
    return nullptr;
  }

  RefId allocate(const ClassDef& cd, RefId allocatingThread);

  Value default_value(const TypeTag& t) const;
};

/// Deterministic sorted-key textual rendering of heap/caches/buffers,
/// for golden tests and debugging.
std::string dump_state(const MachineState& s);

/// Schedule-independent hash of the machine state (terms, heap, caches,
/// buffers, locks; counters excluded so that revisited configurations
/// collide). Used for cycle detection during exploration.
std::uint64_t state_hash(const MachineState& s);

/// Canonical final-heap fingerprint: FNV-1a over sorted
/// (canonicalObjectName, field, canonicalValue) triples, lifecycle and
/// monitor state excluded. Reference values are canonicalized through the
/// allocation-path names so fingerprints are comparable across schedules
/// and across machines (cached vs direct).
std::string heap_fingerprint(const MachineState& s);

}  // namespace djc
