#pragma once

#include <optional>
#include <string>
#include <vector>

#include "djc/action.hpp"
#include "djc/state.hpp"

namespace djc {

/// Emission context for one global transition: actions appended here share
/// the transition's step index and get consecutive `ord` numbers and fresh
/// uids from the machine counter.
struct EmitCtx {
  MachineState& st;
  std::vector<Action>& out;
  std::uint64_t step = 0;
  CoreId core = 0;
  RefId thread = kNullRef;
  std::uint32_t nextOrd = 0;
};

/// Append `a` to the transition, filling uid/step/ord (and core/thread when
/// the caller left them defaulted). Returns the assigned uid.
Uid push_action(EmitCtx& cx, Action a);

/// True if the value of r.f is locally available on cx's core (write buffer
/// or object cache). Direct-mode machines always answer true for allocated
/// refs.
bool locally_readable(const MachineState& st, CoreId core, RefId r,
                      const std::string& field);

/// Read a non-volatile field through the local memory hierarchy
/// (buffer first, then cache; heap in Direct mode). Emits one R action with
/// write/source provenance. Requires locally_readable.
Value read_field(EmitCtx& cx, RefId r, const std::string& field);

/// Buffer a non-volatile write (heap write in Direct mode). Emits one W
/// action; a full buffer is completely flushed (write-backs, with fetches
/// as needed) before the new entry is inserted. A rewrite of an already
/// buffered variable replaces the entry and moves it to the back of the
/// flush order. Returns the W action's uid.
Uid write_field(EmitCtx& cx, RefId r, const std::string& field, Value v);

/// Cache a snapshot of the heap object's non-volatile fields on cx's core.
/// Emits one F action whose provenance maps each snapshotted field to the
/// write-back that produced its heap value.
void fetch_object(EmitCtx& cx, RefId r);

/// Write the buffer entry for (r, field) back to the heap and the local
/// cache copy, removing it from the buffer. Emits one B action attributed
/// to the writing thread. Requires the entry to exist and r to be cached.
void write_back_field(EmitCtx& cx, RefId r, const std::string& field);

/// Drop the cached copy of r on cx's core. Emits one I action pointing at
/// the fetch/write-back that last refreshed the entry.
void invalidate_object(EmitCtx& cx, RefId r);

/// Write back every buffer entry of cx's core in flush order, fetching
/// owners that are not currently cached first so write-back is possible.
void write_back_all(EmitCtx& cx);

/// Acquire-side flush: write back all dirty data, then invalidate every
/// cached object (in first-fetch order). Establishes empty cache + buffer.
void acquire_flush(EmitCtx& cx);

/// Release-side flush: write back all dirty data; the cache is retained.
void release_flush(EmitCtx& cx);

/// Initialization prologue for a freshly allocated object: one In and one
/// immediately following B per declared field (declaration order), all
/// prologue-flagged and carrying the default field values. Direct-mode
/// machines emit only the In actions.
void emit_alloc_prologue(EmitCtx& cx, RefId r, const ClassDef& cd);

}  // namespace djc
