#pragma once

#include <map>
#include <optional>
#include <string>

#include "djc/value.hpp"

namespace djc {

/// Memory-action kinds of the distributed execution model.
enum class ActionKind : std::uint8_t {
  In,   // initialization write of a variable (r.f)
  R,    // non-volatile read
  W,    // non-volatile write (into the write buffer)
  Vr,   // volatile read
  Vw,   // volatile write
  L,    // lock (monitor enter)
  U,    // unlock (monitor exit)
  S,    // thread start
  Fi,   // thread finish
  Ir,   // interrupt
  Ird,  // interrupt detection
  Sp,   // thread spawn
  J,    // join
  F,    // fetch of an object into a core's cache
  B,    // write-back of a dirty variable to the heap
  I,    // invalidation of a cached object
  M,    // thread migration
};

const char* kind_name(ActionKind k);
std::optional<ActionKind> kind_from_name(const std::string& s);

/// Synchronization actions. Cache-maintenance kinds (F/B/I) and migration
/// are not synchronization actions by default; a checker toggle can count
/// F/B as such for the finite-prefix rule only.
inline bool is_sync_kind(ActionKind k) {
  switch (k) {
    case ActionKind::In:
    case ActionKind::Ir:
    case ActionKind::Ird:
    case ActionKind::Vr:
    case ActionKind::Vw:
    case ActionKind::L:
    case ActionKind::U:
    case ActionKind::S:
    case ActionKind::Fi:
    case ActionKind::Sp:
    case ActionKind::J:
      return true;
    default:
      return false;
  }
}

inline bool is_read_kind(ActionKind k) {
  return k == ActionKind::R || k == ActionKind::Vr;
}
inline bool is_write_kind(ActionKind k) {
  return k == ActionKind::In || k == ActionKind::W || k == ActionKind::Vw;
}

/// What an action acts on: a variable (ref.field), an object/monitor/thread
/// reference, a core (migration destination), or nothing.
struct Target {
  enum class Kind : std::uint8_t { None, Var, Ref, Core };
  Kind kind = Kind::None;
  RefId ref = kNullRef;
  std::string field;  // Var only
  CoreId core = 0;    // Core only

  static Target none() { return {}; }
  static Target variable(RefId r, std::string f) {
    return {Kind::Var, r, std::move(f), 0};
  }
  static Target object(RefId r) { return {Kind::Ref, r, {}, 0}; }
  static Target core_id(CoreId c) { return {Kind::Core, kNullRef, {}, c}; }

  bool is_var() const { return kind == Kind::Var; }
  bool same_var(const Target& o) const {
    return kind == Kind::Var && o.kind == Kind::Var && ref == o.ref &&
           field == o.field;
  }
  /// True when this target covers variable (r, f): a Var target equal to it,
  /// or a Ref target on r (fetch/invalidate act on whole objects).
  bool covers_var(RefId r, const std::string& f) const {
    if (kind == Kind::Var) return ref == r && field == f;
    if (kind == Kind::Ref) return ref == r;
    return false;
  }

  std::string render() const;  // "r12.f", "r12", "c3", ""
  friend bool operator==(const Target& a, const Target& b) {
    return a.kind == b.kind && a.ref == b.ref && a.field == b.field &&
           a.core == b.core;
  }
};

/// Recorded provenance pointers, filled in by the interpreter as the action
/// is emitted and validated later by the trace checker.
struct Provenance {
  std::optional<Uid> W;             // reads: the write seen
  std::optional<Uid> Cs;            // non-volatile reads: caching action seen
  std::optional<Uid> Ab;            // write-backs: the write written back
  std::optional<Uid> Ai;            // invalidations: the action that cached
  std::map<std::string, Uid> Bf;    // fetches: per-field latest write-back

  bool empty() const {
    return !W && !Cs && !Ab && !Ai && Bf.empty();
  }
};

struct Action {
  Uid uid = 0;
  std::uint64_t step = 0;  // global transition index
  std::uint32_t ord = 0;   // intra-transition ordinal
  CoreId core = 0;
  RefId thread = kNullRef;
  ActionKind kind = ActionKind::R;
  Target target;
  std::optional<Value> value;
  bool prologue = false;   // true only for In actions and their paired B
  std::string cls;         // class name, recorded on In and S actions
  Provenance prov;

  bool is_sync() const { return is_sync_kind(kind); }
};

}  // namespace djc
