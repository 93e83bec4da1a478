#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace djc {

/// Reference identifier issued by the heap allocator. 0 is the distinguished
/// null reference: it is never allocated and no rule is enabled on it.
using RefId = std::uint32_t;
inline constexpr RefId kNullRef = 0;

using CoreId = std::uint32_t;

/// Unique action identifier within one trace.
using Uid = std::uint64_t;

/// Runtime value: unit, boolean, natural number, or object reference.
struct Value {
  enum class Kind : std::uint8_t { Unit, Bool, Nat, Ref };

  Kind kind = Kind::Unit;
  std::uint64_t bits = 0;

  static Value unit() { return Value{Kind::Unit, 0}; }
  static Value boolean(bool b) { return Value{Kind::Bool, b ? 1u : 0u}; }
  static Value nat(std::uint64_t n) { return Value{Kind::Nat, n}; }
  static Value ref(RefId r) { return Value{Kind::Ref, r}; }

  bool isUnit() const { return kind == Kind::Unit; }
  bool isBool() const { return kind == Kind::Bool; }
  bool isNat() const { return kind == Kind::Nat; }
  bool isRef() const { return kind == Kind::Ref; }

  bool asBool() const { return bits != 0; }
  std::uint64_t asNat() const { return bits; }
  RefId asRef() const { return static_cast<RefId>(bits); }

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind == b.kind && a.bits == b.bits;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.bits < b.bits;
  }
};

/// Renders a value in surface syntax: "()", "true", "false", "7", "r12".
/// The null reference renders as "null".
inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Unit:
      return "()";
    case Value::Kind::Bool:
      return v.asBool() ? "true" : "false";
    case Value::Kind::Nat:
      return std::to_string(v.asNat());
    case Value::Kind::Ref:
      return v.asRef() == kNullRef ? "null" : "r" + std::to_string(v.asRef());
  }
  return "()";
}

/// Parses the rendering produced by to_string. Used by trace readers.
inline std::optional<Value> value_from_string(const std::string& s) {
  if (s == "()") return Value::unit();
  if (s == "true") return Value::boolean(true);
  if (s == "false") return Value::boolean(false);
  if (s == "null") return Value::ref(kNullRef);
  if (!s.empty() && s[0] == 'r') {
    std::uint64_t n = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      n = n * 10 + static_cast<std::uint64_t>(s[i] - '0');
    }
    if (s.size() == 1) return std::nullopt;
    return Value::ref(static_cast<RefId>(n));
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t n = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return Value::nat(n);
}

}  // namespace djc
