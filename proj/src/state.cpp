#include "djc/state.hpp"

#include <algorithm>
#include <sstream>

namespace djc {

const char* lifecycle_name(Lifecycle s) {
  switch (s) {
    case Lifecycle::Spawned: return "spawned";
    case Lifecycle::Started: return "started";
    case Lifecycle::Finished: return "finished";
    case Lifecycle::Interrupted: return "interrupted";
  }
  return "?";
}

Value MachineState::default_value(const TypeTag& t) const {
  switch (t.kind) {
    case TypeTag::Kind::Unit: return Value::unit();
    case TypeTag::Kind::Bool: return Value::boolean(false);
    case TypeTag::Kind::Nat: return Value::nat(0);
    case TypeTag::Kind::Class: return Value::ref(kNullRef);
  }
  return Value::unit();
}

RefId MachineState::allocate(const ClassDef& cd, RefId allocatingThread) {
  RefId r = nextRef++;
  HeapEntry entry;
  entry.object.cls = cd.name;
  for (const auto& fd : cd.fields)
    entry.object.fields[fd.name] = default_value(fd.type);
  heap.entries[r] = std::move(entry);

  std::string base = allocatingThread == kNullRef
                         ? std::string("m")
                         : canonName.count(allocatingThread)
                               ? canonName.at(allocatingThread)
                               : "r" + std::to_string(allocatingThread);
  std::uint32_t idx = allocCounter[allocatingThread]++;
  canonName[r] = base + ":" + std::to_string(idx);
  return r;
}

std::string dump_state(const MachineState& s) {
  std::ostringstream out;
  out << "heap:\n";
  for (const auto& [r, entry] : s.heap.entries) {
    out << "  r" << r << " " << entry.object.cls;
    if (entry.object.lifecycle)
      out << " [" << lifecycle_name(*entry.object.lifecycle) << "]";
    if (!entry.monitor.free())
      out << " lock=r" << entry.monitor.owner << "(" << entry.monitor.count
          << ")";
    out << " {";
    bool first = true;
    for (const auto& [f, v] : entry.object.fields) {
      if (!first) out << ", ";
      first = false;
      out << f << "=" << to_string(v);
    }
    out << "}\n";
  }
  for (const auto& [key, owner] : s.heap.volatileLocks)
    out << "  vlock r" << key.first << "." << key.second << " held by r"
        << owner << "\n";
  out << "caches:\n";
  for (const auto& [c, cache] : s.caches) {
    if (cache.entries.empty()) continue;
    out << "  c" << c << ":";
    for (const auto& [r, ce] : cache.entries) {
      out << " r" << r << "{";
      bool first = true;
      for (const auto& [f, v] : ce.fields) {
        if (!first) out << ", ";
        first = false;
        out << f << "=" << to_string(v);
      }
      out << "}";
    }
    out << "\n";
  }
  out << "buffers:\n";
  for (const auto& [c, buf] : s.buffers) {
    if (buf.empty()) continue;
    out << "  c" << c << ":";
    for (const auto& e : buf.entries)
      out << " r" << e.ref << "." << e.field << "=" << to_string(e.value);
    out << "\n";
  }
  out << "threads:\n";
  std::vector<const ThreadTerm*> terms;
  for (const auto& tt : s.threads) terms.push_back(&tt);
  std::sort(terms.begin(), terms.end(),
            [](const ThreadTerm* a, const ThreadTerm* b) {
              return a->thread < b->thread;
            });
  for (const ThreadTerm* tt : terms) {
    out << "  r" << tt->thread << " on c" << tt->core << " ";
    out << (tt->startMarker ? "<start>" : tt->finished_shape() ? "<done>" : "<running>");
    out << "\n";
  }
  return out.str();
}

namespace {
inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  h *= 1099511628211ull;
  return h;
}
inline std::uint64_t mix_str(std::uint64_t h, const std::string& s) {
  for (char c : s) h = mix(h, static_cast<unsigned char>(c));
  return mix(h, 0x1fu);
}
inline std::uint64_t mix_val(std::uint64_t h, const Value& v) {
  h = mix(h, static_cast<std::uint64_t>(v.kind));
  return mix(h, v.bits);
}
}  // namespace

std::uint64_t state_hash(const MachineState& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [r, entry] : s.heap.entries) {
    h = mix(h, r);
    h = mix_str(h, entry.object.cls);
    for (const auto& [f, v] : entry.object.fields) {
      h = mix_str(h, f);
      h = mix_val(h, v);
    }
    h = mix(h, entry.object.lifecycle
                   ? 1 + static_cast<std::uint64_t>(*entry.object.lifecycle)
                   : 0);
    h = mix(h, entry.monitor.owner);
    h = mix(h, entry.monitor.count);
  }
  for (const auto& [key, owner] : s.heap.volatileLocks) {
    h = mix(h, key.first);
    h = mix_str(h, key.second);
    h = mix(h, owner);
  }
  for (const auto& [c, cache] : s.caches) {
    if (cache.entries.empty()) continue;
    h = mix(h, 0xCACEull);
    h = mix(h, c);
    for (const auto& [r, ce] : cache.entries) {
      h = mix(h, r);
      for (const auto& [f, v] : ce.fields) {
        h = mix_str(h, f);
        h = mix_val(h, v);
      }
    }
  }
  for (const auto& [c, buf] : s.buffers) {
    if (buf.empty()) continue;
    h = mix(h, 0xB0Full);
    h = mix(h, c);
    for (const auto& e : buf.entries) {
      h = mix(h, e.ref);
      h = mix_str(h, e.field);
      h = mix_val(h, e.value);
    }
  }
  // Threads sorted by object ref for stability.
  std::vector<const ThreadTerm*> terms;
  for (const auto& tt : s.threads) terms.push_back(&tt);
  std::sort(terms.begin(), terms.end(),
            [](const ThreadTerm* a, const ThreadTerm* b) {
              return a->thread < b->thread;
            });
  for (const ThreadTerm* tt : terms) {
    h = mix(h, tt->thread);
    h = mix(h, tt->core);
    h = mix(h, tt->startMarker ? 0x51ull : 0x52ull);
    if (tt->body) h = expr_hash(*tt->body, h);
  }
  return h;
}

std::string heap_fingerprint(const MachineState& s) {
  std::vector<std::string> triples;
  for (const auto& [r, entry] : s.heap.entries) {
    auto cn = s.canonName.find(r);
    std::string name = cn != s.canonName.end() ? cn->second
                                               : "r" + std::to_string(r);
    for (const auto& [f, v] : entry.object.fields) {
      std::string val;
      if (v.isRef() && v.asRef() != kNullRef) {
        auto vc = s.canonName.find(v.asRef());
        val = vc != s.canonName.end() ? "&" + vc->second
                                      : "r" + std::to_string(v.asRef());
      } else {
        val = to_string(v);
      }
      triples.push_back(name + "." + f + "=" + val);
    }
  }
  std::sort(triples.begin(), triples.end());
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : triples) {
    for (char c : t) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  for (int i = 15; i >= 0; --i) out << ((h >> (i * 4)) & 0xF);
  return out.str();
}

}  // namespace djc
