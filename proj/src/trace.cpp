#include "djc/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <tuple>

namespace djc {

namespace {

using njson = nlohmann::ordered_json;

njson action_to_json(const Action& a) {
  njson j;
  j["uid"] = a.uid;
  j["step"] = a.step;
  j["ord"] = a.ord;
  j["core"] = a.core;
  j["thread"] = a.thread;
  j["kind"] = kind_name(a.kind);
  j["target"] = target_to_string(a.target);
  if (a.value) j["value"] = to_string(*a.value);
  j["prologue"] = a.prologue;
  if (!a.cls.empty()) j["cls"] = a.cls;
  njson prov = njson::object();
  if (a.prov.W) prov["W"] = *a.prov.W;
  if (a.prov.Cs) prov["Cs"] = *a.prov.Cs;
  if (a.prov.Ab) prov["Ab"] = *a.prov.Ab;
  if (a.prov.Ai) prov["Ai"] = *a.prov.Ai;
  if (!a.prov.Bf.empty()) {
    njson bf = njson::object();
    for (const auto& [f, u] : a.prov.Bf) bf[f] = u;
    prov["Bf"] = bf;
  }
  j["prov"] = prov;
  return j;
}

Action action_from_json(const njson& j, std::size_t lineNo) {
  auto fail = [&](const std::string& what) -> void {
    throw TraceError("trace line " + std::to_string(lineNo) + ": " + what);
  };
  Action a;
  try {
    a.uid = j.at("uid").get<Uid>();
    a.step = j.at("step").get<std::uint64_t>();
    a.ord = j.at("ord").get<std::uint32_t>();
    a.core = j.at("core").get<CoreId>();
    a.thread = j.at("thread").get<RefId>();
    auto k = kind_from_name(j.at("kind").get<std::string>());
    if (!k) fail("unknown action kind");
    a.kind = *k;
    a.target = target_from_string(j.at("target").get<std::string>());
    if (j.contains("value")) {
      auto v = value_from_string(j.at("value").get<std::string>());
      if (!v) fail("unparseable value");
      a.value = *v;
    }
    a.prologue = j.value("prologue", false);
    a.cls = j.value("cls", std::string{});
    if (j.contains("prov")) {
      const auto& p = j.at("prov");
      if (p.contains("W")) a.prov.W = p.at("W").get<Uid>();
      if (p.contains("Cs")) a.prov.Cs = p.at("Cs").get<Uid>();
      if (p.contains("Ab")) a.prov.Ab = p.at("Ab").get<Uid>();
      if (p.contains("Ai")) a.prov.Ai = p.at("Ai").get<Uid>();
      if (p.contains("Bf"))
        for (const auto& [f, u] : p.at("Bf").items())
          a.prov.Bf[f] = u.get<Uid>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  return a;
}

}  // namespace

std::string target_to_string(const Target& t) { return t.render(); }

Target target_from_string(const std::string& s) {
  if (s.empty()) return Target::none();
  if (s[0] == 'c' && s.size() > 1 &&
      s.find_first_not_of("0123456789", 1) == std::string::npos)
    return Target::core_id(static_cast<CoreId>(std::stoul(s.substr(1))));
  if (s[0] != 'r') throw TraceError("bad action target '" + s + "'");
  std::size_t i = 1;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 1) throw TraceError("bad action target '" + s + "'");
  RefId r = static_cast<RefId>(std::stoul(s.substr(1, i - 1)));
  if (i == s.size()) return Target::object(r);
  if (s[i] != '.' || i + 1 == s.size())
    throw TraceError("bad action target '" + s + "'");
  return Target::variable(r, s.substr(i + 1));
}

void write_trace(std::ostream& os, const Trace& t) {
  njson header;
  header["program"] = t.program;
  os << header.dump() << "\n";
  for (const Action& a : t.actions) os << action_to_json(a).dump() << "\n";
}

Trace read_trace(std::istream& is) {
  Trace t;
  std::string line;
  std::size_t lineNo = 0;
  bool sawHeader = false;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    njson j;
    try {
      j = njson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw TraceError("trace line " + std::to_string(lineNo) +
                       ": not valid JSON: " + e.what());
    }
    if (!sawHeader) {
      if (!j.is_object() || !j.contains("program") ||
          !j.at("program").is_string())
        throw TraceError("trace line 1: expected {\"program\": ...} header");
      t.program = j.at("program").get<std::string>();
      sawHeader = true;
      continue;
    }
    t.actions.push_back(action_from_json(j, lineNo));
  }
  if (!sawHeader) throw TraceError("empty trace file");
  return t;
}

njson state_snapshot(const MachineState& s) {
  njson snap;

  njson heap = njson::object();
  for (const auto& [r, he] : s.heap.entries) {
    njson obj;
    obj["cls"] = he.object.cls;
    njson fields = njson::object();
    for (const auto& [f, v] : he.object.fields) fields[f] = to_string(v);
    obj["fields"] = fields;
    if (he.object.lifecycle)
      obj["lifecycle"] = lifecycle_name(*he.object.lifecycle);
    heap["r" + std::to_string(r)] = obj;
  }
  snap["heap"] = heap;

  njson locks = njson::object();
  for (const auto& [r, he] : s.heap.entries)
    if (!he.monitor.free()) {
      njson l;
      l["owner"] = he.monitor.owner;
      l["count"] = he.monitor.count;
      locks["r" + std::to_string(r)] = l;
    }
  snap["locks"] = locks;

  njson vlocks = njson::object();
  for (const auto& [key, owner] : s.heap.volatileLocks)
    if (owner != kNullRef)
      vlocks["r" + std::to_string(key.first) + "." + key.second] = owner;
  snap["vlocks"] = vlocks;

  njson caches = njson::object();
  for (const auto& [core, cache] : s.caches) {
    if (cache.entries.empty()) continue;
    njson percore = njson::object();
    for (const auto& [r, ce] : cache.entries) {
      njson fields = njson::object();
      for (const auto& [f, v] : ce.fields) fields[f] = to_string(v);
      percore["r" + std::to_string(r)] = fields;
    }
    caches["c" + std::to_string(core)] = percore;
  }
  snap["caches"] = caches;

  njson buffers = njson::object();
  for (const auto& [core, buf] : s.buffers) {
    if (buf.empty()) continue;
    njson list = njson::array();
    for (const auto& e : buf.entries) {
      njson ent;
      ent["var"] = "r" + std::to_string(e.ref) + "." + e.field;
      ent["value"] = to_string(e.value);
      list.push_back(ent);
    }
    buffers["c" + std::to_string(core)] = list;
  }
  snap["buffers"] = buffers;

  njson threads = njson::array();
  {
    std::vector<const ThreadTerm*> ts;
    for (const auto& tt : s.threads) ts.push_back(&tt);
    std::sort(ts.begin(), ts.end(), [](const ThreadTerm* a,
                                       const ThreadTerm* b) {
      return std::tie(a->thread, a->core) < std::tie(b->thread, b->core);
    });
    for (const ThreadTerm* tt : ts) {
      njson tj;
      tj["thread"] = tt->thread;
      tj["core"] = tt->core;
      threads.push_back(tj);
    }
  }
  snap["threads"] = threads;

  return snap;
}

void write_checkpoints(std::ostream& os, const std::vector<Checkpoint>& cps) {
  for (const Checkpoint& cp : cps) {
    njson j;
    j["step"] = cp.step;
    njson cores = njson::array();
    for (CoreId c : cp.cores) cores.push_back(c);
    j["cores"] = cores;
    j["post"] = cp.post;
    os << j.dump() << "\n";
  }
}

std::vector<Checkpoint> read_checkpoints(std::istream& is) {
  std::vector<Checkpoint> cps;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    njson j;
    try {
      j = njson::parse(line);
      Checkpoint cp;
      cp.step = j.at("step").get<std::int64_t>();
      if (j.contains("cores"))
        for (const auto& c : j.at("cores")) cp.cores.push_back(c.get<CoreId>());
      cp.post = j.at("post");
      cps.push_back(std::move(cp));
    } catch (const nlohmann::json::exception& e) {
      throw TraceError("checkpoint line " + std::to_string(lineNo) + ": " +
                       e.what());
    }
  }
  return cps;
}

namespace {

/// Position key: prologue block first (uid-ordered), then (step, ord).
std::tuple<int, std::uint64_t, std::uint64_t> pos_key(const Action& a) {
  if (a.prologue) return {0, a.uid, 0};
  return {1, a.step, a.ord};
}

std::pair<int, Uid> po_key(const Action& a) {
  return {a.prologue ? 0 : 1, a.uid};
}

}  // namespace

bool TraceOrders::po(const Trace& t, std::size_t i, std::size_t j) const {
  const Action& a = t.actions[i];
  const Action& b = t.actions[j];
  if (a.thread != b.thread) return false;
  return po_key(a) < po_key(b) || (po_key(a) == po_key(b) && i < j);
}

TraceOrders compute_orders(const Trace& t) {
  TraceOrders o;
  const auto& acts = t.actions;
  std::size_t n = acts.size();
  o.n = n;

  o.byPosition.resize(n);
  for (std::size_t i = 0; i < n; ++i) o.byPosition[i] = i;
  std::stable_sort(o.byPosition.begin(), o.byPosition.end(),
                   [&](std::size_t a, std::size_t b) {
                     auto ka = pos_key(acts[a]);
                     auto kb = pos_key(acts[b]);
                     if (ka != kb) return ka < kb;
                     return acts[a].uid < acts[b].uid;
                   });
  o.posRank.resize(n);
  for (std::size_t k = 0; k < n; ++k) o.posRank[o.byPosition[k]] = k;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t i = o.byPosition[k];
    std::size_t j = o.byPosition[k + 1];
    if (pos_key(acts[i]) == pos_key(acts[j])) o.syncTies.emplace_back(i, j);
  }

  for (std::size_t k = 0; k < n; ++k)
    if (acts[o.byPosition[k]].is_sync()) o.so.push_back(o.byPosition[k]);

  for (std::size_t i = 0; i < n; ++i)
    o.poThreads[acts[i].thread].push_back(i);
  for (auto& [tid, list] : o.poThreads)
    std::stable_sort(list.begin(), list.end(),
                     [&](std::size_t a, std::size_t b) {
                       return po_key(acts[a]) < po_key(acts[b]);
                     });

  for (std::size_t i = 0; i < n; ++i)
    if (!o.byUid.count(acts[i].uid)) o.byUid[acts[i].uid] = i;

  // --- synchronizes-with edges ---
  std::vector<std::size_t> inits, starts;
  for (std::size_t i = 0; i < n; ++i) {
    if (acts[i].kind == ActionKind::In) inits.push_back(i);
    if (acts[i].kind == ActionKind::S) starts.push_back(i);
  }
  for (std::size_t a : inits)
    for (std::size_t s : starts)
      if (o.posRank[a] < o.posRank[s]) o.sw.emplace_back(a, s);

  for (std::size_t i = 0; i < n; ++i) {
    const Action& a = acts[i];
    if (a.kind == ActionKind::Vr && a.prov.W) {
      auto it = o.byUid.find(*a.prov.W);
      if (it != o.byUid.end() && acts[it->second].kind == ActionKind::Vw &&
          acts[it->second].target.same_var(a.target) && it->second != i)
        o.sw.emplace_back(it->second, i);
    }
  }

  {
    std::map<RefId, std::vector<std::size_t>> monitorSeq;
    for (std::size_t k : o.so) {
      ActionKind kk = acts[k].kind;
      if (kk == ActionKind::L || kk == ActionKind::U)
        monitorSeq[acts[k].target.ref].push_back(k);
    }
    for (const auto& [m, seq] : monitorSeq) {
      for (std::size_t u = 0; u < seq.size(); ++u) {
        if (acts[seq[u]].kind != ActionKind::U) continue;
        for (std::size_t l = u + 1; l < seq.size(); ++l) {
          if (acts[seq[l]].kind == ActionKind::L) {
            o.sw.emplace_back(seq[u], seq[l]);
            break;
          }
        }
      }
    }
  }

  for (std::size_t s : starts) {
    RefId tid = acts[s].thread;
    for (std::size_t i = 0; i < n; ++i)
      if (acts[i].kind == ActionKind::Sp && acts[i].target.ref == tid)
        o.sw.emplace_back(i, s);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (acts[j].kind != ActionKind::J) continue;
    RefId tid = acts[j].target.ref;
    for (std::size_t i = 0; i < n; ++i)
      if (acts[i].kind == ActionKind::Fi && acts[i].thread == tid)
        o.sw.emplace_back(i, j);
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (acts[d].kind != ActionKind::Ird) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (acts[i].kind == ActionKind::Ir &&
          acts[i].target.ref == acts[d].target.ref &&
          o.posRank[i] < o.posRank[d])
        o.sw.emplace_back(i, d);
  }

  for (std::size_t f = 0; f < n; ++f) {
    if (acts[f].kind != ActionKind::F) continue;
    for (const auto& [field, buid] : acts[f].prov.Bf) {
      auto it = o.byUid.find(buid);
      if (it != o.byUid.end() && it->second != f)
        o.cacheEdges.emplace_back(it->second, f);
    }
  }

  // --- happens-before closure over po chains + sw ---
  std::vector<std::pair<std::size_t, std::size_t>> edges = o.sw;
  for (const auto& [tid, list] : o.poThreads)
    for (std::size_t k = 0; k + 1 < list.size(); ++k)
      edges.emplace_back(list[k], list[k + 1]);

  o.words = (n + 63) / 64;
  o.hbBits.assign(n * o.words, 0);
  auto orRow = [&](std::size_t dst, std::size_t src) -> bool {
    bool changed = false;
    std::uint64_t* d = &o.hbBits[dst * o.words];
    const std::uint64_t* s = &o.hbBits[src * o.words];
    for (std::size_t w = 0; w < o.words; ++w) {
      std::uint64_t nv = d[w] | s[w];
      if (nv != d[w]) {
        d[w] = nv;
        changed = true;
      }
    }
    return changed;
  };

  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [a, b] : edges)
    if (a != b) succ[a].push_back(b);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      std::size_t i = o.byPosition[k];
      for (std::size_t j : succ[i]) {
        std::uint64_t& word = o.hbBits[i * o.words + j / 64];
        std::uint64_t before = word;
        word |= (1ull << (j % 64));
        if (word != before) changed = true;
        if (orRow(i, j)) changed = true;
      }
    }
  }

  return o;
}

}  // namespace djc
