#include "djc/wf.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "djc/local_step.hpp"
#include "djc/parser.hpp"
#include "djc/subst.hpp"

namespace djc {

std::string violation_line(const WfViolation& v) {
  nlohmann::ordered_json j;
  j["rule"] = v.rule;
  nlohmann::ordered_json us = nlohmann::ordered_json::array();
  for (Uid u : v.uids) us.push_back(u);
  j["uids"] = us;
  j["msg"] = v.msg;
  return j.dump();
}

namespace {

using njson = nlohmann::ordered_json;

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

/// Placeholder references handed out while replaying a thread against its
/// actions; bound lazily to the concrete references the actions mention.
constexpr RefId kSymBase = 1u << 30;

using VarKey = std::pair<RefId, std::string>;

VarKey var_of(const Target& t) { return {t.ref, t.field}; }

Value default_of(const TypeTag& ty) {
  switch (ty.kind) {
    case TypeTag::Kind::Unit:
      return Value::unit();
    case TypeTag::Kind::Bool:
      return Value::boolean(false);
    case TypeTag::Kind::Nat:
      return Value::nat(0);
    case TypeTag::Kind::Class:
      return Value::ref(kNullRef);
  }
  return Value::unit();
}

std::string uid_str(Uid u) { return std::to_string(u); }

struct Ctx {
  const Trace& t;
  const WfOptions& opts;
  TraceOrders ord;
  Program prog;
  std::map<RefId, std::string> refClass;  // from In and S actions
  std::map<VarKey, std::vector<std::size_t>> varWrites;  // In/W/Vw indices
  std::map<Uid, std::vector<std::size_t>> bByAb;  // write-backs keyed by Ab
  std::vector<std::size_t> byTime;    // indices sorted by (step, ord, uid)
  std::vector<WfViolation> out;

  Ctx(const Trace& trace, const WfOptions& o) : t(trace), opts(o) {
    ord = compute_orders(t);
    try {
      prog = parse_program(t.program);
    } catch (const ParseError& e) {
      throw TraceError(std::string("embedded program: ") + e.what());
    }
    for (std::size_t i = 0; i < n(); ++i) {
      const Action& a = act(i);
      if ((a.kind == ActionKind::In || a.kind == ActionKind::S) &&
          !a.cls.empty())
        refClass.emplace(a.target.ref, a.cls);
      if (is_write_kind(a.kind) && a.target.is_var())
        varWrites[var_of(a.target)].push_back(i);
      if (a.kind == ActionKind::B && a.prov.Ab)
        bByAb[*a.prov.Ab].push_back(i);
    }
    byTime.resize(n());
    for (std::size_t i = 0; i < n(); ++i) byTime[i] = i;
    std::sort(byTime.begin(), byTime.end(), [&](std::size_t x, std::size_t y) {
      const Action& a = act(x);
      const Action& b = act(y);
      return std::tie(a.step, a.ord, a.uid) < std::tie(b.step, b.ord, b.uid);
    });
  }

  std::size_t n() const { return t.actions.size(); }
  const Action& act(std::size_t i) const { return t.actions[i]; }
  std::size_t rank(std::size_t i) const { return ord.posRank[i]; }

  std::size_t idx(Uid u) const {
    auto it = ord.byUid.find(u);
    return it == ord.byUid.end() ? kNpos : it->second;
  }

  bool on(const char* rule) const {
    return opts.only.empty() || opts.only.count(rule) > 0;
  }

  void emit(const char* rule, std::vector<Uid> uids, std::string msg) {
    out.push_back({rule, std::move(uids), std::move(msg)});
  }

  std::optional<bool> volatility(RefId r, const std::string& f) const {
    auto rc = refClass.find(r);
    if (rc == refClass.end()) return std::nullopt;
    const ClassDef* cd = prog.find_class(rc->second);
    if (!cd) return std::nullopt;
    const FieldDecl* fd = cd->find_field(f);
    if (!fd) return std::nullopt;
    return fd->isVolatile;
  }
};

// ---------------------------------------------------------------------------
// WF-1: every read records the write it sees, on the same variable, with
// the same value.
void rule_wf1(Ctx& cx) {
  if (!cx.on("WF-1")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (!is_read_kind(a.kind)) continue;
    if (!a.prov.W) {
      cx.emit("WF-1", {a.uid}, "read records no seen write");
      continue;
    }
    std::size_t wi = cx.idx(*a.prov.W);
    if (wi == kNpos) {
      cx.emit("WF-1", {a.uid}, "read references an unknown write " +
                                   uid_str(*a.prov.W));
      continue;
    }
    const Action& w = cx.act(wi);
    if (!is_write_kind(w.kind)) {
      cx.emit("WF-1", {a.uid, w.uid}, "seen action is not a write");
      continue;
    }
    if (!w.target.same_var(a.target)) {
      cx.emit("WF-1", {a.uid, w.uid},
              "seen write targets a different variable");
      continue;
    }
    if (!a.value || !w.value || !(*a.value == *w.value))
      cx.emit("WF-1", {a.uid, w.uid},
              "read value differs from the write it sees");
  }
}

// WF-2: reads/writes use the volatile action kinds exactly on volatile
// variables.
void rule_wf2(Ctx& cx) {
  if (!cx.on("WF-2")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    bool volKind = a.kind == ActionKind::Vr || a.kind == ActionKind::Vw;
    bool plainKind = a.kind == ActionKind::R || a.kind == ActionKind::W;
    if (!volKind && !plainKind) continue;
    if (!a.target.is_var()) {
      cx.emit("WF-2", {a.uid}, "memory access targets no variable");
      continue;
    }
    auto vol = cx.volatility(a.target.ref, a.target.field);
    if (!vol) {
      cx.emit("WF-2", {a.uid},
              "cannot resolve whether the accessed field is volatile");
      continue;
    }
    if (*vol != volKind)
      cx.emit("WF-2", {a.uid},
              *vol ? "plain access targets a volatile variable"
                   : "volatile access targets a plain variable");
  }
}

// WF-3: no two synchronization actions share a position (optionally also
// counting fetches and write-backs as synchronized).
void rule_wf3(Ctx& cx) {
  if (!cx.on("WF-3")) return;
  auto syncish = [&](const Action& a) {
    if (a.is_sync()) return true;
    return cx.opts.saCacheOps &&
           (a.kind == ActionKind::F || a.kind == ActionKind::B);
  };
  for (const auto& [i, j] : cx.ord.syncTies) {
    const Action& a = cx.act(i);
    const Action& b = cx.act(j);
    if (syncish(a) && syncish(b))
      cx.emit("WF-3", {a.uid, b.uid},
              "synchronization actions share one position");
  }
}

// WF-4: each thread's synchronization actions appear in program order.
void rule_wf4(Ctx& cx) {
  if (!cx.on("WF-4")) return;
  for (const auto& [tid, list] : cx.ord.poThreads) {
    std::size_t prev = kNpos;
    for (std::size_t i : list) {
      if (!cx.act(i).is_sync()) continue;
      if (prev != kNpos && cx.rank(prev) >= cx.rank(i))
        cx.emit("WF-4", {cx.act(prev).uid, cx.act(i).uid},
                "thread's synchronization actions are out of program order");
      prev = i;
    }
  }
}

// WF-5: lock/unlock pairs on one monitor never overlap across threads.
void rule_wf5(Ctx& cx) {
  if (!cx.on("WF-5")) return;
  struct MonSt {
    RefId owner = kNullRef;
    int count = 0;
    Uid lastL = 0;
  };
  std::map<RefId, MonSt> mons;
  for (std::size_t i : cx.ord.so) {
    const Action& a = cx.act(i);
    if (a.kind == ActionKind::L) {
      MonSt& m = mons[a.target.ref];
      if (m.count > 0 && m.owner != a.thread) {
        cx.emit("WF-5", {m.lastL, a.uid},
                "monitor locked while held by another thread");
      } else {
        m.owner = a.thread;
        m.count += 1;
        m.lastL = a.uid;
      }
    } else if (a.kind == ActionKind::U) {
      MonSt& m = mons[a.target.ref];
      if (m.count == 0 || m.owner != a.thread) {
        cx.emit("WF-5", {a.uid}, "unlock without a matching lock");
      } else if (--m.count == 0) {
        m.owner = kNullRef;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// WF-6: each thread's action sequence replays against the program.

class ThreadReplayer {
 public:
  ThreadReplayer(Ctx& cx, RefId tid) : cx_(cx), tid_(tid) {
    for (std::size_t i = 0; i < cx.n(); ++i) {
      const Action& a = cx.act(i);
      if (a.thread != tid) continue;
      switch (a.kind) {
        case ActionKind::F:
        case ActionKind::B:
        case ActionKind::I:
        case ActionKind::M:
          continue;  // cache maintenance and migration are implicit
        default:
          acts_.push_back(i);
      }
    }
    std::sort(acts_.begin(), acts_.end(), [&](std::size_t x, std::size_t y) {
      return cx_.act(x).uid < cx_.act(y).uid;
    });
  }

  void run() {
    if (acts_.empty()) return;
    const Action& s = cx_.act(acts_[0]);
    if (s.kind != ActionKind::S) {
      violate({s.uid}, "first action is not a thread start");
      return;
    }
    if (s.target.kind != Target::Kind::Ref || s.target.ref != tid_) {
      violate({s.uid}, "start action does not target its own thread");
      return;
    }
    const ClassDef* cd = cx_.prog.find_class(s.cls);
    if (!cd || !cd->declares_run()) {
      violate({s.uid}, "start action's class does not declare run()");
      return;
    }
    pos_ = 1;
    ExprPtr term = ecall(lit(Value::ref(tid_)), "run", {});
    long budget = 200000 + 50 * static_cast<long>(acts_.size());

    while (!stopped_) {
      if (--budget < 0) {
        violate({}, "replay exceeded its reduction budget");
        return;
      }
      Redex rx = find_redex(term);
      const Expr& e = *rx.node;
      switch (e.kind) {
        case Expr::Kind::Lit:
          handle_terminal(e);
          return;
        case Expr::Kind::Var:
          stuck("unbound variable '" + e.name + "'");
          return;
        case Expr::Kind::If: {
          if (e.a->kind != Expr::Kind::Lit || !e.a->val.isBool()) {
            stuck("non-boolean condition");
            return;
          }
          term = rx.rebuild(e.a->val.asBool() ? e.b : e.c);
          break;
        }
        case Expr::Kind::Let: {
          std::map<std::string, Value> m{{e.name, e.a->val}};
          term = rx.rebuild(substitute(e.b, m));
          break;
        }
        case Expr::Kind::New:
          if (!step_new(e, rx, term)) return;
          break;
        case Expr::Kind::Get:
          if (!step_get(e, rx, term)) return;
          break;
        case Expr::Kind::Set:
          if (!step_set(e, rx, term)) return;
          break;
        case Expr::Kind::Call:
          if (!step_call(e, rx, term)) return;
          break;
        case Expr::Kind::MonEnter:
          if (!step_mon(e, rx, term, ActionKind::L)) return;
          break;
        case Expr::Kind::MonExit:
          if (!step_mon(e, rx, term, ActionKind::U)) return;
          break;
      }
    }
  }

 private:
  Ctx& cx_;
  RefId tid_;
  std::vector<std::size_t> acts_;
  std::size_t pos_ = 0;
  RefId nextSym_ = kSymBase;
  std::map<RefId, RefId> symBind_;
  std::map<RefId, std::string> symCls_;
  bool stopped_ = false;

  bool exhausted() const { return pos_ >= acts_.size(); }
  const Action& cur() const { return cx_.act(acts_[pos_]); }

  void violate(std::vector<Uid> uids, const std::string& msg) {
    cx_.emit("WF-6", std::move(uids),
             "thread r" + std::to_string(tid_) + ": " + msg);
    stopped_ = true;
  }

  /// The term cannot step further; acceptable only with no actions left.
  void stuck(const std::string& why) {
    if (!exhausted())
      violate({cur().uid},
              "actions remain after the term became stuck (" + why + ")");
    stopped_ = true;
  }

  /// Next action to consume, or nullptr when the trace prefix ends here
  /// (which is acceptable; replay simply stops).
  const Action* take() {
    if (exhausted()) {
      stopped_ = true;
      return nullptr;
    }
    return &cur();
  }

  RefId resolve_ref(RefId r) const {
    if (r >= kSymBase) {
      auto it = symBind_.find(r);
      if (it != symBind_.end()) return it->second;
    }
    return r;
  }

  /// Does `actual` agree with `expect` without forcing a binding?
  bool ref_matches(RefId expect, RefId actual) const {
    if (expect >= kSymBase) {
      auto it = symBind_.find(expect);
      return it == symBind_.end() || it->second == actual;
    }
    return expect == actual;
  }

  bool match_ref(RefId expect, RefId actual, Uid auid, const char* what) {
    if (expect >= kSymBase) {
      auto it = symBind_.find(expect);
      if (it == symBind_.end()) {
        symBind_[expect] = actual;
        return true;
      }
      if (it->second == actual) return true;
    } else if (expect == actual) {
      return true;
    }
    violate({auid}, std::string(what) + " targets an unexpected object");
    return false;
  }

  const std::string* class_of(RefId r) const {
    if (r >= kSymBase) {
      auto it = symCls_.find(r);
      return it == symCls_.end() ? nullptr : &it->second;
    }
    auto it = cx_.refClass.find(r);
    return it == cx_.refClass.end() ? nullptr : &it->second;
  }

  void handle_terminal(const Expr& e) {
    if (!e.val.isUnit()) {
      stuck("body reduced to a non-unit value");
      return;
    }
    if (exhausted()) return;  // prefix of an unfinished run
    const Action& a = cur();
    if (a.kind == ActionKind::Fi && a.target.ref == tid_) {
      ++pos_;
      if (!exhausted())
        violate({cur().uid}, "actions recorded after the thread finished");
      return;
    }
    violate({a.uid}, "expected the thread's finish action");
  }

  bool step_new(const Expr& e, const Redex& rx, ExprPtr& term) {
    const ClassDef* cd = cx_.prog.find_class(e.name);
    if (!cd || cd->fields.size() != e.args.size()) {
      stuck("constructor unavailable for '" + e.name + "'");
      return false;
    }
    RefId sym = nextSym_++;
    symCls_[sym] = cd->name;
    bool bound = false;
    for (const FieldDecl& fd : cd->fields) {
      const Action* a = take();
      if (!a) return false;
      if (a->kind != ActionKind::In) {
        violate({a->uid}, "expected an initialization action for new '" +
                              cd->name + "'");
        return false;
      }
      if (!a->prologue) {
        violate({a->uid}, "initialization action not marked as prologue");
        return false;
      }
      if (a->cls != cd->name) {
        violate({a->uid}, "initialization action names the wrong class");
        return false;
      }
      if (!a->target.is_var() || a->target.field != fd.name) {
        violate({a->uid},
                "initialization does not follow field declaration order");
        return false;
      }
      Value def = default_of(fd.type);
      if (!a->value || !(*a->value == def)) {
        violate({a->uid}, "initialization value is not the field's default");
        return false;
      }
      if (!bound) {
        symBind_[sym] = a->target.ref;
        bound = true;
      } else if (symBind_[sym] != a->target.ref) {
        violate({a->uid}, "initialization actions target different objects");
        return false;
      }
      ++pos_;
    }
    ExprPtr cont;
    if (cd->init) {
      std::map<std::string, Value> m;
      for (std::size_t i = 0; i < cd->fields.size(); ++i)
        m[cd->fields[i].name] = e.args[i]->val;
      m["this"] = Value::ref(sym);
      cont = substitute(cd->init, m);
    } else {
      cont = unitE();
    }
    term = rx.rebuild(
        elet("_", TypeTag::unitT(), cont, lit(Value::ref(sym))));
    return true;
  }

  bool step_get(const Expr& e, const Redex& rx, ExprPtr& term) {
    Value recv = e.a->val;
    if (!recv.isRef() || resolve_ref(recv.asRef()) == kNullRef) {
      stuck("field read on a non-object");
      return false;
    }
    const Action* a = take();
    if (!a) return false;
    if ((a->kind != ActionKind::R && a->kind != ActionKind::Vr) ||
        !a->target.is_var() || a->target.field != e.name) {
      violate({a->uid}, "expected a read of field '" + e.name + "'");
      return false;
    }
    if (!match_ref(recv.asRef(), a->target.ref, a->uid, "field read"))
      return false;
    if (!a->value) {
      violate({a->uid}, "read carries no value");
      return false;
    }
    ++pos_;
    term = rx.rebuild(lit(*a->value));
    return true;
  }

  bool step_set(const Expr& e, const Redex& rx, ExprPtr& term) {
    Value recv = e.a->val;
    Value rhs = e.b->val;
    if (!recv.isRef() || resolve_ref(recv.asRef()) == kNullRef) {
      stuck("field write on a non-object");
      return false;
    }
    const Action* a = take();
    if (!a) return false;
    if ((a->kind != ActionKind::W && a->kind != ActionKind::Vw) ||
        !a->target.is_var() || a->target.field != e.name) {
      violate({a->uid}, "expected a write of field '" + e.name + "'");
      return false;
    }
    if (!match_ref(recv.asRef(), a->target.ref, a->uid, "field write"))
      return false;
    if (!a->value) {
      violate({a->uid}, "write carries no value");
      return false;
    }
    if (rhs.isRef() && rhs.asRef() >= kSymBase) {
      auto it = symBind_.find(rhs.asRef());
      if (it == symBind_.end()) {
        if (!a->value->isRef()) {
          violate({a->uid}, "written value is not an object reference");
          return false;
        }
        symBind_[rhs.asRef()] = a->value->asRef();
      } else if (!(Value::ref(it->second) == *a->value)) {
        violate({a->uid}, "written value differs from the assigned value");
        return false;
      }
    } else if (!(rhs == *a->value)) {
      violate({a->uid}, "written value differs from the assigned value");
      return false;
    }
    ++pos_;
    term = rx.rebuild(lit(*a->value));
    return true;
  }

  bool step_call(const Expr& e, const Redex& rx, ExprPtr& term) {
    Value recv = e.a->val;
    if (recv.isNat()) {
      if (e.name == "succ" && e.args.empty()) {
        term = rx.rebuild(lit(Value::nat(recv.asNat() + 1)));
        return true;
      }
      if (e.name == "pred" && e.args.empty()) {
        std::uint64_t v = recv.asNat();
        term = rx.rebuild(lit(Value::nat(v == 0 ? 0 : v - 1)));
        return true;
      }
      if (e.name == "eq" && e.args.size() == 1 &&
          e.args[0]->kind == Expr::Kind::Lit && e.args[0]->val.isNat()) {
        term = rx.rebuild(
            lit(Value::boolean(recv.asNat() == e.args[0]->val.asNat())));
        return true;
      }
      stuck("no builtin '" + e.name + "' on naturals");
      return false;
    }
    if (!recv.isRef() || resolve_ref(recv.asRef()) == kNullRef) {
      stuck("method call on a non-object");
      return false;
    }
    const std::string* cls = class_of(recv.asRef());
    if (!cls) {
      // The receiver's class never surfaced in the trace; nothing further
      // can be verified for this thread.
      stopped_ = true;
      return false;
    }
    const ClassDef* cd = cx_.prog.find_class(*cls);
    if (!cd) {
      stuck("receiver class '" + *cls + "' not in the program");
      return false;
    }
    if (const MethodDef* md = cd->find_method(e.name)) {
      if (md->params.size() != e.args.size()) {
        stuck("call arity mismatch for '" + e.name + "'");
        return false;
      }
      std::map<std::string, Value> m;
      for (std::size_t i = 0; i < md->params.size(); ++i)
        m[md->params[i].first] = e.args[i]->val;
      m["this"] = recv;
      term = rx.rebuild(substitute(md->body, m));
      return true;
    }
    bool intrinsic =
        e.args.empty() && (e.name == "start" || e.name == "join" ||
                           e.name == "interrupt" || e.name == "interrupted");
    if (!intrinsic || !cd->declares_run()) {
      stuck("no such method '" + e.name + "'");
      return false;
    }
    if (e.name == "interrupted") {
      if (!exhausted()) {
        const Action& a = cur();
        if (a.kind == ActionKind::Ird &&
            a.target.kind == Target::Kind::Ref &&
            ref_matches(recv.asRef(), a.target.ref)) {
          if (!match_ref(recv.asRef(), a.target.ref, a.uid,
                         "interrupt detection"))
            return false;
          ++pos_;
        }
      }
      term = rx.rebuild(unitE());
      return true;
    }
    ActionKind want = e.name == "start"  ? ActionKind::Sp
                      : e.name == "join" ? ActionKind::J
                                         : ActionKind::Ir;
    const Action* a = take();
    if (!a) return false;
    if (a->kind != want || a->target.kind != Target::Kind::Ref) {
      violate({a->uid}, "expected the action of '" + e.name + "'");
      return false;
    }
    if (!match_ref(recv.asRef(), a->target.ref, a->uid, "thread intrinsic"))
      return false;
    ++pos_;
    term = rx.rebuild(unitE());
    return true;
  }

  bool step_mon(const Expr& e, const Redex& rx, ExprPtr& term,
                ActionKind want) {
    Value recv = e.a->val;
    if (!recv.isRef() || resolve_ref(recv.asRef()) == kNullRef) {
      stuck("monitor operation on a non-object");
      return false;
    }
    const Action* a = take();
    if (!a) return false;
    if (a->kind != want || a->target.kind != Target::Kind::Ref) {
      violate({a->uid}, want == ActionKind::L ? "expected a lock action"
                                              : "expected an unlock action");
      return false;
    }
    if (!match_ref(recv.asRef(), a->target.ref, a->uid, "monitor operation"))
      return false;
    ++pos_;
    term = rx.rebuild(unitE());
    return true;
  }
};

void rule_wf6(Ctx& cx) {
  if (!cx.on("WF-6")) return;
  std::set<RefId> tids;
  for (std::size_t i = 0; i < cx.n(); ++i) tids.insert(cx.act(i).thread);
  for (RefId tid : tids) {
    ThreadReplayer rp(cx, tid);
    rp.run();
  }
}

// ---------------------------------------------------------------------------
// WF-7: every volatile read sees the latest volatile write (or the
// initialization) in synchronization order.
void rule_wf7(Ctx& cx) {
  if (!cx.on("WF-7")) return;
  std::map<VarKey, Uid> lastVw;
  std::map<VarKey, Uid> inUid;
  for (std::size_t i : cx.ord.so) {
    const Action& a = cx.act(i);
    if (a.kind == ActionKind::In && a.target.is_var()) {
      inUid.try_emplace(var_of(a.target), a.uid);
    } else if (a.kind == ActionKind::Vw && a.target.is_var()) {
      lastVw[var_of(a.target)] = a.uid;
    } else if (a.kind == ActionKind::Vr && a.target.is_var()) {
      if (!a.prov.W) continue;  // WF-1 reports the missing pointer
      std::optional<Uid> expected;
      auto vw = lastVw.find(var_of(a.target));
      if (vw != lastVw.end()) {
        expected = vw->second;
      } else {
        auto in = inUid.find(var_of(a.target));
        if (in != inUid.end()) expected = in->second;
      }
      if (!expected) {
        cx.emit("WF-7", {a.uid},
                "volatile read precedes any write or initialization of its "
                "variable");
      } else if (*a.prov.W != *expected) {
        cx.emit("WF-7", {a.uid, *a.prov.W, *expected},
                "volatile read does not see the latest volatile write in "
                "synchronization order");
      }
    }
  }
}

// WF-8: no plain read happens-before the write it sees, and no other write
// to the variable is interposed between them in happens-before.
void rule_wf8(Ctx& cx) {
  if (!cx.on("WF-8")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::R || !a.prov.W) continue;
    std::size_t wi = cx.idx(*a.prov.W);
    if (wi == kNpos) continue;  // WF-1 reports dangling pointers
    const Action& w = cx.act(wi);
    if (!is_write_kind(w.kind) || !w.target.same_var(a.target)) continue;
    if (cx.ord.happens_before(i, wi)) {
      cx.emit("WF-8", {a.uid, w.uid},
              "read happens-before the write it sees");
      continue;
    }
    auto vw = cx.varWrites.find(var_of(a.target));
    if (vw == cx.varWrites.end()) continue;
    for (std::size_t w2 : vw->second) {
      if (w2 == wi || w2 == i) continue;
      ActionKind k2 = cx.act(w2).kind;
      if (k2 != ActionKind::In && k2 != ActionKind::W) continue;
      if (cx.ord.happens_before(wi, w2) && cx.ord.happens_before(w2, i)) {
        cx.emit("WF-8", {a.uid, w.uid, cx.act(w2).uid},
                "a newer write is interposed in happens-before between the "
                "read and the write it sees");
        break;
      }
    }
  }
}

// WF-9: per thread, the start action precedes every other non-prologue
// action.
void rule_wf9(Ctx& cx) {
  if (!cx.on("WF-9")) return;
  std::map<RefId, Uid> sUid;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::S) continue;
    auto it = sUid.find(a.thread);
    if (it == sUid.end() || a.uid < it->second) sUid[a.thread] = a.uid;
  }
  for (const auto& [tid, list] : cx.ord.poThreads) {
    std::size_t firstReal = kNpos;
    for (std::size_t i : list)
      if (!cx.act(i).prologue) {
        firstReal = i;
        break;
      }
    if (firstReal == kNpos) continue;
    auto it = sUid.find(tid);
    if (it == sUid.end()) {
      cx.emit("WF-9", {cx.act(firstReal).uid},
              "thread has actions but no start action");
      continue;
    }
    for (std::size_t i : list) {
      const Action& a = cx.act(i);
      if (a.prologue) continue;
      if (a.uid < it->second)
        cx.emit("WF-9", {a.uid, it->second},
                "action precedes its thread's start action");
    }
  }
}

// WF-10: every plain read names the caching action that made its value
// locally readable: an earlier same-core write or fetch.
void rule_wf10(Ctx& cx) {
  if (!cx.on("WF-10")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::R) continue;
    if (!a.prov.Cs) {
      cx.emit("WF-10", {a.uid}, "read records no caching source");
      continue;
    }
    std::size_t ci = cx.idx(*a.prov.Cs);
    if (ci == kNpos) {
      cx.emit("WF-10", {a.uid}, "read references an unknown caching action " +
                                    uid_str(*a.prov.Cs));
      continue;
    }
    const Action& c = cx.act(ci);
    if (c.kind == ActionKind::W) {
      if (!c.target.same_var(a.target)) {
        cx.emit("WF-10", {a.uid, c.uid},
                "caching write targets a different variable");
        continue;
      }
    } else if (c.kind == ActionKind::F) {
      if (c.target.kind != Target::Kind::Ref ||
          c.target.ref != a.target.ref) {
        cx.emit("WF-10", {a.uid, c.uid},
                "caching fetch covers a different object");
        continue;
      }
    } else {
      cx.emit("WF-10", {a.uid, c.uid},
              "caching source is neither a write nor a fetch");
      continue;
    }
    if (c.core != a.core) {
      cx.emit("WF-10", {a.uid, c.uid}, "caching source on a different core");
      continue;
    }
    if (!(cx.rank(ci) < cx.rank(i)))
      cx.emit("WF-10", {a.uid, c.uid},
              "caching source does not precede the read");
  }
}

// WF-11: the caching source is still the freshest local view at the read:
// no intervening local write, invalidation, or refetch supersedes it.
void rule_wf11(Ctx& cx) {
  if (!cx.on("WF-11")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::R || !a.prov.Cs) continue;
    std::size_t ci = cx.idx(*a.prov.Cs);
    if (ci == kNpos) continue;  // WF-10 reports dangling pointers
    const Action& c = cx.act(ci);
    if (c.kind != ActionKind::W && c.kind != ActionKind::F) continue;
    if (!(cx.rank(ci) < cx.rank(i))) continue;
    std::size_t ri = cx.rank(i);
    std::size_t rc = cx.rank(ci);

    // A buffered write becomes a cache entry at its write-back.
    std::size_t transfer = kNpos;
    if (c.kind == ActionKind::W) {
      auto bs = cx.bByAb.find(c.uid);
      if (bs != cx.bByAb.end())
        for (std::size_t bi : bs->second) {
          std::size_t rb = cx.rank(bi);
          if (rc < rb && rb < ri &&
              (transfer == kNpos || rb < cx.rank(transfer)))
            transfer = bi;
        }
    }
    bool bufferSourced = c.kind == ActionKind::W && transfer == kNpos;

    if (bufferSourced) {
      for (std::size_t j = 0; j < cx.n(); ++j) {
        const Action& x = cx.act(j);
        if (x.kind != ActionKind::W || x.core != a.core) continue;
        if (!x.target.same_var(a.target)) continue;
        std::size_t rj = cx.rank(j);
        if (rc < rj && rj < ri) {
          cx.emit("WF-11", {a.uid, x.uid},
                  "read from the write buffer misses a newer buffered write");
          break;
        }
      }
    } else {
      std::size_t cachedAt = c.kind == ActionKind::F ? rc : cx.rank(transfer);
      for (std::size_t j = 0; j < cx.n(); ++j) {
        const Action& x = cx.act(j);
        if (x.core != a.core) continue;
        std::size_t rj = cx.rank(j);
        if (!(cachedAt < rj && rj < ri)) continue;
        if ((x.kind == ActionKind::I || x.kind == ActionKind::F) &&
            x.target.kind == Target::Kind::Ref &&
            x.target.ref == a.target.ref) {
          cx.emit("WF-11", {a.uid, x.uid},
                  "read served from a cache entry despite a later "
                  "invalidation or refetch");
          break;
        }
        if (x.kind == ActionKind::W && x.target.same_var(a.target)) {
          cx.emit("WF-11", {a.uid, x.uid},
                  "read served from the cache despite a newer buffered "
                  "write");
          break;
        }
      }
    }
  }
}

// WF-12: every fetch names, per field, the write-back it carried.
void rule_wf12(Ctx& cx) {
  if (!cx.on("WF-12")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::F) continue;
    if (a.prov.Bf.empty()) {
      cx.emit("WF-12", {a.uid},
              "fetch carries no per-field write-back provenance");
      continue;
    }
    for (const auto& [f, buid] : a.prov.Bf) {
      std::size_t bi = cx.idx(buid);
      if (bi == kNpos) {
        cx.emit("WF-12", {a.uid},
                "fetch references an unknown write-back " + uid_str(buid));
        continue;
      }
      const Action& b = cx.act(bi);
      if (b.kind != ActionKind::B) {
        cx.emit("WF-12", {a.uid, b.uid},
                "fetch provenance entry is not a write-back");
      } else if (!b.target.is_var() || b.target.ref != a.target.ref ||
                 b.target.field != f) {
        cx.emit("WF-12", {a.uid, b.uid},
                "fetch provenance entry targets a different variable");
      }
    }
  }
}

// WF-13: every write-back names the same-variable, same-core write (or
// initialization) it flushes, and follows it.
void rule_wf13(Ctx& cx) {
  if (!cx.on("WF-13")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::B) continue;
    if (!a.prov.Ab) {
      cx.emit("WF-13", {a.uid}, "write-back records no written action");
      continue;
    }
    std::size_t wi = cx.idx(*a.prov.Ab);
    if (wi == kNpos) {
      cx.emit("WF-13", {a.uid}, "write-back references an unknown action " +
                                    uid_str(*a.prov.Ab));
      continue;
    }
    const Action& w = cx.act(wi);
    if (w.kind != ActionKind::In && w.kind != ActionKind::W) {
      cx.emit("WF-13", {a.uid, w.uid},
              "write-back flushes neither a write nor an initialization");
      continue;
    }
    if (!w.target.same_var(a.target)) {
      cx.emit("WF-13", {a.uid, w.uid},
              "write-back targets a different variable than its write");
      continue;
    }
    if (w.core != a.core) {
      cx.emit("WF-13", {a.uid, w.uid},
              "write-back on a different core than its write");
      continue;
    }
    if (!(cx.rank(wi) < cx.rank(i)))
      cx.emit("WF-13", {a.uid, w.uid},
              "write-back does not follow the write it flushes");
  }
}

// WF-14: a write-back flushes the newest same-core write to its variable.
void rule_wf14(Ctx& cx) {
  if (!cx.on("WF-14")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::B || !a.prov.Ab) continue;
    std::size_t wi = cx.idx(*a.prov.Ab);
    if (wi == kNpos) continue;
    const Action& w = cx.act(wi);
    if (w.kind != ActionKind::In && w.kind != ActionKind::W) continue;
    for (std::size_t j = 0; j < cx.n(); ++j) {
      const Action& x = cx.act(j);
      if (x.kind != ActionKind::W || x.core != a.core) continue;
      if (!x.target.same_var(a.target)) continue;
      if (cx.rank(wi) < cx.rank(j) && cx.rank(j) < cx.rank(i)) {
        cx.emit("WF-14", {a.uid, x.uid},
                "write-back skips a newer write on its core");
        break;
      }
    }
  }
}

// WF-15: every invalidation names the caching action that filled the
// entry, and no two invalidations share one.
void rule_wf15(Ctx& cx) {
  if (!cx.on("WF-15")) return;
  std::map<Uid, std::vector<Uid>> byAi;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::I) continue;
    if (!a.prov.Ai) {
      cx.emit("WF-15", {a.uid}, "invalidation records no caching action");
      continue;
    }
    byAi[*a.prov.Ai].push_back(a.uid);
    std::size_t ci = cx.idx(*a.prov.Ai);
    if (ci == kNpos) {
      cx.emit("WF-15", {a.uid},
              "invalidation references an unknown action " +
                  uid_str(*a.prov.Ai));
      continue;
    }
    const Action& c = cx.act(ci);
    if (c.kind != ActionKind::B && c.kind != ActionKind::F) {
      cx.emit("WF-15", {a.uid, c.uid},
              "invalidation's caching action is neither a write-back nor a "
              "fetch");
      continue;
    }
    if (c.core != a.core) {
      cx.emit("WF-15", {a.uid, c.uid},
              "invalidation's caching action on a different core");
      continue;
    }
    if (c.target.ref != a.target.ref) {
      cx.emit("WF-15", {a.uid, c.uid},
              "invalidation's caching action covers a different object");
      continue;
    }
    if (!(cx.rank(ci) < cx.rank(i)))
      cx.emit("WF-15", {a.uid, c.uid},
              "invalidation does not follow its caching action");
  }
  for (const auto& [u, v] : byAi)
    if (v.size() > 1)
      cx.emit("WF-15", {v[0], v[1]},
              "two invalidations share one caching action");
}

// WF-16: a read seeing a cross-core write is justified by a write-back of
// that write and a fetch on the reader's core carrying it, still fresh.
void rule_wf16(Ctx& cx) {
  if (!cx.on("WF-16")) return;
  std::vector<std::size_t> fetches;
  std::vector<std::size_t> writeBacks;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    if (cx.act(i).kind == ActionKind::F) fetches.push_back(i);
    if (cx.act(i).kind == ActionKind::B) writeBacks.push_back(i);
  }
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::R || !a.prov.W) continue;
    std::size_t wi = cx.idx(*a.prov.W);
    if (wi == kNpos) continue;
    const Action& w = cx.act(wi);
    if (!is_write_kind(w.kind) || !w.target.same_var(a.target)) continue;
    if (w.core == a.core) continue;

    std::size_t rw = cx.rank(wi);
    std::size_t ri = cx.rank(i);
    bool ok = false;
    auto bs = cx.bByAb.find(w.uid);
    if (bs != cx.bByAb.end()) {
      for (std::size_t bi : bs->second) {
        std::size_t rb = cx.rank(bi);
        if (!(rw < rb && rb < ri)) continue;
        for (std::size_t fi : fetches) {
          const Action& f = cx.act(fi);
          if (f.core != a.core) continue;
          std::size_t rf = cx.rank(fi);
          if (!(rb < rf && rf < ri)) continue;
          auto bf = f.prov.Bf.find(a.target.field);
          if (bf == f.prov.Bf.end() || cx.idx(bf->second) != bi) continue;
          bool superseded = false;
          for (std::size_t b2 : writeBacks) {
            if (b2 == bi) continue;
            const Action& x = cx.act(b2);
            if (!x.target.same_var(a.target)) continue;
            std::size_t r2 = cx.rank(b2);
            if (rb < r2 && r2 < rf) {
              superseded = true;
              break;
            }
          }
          if (!superseded) {
            ok = true;
            break;
          }
        }
        if (ok) break;
      }
    }
    if (!ok)
      cx.emit("WF-16", {a.uid, w.uid},
              "cross-core read lacks a write-back and fetch chain carrying "
              "the write it sees");
  }
}

// WF-17 (trace half): the buffer never holds volatile variables, so no
// non-prologue write-back targets one.
void rule_wf17(Ctx& cx) {
  if (!cx.on("WF-17")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::B || a.prologue) continue;
    if (!a.target.is_var()) continue;
    auto vol = cx.volatility(a.target.ref, a.target.field);
    if (vol && *vol)
      cx.emit("WF-17", {a.uid},
              "volatile variable written back through the buffer");
  }
}

// WF-18 (trace half): volatile reads bypass the cache, so they record no
// caching source.
void rule_wf18(Ctx& cx) {
  if (!cx.on("WF-18")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind == ActionKind::Vr && a.prov.Cs)
      cx.emit("WF-18", {a.uid}, "volatile read records a caching source");
  }
}

// WF-19: initializations happen in the allocation prologue, are written
// back there, and cover every variable the trace accesses. (That prologue
// actions precede every start is guaranteed by the position order itself.)
void rule_wf19(Ctx& cx) {
  if (!cx.on("WF-19")) return;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::In) continue;
    if (!a.prologue) {
      cx.emit("WF-19", {a.uid},
              "initialization outside the allocation prologue");
      continue;
    }
    bool flushed = false;
    auto bs = cx.bByAb.find(a.uid);
    if (bs != cx.bByAb.end())
      for (std::size_t bi : bs->second) {
        const Action& b = cx.act(bi);
        if (b.kind == ActionKind::B && b.prologue &&
            b.target.same_var(a.target)) {
          flushed = true;
          break;
        }
      }
    if (!flushed)
      cx.emit("WF-19", {a.uid},
              "initialization has no prologue write-back");
  }
  std::set<VarKey> accessed;
  std::map<VarKey, Uid> witness;
  std::set<VarKey> initialized;
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind == ActionKind::In && a.target.is_var())
      initialized.insert(var_of(a.target));
    bool access = a.kind == ActionKind::R || a.kind == ActionKind::W ||
                  a.kind == ActionKind::Vr || a.kind == ActionKind::Vw;
    if (access && a.target.is_var()) {
      VarKey k = var_of(a.target);
      if (accessed.insert(k).second) witness[k] = a.uid;
    }
  }
  for (const VarKey& k : accessed)
    if (!initialized.count(k))
      cx.emit("WF-19", {witness[k]},
              "accessed variable was never initialized");
}

// WF-20: for plain variables, write-backs reach the heap in an order
// consistent with the happens-before order of the writes they flush.
void rule_wf20(Ctx& cx) {
  if (!cx.on("WF-20")) return;
  std::vector<std::pair<std::size_t, std::size_t>> bs;  // (write-back, write)
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::B || !a.target.is_var()) continue;
    auto vol = cx.volatility(a.target.ref, a.target.field);
    if (vol && *vol) continue;
    if (!a.prov.Ab) continue;  // WF-13 reports the missing pointer
    std::size_t wi = cx.idx(*a.prov.Ab);
    if (wi == kNpos) continue;
    ActionKind wk = cx.act(wi).kind;
    if (wk != ActionKind::In && wk != ActionKind::W) continue;
    bs.emplace_back(i, wi);
  }
  for (std::size_t x = 0; x < bs.size(); ++x) {
    for (std::size_t y = x + 1; y < bs.size(); ++y) {
      auto [b1, w1] = bs[x];
      auto [b2, w2] = bs[y];
      bool fwdW = cx.ord.happens_before(w1, w2);
      bool fwdB = cx.ord.happens_before(b1, b2);
      bool bwdW = cx.ord.happens_before(w2, w1);
      bool bwdB = cx.ord.happens_before(b2, b1);
      if (fwdW != fwdB || bwdW != bwdB)
        cx.emit("WF-20", {cx.act(b1).uid, cx.act(b2).uid},
                "write-back order disagrees with the happens-before order "
                "of the flushed writes");
    }
  }
}

// WFE-1: after a migration, a thread's reads are served by caching that
// happened on the new core.
void rule_wfe1(Ctx& cx) {
  if (!cx.on("WFE-1")) return;
  std::map<RefId, std::vector<std::size_t>> migs;  // per thread, rank order
  for (std::size_t i = 0; i < cx.n(); ++i)
    if (cx.act(i).kind == ActionKind::M) migs[cx.act(i).thread].push_back(i);
  for (auto& [tid, list] : migs)
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return cx.rank(a) < cx.rank(b);
    });
  for (std::size_t i = 0; i < cx.n(); ++i) {
    const Action& a = cx.act(i);
    if (a.kind != ActionKind::R || !a.prov.Cs) continue;
    auto mt = migs.find(a.thread);
    if (mt == migs.end()) continue;
    std::size_t lastM = kNpos;
    for (std::size_t mi : mt->second) {
      if (cx.rank(mi) < cx.rank(i)) lastM = mi;
    }
    if (lastM == kNpos) continue;
    std::size_t ci = cx.idx(*a.prov.Cs);
    if (ci == kNpos) continue;  // WF-10 reports dangling pointers
    if (cx.rank(ci) > cx.rank(lastM)) continue;
    bool refetched = false;
    for (std::size_t j = 0; j < cx.n(); ++j) {
      const Action& f = cx.act(j);
      if (f.kind != ActionKind::F || f.thread != a.thread) continue;
      if (f.target.ref != a.target.ref) continue;
      if (cx.rank(lastM) < cx.rank(j) && cx.rank(j) < cx.rank(i)) {
        refetched = true;
        break;
      }
    }
    if (!refetched)
      cx.emit("WFE-1", {a.uid, cx.act(lastM).uid},
              "read after migration served by pre-migration caching");
  }
}

// WFE-2: every write a thread performed is written back before the thread
// migrates.
void rule_wfe2(Ctx& cx) {
  if (!cx.on("WFE-2")) return;
  for (std::size_t mi = 0; mi < cx.n(); ++mi) {
    const Action& m = cx.act(mi);
    if (m.kind != ActionKind::M) continue;
    for (std::size_t wi = 0; wi < cx.n(); ++wi) {
      const Action& w = cx.act(wi);
      if (w.kind != ActionKind::W || w.thread != m.thread) continue;
      if (!(cx.rank(wi) < cx.rank(mi))) continue;
      bool flushed = false;
      for (std::size_t bi = 0; bi < cx.n(); ++bi) {
        const Action& b = cx.act(bi);
        if (b.kind != ActionKind::B || !b.target.same_var(w.target)) continue;
        if (cx.rank(wi) < cx.rank(bi) && cx.rank(bi) < cx.rank(mi)) {
          flushed = true;
          break;
        }
      }
      if (!flushed)
        cx.emit("WFE-2", {w.uid, m.uid},
                "write not written back before its thread migrated");
    }
  }
}

// ---------------------------------------------------------------------------
// Snapshot (WFH) checking helpers.

const njson* jfind(const njson& o, const std::string& key) {
  if (!o.is_object()) return nullptr;
  auto it = o.find(key);
  return it == o.end() ? nullptr : &*it;
}

RefId parse_ref_name(const std::string& s) {
  Target t = target_from_string(s);
  if (t.kind != Target::Kind::Ref)
    throw TraceError("snapshot: expected an object key, got '" + s + "'");
  return t.ref;
}

VarKey parse_var_name(const std::string& s) {
  Target t = target_from_string(s);
  if (t.kind != Target::Kind::Var)
    throw TraceError("snapshot: expected a variable key, got '" + s + "'");
  return {t.ref, t.field};
}

CoreId parse_core_name(const std::string& s) {
  Target t = target_from_string(s);
  if (t.kind != Target::Kind::Core)
    throw TraceError("snapshot: expected a core key, got '" + s + "'");
  return t.core;
}

std::optional<std::string> heap_field_str(const njson& post, RefId r,
                                          const std::string& f) {
  const njson* heap = jfind(post, "heap");
  if (!heap) return std::nullopt;
  const njson* obj = jfind(*heap, "r" + std::to_string(r));
  if (!obj) return std::nullopt;
  const njson* fields = jfind(*obj, "fields");
  if (!fields) return std::nullopt;
  const njson* v = jfind(*fields, f);
  if (!v || !v->is_string()) return std::nullopt;
  return v->get<std::string>();
}

std::string step_str(std::int64_t s) {
  return "step " + std::to_string(s) + ": ";
}

}  // namespace

WfReport check(const Trace& t, const WfOptions& opts) {
  Ctx cx(t, opts);
  rule_wf1(cx);
  rule_wf2(cx);
  rule_wf3(cx);
  rule_wf4(cx);
  rule_wf5(cx);
  rule_wf6(cx);
  rule_wf7(cx);
  rule_wf8(cx);
  rule_wf9(cx);
  rule_wf10(cx);
  rule_wf11(cx);
  rule_wf12(cx);
  rule_wf13(cx);
  rule_wf14(cx);
  rule_wf15(cx);
  rule_wf16(cx);
  rule_wf17(cx);
  rule_wf18(cx);
  rule_wf19(cx);
  rule_wf20(cx);
  rule_wfe1(cx);
  rule_wfe2(cx);
  WfReport rep;
  rep.violations = std::move(cx.out);
  return rep;
}

WfReport check_wfh(const Trace& t, const std::vector<Checkpoint>& cps,
                   const WfOptions& opts) {
  Ctx cx(t, opts);
  if (cps.empty() || cps.front().step != -1)
    throw TraceError(
        "checkpoints must begin with the boot snapshot (step -1)");
  for (std::size_t k = 1; k < cps.size(); ++k)
    if (cps[k].step <= cps[k - 1].step)
      throw TraceError("checkpoint steps must be strictly increasing");

  for (std::size_t k = 0; k < cps.size(); ++k) {
    const Checkpoint& cp = cps[k];
    const njson& post = cp.post;

    // Machine-timeline prefix of actions covered by this snapshot.
    std::vector<std::size_t> pre;
    for (std::size_t j : cx.byTime) {
      const Action& a = cx.act(j);
      if (static_cast<std::int64_t>(a.step) <= cp.step) pre.push_back(j);
    }
    auto preTime = [&](std::size_t actionIdx) -> std::size_t {
      for (std::size_t j = 0; j < pre.size(); ++j)
        if (pre[j] == actionIdx) return j;
      return kNpos;
    };
    (void)preTime;

    // WFH-1: the heap holds the last written-back value of every plain
    // variable that has been written back.
    if (cx.on("WFH-1")) {
      std::map<VarKey, const Action*> lastB;
      for (std::size_t j : pre) {
        const Action& a = cx.act(j);
        if (a.kind == ActionKind::B && a.target.is_var())
          lastB[var_of(a.target)] = &a;
      }
      for (const auto& [key, b] : lastB) {
        auto vol = cx.volatility(key.first, key.second);
        if (vol && *vol) continue;
        if (!b->value) continue;
        auto got = heap_field_str(post, key.first, key.second);
        if (!got) {
          cx.emit("WFH-1", {b->uid},
                  step_str(cp.step) +
                      "written-back variable missing from the heap snapshot");
        } else if (*got != to_string(*b->value)) {
          cx.emit("WFH-1", {b->uid},
                  step_str(cp.step) +
                      "heap snapshot disagrees with the last write-back");
        }
      }
    }

    // WFH-2 and WFH-4: every snapshot cache entry was fetched, not yet
    // invalidated, and each field holds its latest fill value.
    if (cx.on("WFH-2") || cx.on("WFH-4")) {
      const njson* caches = jfind(post, "caches");
      if (caches)
        for (const auto& [coreName, percore] : caches->items()) {
          CoreId c = parse_core_name(coreName);
          for (const auto& [refName, fieldsObj] : percore.items()) {
            RefId r = parse_ref_name(refName);
            std::vector<std::size_t> fs;   // fetches of (c, r), time order
            std::size_t lastCacheEvent = kNpos;  // index into pre
            bool lastWasInvalidate = false;
            for (std::size_t j = 0; j < pre.size(); ++j) {
              const Action& a = cx.act(pre[j]);
              if (a.core != c) continue;
              if (a.kind == ActionKind::F && a.target.ref == r) {
                fs.push_back(pre[j]);
                lastCacheEvent = j;
                lastWasInvalidate = false;
              } else if (a.kind == ActionKind::I && a.target.ref == r) {
                lastCacheEvent = j;
                lastWasInvalidate = true;
              }
            }
            if (fs.empty()) {
              if (cx.on("WFH-4"))
                cx.emit("WFH-4", {},
                        step_str(cp.step) + "object " + refName +
                            " cached on " + coreName +
                            " was never fetched there");
              continue;
            }
            if (!cx.on("WFH-2")) continue;
            if (lastWasInvalidate && lastCacheEvent != kNpos) {
              cx.emit("WFH-2", {cx.act(pre[lastCacheEvent]).uid},
                      step_str(cp.step) + "object " + refName +
                          " remains cached on " + coreName +
                          " after invalidation");
              continue;
            }
            for (const auto& [f, valJ] : fieldsObj.items()) {
              if (!valJ.is_string()) continue;
              std::string valstr = valJ.get<std::string>();
              // Latest fill: the newest fetch carrying the field, or a
              // newer same-core write-back of it.
              std::size_t bestTime = kNpos;
              std::optional<Value> bestVal;
              Uid bestUid = 0;
              for (std::size_t j = 0; j < pre.size(); ++j) {
                const Action& a = cx.act(pre[j]);
                if (a.kind == ActionKind::F && a.core == c &&
                    a.target.ref == r) {
                  auto bf = a.prov.Bf.find(f);
                  if (bf == a.prov.Bf.end()) continue;
                  std::size_t bi = cx.idx(bf->second);
                  if (bi == kNpos || !cx.act(bi).value) continue;
                  bestTime = j;
                  bestVal = *cx.act(bi).value;
                  bestUid = a.uid;
                } else if (a.kind == ActionKind::B && a.core == c &&
                           a.target.is_var() && a.target.ref == r &&
                           a.target.field == f && a.value) {
                  bestTime = j;
                  bestVal = *a.value;
                  bestUid = a.uid;
                }
              }
              if (bestTime == kNpos || !bestVal) {
                cx.emit("WFH-2", {},
                        step_str(cp.step) + "cached field " + refName + "." +
                            f + " on " + coreName +
                            " has no fetched or written-back source");
              } else if (to_string(*bestVal) != valstr) {
                cx.emit("WFH-2", {bestUid},
                        step_str(cp.step) + "cache snapshot of " + refName +
                            "." + f + " on " + coreName +
                            " disagrees with its latest fill");
              }
            }
          }
        }
    }

    // WFH-3 and WFH-5: each buffer snapshot equals the reconstruction from
    // writes and write-backs, in write order.
    if (cx.on("WFH-3") || cx.on("WFH-5")) {
      std::map<CoreId, std::vector<std::pair<VarKey, Value>>> recon;
      std::map<CoreId, std::set<VarKey>> everWritten;
      for (std::size_t j : pre) {
        const Action& a = cx.act(j);
        if (!a.target.is_var()) continue;
        VarKey key = var_of(a.target);
        if (a.kind == ActionKind::W && a.value) {
          auto& list = recon[a.core];
          list.erase(std::remove_if(list.begin(), list.end(),
                                    [&](const auto& e) {
                                      return e.first == key;
                                    }),
                     list.end());
          list.emplace_back(key, *a.value);
          everWritten[a.core].insert(key);
        } else if (a.kind == ActionKind::B) {
          auto& list = recon[a.core];
          list.erase(std::remove_if(list.begin(), list.end(),
                                    [&](const auto& e) {
                                      return e.first == key;
                                    }),
                     list.end());
        }
      }
      std::set<CoreId> coresToCheck;
      for (const auto& [c, list] : recon)
        if (!list.empty()) coresToCheck.insert(c);
      const njson* buffers = jfind(post, "buffers");
      if (buffers)
        for (const auto& [coreName, listJ] : buffers->items())
          coresToCheck.insert(parse_core_name(coreName));
      for (CoreId c : coresToCheck) {
        std::vector<std::pair<VarKey, std::string>> snap;
        if (buffers) {
          const njson* listJ = jfind(*buffers, "c" + std::to_string(c));
          if (listJ && listJ->is_array())
            for (const auto& entry : *listJ) {
              const njson* var = jfind(entry, "var");
              const njson* val = jfind(entry, "value");
              if (!var || !val || !var->is_string() || !val->is_string())
                throw TraceError("snapshot: malformed buffer entry");
              snap.emplace_back(parse_var_name(var->get<std::string>()),
                                val->get<std::string>());
            }
        }
        const auto& rc =
            recon.count(c) ? recon[c]
                           : std::vector<std::pair<VarKey, Value>>{};
        bool mismatch = false;
        for (const auto& [key, valstr] : snap) {
          std::string varName =
              "r" + std::to_string(key.first) + "." + key.second;
          if (!everWritten[c].count(key)) {
            if (cx.on("WFH-5"))
              cx.emit("WFH-5", {},
                      step_str(cp.step) + "buffer of c" + std::to_string(c) +
                          " holds " + varName +
                          ", a variable never written on that core");
            mismatch = true;
            continue;
          }
          auto it = std::find_if(rc.begin(), rc.end(), [&](const auto& e) {
            return e.first == key;
          });
          if (it == rc.end()) {
            if (cx.on("WFH-3"))
              cx.emit("WFH-3", {},
                      step_str(cp.step) + "buffer of c" + std::to_string(c) +
                          " holds " + varName +
                          " although it was written back");
            mismatch = true;
          } else if (to_string(it->second) != valstr) {
            if (cx.on("WFH-3"))
              cx.emit("WFH-3", {},
                      step_str(cp.step) + "buffered value of " + varName +
                          " on c" + std::to_string(c) +
                          " disagrees with the newest write");
            mismatch = true;
          }
        }
        for (const auto& [key, val] : rc) {
          bool found = false;
          for (const auto& [skey, sval] : snap)
            if (skey == key) {
              found = true;
              break;
            }
          if (!found) {
            if (cx.on("WFH-3"))
              cx.emit("WFH-3", {},
                      step_str(cp.step) + "dirty variable r" +
                          std::to_string(key.first) + "." + key.second +
                          " missing from the buffer snapshot of c" +
                          std::to_string(c));
            mismatch = true;
          }
        }
        if (!mismatch && cx.on("WFH-3") && snap.size() == rc.size()) {
          for (std::size_t j = 0; j < snap.size(); ++j)
            if (!(snap[j].first == rc[j].first)) {
              cx.emit("WFH-3", {},
                      step_str(cp.step) + "buffer order of c" +
                          std::to_string(c) +
                          " disagrees with the write order");
              break;
            }
        }
      }
    }

    // WFH-5 (heap and cache halves): every snapshot value is one some
    // write-kind action actually produced for that variable.
    if (cx.on("WFH-5")) {
      auto valueWritten = [&](RefId r, const std::string& f,
                              const std::string& valstr) {
        for (std::size_t j : pre) {
          const Action& a = cx.act(j);
          if (a.kind != ActionKind::In && a.kind != ActionKind::W &&
              a.kind != ActionKind::Vw && a.kind != ActionKind::B)
            continue;
          if (!a.target.is_var() || a.target.ref != r ||
              a.target.field != f || !a.value)
            continue;
          if (to_string(*a.value) == valstr) return true;
        }
        return false;
      };
      const njson* heap = jfind(post, "heap");
      if (heap)
        for (const auto& [refName, obj] : heap->items()) {
          RefId r = parse_ref_name(refName);
          const njson* fields = jfind(obj, "fields");
          if (!fields) continue;
          for (const auto& [f, valJ] : fields->items()) {
            if (!valJ.is_string()) continue;
            if (!valueWritten(r, f, valJ.get<std::string>()))
              cx.emit("WFH-5", {},
                      step_str(cp.step) + "heap value of " + refName + "." +
                          f + " was never produced by any write");
          }
        }
      const njson* caches = jfind(post, "caches");
      if (caches)
        for (const auto& [coreName, percore] : caches->items())
          for (const auto& [refName, fieldsObj] : percore.items()) {
            RefId r = parse_ref_name(refName);
            for (const auto& [f, valJ] : fieldsObj.items()) {
              if (!valJ.is_string()) continue;
              if (!valueWritten(r, f, valJ.get<std::string>()))
                cx.emit("WFH-5", {},
                        step_str(cp.step) + "cached value of " + refName +
                            "." + f + " on " + coreName +
                            " was never produced by any write");
            }
          }
    }

    // WFH-6: volatile heap slots hold the latest volatile write (or the
    // initialization value).
    if (cx.on("WFH-6")) {
      const njson* heap = jfind(post, "heap");
      if (heap)
        for (const auto& [refName, obj] : heap->items()) {
          RefId r = parse_ref_name(refName);
          const njson* fields = jfind(obj, "fields");
          if (!fields) continue;
          for (const auto& [f, valJ] : fields->items()) {
            if (!valJ.is_string()) continue;
            auto vol = cx.volatility(r, f);
            if (!vol || !*vol) continue;
            std::optional<Value> expected;
            Uid witness = 0;
            for (std::size_t j : pre) {
              const Action& a = cx.act(j);
              if (!a.target.is_var() || a.target.ref != r ||
                  a.target.field != f || !a.value)
                continue;
              if (a.kind == ActionKind::Vw) {
                expected = *a.value;  // timeline order: last wins
                witness = a.uid;
              } else if (a.kind == ActionKind::In && !expected) {
                expected = *a.value;
                witness = a.uid;
              }
            }
            if (!expected) continue;
            if (to_string(*expected) != valJ.get<std::string>())
              cx.emit("WFH-6", {witness},
                      step_str(cp.step) + "volatile heap slot " + refName +
                          "." + f +
                          " disagrees with the latest volatile write");
          }
        }
    }

    // WFH-7 and WFH-8: the thread list matches lifecycle-bearing heap
    // objects, without duplicates.
    if (cx.on("WFH-7") || cx.on("WFH-8")) {
      std::vector<RefId> listed;
      const njson* threads = jfind(post, "threads");
      if (threads && threads->is_array())
        for (const auto& tj : *threads) {
          const njson* th = jfind(tj, "thread");
          if (!th || !th->is_number())
            throw TraceError("snapshot: malformed thread entry");
          listed.push_back(th->get<RefId>());
        }
      if (cx.on("WFH-8")) {
        std::set<RefId> seen;
        for (RefId tid : listed)
          if (!seen.insert(tid).second)
            cx.emit("WFH-8", {},
                    step_str(cp.step) + "thread r" + std::to_string(tid) +
                        " listed twice");
      }
      if (cx.on("WFH-7")) {
        const njson* heap = jfind(post, "heap");
        std::set<RefId> listedSet(listed.begin(), listed.end());
        for (RefId tid : listedSet) {
          const njson* obj =
              heap ? jfind(*heap, "r" + std::to_string(tid)) : nullptr;
          if (!obj || !jfind(*obj, "lifecycle"))
            cx.emit("WFH-7", {},
                    step_str(cp.step) + "listed thread r" +
                        std::to_string(tid) +
                        " has no lifecycle in the heap snapshot");
        }
        if (heap)
          for (const auto& [refName, obj] : heap->items()) {
            if (!jfind(obj, "lifecycle")) continue;
            RefId r = parse_ref_name(refName);
            if (!listedSet.count(r))
              cx.emit("WFH-7", {},
                      step_str(cp.step) + "lifecycle-bearing object " +
                          refName + " missing from the thread list");
          }
      }
    }

    // WF-17 (snapshot half): a volatile write is visible in the heap
    // immediately after its transition.
    if (cx.on("WF-17")) {
      for (std::size_t j : pre) {
        const Action& a = cx.act(j);
        if (a.kind != ActionKind::Vw ||
            static_cast<std::int64_t>(a.step) != cp.step || !a.value)
          continue;
        auto got = heap_field_str(post, a.target.ref, a.target.field);
        if (!got || *got != to_string(*a.value))
          cx.emit("WF-17", {a.uid},
                  step_str(cp.step) +
                      "volatile write not visible in the heap immediately "
                      "after its transition");
      }
    }

    // WF-18 (snapshot half): a volatile read returns the heap value in
    // force before its transition.
    if (cx.on("WF-18") && k > 0) {
      const njson& prev = cps[k - 1].post;
      for (std::size_t j : pre) {
        const Action& a = cx.act(j);
        if (a.kind != ActionKind::Vr ||
            static_cast<std::int64_t>(a.step) != cp.step || !a.value)
          continue;
        auto got = heap_field_str(prev, a.target.ref, a.target.field);
        if (!got || *got != to_string(*a.value))
          cx.emit("WF-18", {a.uid},
                  step_str(cp.step) +
                      "volatile read does not return the heap value in "
                      "force before its transition");
      }
    }
  }

  // WFH-9: between consecutive snapshots, caches and buffers change only
  // on the cores the transition names.
  if (cx.on("WFH-9")) {
    for (std::size_t k = 1; k < cps.size(); ++k) {
      const njson& prev = cps[k - 1].post;
      const njson& curr = cps[k].post;
      std::set<CoreId> allowed(cps[k].cores.begin(), cps[k].cores.end());
      for (const char* part : {"caches", "buffers"}) {
        const njson* pm = jfind(prev, part);
        const njson* cm = jfind(curr, part);
        std::set<std::string> keys;
        if (pm)
          for (const auto& [name, v] : pm->items()) keys.insert(name);
        if (cm)
          for (const auto& [name, v] : cm->items()) keys.insert(name);
        for (const std::string& name : keys) {
          const njson* pv = pm ? jfind(*pm, name) : nullptr;
          const njson* cv = cm ? jfind(*cm, name) : nullptr;
          bool same = (pv && cv) ? (*pv == *cv) : (!pv && !cv);
          if (same) continue;
          CoreId c = parse_core_name(name);
          if (!allowed.count(c))
            cx.emit("WFH-9", {},
                    step_str(cps[k].step) + std::string(part) + " of " +
                        name + " changed outside the acting cores");
        }
      }
    }
  }

  WfReport rep;
  rep.violations = std::move(cx.out);
  return rep;
}

}  // namespace djc
