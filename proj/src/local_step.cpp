#include "djc/local_step.hpp"

#include <functional>
#include <stdexcept>

#include "djc/subst.hpp"

namespace djc {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::IfTrue: return "IfTrue";
    case Rule::IfFalse: return "IfFalse";
    case Rule::Let: return "Let";
    case Rule::Call: return "Call";
    case Rule::Builtin: return "Builtin";
    case Rule::Field: return "Field";
    case Rule::FieldDirty: return "FieldDirty";
    case Rule::Assign: return "Assign";
    case Rule::New: return "New";
    case Rule::Fetch: return "Fetch";
    case Rule::WriteBack: return "WriteBack";
    case Rule::Invalidate: return "Invalidate";
    case Rule::Start: return "Start";
    case Rule::Finish: return "Finish";
    case Rule::VolatileReadL: return "VolatileReadL";
    case Rule::VolatileRead: return "VolatileRead";
    case Rule::VolatileWriteL: return "VolatileWriteL";
    case Rule::VolatileWrite: return "VolatileWrite";
    case Rule::MonitorEnter: return "MonitorEnter";
    case Rule::NestedMonitorEnter: return "NestedMonitorEnter";
    case Rule::MonitorExit: return "MonitorExit";
    case Rule::NestedMonitorExit: return "NestedMonitorExit";
    case Rule::Join: return "Join";
    case Rule::Interrupt: return "Interrupt";
    case Rule::InterruptedT: return "InterruptedT";
    case Rule::InterruptedF: return "InterruptedF";
    case Rule::Spawn: return "Spawn";
    case Rule::Migrate: return "Migrate";
    case Rule::Blocked: return "Blocked";
  }
  return "Blocked";
}

std::optional<Rule> rule_from_name(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Rule::Blocked); ++i) {
    Rule r = static_cast<Rule>(i);
    if (s == rule_name(r)) return r;
  }
  return std::nullopt;
}

namespace {

using Rebuild = std::function<ExprPtr(ExprPtr)>;

bool is_value(const ExprPtr& e) { return e && e->kind == Expr::Kind::Lit; }

}  // namespace

/// Locate the active redex under the left-to-right evaluation order:
/// if-condition, let-binding, get-receiver, assignment right-hand side
/// before its receiver, call arguments before the receiver, constructor
/// arguments left to right, monitor-op receiver.
Redex find_redex(const ExprPtr& e) {
  auto id = [](ExprPtr x) { return x; };
  auto into = [&](const ExprPtr& child,
                  std::function<ExprPtr(ExprPtr)> wrap) -> Redex {
    Redex r = find_redex(child);
    Rebuild inner = r.rebuild;
    r.rebuild = [inner, wrap](ExprPtr x) { return wrap(inner(x)); };
    return r;
  };

  switch (e->kind) {
    case Expr::Kind::Lit:
    case Expr::Kind::Var:
      return {e, id};
    case Expr::Kind::If:
      if (!is_value(e->a)) {
        ExprPtr b = e->b, c = e->c;
        return into(e->a, [b, c](ExprPtr x) { return eif(x, b, c); });
      }
      return {e, id};
    case Expr::Kind::Let:
      if (!is_value(e->a)) {
        std::string n = e->name;
        TypeTag ty = e->type;
        ExprPtr body = e->b;
        return into(e->a,
                    [n, ty, body](ExprPtr x) { return elet(n, ty, x, body); });
      }
      return {e, id};
    case Expr::Kind::Get:
      if (!is_value(e->a)) {
        std::string f = e->name;
        return into(e->a, [f](ExprPtr x) { return eget(x, f); });
      }
      return {e, id};
    case Expr::Kind::Set:
      if (!is_value(e->b)) {
        ExprPtr recv = e->a;
        std::string f = e->name;
        return into(e->b, [recv, f](ExprPtr x) { return eset(recv, f, x); });
      }
      if (!is_value(e->a)) {
        ExprPtr rhs = e->b;
        std::string f = e->name;
        return into(e->a, [rhs, f](ExprPtr x) { return eset(x, f, rhs); });
      }
      return {e, id};
    case Expr::Kind::Call: {
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (!is_value(e->args[i])) {
          ExprPtr recv = e->a;
          std::string m = e->name;
          std::vector<ExprPtr> args = e->args;
          return into(e->args[i], [recv, m, args, i](ExprPtr x) {
            std::vector<ExprPtr> a2 = args;
            a2[i] = x;
            return ecall(recv, m, a2);
          });
        }
      }
      if (!is_value(e->a)) {
        std::string m = e->name;
        std::vector<ExprPtr> args = e->args;
        return into(e->a,
                    [m, args](ExprPtr x) { return ecall(x, m, args); });
      }
      return {e, id};
    }
    case Expr::Kind::New: {
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (!is_value(e->args[i])) {
          std::string cls = e->name;
          std::vector<ExprPtr> args = e->args;
          return into(e->args[i], [cls, args, i](ExprPtr x) {
            std::vector<ExprPtr> a2 = args;
            a2[i] = x;
            return enew(cls, a2);
          });
        }
      }
      return {e, id};
    }
    case Expr::Kind::MonEnter:
      if (!is_value(e->a))
        return into(e->a, [](ExprPtr x) { return emonenter(x); });
      return {e, id};
    case Expr::Kind::MonExit:
      if (!is_value(e->a))
        return into(e->a, [](ExprPtr x) { return emonexit(x); });
      return {e, id};
  }
  return {e, id};
}

namespace {

std::optional<Lifecycle> lifecycle_of(const MachineState& st, RefId r) {
  if (!st.heap.allocated(r)) return std::nullopt;
  return st.heap.at(r).object.lifecycle;
}

NextStep blocked(std::string why, bool permanent = false) {
  NextStep ns;
  ns.rule = Rule::Blocked;
  ns.enabled = false;
  ns.permanentlyStuck = permanent;
  ns.why = std::move(why);
  return ns;
}

NextStep enabledStep(Rule r, RefId ref = kNullRef, std::string field = {}) {
  NextStep ns;
  ns.rule = r;
  ns.targetRef = ref;
  ns.targetField = std::move(field);
  ns.enabled = true;
  return ns;
}

const LockState* monitor_of(const MachineState& st, RefId r) {
  if (!st.heap.allocated(r)) return nullptr;
  return &st.heap.at(r).monitor;
}

RefId vlock_owner(const MachineState& st, RefId r, const std::string& f) {
  auto it = st.heap.volatileLocks.find({r, f});
  return it == st.heap.volatileLocks.end() ? kNullRef : it->second;
}

}  // namespace

NextStep next_step(const MachineState& st, const Program& prog,
                   const ThreadTerm& t, const StepOptions& opts) {
  if (t.startMarker) {
    auto lc = lifecycle_of(st, t.thread);
    if (lc == Lifecycle::Spawned)
      return enabledStep(Rule::Start, t.thread);
    return blocked("start-marker thread is not in the spawned state", true);
  }
  if (!t.body) return blocked("thread has no body", true);

  Redex rx = find_redex(t.body);
  const Expr& e = *rx.node;

  switch (e.kind) {
    case Expr::Kind::Lit: {
      if (!e.val.isUnit())
        return blocked("thread body reduced to a non-unit value", true);
      auto lc = lifecycle_of(st, t.thread);
      if (lc == Lifecycle::Started)
        return enabledStep(Rule::Finish, t.thread);
      if (lc == Lifecycle::Finished) {
        NextStep ns = blocked("thread already finished");
        ns.finished = true;
        return ns;
      }
      return blocked("completed thread cannot finish from state " +
                         std::string(lc ? lifecycle_name(*lc) : "none"),
                     true);
    }
    case Expr::Kind::Var:
      return blocked("unbound variable '" + e.name + "'", true);
    case Expr::Kind::If:
      if (!e.a->val.isBool())
        return blocked("if-condition is not a boolean", true);
      return enabledStep(e.a->val.asBool() ? Rule::IfTrue : Rule::IfFalse);
    case Expr::Kind::Let:
      return enabledStep(Rule::Let);
    case Expr::Kind::New: {
      const ClassDef* cd = prog.find_class(e.name);
      if (!cd) return blocked("unknown class '" + e.name + "'", true);
      if (cd->fields.size() != e.args.size())
        return blocked("constructor arity mismatch for '" + e.name + "'",
                       true);
      return enabledStep(Rule::New);
    }
    case Expr::Kind::Get:
    case Expr::Kind::Set: {
      Value recv = e.a->val;
      if (!recv.isRef())
        return blocked("field access on a non-reference value", true);
      RefId r = recv.asRef();
      if (r == kNullRef) return blocked("null dereference", true);
      const ClassDef* cd = prog.find_class(st.heap.at(r).object.cls);
      const FieldDecl* fd = cd ? cd->find_field(e.name) : nullptr;
      if (!fd)
        return blocked("object has no field '" + e.name + "'", true);

      bool isGet = e.kind == Expr::Kind::Get;
      if (fd->isVolatile && st.mode == MemoryMode::Cached) {
        RefId owner = vlock_owner(st, r, e.name);
        Rule phase2 = isGet ? Rule::VolatileRead : Rule::VolatileWrite;
        Rule phase1 = isGet ? Rule::VolatileReadL : Rule::VolatileWriteL;
        if (owner == t.thread && owner != kNullRef)
          return enabledStep(phase2, r, e.name);
        if (owner == kNullRef)
          return enabledStep(opts.fuseVolatile ? phase2 : phase1, r, e.name);
        return blocked("volatile access lock held by another thread");
      }
      if (fd->isVolatile)  // direct mode: volatiles are plain heap accesses
        return enabledStep(isGet ? Rule::VolatileRead : Rule::VolatileWrite,
                           r, e.name);
      if (!isGet) return enabledStep(Rule::Assign, r, e.name);
      if (st.mode == MemoryMode::Direct)
        return enabledStep(Rule::Field, r, e.name);
      auto bit = st.buffers.find(t.core);
      if (bit != st.buffers.end() && bit->second.dirty(r, e.name))
        return enabledStep(Rule::FieldDirty, r, e.name);
      return enabledStep(Rule::Field, r, e.name);
    }
    case Expr::Kind::Call: {
      Value recv = e.a->val;
      if (recv.isNat()) {
        if (e.name == "succ" && e.args.empty())
          return enabledStep(Rule::Builtin);
        if (e.name == "pred" && e.args.empty())
          return enabledStep(Rule::Builtin);
        if (e.name == "eq" && e.args.size() == 1 && e.args[0]->val.isNat())
          return enabledStep(Rule::Builtin);
        return blocked("no builtin '" + e.name + "' on naturals", true);
      }
      if (!recv.isRef())
        return blocked("method call on a non-reference value", true);
      RefId r = recv.asRef();
      if (r == kNullRef) return blocked("null receiver", true);
      const ClassDef* cd = prog.find_class(st.heap.at(r).object.cls);
      if (!cd) return blocked("receiver class not in program", true);

      if (const MethodDef* md = cd->find_method(e.name)) {
        if (md->params.size() != e.args.size())
          return blocked("call arity mismatch for '" + e.name + "'", true);
        return enabledStep(Rule::Call, r);
      }

      auto lc = lifecycle_of(st, r);
      if (e.name == "start" && e.args.empty()) {
        if (!cd->declares_run())
          return blocked("start() on a class without run()", true);
        if (lc) return blocked("thread already spawned", true);
        return enabledStep(Rule::Spawn, r);
      }
      if (e.name == "join" && e.args.empty()) {
        if (!cd->declares_run())
          return blocked("join() on a class without run()", true);
        if (lc == Lifecycle::Finished) return enabledStep(Rule::Join, r);
        return blocked("join: target thread not finished",
                       lc == Lifecycle::Interrupted);
      }
      if (e.name == "interrupt" && e.args.empty()) {
        if (!cd->declares_run())
          return blocked("interrupt() on a class without run()", true);
        if (lc == Lifecycle::Started) return enabledStep(Rule::Interrupt, r);
        return blocked("interrupt: target thread not started",
                       lc == Lifecycle::Finished ||
                           lc == Lifecycle::Interrupted);
      }
      if (e.name == "interrupted" && e.args.empty()) {
        if (!cd->declares_run())
          return blocked("interrupted() on a class without run()", true);
        if (lc == Lifecycle::Interrupted)
          return enabledStep(Rule::InterruptedT, r);
        if (lc) return enabledStep(Rule::InterruptedF, r);
        return blocked("interrupted: target thread never spawned");
      }
      return blocked("no such method '" + e.name + "'", true);
    }
    case Expr::Kind::MonEnter:
    case Expr::Kind::MonExit: {
      Value recv = e.a->val;
      if (!recv.isRef())
        return blocked("monitor operation on a non-reference value", true);
      RefId r = recv.asRef();
      if (r == kNullRef) return blocked("null monitor", true);
      const LockState* m = monitor_of(st, r);
      if (e.kind == Expr::Kind::MonEnter) {
        if (m->free()) return enabledStep(Rule::MonitorEnter, r);
        if (m->held_by(t.thread))
          return enabledStep(Rule::NestedMonitorEnter, r);
        return blocked("monitor held by another thread");
      }
      if (m->held_by(t.thread))
        return enabledStep(m->count == 1 ? Rule::MonitorExit
                                         : Rule::NestedMonitorExit,
                           r);
      return blocked("monitor exit without ownership", true);
    }
  }
  return blocked("unclassifiable term", true);
}

namespace {

Value builtin_result(const Expr& e) {
  std::uint64_t n = e.a->val.asNat();
  if (e.name == "succ") return Value::nat(n + 1);
  if (e.name == "pred") return Value::nat(n == 0 ? 0 : n - 1);
  return Value::boolean(n == e.args[0]->val.asNat());
}

void emit_volatile_read(EmitCtx& cx, RefId r, const std::string& f) {
  Action a;
  a.kind = ActionKind::Vr;
  a.target = Target::variable(r, f);
  a.value = cx.st.heap.at(r).object.fields.at(f);
  auto w = cx.st.heapWriter.find({r, f});
  if (w != cx.st.heapWriter.end()) a.prov.W = w->second;
  push_action(cx, a);
}

Uid emit_volatile_write(EmitCtx& cx, RefId r, const std::string& f, Value v) {
  Action a;
  a.kind = ActionKind::Vw;
  a.target = Target::variable(r, f);
  a.value = v;
  Uid uid = push_action(cx, a);
  cx.st.heap.at(r).object.fields.at(f) = v;
  cx.st.heapWriter[{r, f}] = uid;
  return uid;
}

}  // namespace

StepResult apply_step(MachineState& st, const Program& prog, RefId thread,
                      std::uint64_t step, const StepOptions& opts,
                      CoreId spawnCore) {
  ThreadTerm* tt = st.find_thread(thread);
  if (!tt) throw std::logic_error("apply_step: unknown thread");
  NextStep ns = next_step(st, prog, *tt, opts);
  if (!ns.enabled)
    throw std::logic_error("apply_step: rule not enabled: " + ns.why);

  StepResult res;
  res.programRule = ns.rule;
  EmitCtx cx{st, res.actions, step, tt->core, thread, 0};

  if (ns.rule == Rule::Start) {
    acquire_flush(cx);
    st.heap.at(thread).object.lifecycle = Lifecycle::Started;
    Action s;
    s.kind = ActionKind::S;
    s.target = Target::object(thread);
    s.cls = st.heap.at(thread).object.cls;
    push_action(cx, s);
    tt->startMarker = false;
    tt->body = ecall(lit(Value::ref(thread)), "run", {});
    return res;
  }

  Redex rx = find_redex(tt->body);
  const Expr& e = *rx.node;

  switch (ns.rule) {
    case Rule::IfTrue:
      tt->body = rx.rebuild(e.b);
      break;
    case Rule::IfFalse:
      tt->body = rx.rebuild(e.c);
      break;
    case Rule::Let: {
      std::map<std::string, Value> m{{e.name, e.a->val}};
      tt->body = rx.rebuild(substitute(e.b, m));
      break;
    }
    case Rule::Call: {
      RefId r = e.a->val.asRef();
      const ClassDef* cd = prog.find_class(st.heap.at(r).object.cls);
      const MethodDef* md = cd->find_method(e.name);
      std::map<std::string, Value> m;
      for (std::size_t i = 0; i < md->params.size(); ++i)
        m[md->params[i].first] = e.args[i]->val;
      m["this"] = e.a->val;
      tt->body = rx.rebuild(substitute(md->body, m));
      break;
    }
    case Rule::Builtin:
      tt->body = rx.rebuild(lit(builtin_result(e)));
      break;
    case Rule::New: {
      const ClassDef* cd = prog.find_class(e.name);
      RefId r = st.allocate(*cd, thread);
      emit_alloc_prologue(cx, r, *cd);
      ExprPtr cont;
      if (cd->init) {
        std::map<std::string, Value> m;
        for (std::size_t i = 0; i < cd->fields.size(); ++i)
          m[cd->fields[i].name] = e.args[i]->val;
        m["this"] = Value::ref(r);
        cont = substitute(cd->init, m);
      } else {
        cont = unitE();
      }
      tt->body = rx.rebuild(
          elet("_", TypeTag::unitT(), cont, lit(Value::ref(r))));
      break;
    }
    case Rule::Field:
    case Rule::FieldDirty: {
      RefId r = ns.targetRef;
      if (st.mode == MemoryMode::Cached &&
          !st.buffer(tt->core).dirty(r, ns.targetField) &&
          !st.cache(tt->core).cached(r))
        fetch_object(cx, r);
      Value v = read_field(cx, r, ns.targetField);
      tt->body = rx.rebuild(lit(v));
      break;
    }
    case Rule::Assign: {
      RefId r = ns.targetRef;
      Value v = e.b->val;
      if (opts.policy == WritePolicy::Eager &&
          st.mode == MemoryMode::Cached && !st.cache(tt->core).cached(r))
        fetch_object(cx, r);
      write_field(cx, r, ns.targetField, v);
      if (opts.policy == WritePolicy::Eager && st.mode == MemoryMode::Cached)
        write_back_field(cx, r, ns.targetField);
      tt->body = rx.rebuild(lit(v));
      break;
    }
    case Rule::VolatileReadL:
      st.heap.volatileLocks[{ns.targetRef, ns.targetField}] = thread;
      break;
    case Rule::VolatileRead: {
      acquire_flush(cx);
      Value v = st.heap.at(ns.targetRef).object.fields.at(ns.targetField);
      emit_volatile_read(cx, ns.targetRef, ns.targetField);
      st.heap.volatileLocks.erase({ns.targetRef, ns.targetField});
      tt->body = rx.rebuild(lit(v));
      break;
    }
    case Rule::VolatileWriteL:
      st.heap.volatileLocks[{ns.targetRef, ns.targetField}] = thread;
      break;
    case Rule::VolatileWrite: {
      release_flush(cx);
      Value v = e.b->val;
      emit_volatile_write(cx, ns.targetRef, ns.targetField, v);
      st.heap.volatileLocks.erase({ns.targetRef, ns.targetField});
      tt->body = rx.rebuild(lit(v));
      break;
    }
    case Rule::MonitorEnter: {
      acquire_flush(cx);
      LockState& m = st.heap.at(ns.targetRef).monitor;
      m.owner = thread;
      m.count = 1;
      Action a;
      a.kind = ActionKind::L;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::NestedMonitorEnter: {
      st.heap.at(ns.targetRef).monitor.count += 1;
      Action a;
      a.kind = ActionKind::L;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::MonitorExit: {
      release_flush(cx);
      LockState& m = st.heap.at(ns.targetRef).monitor;
      m.owner = kNullRef;
      m.count = 0;
      Action a;
      a.kind = ActionKind::U;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::NestedMonitorExit: {
      st.heap.at(ns.targetRef).monitor.count -= 1;
      Action a;
      a.kind = ActionKind::U;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::Finish: {
      release_flush(cx);
      st.heap.at(thread).object.lifecycle = Lifecycle::Finished;
      Action a;
      a.kind = ActionKind::Fi;
      a.target = Target::object(thread);
      push_action(cx, a);
      break;
    }
    case Rule::Join: {
      acquire_flush(cx);
      Action a;
      a.kind = ActionKind::J;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::Interrupt: {
      release_flush(cx);
      st.heap.at(ns.targetRef).object.lifecycle = Lifecycle::Interrupted;
      Action a;
      a.kind = ActionKind::Ir;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::InterruptedT: {
      acquire_flush(cx);
      Action a;
      a.kind = ActionKind::Ird;
      a.target = Target::object(ns.targetRef);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      break;
    }
    case Rule::InterruptedF:
      tt->body = rx.rebuild(unitE());
      break;
    case Rule::Spawn: {
      release_flush(cx);
      RefId child = ns.targetRef;
      st.heap.at(child).object.lifecycle = Lifecycle::Spawned;
      Action a;
      a.kind = ActionKind::Sp;
      a.target = Target::object(child);
      push_action(cx, a);
      tt->body = rx.rebuild(unitE());
      ThreadTerm childTerm;
      childTerm.core = spawnCore;
      childTerm.thread = child;
      childTerm.startMarker = true;
      st.threads.push_back(std::move(childTerm));  // invalidates tt
      res.spawned = true;
      res.spawnedThread = child;
      break;
    }
    default:
      throw std::logic_error("apply_step: unexpected rule");
  }
  return res;
}

StepResult apply_migrate(MachineState& st, RefId thread, CoreId dst,
                         std::uint64_t step, bool flushSource) {
  ThreadTerm* tt = st.find_thread(thread);
  if (!tt) throw std::logic_error("migrate: unknown thread");
  if (tt->core == dst) throw std::logic_error("migrate: same core");
  if (!st.buffer(dst).empty())
    throw std::logic_error("migrate: destination write buffer not empty");
  if (!st.cache(dst).entries.empty())
    throw std::logic_error("migrate: destination object cache not empty");

  StepResult res;
  res.programRule = Rule::Migrate;
  EmitCtx cx{st, res.actions, step, tt->core, thread, 0};
  if (flushSource)
    release_flush(cx);
  else if (!st.buffer(tt->core).empty())
    throw std::logic_error("migrate: source write buffer not empty");
  Action a;
  a.kind = ActionKind::M;
  a.target = Target::core_id(dst);
  push_action(cx, a);
  tt->core = dst;
  return res;
}

}  // namespace djc
