#include "gen.hpp"

#include <initializer_list>
#include <random>
#include <sstream>

namespace gen {
namespace {

struct FieldSpec {
  std::string name;
  bool isBool = false;
  bool isVolatile = false;
};

struct ClassSpec {
  std::string name;
  std::vector<FieldSpec> fields;
  bool hasInit = false;
  bool hasHelper = false;
  bool hasRun = false;
};

struct Recv {
  std::string txt;  // receiver expression text ("this", "w0", ...)
  const ClassSpec* spec = nullptr;
  bool startable = false;
  bool started = false;
  bool joined = false;
};

struct Scope {
  std::vector<std::string> nats;
  std::vector<std::string> bools;
  std::vector<Recv> recvs;
};

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : rng_(cfg.seed), budget_(cfg.maxExprs) {}

  std::string program() {
    int nWorkers = budget_ >= 24 ? pick({0, 1, 1, 1, 2, 2}) : 0;
    classes_.reserve(3);
    for (int i = 0; i < nWorkers; ++i) classes_.push_back(make_worker(i));
    if (nWorkers == 0) classes_.push_back(make_data());
    std::ostringstream out;
    for (const ClassSpec& c : classes_) emit_class(out, c);
    emit_main(out);
    return out.str();
  }

 private:
  // ---- randomness helpers ----
  int pick(std::initializer_list<int> xs) {
    std::uniform_int_distribution<std::size_t> d(0, xs.size() - 1);
    return *(xs.begin() + d(rng_));
  }
  int range(int lo, int hi) {  // inclusive
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng_);
  }
  bool chance(double p) {
    std::bernoulli_distribution d(p);
    return d(rng_);
  }
  bool spend(int cost) {
    if (budget_ < cost) return false;
    budget_ -= cost;
    return true;
  }

  // ---- class shapes ----
  ClassSpec make_worker(int i) {
    ClassSpec c;
    c.name = "W" + std::to_string(i);
    c.hasRun = true;
    int nFields = range(1, 3);
    for (int f = 0; f < nFields; ++f)
      c.fields.push_back({"f" + std::to_string(f), chance(0.25), false});
    if (chance(0.6)) c.fields.push_back({"v0", false, true});
    // init needs a non-bool first field to keep the emitted text simple
    c.hasInit = !c.fields[0].isBool && chance(0.3);
    c.hasHelper = chance(0.4);
    return c;
  }

  ClassSpec make_data() {
    ClassSpec c;
    c.name = "D0";
    int nFields = range(1, 3);
    for (int f = 0; f < nFields; ++f)
      c.fields.push_back({"f" + std::to_string(f), chance(0.25), false});
    return c;
  }

  // ---- atoms ----
  std::string nat_lit() { return std::to_string(range(0, 9)); }
  std::string nat_atom(const Scope& sc) {
    if (!sc.nats.empty() && chance(0.55))
      return sc.nats[static_cast<std::size_t>(range(
          0, static_cast<int>(sc.nats.size()) - 1))];
    return nat_lit();
  }
  std::string bool_atom(const Scope& sc) {
    if (!sc.bools.empty() && chance(0.6))
      return sc.bools[static_cast<std::size_t>(range(
          0, static_cast<int>(sc.bools.size()) - 1))];
    return chance(0.5) ? "true" : "false";
  }

  const Recv* any_recv(const Scope& sc) {
    if (sc.recvs.empty()) return nullptr;
    return &sc.recvs[static_cast<std::size_t>(
        range(0, static_cast<int>(sc.recvs.size()) - 1))];
  }
  const FieldSpec* field_of(const Recv* r, bool wantBool) {
    std::vector<const FieldSpec*> fs;
    for (const FieldSpec& f : r->spec->fields)
      if (f.isBool == wantBool) fs.push_back(&f);
    if (fs.empty()) return nullptr;
    return fs[static_cast<std::size_t>(range(0, static_cast<int>(fs.size()) - 1))];
  }

  std::string fresh(const char* stem, int& n) {
    return std::string(stem) + std::to_string(n++);
  }

  // ---- statements ----
  // Appends zero or more "let name : T = e in\n" lines to `out` and updates
  // the scope.  `allowSync` is false inside a critical section.
  void one_stmt(std::ostringstream& out, Scope& sc, const std::string& ind,
                bool isMain, bool allowSync) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      switch (range(0, 10)) {
        case 0: {  // read a Nat field
          const Recv* r = any_recv(sc);
          const FieldSpec* f = r ? field_of(r, false) : nullptr;
          if (!f || !spend(3)) break;
          std::string x = fresh("x", nx_);
          out << ind << "let " << x << " : Nat = " << r->txt << "." << f->name
              << " in\n";
          sc.nats.push_back(x);
          return;
        }
        case 1: {  // read a Bool field
          const Recv* r = any_recv(sc);
          const FieldSpec* f = r ? field_of(r, true) : nullptr;
          if (!f || !spend(3)) break;
          std::string b = fresh("b", nb_);
          out << ind << "let " << b << " : Bool = " << r->txt << "."
              << f->name << " in\n";
          sc.bools.push_back(b);
          return;
        }
        case 2: {  // write a Nat field
          const Recv* r = any_recv(sc);
          const FieldSpec* f = r ? field_of(r, false) : nullptr;
          if (!f || !spend(4)) break;
          std::string rhs = nat_atom(sc);
          if (!sc.nats.empty() && chance(0.4))
            rhs = nat_atom(sc) + (chance(0.5) ? ".succ()" : ".pred()");
          out << ind << "let " << fresh("u", nu_) << " : Nat = " << r->txt
              << "." << f->name << " := " << rhs << " in\n";
          return;
        }
        case 3: {  // write a Bool field
          const Recv* r = any_recv(sc);
          const FieldSpec* f = r ? field_of(r, true) : nullptr;
          if (!f || !spend(4)) break;
          out << ind << "let " << fresh("u", nu_) << " : Bool = " << r->txt
              << "." << f->name << " := " << bool_atom(sc) << " in\n";
          return;
        }
        case 4: {  // arithmetic
          if (!spend(3)) break;
          std::string x = fresh("x", nx_);
          out << ind << "let " << x << " : Nat = " << nat_atom(sc)
              << (chance(0.6) ? ".succ()" : ".pred()") << " in\n";
          sc.nats.push_back(x);
          return;
        }
        case 5: {  // equality test
          if (!spend(4)) break;
          std::string b = fresh("b", nb_);
          out << ind << "let " << b << " : Bool = " << nat_atom(sc) << ".eq("
              << nat_atom(sc) << ") in\n";
          sc.bools.push_back(b);
          return;
        }
        case 6: {  // conditional
          const Recv* r = any_recv(sc);
          const FieldSpec* f = r ? field_of(r, false) : nullptr;
          if (f && chance(0.5)) {
            if (!spend(7)) break;
            out << ind << "let " << fresh("u", nu_) << " : Nat = if "
                << bool_atom(sc) << " then " << r->txt << "." << f->name
                << " := " << nat_lit() << " else " << r->txt << "." << f->name
                << " := " << nat_lit() << " in\n";
          } else {
            if (!spend(5)) break;
            std::string x = fresh("x", nx_);
            out << ind << "let " << x << " : Nat = if " << bool_atom(sc)
                << " then " << nat_atom(sc) << " else " << nat_atom(sc)
                << " in\n";
            sc.nats.push_back(x);
          }
          return;
        }
        case 7: {  // critical section (never held across joins)
          if (!allowSync) break;
          const Recv* r = any_recv(sc);
          if (!r || !spend(8)) break;
          out << ind << "let " << fresh("u", nu_) << " : Unit = " << r->txt
              << ".monitorenter in\n";
          int inner = range(1, 2);
          for (int i = 0; i < inner; ++i)
            one_stmt(out, sc, ind, isMain, false);
          if (chance(0.2) && spend(4)) {  // reentrant same-monitor pair
            out << ind << "let " << fresh("u", nu_) << " : Unit = " << r->txt
                << ".monitorenter in\n";
            one_stmt(out, sc, ind, isMain, false);
            out << ind << "let " << fresh("u", nu_) << " : Unit = " << r->txt
                << ".monitorexit in\n";
          }
          out << ind << "let " << fresh("u", nu_) << " : Unit = " << r->txt
              << ".monitorexit in\n";
          return;
        }
        case 8: {  // call the helper method
          const Recv* r = any_recv(sc);
          if (!r || !r->spec->hasHelper || !spend(4)) break;
          std::string x = fresh("x", nx_);
          out << ind << "let " << x << " : Nat = " << r->txt << ".m0("
              << nat_atom(sc) << ") in\n";
          sc.nats.push_back(x);
          return;
        }
        case 9: {  // start / join a worker (main only, outside monitors)
          if (!isMain || !allowSync) break;
          Recv* cand = nullptr;
          bool wantStart = chance(0.5);
          for (Recv& rv : sc.recvs) {
            if (wantStart && rv.startable && !rv.started) cand = &rv;
            if (!wantStart && rv.started && !rv.joined) cand = &rv;
          }
          if (!cand || !spend(3)) break;
          if (wantStart) {
            out << ind << "let " << fresh("u", nu_) << " : Unit = "
                << cand->txt << ".start() in\n";
            cand->started = true;
          } else {
            out << ind << "let " << fresh("u", nu_) << " : Unit = "
                << cand->txt << ".join() in\n";
            cand->joined = true;
          }
          return;
        }
        case 10: {  // allocate an extra data object (never started)
          if (classes_.empty()) break;
          const ClassSpec& c = classes_[static_cast<std::size_t>(
              range(0, static_cast<int>(classes_.size()) - 1))];
          if (!spend(3 + static_cast<int>(c.fields.size()))) break;
          std::string d = fresh("d", nd_);
          out << ind << "let " << d << " : " << c.name << " = new " << c.name
              << "(" << ctor_args(c) << ") in\n";
          sc.recvs.push_back({d, &c, false, false, false});
          return;
        }
      }
    }
    if (spend(2)) {  // fallback keeps the loop productive
      std::string x = fresh("x", nx_);
      out << ind << "let " << x << " : Nat = " << nat_lit() << " in\n";
      sc.nats.push_back(x);
    }
  }

  std::string ctor_args(const ClassSpec& c) {
    std::string s;
    for (std::size_t i = 0; i < c.fields.size(); ++i) {
      if (i) s += ", ";
      s += c.fields[i].isBool ? (chance(0.5) ? "true" : "false") : nat_lit();
    }
    return s;
  }

  // ---- emission ----
  void emit_class(std::ostringstream& out, const ClassSpec& c) {
    out << "class " << c.name << " {\n";
    for (const FieldSpec& f : c.fields)
      out << "  " << (f.isVolatile ? "volatile " : "") << f.name << " : "
          << (f.isBool ? "Bool" : "Nat") << ";\n";
    if (c.hasInit)
      out << "  init = this." << c.fields[0].name << " := "
          << c.fields[0].name << ";\n";
    if (c.hasHelper) {
      std::string body = "a0";
      int ops = range(1, 2);
      for (int i = 0; i < ops; ++i)
        body += chance(0.7) ? ".succ()" : ".pred()";
      out << "  m0(a0 : Nat) : Nat = " << body << "\n";
    }
    if (c.hasRun) {
      out << "  run() : Unit =\n";
      Scope sc;
      sc.recvs.push_back({"this", &c, false, false, false});
      int n = range(3, 6);
      std::ostringstream body;
      for (int i = 0; i < n && budget_ >= 3; ++i)
        one_stmt(body, sc, "    ", false, true);
      out << body.str() << "    ()\n";
    }
    out << "}\n";
  }

  void emit_main(std::ostringstream& out) {
    out << "class Main {\n  run() : Unit =\n";
    Scope sc;
    std::ostringstream body;
    for (const ClassSpec& c : classes_) {
      if (!c.hasRun) continue;
      std::string w = fresh("w", nw_);
      body << "    let " << w << " : " << c.name << " = new " << c.name << "("
           << ctor_args(c) << ") in\n";
      sc.recvs.push_back({w, &c, true, false, false});
    }
    if (sc.recvs.empty() && !classes_.empty()) {
      const ClassSpec& c = classes_.front();
      std::string d = fresh("d", nd_);
      body << "    let " << d << " : " << c.name << " = new " << c.name << "("
           << ctor_args(c) << ") in\n";
      sc.recvs.push_back({d, &c, false, false, false});
    }
    int n = range(3, 8);
    for (int i = 0; i < n && budget_ >= 3; ++i)
      one_stmt(body, sc, "    ", true, true);
    for (Recv& rv : sc.recvs)
      if (rv.started && !rv.joined && chance(0.7)) {
        body << "    let " << fresh("u", nu_) << " : Unit = " << rv.txt
             << ".join() in\n";
        rv.joined = true;
      }
    out << body.str() << "    ()\n}\n";
  }

  std::mt19937_64 rng_;
  int budget_;
  std::vector<ClassSpec> classes_;
  int nx_ = 0, nb_ = 0, nu_ = 0, nd_ = 0, nw_ = 0;
};

}  // namespace

std::string random_program(const GenConfig& cfg) { return Gen(cfg).program(); }

std::string guarded_counter_program(int perThread) {
  std::ostringstream w;
  w << "class C { n0 : Nat; }\n";
  w << "class W {\n  tgt : C;\n  init = this.tgt := tgt;\n"
    << "  run() : Unit =\n    let c : C = this.tgt in\n";
  for (int i = 0; i < perThread; ++i) {
    w << "    let ua" << i << " : Unit = c.monitorenter in\n"
      << "    let xa" << i << " : Nat = c.n0 in\n"
      << "    let wa" << i << " : Nat = c.n0 := xa" << i << ".succ() in\n"
      << "    let ub" << i << " : Unit = c.monitorexit in\n";
  }
  w << "    ()\n}\n";
  w << "class Main {\n  run() : Unit =\n"
    << "    let c : C = new C(0) in\n"
    << "    let w0 : W = new W(c) in\n"
    << "    let w1 : W = new W(c) in\n"
    << "    let u0 : Unit = w0.start() in\n"
    << "    let u1 : Unit = w1.start() in\n"
    << "    let u2 : Unit = w0.join() in\n"
    << "    let u3 : Unit = w1.join() in\n"
    << "    let r0 : Nat = c.n0 in\n"
    << "    ()\n}\n";
  return w.str();
}

std::string crit_section_program(int writes) {
  std::ostringstream w;
  w << "class W {\n  a0 : Nat;\n  run() : Unit =\n"
    << "    let u0 : Unit = this.monitorenter in\n";
  for (int i = 0; i < writes; ++i)
    w << "    let x" << i << " : Nat = this.a0 := " << (i % 10) << " in\n";
  w << "    let u1 : Unit = this.monitorexit in\n    ()\n}\n";
  w << "class Main {\n  run() : Unit =\n"
    << "    let w : W = new W(0) in\n"
    << "    let u0 : Unit = w.start() in\n"
    << "    let u1 : Unit = w.join() in\n"
    << "    ()\n}\n";
  return w.str();
}

std::string many_threads_program(int threads) {
  std::ostringstream w;
  w << "class T { run() : Unit = () }\n";
  w << "class Main {\n  run() : Unit =\n";
  for (int i = 0; i + 1 < threads; ++i)
    w << "    let t" << i << " : T = new T() in\n"
      << "    let u" << i << " : Unit = t" << i << ".start() in\n";
  w << "    ()\n}\n";
  return w.str();
}

const std::vector<std::string>& drf_corpus() {
  static const std::vector<std::string> corpus = {
      // 1: single-threaded arithmetic on a data object
      R"(class D { x : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let u0 : Nat = d.x := 3 in
    let a : Nat = d.x in
    let u1 : Nat = d.x := a.succ() in
    ()
})",
      // 2: join handoff, worker publishes through its own field
      R"(class W {
  out : Nat;
  run() : Unit = let u : Nat = this.out := 7 in ()
}
class Main {
  run() : Unit =
    let w : W = new W(0) in
    let u0 : Unit = w.start() in
    let u1 : Unit = w.join() in
    let r : Nat = w.out in
    let u2 : Nat = w.out := r.succ() in
    ()
})",
      // 3: monitor-guarded shared counter, two threads
      R"(class C { n : Nat; }
class W {
  tgt : C;
  init = this.tgt := tgt;
  run() : Unit =
    let c : C = this.tgt in
    let u0 : Unit = c.monitorenter in
    let a : Nat = c.n in
    let u1 : Nat = c.n := a.succ() in
    let u2 : Unit = c.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let c : C = new C(0) in
    let w : W = new W(c) in
    let u1 : Unit = w.start() in
    let u2 : Unit = c.monitorenter in
    let a : Nat = c.n in
    let u3 : Nat = c.n := a.succ() in
    let u4 : Unit = c.monitorexit in
    let u5 : Unit = w.join() in
    let r : Nat = c.n in
    ()
})",
      // 4: volatile-flag publication; branch outcome recorded in a field
      R"(class W {
  data : Nat;
  got : Nat;
  volatile flag : Nat;
  run() : Unit =
    let u0 : Nat = this.data := 4 in
    let u1 : Nat = this.flag := 1 in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0, 0, 0) in
    let u0 : Unit = w.start() in
    let f : Nat = w.flag in
    let b : Bool = f.eq(1) in
    let u1 : Unit = if b then
        let d : Nat = w.data in
        let u2 : Nat = w.got := d in
        ()
      else () in
    let u3 : Unit = w.join() in
    ()
})",
      // 5: volatile read-modify-write from two threads (racy-free, lossy)
      R"(class W {
  volatile v : Nat;
  run() : Unit =
    let a : Nat = this.v in
    let u : Nat = this.v := a.succ() in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0) in
    let u0 : Unit = w.start() in
    let a : Nat = w.v in
    let u1 : Nat = w.v := a.succ() in
    let u2 : Unit = w.join() in
    ()
})",
      // 6: monitor-ordered message; main echoes what it saw
      R"(class W {
  m : Nat;
  echo : Nat;
  run() : Unit =
    let u0 : Unit = this.monitorenter in
    let u1 : Nat = this.m := 5 in
    let u2 : Unit = this.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0, 0) in
    let u0 : Unit = w.start() in
    let u1 : Unit = w.monitorenter in
    let a : Nat = w.m in
    let u2 : Unit = w.monitorexit in
    let u3 : Nat = w.echo := a in
    let u4 : Unit = w.join() in
    ()
})",
      // 7: two workers with disjoint state
      R"(class W {
  out : Nat;
  run() : Unit =
    let a : Nat = this.out in
    let u : Nat = this.out := a.succ() in
    ()
}
class Main {
  run() : Unit =
    let w0 : W = new W(0) in
    let w1 : W = new W(0) in
    let u0 : Unit = w0.start() in
    let u1 : Unit = w1.start() in
    let u2 : Unit = w0.join() in
    let u3 : Unit = w1.join() in
    let a : Nat = w0.out in
    let b : Nat = w1.out in
    ()
})",
      // 8: pre-start initialization is visible to the worker
      R"(class W {
  inp : Nat;
  out : Nat;
  run() : Unit =
    let a : Nat = this.inp in
    let u : Nat = this.out := a.succ() in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0, 0) in
    let u0 : Nat = w.inp := 9 in
    let u1 : Unit = w.start() in
    let u2 : Unit = w.join() in
    let r : Nat = w.out in
    ()
})",
      // 9: reentrant locking
      R"(class W {
  c : Nat;
  run() : Unit =
    let u0 : Unit = this.monitorenter in
    let u1 : Unit = this.monitorenter in
    let u2 : Nat = this.c := 1 in
    let u3 : Unit = this.monitorexit in
    let u4 : Unit = this.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0) in
    let u0 : Unit = w.start() in
    let u1 : Unit = w.join() in
    let r : Nat = w.c in
    ()
})",
      // 10: allocation with an initializer expression
      R"(class D {
  a : Nat;
  b : Nat;
  init = let u : Nat = this.a := a in this.b := b;
}
class Main {
  run() : Unit =
    let d : D = new D(4, 5) in
    let x : Nat = d.a in
    let y : Nat = d.b in
    let u2 : Nat = d.a := y in
    ()
})",
      // 11: helper method
      R"(class D {
  x : Nat;
  m(k : Nat) : Nat = k.succ().succ()
}
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let r : Nat = d.m(3) in
    let u : Nat = d.x := r in
    ()
})",
      // 12: predecessor floors at zero
      R"(class D { x : Nat; y : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0, 0) in
    let a : Nat = d.x in
    let b : Nat = a.pred() in
    let u0 : Nat = d.x := b in
    let c : Nat = 3 in
    let e : Nat = c.pred() in
    let u1 : Nat = d.y := e in
    ()
})",
      // 13: booleans and branching
      R"(class D { p : Bool; r : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(false, 0) in
    let u0 : Bool = d.p := true in
    let c : Bool = d.p in
    let u1 : Unit = if c then
        let q : Nat = d.r := 1 in ()
      else () in
    ()
})",
      // 14: equality-driven branch
      R"(class D { x : Nat; y : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0, 0) in
    let u0 : Nat = d.x := 3 in
    let a : Nat = d.x in
    let c : Bool = a.eq(3) in
    let u1 : Nat = if c then d.y := 1 else d.y := 2 in
    ()
})",
      // 15: three threads with private state, joined in order
      R"(class W {
  out : Nat;
  run() : Unit =
    let a : Nat = this.out in
    let u : Nat = this.out := a.succ() in
    ()
}
class D { s0 : Nat; s1 : Nat; }
class Main {
  run() : Unit =
    let w0 : W = new W(3) in
    let w1 : W = new W(5) in
    let d : D = new D(0, 0) in
    let u0 : Unit = w0.start() in
    let u1 : Unit = w1.start() in
    let u2 : Unit = w0.join() in
    let u3 : Unit = w1.join() in
    let a : Nat = w0.out in
    let b : Nat = w1.out in
    let u4 : Nat = d.s0 := a in
    let u5 : Nat = d.s1 := b in
    ()
})",
      // 16: three threads contending on one monitor
      R"(class C { n : Nat; }
class W {
  tgt : C;
  init = this.tgt := tgt;
  run() : Unit =
    let c : C = this.tgt in
    let u0 : Unit = c.monitorenter in
    let a : Nat = c.n in
    let u1 : Nat = c.n := a.succ() in
    let u2 : Unit = c.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let c : C = new C(0) in
    let w0 : W = new W(c) in
    let w1 : W = new W(c) in
    let u0 : Unit = w0.start() in
    let u1 : Unit = w1.start() in
    let u2 : Unit = c.monitorenter in
    let a : Nat = c.n in
    let u3 : Nat = c.n := a.succ() in
    let u4 : Unit = c.monitorexit in
    let u5 : Unit = w0.join() in
    let u6 : Unit = w1.join() in
    let r : Nat = c.n in
    ()
})",
      // 17: store-buffering shape on volatiles (no weak outcome expected)
      R"(class W {
  volatile ping : Nat;
  volatile ack : Nat;
  seen : Nat;
  echo : Nat;
  run() : Unit =
    let u0 : Nat = this.ping := 1 in
    let a : Nat = this.ack in
    let u1 : Nat = this.seen := a in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0, 0, 0, 0) in
    let u0 : Unit = w.start() in
    let u1 : Nat = w.ack := 1 in
    let p : Nat = w.ping in
    let u2 : Nat = w.echo := p in
    let u3 : Unit = w.join() in
    ()
})",
      // 18: class-typed field handoff before start
      R"(class D { x : Nat; }
class W {
  d : D;
  run() : Unit =
    let t : D = this.d in
    let u : Nat = t.x := 8 in
    ()
}
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let w : W = new W(d) in
    let u0 : D = w.d := d in
    let u1 : Unit = w.start() in
    let u2 : Unit = w.join() in
    let r : Nat = d.x in
    let u3 : Nat = d.x := r.succ() in
    ()
})",
      // 19: two critical sections on different monitors, one thread
      R"(class D { x : Nat; }
class Main {
  run() : Unit =
    let a : D = new D(0) in
    let b : D = new D(0) in
    let u0 : Unit = a.monitorenter in
    let u1 : Nat = a.x := 1 in
    let u2 : Unit = a.monitorexit in
    let u3 : Unit = b.monitorenter in
    let u4 : Nat = b.x := 2 in
    let u5 : Unit = b.monitorexit in
    ()
})",
      // 20: same monitor, disjoint fields
      R"(class W {
  p : Nat;
  q : Nat;
  run() : Unit =
    let u0 : Unit = this.monitorenter in
    let u1 : Nat = this.p := 1 in
    let u2 : Unit = this.monitorexit in
    ()
}
class Main {
  run() : Unit =
    let w : W = new W(0, 0) in
    let u0 : Unit = w.start() in
    let u1 : Unit = w.monitorenter in
    let u2 : Nat = w.q := 2 in
    let u3 : Unit = w.monitorexit in
    let u4 : Unit = w.join() in
    let a : Nat = w.p in
    let b : Nat = w.q in
    ()
})",
      // 21: joining the same worker twice is harmless
      R"(class W {
  out : Nat;
  run() : Unit = let u : Nat = this.out := 2 in ()
}
class Main {
  run() : Unit =
    let w : W = new W(0) in
    let u0 : Unit = w.start() in
    let u1 : Unit = w.join() in
    let u2 : Unit = w.join() in
    let r : Nat = w.out in
    ()
})",
      // 22: deep let nesting, one thread
      R"(class D { x : Nat; }
class Main {
  run() : Unit =
    let d : D = new D(0) in
    let a : Nat = 1 in
    let b : Nat = a.succ() in
    let c : Nat = b.succ() in
    let e : Nat = c.pred() in
    let f : Bool = e.eq(2) in
    let u : Nat = if f then d.x := e else d.x := 0 in
    let g : Nat = d.x in
    let u2 : Nat = d.x := g.succ() in
    ()
})",
  };
  static std::vector<std::string> all = [] {
    std::vector<std::string> v = corpus;
    v.push_back(guarded_counter_program(3));  // 23: small guarded counter
    return v;
  }();
  return all;
}

}  // namespace gen
