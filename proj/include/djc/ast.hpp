#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "djc/value.hpp"

namespace djc {

/// Static type annotation: Unit, Bool, Nat, or a class name.
struct TypeTag {
  enum class Kind : std::uint8_t { Unit, Bool, Nat, Class };

  Kind kind = Kind::Unit;
  std::string cls;  // set only when kind == Class

  static TypeTag unitT() { return {Kind::Unit, {}}; }
  static TypeTag boolT() { return {Kind::Bool, {}}; }
  static TypeTag natT() { return {Kind::Nat, {}}; }
  static TypeTag classT(std::string name) { return {Kind::Class, std::move(name)}; }

  std::string name() const {
    switch (kind) {
      case Kind::Unit: return "Unit";
      case Kind::Bool: return "Bool";
      case Kind::Nat: return "Nat";
      case Kind::Class: return cls;
    }
    return "Unit";
  }

  friend bool operator==(const TypeTag& a, const TypeTag& b) {
    return a.kind == b.kind && a.cls == b.cls;
  }
  friend bool operator!=(const TypeTag& a, const TypeTag& b) { return !(a == b); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression node. Immutable after construction; subtrees are shared
/// freely across terms (substitution rebuilds only the spine it touches).
struct Expr {
  enum class Kind : std::uint8_t {
    Lit,       // val
    Var,       // name
    Let,       // name, type, a = bound, b = body
    If,        // a = cond, b = then, c = else
    New,       // name = class, args
    Get,       // a = receiver, name = field
    Set,       // a = receiver, name = field, b = rhs
    Call,      // a = receiver, name = method, args
    MonEnter,  // a = receiver
    MonExit,   // a = receiver
  };

  Kind kind = Kind::Lit;
  Value val{};
  std::string name;
  TypeTag type{};
  ExprPtr a, b, c;
  std::vector<ExprPtr> args;
  int line = 0, col = 0;
};

inline ExprPtr lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Lit;
  e->val = v;
  return e;
}
inline ExprPtr unitE() { return lit(Value::unit()); }
inline ExprPtr var(std::string n) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(n);
  return e;
}
inline ExprPtr elet(std::string n, TypeTag t, ExprPtr bound, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Let;
  e->name = std::move(n);
  e->type = std::move(t);
  e->a = std::move(bound);
  e->b = std::move(body);
  return e;
}
inline ExprPtr eif(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::If;
  e->a = std::move(c);
  e->b = std::move(t);
  e->c = std::move(f);
  return e;
}
inline ExprPtr enew(std::string cls, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::New;
  e->name = std::move(cls);
  e->args = std::move(args);
  return e;
}
inline ExprPtr eget(ExprPtr recv, std::string field) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Get;
  e->name = std::move(field);
  e->a = std::move(recv);
  return e;
}
inline ExprPtr eset(ExprPtr recv, std::string field, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Set;
  e->name = std::move(field);
  e->a = std::move(recv);
  e->b = std::move(rhs);
  return e;
}
inline ExprPtr ecall(ExprPtr recv, std::string method, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = std::move(method);
  e->a = std::move(recv);
  e->args = std::move(args);
  return e;
}
inline ExprPtr emonenter(ExprPtr recv) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::MonEnter;
  e->a = std::move(recv);
  return e;
}
inline ExprPtr emonexit(ExprPtr recv) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::MonExit;
  e->a = std::move(recv);
  return e;
}

struct FieldDecl {
  std::string name;
  TypeTag type;
  bool isVolatile = false;
  int line = 0, col = 0;
};

struct MethodDef {
  std::string name;
  std::vector<std::pair<std::string, TypeTag>> params;
  TypeTag ret;
  ExprPtr body;
  int line = 0, col = 0;
};

struct ClassDef {
  std::string name;
  std::vector<FieldDecl> fields;
  ExprPtr init;  // null when the class declares no constructor body
  std::vector<MethodDef> methods;
  int line = 0, col = 0;

  const MethodDef* find_method(const std::string& m) const {
    for (const auto& md : methods)
      if (md.name == m) return &md;
    return nullptr;
  }
  const FieldDecl* find_field(const std::string& f) const {
    for (const auto& fd : fields)
      if (fd.name == f) return &fd;
    return nullptr;
  }
  int field_index(const std::string& f) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == f) return static_cast<int>(i);
    return -1;
  }
  bool declares_run() const { return find_method("run") != nullptr; }
};

struct Program {
  std::vector<ClassDef> classes;

  const ClassDef* find_class(const std::string& c) const {
    for (const auto& cd : classes)
      if (cd.name == c) return &cd;
    return nullptr;
  }
};

/// Structural equality ignoring source positions.
bool expr_equal(const Expr& x, const Expr& y);
bool program_equal(const Program& x, const Program& y);

/// Structural hash consistent with expr_equal. Used for state dedup.
std::uint64_t expr_hash(const Expr& e, std::uint64_t seed = 1469598103934665603ull);

}  // namespace djc
