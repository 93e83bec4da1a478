#include "djc/ast.hpp"

namespace djc {

bool expr_equal(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  if (x.name != y.name) return false;
  if (x.kind == Expr::Kind::Lit && !(x.val == y.val)) return false;
  if (x.kind == Expr::Kind::Let && x.type != y.type) return false;
  auto sub_eq = [](const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return expr_equal(*a, *b);
  };
  if (!sub_eq(x.a, y.a) || !sub_eq(x.b, y.b) || !sub_eq(x.c, y.c)) return false;
  if (x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!expr_equal(*x.args[i], *y.args[i])) return false;
  return true;
}

bool program_equal(const Program& x, const Program& y) {
  if (x.classes.size() != y.classes.size()) return false;
  for (std::size_t i = 0; i < x.classes.size(); ++i) {
    const ClassDef& a = x.classes[i];
    const ClassDef& b = y.classes[i];
    if (a.name != b.name) return false;
    if (a.fields.size() != b.fields.size()) return false;
    for (std::size_t j = 0; j < a.fields.size(); ++j) {
      if (a.fields[j].name != b.fields[j].name) return false;
      if (a.fields[j].type != b.fields[j].type) return false;
      if (a.fields[j].isVolatile != b.fields[j].isVolatile) return false;
    }
    if (static_cast<bool>(a.init) != static_cast<bool>(b.init)) return false;
    if (a.init && !expr_equal(*a.init, *b.init)) return false;
    if (a.methods.size() != b.methods.size()) return false;
    for (std::size_t j = 0; j < a.methods.size(); ++j) {
      const MethodDef& ma = a.methods[j];
      const MethodDef& mb = b.methods[j];
      if (ma.name != mb.name || ma.ret != mb.ret || ma.params != mb.params)
        return false;
      if (!expr_equal(*ma.body, *mb.body)) return false;
    }
  }
  return true;
}

namespace {
inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  h *= 1099511628211ull;  // FNV-1a prime
  return h;
}
inline std::uint64_t mix_str(std::uint64_t h, const std::string& s) {
  for (char c : s) h = mix(h, static_cast<unsigned char>(c));
  return mix(h, 0x1fu);
}
}  // namespace

std::uint64_t expr_hash(const Expr& e, std::uint64_t seed) {
  std::uint64_t h = mix(seed, static_cast<std::uint64_t>(e.kind));
  h = mix_str(h, e.name);
  if (e.kind == Expr::Kind::Lit) {
    h = mix(h, static_cast<std::uint64_t>(e.val.kind));
    h = mix(h, e.val.bits);
  }
  if (e.kind == Expr::Kind::Let) h = mix_str(h, e.type.name());
  if (e.a) h = expr_hash(*e.a, mix(h, 2));
  if (e.b) h = expr_hash(*e.b, mix(h, 3));
  if (e.c) h = expr_hash(*e.c, mix(h, 4));
  for (const auto& a : e.args) h = expr_hash(*a, mix(h, 5));
  return h;
}

}  // namespace djc
