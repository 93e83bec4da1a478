#include "djc/subst.hpp"

namespace djc {
namespace {

ExprPtr subst_rec(const ExprPtr& e, const std::map<std::string, Value>& bind) {
  switch (e->kind) {
    case Expr::Kind::Lit:
      return e;
    case Expr::Kind::Var: {
      auto it = bind.find(e->name);
      if (it == bind.end()) return e;
      return lit(it->second);
    }
    case Expr::Kind::Let: {
      ExprPtr bound = subst_rec(e->a, bind);
      ExprPtr body;
      if (bind.count(e->name)) {
        // The binder shadows: substitute the body without that name.
        std::map<std::string, Value> inner = bind;
        inner.erase(e->name);
        body = inner.empty() ? e->b : subst_rec(e->b, inner);
      } else {
        body = subst_rec(e->b, bind);
      }
      if (bound == e->a && body == e->b) return e;
      return elet(e->name, e->type, std::move(bound), std::move(body));
    }
    case Expr::Kind::If: {
      ExprPtr c = subst_rec(e->a, bind);
      ExprPtr t = subst_rec(e->b, bind);
      ExprPtr f = subst_rec(e->c, bind);
      if (c == e->a && t == e->b && f == e->c) return e;
      return eif(std::move(c), std::move(t), std::move(f));
    }
    case Expr::Kind::New: {
      std::vector<ExprPtr> as;
      as.reserve(e->args.size());
      bool changed = false;
      for (const auto& a : e->args) {
        as.push_back(subst_rec(a, bind));
        changed = changed || as.back() != a;
      }
      if (!changed) return e;
      return enew(e->name, std::move(as));
    }
    case Expr::Kind::Get: {
      ExprPtr r = subst_rec(e->a, bind);
      if (r == e->a) return e;
      return eget(std::move(r), e->name);
    }
    case Expr::Kind::Set: {
      ExprPtr r = subst_rec(e->a, bind);
      ExprPtr v = subst_rec(e->b, bind);
      if (r == e->a && v == e->b) return e;
      return eset(std::move(r), e->name, std::move(v));
    }
    case Expr::Kind::Call: {
      ExprPtr r = subst_rec(e->a, bind);
      std::vector<ExprPtr> as;
      as.reserve(e->args.size());
      bool changed = r != e->a;
      for (const auto& a : e->args) {
        as.push_back(subst_rec(a, bind));
        changed = changed || as.back() != a;
      }
      if (!changed) return e;
      return ecall(std::move(r), e->name, std::move(as));
    }
    case Expr::Kind::MonEnter: {
      ExprPtr r = subst_rec(e->a, bind);
      if (r == e->a) return e;
      return emonenter(std::move(r));
    }
    case Expr::Kind::MonExit: {
      ExprPtr r = subst_rec(e->a, bind);
      if (r == e->a) return e;
      return emonexit(std::move(r));
    }
  }
  return e;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, Value>& bind) {
  if (bind.empty()) return e;
  return subst_rec(e, bind);
}

}  // namespace djc
