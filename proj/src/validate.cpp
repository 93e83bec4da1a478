#include "djc/validate.hpp"

#include <set>

namespace djc {
namespace {

struct Ctx {
  const Program& p;
  ValidationReport& report;

  void issue(std::string msg, int line, int col) {
    report.push_back({std::move(msg), line, col});
  }

  void check_type(const TypeTag& t, int line, int col) {
    if (t.kind == TypeTag::Kind::Class && !p.find_class(t.cls))
      issue("unresolved class '" + t.cls + "'", line, col);
  }

  // Scope-checks variable uses and resolves what is statically resolvable:
  // class names in `new`, plus arity of `new` against the class fields.
  // Receiver-dependent member resolution (fields, methods) is dynamic in the
  // calculus; validation flags only statically impossible programs.
  void check_expr(const Expr& e, std::set<std::string>& scope) {
    switch (e.kind) {
      case Expr::Kind::Lit:
        if (e.val.isRef() && e.val.asRef() != kNullRef)
          issue("reference literal in source program", e.line, e.col);
        return;
      case Expr::Kind::Var:
        if (!scope.count(e.name))
          issue("unbound variable '" + e.name + "'", e.line, e.col);
        return;
      case Expr::Kind::Let: {
        check_expr(*e.a, scope);
        check_type(e.type, e.line, e.col);
        bool fresh = scope.insert(e.name).second;
        check_expr(*e.b, scope);
        if (fresh) scope.erase(e.name);
        return;
      }
      case Expr::Kind::If:
        check_expr(*e.a, scope);
        check_expr(*e.b, scope);
        check_expr(*e.c, scope);
        return;
      case Expr::Kind::New: {
        const ClassDef* cd = p.find_class(e.name);
        if (!cd) {
          issue("unresolved class '" + e.name + "'", e.line, e.col);
        } else if (e.args.size() != cd->fields.size()) {
          issue("new " + e.name + " takes " + std::to_string(cd->fields.size()) +
                    " argument(s) (one per field), got " +
                    std::to_string(e.args.size()),
                e.line, e.col);
        }
        for (const auto& a : e.args) check_expr(*a, scope);
        return;
      }
      case Expr::Kind::Get:
      case Expr::Kind::MonEnter:
      case Expr::Kind::MonExit:
        check_expr(*e.a, scope);
        return;
      case Expr::Kind::Set:
        check_expr(*e.a, scope);
        check_expr(*e.b, scope);
        return;
      case Expr::Kind::Call:
        check_expr(*e.a, scope);
        for (const auto& a : e.args) check_expr(*a, scope);
        return;
    }
  }
};

}  // namespace

ValidationReport validate_program(const Program& p) {
  ValidationReport report;
  Ctx ctx{p, report};

  std::set<std::string> classNames;
  for (const auto& cd : p.classes) {
    if (!classNames.insert(cd.name).second)
      ctx.issue("duplicate class '" + cd.name + "'", cd.line, cd.col);

    std::set<std::string> fieldNames;
    for (const auto& fd : cd.fields) {
      if (!fieldNames.insert(fd.name).second)
        ctx.issue("duplicate field '" + fd.name + "' in class " + cd.name,
                  fd.line, fd.col);
      ctx.check_type(fd.type, fd.line, fd.col);
    }

    std::set<std::string> methodNames;
    for (const auto& md : cd.methods) {
      if (!methodNames.insert(md.name).second)
        ctx.issue("overloading not supported: duplicate method '" + md.name +
                      "' in class " + cd.name,
                  md.line, md.col);
      std::set<std::string> paramNames;
      for (const auto& [pn, pt] : md.params) {
        if (!paramNames.insert(pn).second)
          ctx.issue("duplicate parameter '" + pn + "' in " + cd.name + "." +
                        md.name,
                    md.line, md.col);
        ctx.check_type(pt, md.line, md.col);
      }
      ctx.check_type(md.ret, md.line, md.col);

      std::set<std::string> scope = paramNames;
      scope.insert("this");
      ctx.check_expr(*md.body, scope);
    }

    if (cd.init) {
      // The constructor body sees `this` and one name per declared field
      // (rule New substitutes the new-arguments for the field names).
      std::set<std::string> scope;
      scope.insert("this");
      for (const auto& fd : cd.fields) scope.insert(fd.name);
      ctx.check_expr(*cd.init, scope);
    }
  }

  const ClassDef* mainCls = p.find_class("Main");
  if (!mainCls) {
    ctx.issue("entry class 'Main' is not defined", 0, 0);
  } else {
    const MethodDef* run = mainCls->find_method("run");
    if (!run)
      ctx.issue("class Main must declare a run() method", mainCls->line,
                mainCls->col);
    else if (!run->params.empty())
      ctx.issue("Main.run() must take no parameters", run->line, run->col);
    if (!mainCls->fields.empty())
      ctx.issue("class Main must declare no fields (it is constructed "
                "argument-free at boot)",
                mainCls->line, mainCls->col);
    if (mainCls->init)
      ctx.issue("class Main must not declare a constructor body", mainCls->line,
                mainCls->col);
  }

  return report;
}

const MethodDef* lookup_method(const Program& p, const std::string& cls,
                               const std::string& method) {
  const ClassDef* cd = p.find_class(cls);
  if (!cd) return nullptr;
  return cd->find_method(method);
}

}  // namespace djc
