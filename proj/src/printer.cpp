#include "djc/printer.hpp"

#include <sstream>
#include <stdexcept>

namespace djc {
namespace {

bool is_postfix_shape(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Lit:
    case Expr::Kind::Var:
    case Expr::Kind::New:
    case Expr::Kind::Get:
    case Expr::Kind::Set:
    case Expr::Kind::Call:
    case Expr::Kind::MonEnter:
    case Expr::Kind::MonExit:
      return true;
    case Expr::Kind::Let:
    case Expr::Kind::If:
      return false;
  }
  return false;
}

void print_rec(const Expr& e, std::ostringstream& out) {
  switch (e.kind) {
    case Expr::Kind::Lit:
      out << to_string(e.val);
      return;
    case Expr::Kind::Var:
      out << e.name;
      return;
    case Expr::Kind::Let:
      out << "let " << e.name << ": " << e.type.name() << " = ";
      print_rec(*e.a, out);
      out << " in ";
      print_rec(*e.b, out);
      return;
    case Expr::Kind::If:
      out << "if ";
      print_rec(*e.a, out);
      out << " then ";
      print_rec(*e.b, out);
      out << " else ";
      print_rec(*e.c, out);
      return;
    case Expr::Kind::New: {
      out << "new " << e.name << "(";
      bool first = true;
      for (const auto& a : e.args) {
        if (!first) out << ", ";
        first = false;
        print_rec(*a, out);
      }
      out << ")";
      return;
    }
    case Expr::Kind::Get:
      if (!is_postfix_shape(*e.a))
        throw std::runtime_error("unprintable term: field access on let/if");
      print_rec(*e.a, out);
      out << "." << e.name;
      return;
    case Expr::Kind::Set:
      if (!is_postfix_shape(*e.a))
        throw std::runtime_error("unprintable term: field set on let/if");
      print_rec(*e.a, out);
      out << "." << e.name << " := ";
      print_rec(*e.b, out);
      return;
    case Expr::Kind::Call: {
      if (!is_postfix_shape(*e.a))
        throw std::runtime_error("unprintable term: call on let/if");
      print_rec(*e.a, out);
      out << "." << e.name << "(";
      bool first = true;
      for (const auto& a : e.args) {
        if (!first) out << ", ";
        first = false;
        print_rec(*a, out);
      }
      out << ")";
      return;
    }
    case Expr::Kind::MonEnter:
      if (!is_postfix_shape(*e.a))
        throw std::runtime_error("unprintable term: monitorenter on let/if");
      print_rec(*e.a, out);
      out << ".monitorenter";
      return;
    case Expr::Kind::MonExit:
      if (!is_postfix_shape(*e.a))
        throw std::runtime_error("unprintable term: monitorexit on let/if");
      print_rec(*e.a, out);
      out << ".monitorexit";
      return;
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  print_rec(e, out);
  return out.str();
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  for (const auto& cd : p.classes) {
    out << "class " << cd.name << " {\n";
    for (const auto& fd : cd.fields) {
      out << "  ";
      if (fd.isVolatile) out << "volatile ";
      out << fd.name << ": " << fd.type.name() << ";\n";
    }
    if (cd.init) out << "  init = " << print_expr(*cd.init) << ";\n";
    for (const auto& md : cd.methods) {
      out << "  " << md.name << "(";
      bool first = true;
      for (const auto& [pn, pt] : md.params) {
        if (!first) out << ", ";
        first = false;
        out << pn << ": " << pt.name();
      }
      out << "): " << md.ret.name() << " = " << print_expr(*md.body) << "\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace djc
