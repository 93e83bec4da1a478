#include "djc/parser.hpp"

#include <cctype>
#include <cstdint>
#include <utility>

namespace djc {
namespace {

enum class Tok : std::uint8_t {
  Ident, Nat, LBrace, RBrace, LParen, RParen,
  Colon, Semi, Comma, Dot, Assign, Eq, End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t nat = 0;
  int line = 1, col = 1;
};

bool is_reserved(const std::string& s) {
  return s == "class" || s == "init" || s == "volatile" || s == "let" ||
         s == "in" || s == "if" || s == "then" || s == "else" || s == "new" ||
         s == "true" || s == "false" || s == "this" || s == "monitorenter" ||
         s == "monitorexit";
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : src_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_trivia();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        bump();
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t n = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        n = n * 10 + static_cast<std::uint64_t>(src_[pos_] - '0');
        bump();
      }
      tok_.kind = Tok::Nat;
      tok_.nat = n;
      return;
    }
    switch (c) {
      case '{': tok_.kind = Tok::LBrace; bump(); return;
      case '}': tok_.kind = Tok::RBrace; bump(); return;
      case '(': tok_.kind = Tok::LParen; bump(); return;
      case ')': tok_.kind = Tok::RParen; bump(); return;
      case ';': tok_.kind = Tok::Semi; bump(); return;
      case ',': tok_.kind = Tok::Comma; bump(); return;
      case '.': tok_.kind = Tok::Dot; bump(); return;
      case '=': tok_.kind = Tok::Eq; bump(); return;
      case ':':
        bump();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          tok_.kind = Tok::Assign;
          bump();
        } else {
          tok_.kind = Tok::Colon;
        }
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }

  void skip_trivia() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Program program() {
    Program p;
    while (lex_.peek().kind != Tok::End) p.classes.push_back(class_def());
    return p;
  }

  ExprPtr expr_only() {
    ExprPtr e = expr();
    expect(Tok::End, "end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw ParseError(msg, t.line, t.col);
  }

  Token expect(Tok k, const char* what) {
    if (lex_.peek().kind != k) fail(std::string("expected ") + what);
    return lex_.next();
  }

  Token expect_name(const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident) fail(std::string("expected ") + what);
    if (is_reserved(t.text))
      fail("reserved word '" + t.text + "' cannot be used as " + what);
    return lex_.next();
  }

  bool at_keyword(const char* kw) const {
    const Token& t = lex_.peek();
    return t.kind == Tok::Ident && t.text == kw;
  }

  Token keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("expected '") + kw + "'");
    return lex_.next();
  }

  ClassDef class_def() {
    ClassDef cd;
    Token k = keyword("class");
    cd.line = k.line;
    cd.col = k.col;
    cd.name = expect_name("class name").text;
    expect(Tok::LBrace, "'{'");
    // Field declarations: ("volatile")? NAME ":" type ";"
    bool sawMethod = false;
    for (;;) {
      if (at_keyword("volatile")) {
        lex_.next();
        FieldDecl fd = field_decl(true);
        cd.fields.push_back(std::move(fd));
        continue;
      }
      if (lex_.peek().kind == Tok::Ident && !is_reserved(lex_.peek().text)) {
        // NAME ":" -> field, NAME "(" -> method (handled below).
        Token name = lex_.next();
        if (lex_.peek().kind == Tok::Colon) {
          lex_.next();
          FieldDecl fd;
          fd.line = name.line;
          fd.col = name.col;
          fd.name = name.text;
          fd.type = type_tag();
          expect(Tok::Semi, "';'");
          cd.fields.push_back(std::move(fd));
          continue;
        }
        if (lex_.peek().kind == Tok::LParen) {
          cd.methods.push_back(method_def(std::move(name)));
          sawMethod = true;
          break;  // remaining members can only be methods
        }
        fail("expected ':' (field) or '(' (method) after member name");
      }
      break;
    }
    if (at_keyword("init")) {
      if (sawMethod) fail("'init' must precede method definitions");
      lex_.next();
      expect(Tok::Eq, "'='");
      cd.init = expr();
      expect(Tok::Semi, "';'");
    }
    while (lex_.peek().kind == Tok::Ident && !is_reserved(lex_.peek().text)) {
      Token name = lex_.next();
      if (lex_.peek().kind != Tok::LParen) fail("expected '(' to begin method");
      cd.methods.push_back(method_def(std::move(name)));
    }
    expect(Tok::RBrace, "'}'");
    return cd;
  }

  FieldDecl field_decl(bool vol) {
    FieldDecl fd;
    Token name = expect_name("field name");
    fd.line = name.line;
    fd.col = name.col;
    fd.name = name.text;
    fd.isVolatile = vol;
    expect(Tok::Colon, "':'");
    fd.type = type_tag();
    expect(Tok::Semi, "';'");
    return fd;
  }

  MethodDef method_def(Token name) {
    MethodDef md;
    md.line = name.line;
    md.col = name.col;
    md.name = name.text;
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      for (;;) {
        Token pn = expect_name("parameter name");
        expect(Tok::Colon, "':'");
        md.params.emplace_back(pn.text, type_tag());
        if (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          continue;
        }
        break;
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Colon, "':'");
    md.ret = type_tag();
    expect(Tok::Eq, "'='");
    md.body = expr();
    return md;
  }

  TypeTag type_tag() {
    Token t = expect(Tok::Ident, "type name");
    if (t.text == "Unit") return TypeTag::unitT();
    if (t.text == "Bool") return TypeTag::boolT();
    if (t.text == "Nat") return TypeTag::natT();
    if (is_reserved(t.text))
      throw ParseError("reserved word '" + t.text + "' cannot be a type", t.line, t.col);
    return TypeTag::classT(t.text);
  }

  ExprPtr expr() {
    if (at_keyword("let")) {
      Token k = lex_.next();
      Token n = expect_name("binder name");
      expect(Tok::Colon, "':'");
      TypeTag t = type_tag();
      expect(Tok::Eq, "'='");
      ExprPtr bound = expr();
      keyword("in");
      ExprPtr body = expr();
      auto e = elet(n.text, t, std::move(bound), std::move(body));
      const_cast<Expr*>(e.get())->line = k.line;
      const_cast<Expr*>(e.get())->col = k.col;
      return e;
    }
    if (at_keyword("if")) {
      Token k = lex_.next();
      ExprPtr c = expr();
      keyword("then");
      ExprPtr t = expr();
      keyword("else");
      ExprPtr f = expr();
      auto e = eif(std::move(c), std::move(t), std::move(f));
      const_cast<Expr*>(e.get())->line = k.line;
      const_cast<Expr*>(e.get())->col = k.col;
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr cur = primary();
    while (lex_.peek().kind == Tok::Dot) {
      lex_.next();
      Token name = expect(Tok::Ident, "member name after '.'");
      if (name.text == "monitorenter") {
        cur = emonenter(std::move(cur));
        continue;
      }
      if (name.text == "monitorexit") {
        cur = emonexit(std::move(cur));
        continue;
      }
      if (is_reserved(name.text))
        throw ParseError("reserved word '" + name.text + "' cannot be a member",
                         name.line, name.col);
      if (lex_.peek().kind == Tok::LParen) {
        lex_.next();
        std::vector<ExprPtr> as = args();
        expect(Tok::RParen, "')'");
        cur = ecall(std::move(cur), name.text, std::move(as));
        continue;
      }
      if (lex_.peek().kind == Tok::Assign) {
        lex_.next();
        ExprPtr rhs = expr();
        // Field set consumes the rest of the expression as its right-hand
        // side; the chain cannot continue past it.
        return eset(std::move(cur), name.text, std::move(rhs));
      }
      cur = eget(std::move(cur), name.text);
    }
    return cur;
  }

  std::vector<ExprPtr> args() {
    std::vector<ExprPtr> as;
    if (lex_.peek().kind == Tok::RParen) return as;
    for (;;) {
      as.push_back(expr());
      if (lex_.peek().kind == Tok::Comma) {
        lex_.next();
        continue;
      }
      return as;
    }
  }

  ExprPtr primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Nat: {
        Token n = lex_.next();
        auto e = lit(Value::nat(n.nat));
        const_cast<Expr*>(e.get())->line = n.line;
        const_cast<Expr*>(e.get())->col = n.col;
        return e;
      }
      case Tok::LParen: {
        Token l = lex_.next();
        expect(Tok::RParen, "')' (the unit value)");
        auto e = unitE();
        const_cast<Expr*>(e.get())->line = l.line;
        const_cast<Expr*>(e.get())->col = l.col;
        return e;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          Token b = lex_.next();
          auto e = lit(Value::boolean(b.text == "true"));
          const_cast<Expr*>(e.get())->line = b.line;
          const_cast<Expr*>(e.get())->col = b.col;
          return e;
        }
        if (t.text == "this") {
          Token v = lex_.next();
          auto e = var("this");
          const_cast<Expr*>(e.get())->line = v.line;
          const_cast<Expr*>(e.get())->col = v.col;
          return e;
        }
        if (t.text == "new") {
          Token k = lex_.next();
          Token cls = expect_name("class name");
          expect(Tok::LParen, "'('");
          std::vector<ExprPtr> as = args();
          expect(Tok::RParen, "')'");
          auto e = enew(cls.text, std::move(as));
          const_cast<Expr*>(e.get())->line = k.line;
          const_cast<Expr*>(e.get())->col = k.col;
          return e;
        }
        if (is_reserved(t.text)) fail("unexpected keyword '" + t.text + "'");
        Token v = lex_.next();
        auto e = var(v.text);
        const_cast<Expr*>(e.get())->line = v.line;
        const_cast<Expr*>(e.get())->col = v.col;
        return e;
      }
      default:
        fail("expected an expression");
    }
  }

  Lexer lex_;
};

}  // namespace

Program parse_program(const std::string& text) { return Parser(text).program(); }

ExprPtr parse_expr_text(const std::string& text) { return Parser(text).expr_only(); }

}  // namespace djc
