#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "c2v/ast.hpp"

namespace c2v {

namespace {

class Parser
{
public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) { scopes_.emplace_back(); }

  TranslationUnit unit()
  {
    TranslationUnit tu;
    while (!at_end())
      tu.groups.push_back(external_decl());
    return tu;
  }

private:
  const std::vector<Token>& toks_;
  size_t pos_ = 0;
  std::vector<std::map<std::string, bool>> scopes_; // name -> is typedef

  // ---- token helpers ----
  const Token& peek(size_t k = 0) const
  {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is(const char* lex, size_t k = 0) const
  {
    const Token& t = peek(k);
    return (t.kind == TokKind::Punctuator || t.kind == TokKind::Keyword) && t.lexeme == lex;
  }
  bool accept(const char* lex)
  {
    if (!is(lex))
      return false;
    next();
    return true;
  }
  const Token& expect(const char* lex)
  {
    if (!is(lex))
      error("expected '" + std::string(lex) + "'");
    return next();
  }
  [[noreturn]] void error(const std::string& msg) const
  {
    const Token& t = peek();
    std::string near = t.kind == TokKind::End ? "end of input" : "'" + t.lexeme + "'";
    fail("E_SYNTAX", msg + " near " + near, t.loc);
  }
  std::string expect_ident()
  {
    if (peek().kind != TokKind::Identifier)
      error("expected identifier");
    return next().lexeme;
  }

  // ---- scopes ----
  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }
  void declare(const std::string& name, bool is_typedef) { scopes_.back()[name] = is_typedef; }
  bool is_typedef_name(const std::string& name) const
  {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end())
        return f->second;
    }
    return false;
  }

  bool starts_type(size_t k = 0) const
  {
    const Token& t = peek(k);
    if (t.kind == TokKind::Identifier)
      return is_typedef_name(t.lexeme);
    if (t.kind != TokKind::Keyword)
      return false;
    static const char* words[] = {"void",   "char",   "short",    "int",   "long",   "float",
                                  "double", "signed", "unsigned", "_Bool", "struct", "union",
                                  "enum",   "const",  "volatile", "static", "extern", "typedef",
                                  "inline", "register", "auto", "restrict"};
    for (const char* w : words)
      if (t.lexeme == w)
        return true;
    return false;
  }

  // ---- declaration specifiers ----
  TypeSpec decl_spec(DeclGroup::Storage* storage, bool* is_inline)
  {
    TypeSpec s;
    s.loc = peek().loc;
    bool any = false;
    for (;;) {
      const Token& t = peek();
      if (t.kind == TokKind::Identifier && s.base == TypeSpec::None && !s.is_unsigned
          && !s.is_signed && s.long_count == 0 && is_typedef_name(t.lexeme)) {
        s.base = TypeSpec::Named;
        s.name = next().lexeme;
        any = true;
        continue;
      }
      if (t.kind != TokKind::Keyword)
        break;
      const std::string& w = t.lexeme;
      auto storage_kw = [&](DeclGroup::Storage st) {
        if (!storage)
          error("storage class not allowed here");
        *storage = st;
      };
      if (w == "typedef")
        storage_kw(DeclGroup::Typedef);
      else if (w == "static")
        storage_kw(DeclGroup::Static);
      else if (w == "extern")
        storage_kw(DeclGroup::Extern);
      else if (w == "inline") {
        if (is_inline)
          *is_inline = true;
      } else if (w == "const")
        s.is_const = true;
      else if (w == "volatile" || w == "register" || w == "auto" || w == "restrict") {
      } else if (w == "unsigned")
        s.is_unsigned = true;
      else if (w == "signed")
        s.is_signed = true;
      else if (w == "long")
        s.long_count++;
      else if (w == "void" || w == "char" || w == "short" || w == "int" || w == "float"
               || w == "double" || w == "_Bool") {
        TypeSpec::Base b = w == "void" ? TypeSpec::Void
                         : w == "char" ? TypeSpec::Char
                         : w == "short" ? TypeSpec::Short
                         : w == "int" ? TypeSpec::Int
                         : w == "float" ? TypeSpec::Float
                         : w == "double" ? TypeSpec::Double
                                         : TypeSpec::Bool;
        if (b == TypeSpec::Int && s.base == TypeSpec::Short) {
          // `short int`
        } else if (b == TypeSpec::Short && s.base == TypeSpec::Int) {
          s.base = TypeSpec::Short;
        } else if (s.base != TypeSpec::None) {
          error("conflicting type specifiers");
        } else
          s.base = b;
      } else if (w == "struct" || w == "union") {
        if (s.base != TypeSpec::None)
          error("conflicting type specifiers");
        next();
        record_spec(s, w == "union");
        any = true;
        continue;
      } else if (w == "enum") {
        if (s.base != TypeSpec::None)
          error("conflicting type specifiers");
        next();
        enum_spec(s);
        any = true;
        continue;
      } else
        break;
      next();
      any = true;
    }
    if (!any)
      error("expected declaration specifiers");
    if (s.base == TypeSpec::None && (s.is_unsigned || s.is_signed || s.long_count > 0))
      s.base = TypeSpec::Int;
    if (s.base == TypeSpec::None)
      fail("E_SYNTAX", "missing type specifier", s.loc);
    if (s.long_count > 0 && s.base == TypeSpec::Int)
      s.base = TypeSpec::Long;
    return s;
  }

  void record_spec(TypeSpec& s, bool is_union)
  {
    s.base = is_union ? TypeSpec::Union : TypeSpec::Struct;
    if (peek().kind == TokKind::Identifier)
      s.name = next().lexeme;
    if (is("{")) {
      auto rec = std::make_shared<RecordSyntax>();
      rec->loc = next().loc;
      while (!accept("}")) {
        if (at_end())
          error("unterminated struct");
        FieldSyntax f;
        f.spec = decl_spec(nullptr, nullptr);
        if (!is(";")) {
          do {
            f.decls.push_back(declarator(false));
            if (is(":"))
              fail("E_UNSUPPORTED_CONSTRUCT", "bitfields are not supported", peek().loc);
          } while (accept(","));
        }
        expect(";");
        rec->fields.push_back(std::move(f));
      }
      s.record = rec;
    } else if (s.name.empty())
      error("expected struct tag or body");
  }

  void enum_spec(TypeSpec& s)
  {
    s.base = TypeSpec::Enum;
    if (peek().kind == TokKind::Identifier)
      s.name = next().lexeme;
    if (is("{")) {
      auto en = std::make_shared<EnumSyntax>();
      en->loc = next().loc;
      while (!accept("}")) {
        Enumerator item;
        item.loc = peek().loc;
        item.name = expect_ident();
        if (accept("="))
          item.value = assignment_expr();
        declare(item.name, false);
        en->items.push_back(std::move(item));
        if (!accept(",")) {
          expect("}");
          break;
        }
      }
      s.enumeration = en;
    } else if (s.name.empty())
      error("expected enum tag or body");
  }

  // ---- declarators ----
  Declarator declarator(bool abstract_ok)
  {
    Declarator d;
    d.loc = peek().loc;
    std::vector<DeclChunk> ptrs;
    while (is("*")) {
      next();
      DeclChunk c;
      c.kind = DeclChunk::Pointer;
      while (peek().kind == TokKind::Keyword
             && (peek().lexeme == "const" || peek().lexeme == "volatile"
                 || peek().lexeme == "restrict")) {
        if (peek().lexeme == "const")
          c.is_const = true;
        next();
      }
      ptrs.push_back(std::move(c));
    }
    Declarator inner;
    bool has_inner = false;
    if (is("(") && !paren_starts_params()) {
      next();
      inner = declarator(abstract_ok);
      has_inner = true;
      expect(")");
      d.name = inner.name;
      d.loc = inner.loc;
    } else if (peek().kind == TokKind::Identifier) {
      d.loc = peek().loc;
      d.name = next().lexeme;
    } else if (!abstract_ok)
      error("expected declarator");
    std::vector<DeclChunk> suffixes;
    for (;;) {
      if (is("[")) {
        next();
        DeclChunk c;
        c.kind = DeclChunk::Array;
        if (!is("]"))
          c.size = std::shared_ptr<Expr>(assignment_expr().release());
        expect("]");
        suffixes.push_back(std::move(c));
      } else if (is("(")) {
        next();
        suffixes.push_back(param_list());
      } else
        break;
    }
    for (auto& p : ptrs)
      d.chunks.push_back(std::move(p));
    for (auto it = suffixes.rbegin(); it != suffixes.rend(); ++it)
      d.chunks.push_back(std::move(*it));
    if (has_inner)
      for (auto& c : inner.chunks)
        d.chunks.push_back(std::move(c));
    return d;
  }

  // After '(' in a declarator: a parameter list rather than a nested declarator?
  bool paren_starts_params() const { return is(")", 1) || starts_type(1); }

  DeclChunk param_list()
  {
    DeclChunk c;
    c.kind = DeclChunk::Function;
    if (accept(")"))
      return c;
    if (is("void") && is(")", 1)) {
      next();
      next();
      c.void_params = true;
      return c;
    }
    push_scope();
    do {
      if (is("..."))
        fail("E_UNSUPPORTED_CONSTRUCT", "variadic functions are not supported", peek().loc);
      ParamSyntax p;
      p.spec = decl_spec(nullptr, nullptr);
      p.decl = declarator(true);
      c.params.push_back(std::move(p));
    } while (accept(","));
    pop_scope();
    expect(")");
    return c;
  }

  std::shared_ptr<TypeName> type_name()
  {
    auto tn = std::make_shared<TypeName>();
    tn->spec = decl_spec(nullptr, nullptr);
    tn->decl = declarator(true);
    if (!tn->decl.name.empty())
      fail("E_SYNTAX", "unexpected name in type", tn->decl.loc);
    return tn;
  }

  // ---- declarations ----
  static bool is_function_declarator(const Declarator& d)
  {
    return !d.chunks.empty() && d.chunks.back().kind == DeclChunk::Function;
  }

  GroupPtr external_decl()
  {
    auto g = std::make_shared<DeclGroup>();
    g->loc = peek().loc;
    g->spec = decl_spec(&g->storage, &g->is_inline);
    if (accept(";"))
      return g;
    Declarator d = declarator(false);
    if (is_function_declarator(d) && is("{")) {
      declare(d.name, false);
      InitDeclarator id;
      id.decl = std::move(d);
      push_scope();
      for (const auto& p : id.decl.chunks.back().params)
        if (!p.decl.name.empty())
          declare(p.decl.name, false);
      g->body = block();
      pop_scope();
      g->decls.push_back(std::move(id));
      return g;
    }
    finish_group(*g, std::move(d));
    return g;
  }

  void finish_group(DeclGroup& g, Declarator first)
  {
    Declarator d = std::move(first);
    for (;;) {
      InitDeclarator id;
      id.decl = std::move(d);
      declare(id.decl.name, g.storage == DeclGroup::Typedef);
      if (accept("=")) {
        if (g.storage == DeclGroup::Typedef)
          fail("E_SYNTAX", "typedef with initializer", id.decl.loc);
        id.init = std::make_unique<Initializer>(initializer());
      }
      g.decls.push_back(std::move(id));
      if (!accept(","))
        break;
      d = declarator(false);
    }
    expect(";");
  }

  Initializer initializer()
  {
    Initializer in;
    in.loc = peek().loc;
    if (accept("{")) {
      in.is_list = true;
      while (!accept("}")) {
        if (is("."))
          fail("E_UNSUPPORTED_CONSTRUCT", "designated initializers are not supported",
               peek().loc);
        in.list.push_back(initializer());
        if (!accept(",")) {
          expect("}");
          break;
        }
      }
      return in;
    }
    in.expr = assignment_expr();
    return in;
  }

  // ---- statements ----
  StmtPtr block()
  {
    auto s = std::make_unique<Stmt>(StmtKind::Block, peek().loc);
    expect("{");
    push_scope();
    while (!accept("}")) {
      if (at_end())
        error("unterminated block");
      s->stmts.push_back(statement());
    }
    pop_scope();
    return s;
  }

  StmtPtr decl_stmt()
  {
    auto s = std::make_unique<Stmt>(StmtKind::Decl, peek().loc);
    auto g = std::make_shared<DeclGroup>();
    g->loc = peek().loc;
    g->spec = decl_spec(&g->storage, nullptr);
    if (!accept(";"))
      finish_group(*g, declarator(false));
    s->group = g;
    return s;
  }

  StmtPtr statement()
  {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (t.kind == TokKind::Identifier && is(":", 1) && !is_typedef_name(t.lexeme))
      fail("E_UNSUPPORTED_CONSTRUCT", "labels are not supported (no goto)", loc);
    if (t.kind == TokKind::Keyword) {
      const std::string w = t.lexeme;
      if (w == "goto")
        fail("E_UNSUPPORTED_CONSTRUCT", "goto is not supported", loc);
      if (w == "if") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::If, loc);
        expect("(");
        s->expr = expression();
        expect(")");
        s->body = statement();
        if (accept("else"))
          s->else_body = statement();
        return s;
      }
      if (w == "while") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::While, loc);
        expect("(");
        s->expr = expression();
        expect(")");
        s->body = statement();
        return s;
      }
      if (w == "do") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::DoWhile, loc);
        s->body = statement();
        expect("while");
        expect("(");
        s->expr = expression();
        expect(")");
        expect(";");
        return s;
      }
      if (w == "for") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::For, loc);
        expect("(");
        push_scope();
        if (starts_type())
          s->init = decl_stmt();
        else if (accept(";"))
          s->init = nullptr;
        else {
          auto e = std::make_unique<Stmt>(StmtKind::Expr, peek().loc);
          e->expr = expression();
          expect(";");
          s->init = std::move(e);
        }
        if (!is(";"))
          s->expr = expression();
        expect(";");
        if (!is(")"))
          s->step = expression();
        expect(")");
        s->body = statement();
        pop_scope();
        return s;
      }
      if (w == "switch") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::Switch, loc);
        expect("(");
        s->expr = expression();
        expect(")");
        s->body = statement();
        return s;
      }
      if (w == "case") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::Case, loc);
        s->expr = conditional_expr();
        expect(":");
        s->body = statement();
        return s;
      }
      if (w == "default") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::Default, loc);
        expect(":");
        s->body = statement();
        return s;
      }
      if (w == "break" || w == "continue") {
        next();
        expect(";");
        return std::make_unique<Stmt>(w == "break" ? StmtKind::Break : StmtKind::Continue, loc);
      }
      if (w == "return") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::Return, loc);
        if (!is(";"))
          s->expr = expression();
        expect(";");
        return s;
      }
      if (w == "assert") {
        next();
        auto s = std::make_unique<Stmt>(StmtKind::Assert, loc);
        expect("(");
        s->expr = expression();
        expect(")");
        expect(";");
        return s;
      }
      if (w == "C2V_SAMPLE_INPUT" || w == "C2V_DRIVE_OUTPUT") {
        next();
        auto s = std::make_unique<Stmt>(
            w == "C2V_SAMPLE_INPUT" ? StmtKind::Sample : StmtKind::Drive, loc);
        expect("(");
        s->type_name = type_name();
        expect(",");
        s->name = expect_ident();
        expect(")");
        expect(";");
        if (s->kind == StmtKind::Sample && !is_typedef_name(s->name))
          declare(s->name, false);
        return s;
      }
    }
    if (is("{"))
      return block();
    if (accept(";"))
      return std::make_unique<Stmt>(StmtKind::Empty, loc);
    if (starts_type())
      return decl_stmt();
    auto s = std::make_unique<Stmt>(StmtKind::Expr, loc);
    s->expr = expression();
    expect(";");
    return s;
  }

  // ---- expressions ----
  ExprPtr expression()
  {
    ExprPtr e = assignment_expr();
    while (is(",")) {
      next();
      e = binary(",", std::move(e), assignment_expr());
    }
    return e;
  }

  static ExprPtr binary(const std::string& op, ExprPtr a, ExprPtr b)
  {
    auto e = std::make_unique<Expr>(ExprKind::Binary, a->loc);
    e->op = op;
    e->kids.push_back(std::move(a));
    e->kids.push_back(std::move(b));
    return e;
  }

  ExprPtr assignment_expr()
  {
    ExprPtr lhs = conditional_expr();
    static const char* ops[] = {"=",  "+=", "-=", "*=",  "/=",  "%=",
                                "&=", "|=", "^=", "<<=", ">>="};
    for (const char* op : ops) {
      if (is(op)) {
        next();
        auto e = std::make_unique<Expr>(ExprKind::Assign, lhs->loc);
        e->op = op;
        e->kids.push_back(std::move(lhs));
        e->kids.push_back(assignment_expr());
        return e;
      }
    }
    return lhs;
  }

  ExprPtr conditional_expr()
  {
    ExprPtr c = binary_expr(0);
    if (!is("?"))
      return c;
    next();
    auto e = std::make_unique<Expr>(ExprKind::Cond, c->loc);
    e->kids.push_back(std::move(c));
    e->kids.push_back(expression());
    expect(":");
    e->kids.push_back(conditional_expr());
    return e;
  }

  static int precedence(const Token& t)
  {
    if (t.kind != TokKind::Punctuator)
      return -1;
    static const std::map<std::string, int> prec = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
      {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},
      {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10},
    };
    auto it = prec.find(t.lexeme);
    return it == prec.end() ? -1 : it->second;
  }

  ExprPtr binary_expr(int min_prec)
  {
    ExprPtr lhs = cast_expr();
    for (;;) {
      int p = precedence(peek());
      if (p < 0 || p < min_prec)
        break;
      std::string op = next().lexeme;
      ExprPtr rhs = binary_expr(p + 1);
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr cast_expr()
  {
    if (is("(") && starts_type(1)) {
      SourceLoc loc = next().loc;
      auto tn = type_name();
      expect(")");
      if (is("{"))
        fail("E_UNSUPPORTED_CONSTRUCT", "compound literals are not supported", loc);
      auto e = std::make_unique<Expr>(ExprKind::Cast, loc);
      e->type_name = tn;
      e->kids.push_back(cast_expr());
      return e;
    }
    return unary_expr();
  }

  ExprPtr unary_expr()
  {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (t.kind == TokKind::Punctuator) {
      if (t.lexeme == "++" || t.lexeme == "--") {
        auto e = std::make_unique<Expr>(ExprKind::IncDec, loc);
        e->op = next().lexeme;
        e->kids.push_back(unary_expr());
        return e;
      }
      if (t.lexeme == "-" || t.lexeme == "+" || t.lexeme == "~" || t.lexeme == "!"
          || t.lexeme == "*" || t.lexeme == "&") {
        auto e = std::make_unique<Expr>(ExprKind::Unary, loc);
        e->op = next().lexeme;
        e->kids.push_back(cast_expr());
        return e;
      }
    }
    if (t.kind == TokKind::Keyword && t.lexeme == "sizeof") {
      next();
      if (is("(") && starts_type(1)) {
        next();
        auto e = std::make_unique<Expr>(ExprKind::SizeofType, loc);
        e->type_name = type_name();
        expect(")");
        return e;
      }
      auto e = std::make_unique<Expr>(ExprKind::SizeofExpr, loc);
      e->kids.push_back(unary_expr());
      return e;
    }
    return postfix_expr();
  }

  ExprPtr postfix_expr()
  {
    ExprPtr e = primary_expr();
    for (;;) {
      if (is("[")) {
        next();
        auto x = std::make_unique<Expr>(ExprKind::Index, e->loc);
        x->kids.push_back(std::move(e));
        x->kids.push_back(expression());
        expect("]");
        e = std::move(x);
      } else if (is("(")) {
        next();
        auto x = std::make_unique<Expr>(ExprKind::Call, e->loc);
        x->kids.push_back(std::move(e));
        if (!is(")")) {
          do
            x->kids.push_back(assignment_expr());
          while (accept(","));
        }
        expect(")");
        e = std::move(x);
      } else if (is(".") || is("->")) {
        auto x = std::make_unique<Expr>(ExprKind::Member, e->loc);
        x->arrow = next().lexeme == "->";
        x->name = expect_ident();
        x->kids.push_back(std::move(e));
        e = std::move(x);
      } else if (is("++") || is("--")) {
        auto x = std::make_unique<Expr>(ExprKind::IncDec, e->loc);
        x->op = next().lexeme;
        x->postfix = true;
        x->kids.push_back(std::move(e));
        e = std::move(x);
      } else
        break;
    }
    return e;
  }

  ExprPtr primary_expr()
  {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    switch (t.kind) {
    case TokKind::Identifier: {
      auto e = std::make_unique<Expr>(ExprKind::Ident, loc);
      e->name = next().lexeme;
      return e;
    }
    case TokKind::Constant:
      return constant(next());
    case TokKind::String: {
      auto e = std::make_unique<Expr>(ExprKind::StrLit, loc);
      e->text = next().lexeme;
      while (peek().kind == TokKind::String)
        e->text += " " + next().lexeme;
      return e;
    }
    case TokKind::Punctuator:
      if (t.lexeme == "(") {
        next();
        ExprPtr e = expression();
        expect(")");
        return e;
      }
      break;
    default:
      break;
    }
    error("expected expression");
  }

  static ExprPtr constant(const Token& t)
  {
    const std::string& s = t.lexeme;
    if (s[0] == '\'')
      return char_constant(t);
    bool hex = s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    bool is_float = false;
    for (char c : s) {
      if (c == '.' || (!hex && (c == 'e' || c == 'E')) || (hex && (c == 'p' || c == 'P')))
        is_float = true;
    }
    if (is_float) {
      auto e = std::make_unique<Expr>(ExprKind::FloatLit, t.loc);
      e->text = s;
      std::string body = s;
      while (!body.empty() && (body.back() == 'f' || body.back() == 'F' || body.back() == 'l'
                               || body.back() == 'L'))
        body.pop_back();
      char* end = nullptr;
      e->fval = std::strtod(body.c_str(), &end);
      if (*end != '\0')
        fail("E_SYNTAX", "malformed floating constant '" + s + "'", t.loc);
      return e;
    }
    auto e = std::make_unique<Expr>(ExprKind::IntLit, t.loc);
    e->text = s;
    size_t i = 0;
    int base = 10;
    if (hex) {
      base = 16;
      i = 2;
    } else if (s.size() > 1 && s[0] == '0')
      base = 8;
    uint64_t v = 0;
    bool any = false, overflow = false;
    for (; i < s.size(); i++) {
      char c = s[i];
      int d;
      if (c >= '0' && c <= '9')
        d = c - '0';
      else if (base == 16 && c >= 'a' && c <= 'f')
        d = c - 'a' + 10;
      else if (base == 16 && c >= 'A' && c <= 'F')
        d = c - 'A' + 10;
      else
        break;
      if (d >= base)
        fail("E_SYNTAX", "invalid digit in constant '" + s + "'", t.loc);
      if (v > (UINT64_MAX - d) / base)
        overflow = true;
      v = v * base + d;
      any = true;
    }
    if (!any && base != 8)
      fail("E_SYNTAX", "malformed constant '" + s + "'", t.loc);
    for (; i < s.size(); i++) {
      char c = s[i];
      if (c != 'u' && c != 'U' && c != 'l' && c != 'L')
        fail("E_SYNTAX", "invalid suffix on constant '" + s + "'", t.loc);
    }
    if (overflow)
      fail("E_SYNTAX", "integer constant '" + s + "' is too large", t.loc);
    e->ival = v;
    return e;
  }

  static ExprPtr char_constant(const Token& t)
  {
    const std::string& s = t.lexeme;
    auto e = std::make_unique<Expr>(ExprKind::IntLit, t.loc);
    e->text = s;
    if (s.size() < 3 || s.back() != '\'')
      fail("E_SYNTAX", "malformed character constant", t.loc);
    std::string body = s.substr(1, s.size() - 2);
    int64_t v;
    if (body[0] != '\\') {
      if (body.size() != 1)
        fail("E_SYNTAX", "multi-character constant", t.loc);
      v = static_cast<signed char>(body[0]);
    } else {
      char c = body.size() > 1 ? body[1] : 0;
      switch (c) {
      case 'n': v = '\n'; break;
      case 't': v = '\t'; break;
      case 'r': v = '\r'; break;
      case '0': v = 0; break;
      case '\\': v = '\\'; break;
      case '\'': v = '\''; break;
      case '"': v = '"'; break;
      case 'x': v = static_cast<signed char>(std::strtol(body.c_str() + 2, nullptr, 16)); break;
      default: fail("E_SYNTAX", "unsupported escape in character constant", t.loc);
      }
    }
    e->ival = static_cast<uint64_t>(v);
    return e;
  }
};

// ---- rendering ------------------------------------------------------------

std::string render_expr(const Expr& e);
std::string render_type_spec(const TypeSpec& s);
std::string render_declarator(const Declarator& d);

std::string render_params(const DeclChunk& c)
{
  if (c.void_params)
    return "(void)";
  std::string s = "(";
  for (size_t i = 0; i < c.params.size(); i++) {
    if (i)
      s += ", ";
    s += render_type_spec(c.params[i].spec);
    std::string d = render_declarator(c.params[i].decl);
    if (!d.empty())
      s += " " + d;
  }
  return s + ")";
}

std::string render_declarator(const Declarator& d)
{
  std::string s = d.name;
  bool last_ptr = false;
  for (auto it = d.chunks.rbegin(); it != d.chunks.rend(); ++it) {
    switch (it->kind) {
    case DeclChunk::Pointer:
      s = std::string(it->is_const ? "* const " : "*") + s;
      last_ptr = true;
      break;
    case DeclChunk::Array:
      if (last_ptr)
        s = "(" + s + ")";
      s += "[" + (it->size ? render_expr(*it->size) : std::string()) + "]";
      last_ptr = false;
      break;
    case DeclChunk::Function:
      if (last_ptr)
        s = "(" + s + ")";
      s += render_params(*it);
      last_ptr = false;
      break;
    }
  }
  return s;
}

std::string render_type_spec(const TypeSpec& s)
{
  std::string r;
  if (s.is_const)
    r += "const ";
  if (s.is_unsigned)
    r += "unsigned ";
  else if (s.is_signed)
    r += "signed ";
  switch (s.base) {
  case TypeSpec::None: break;
  case TypeSpec::Void: r += "void"; break;
  case TypeSpec::Bool: r += "_Bool"; break;
  case TypeSpec::Char: r += "char"; break;
  case TypeSpec::Short: r += "short"; break;
  case TypeSpec::Int: r += "int"; break;
  case TypeSpec::Long: r += s.long_count > 1 ? "long long" : "long"; break;
  case TypeSpec::Float: r += "float"; break;
  case TypeSpec::Double: r += s.long_count ? "long double" : "double"; break;
  case TypeSpec::Named: r += s.name; break;
  case TypeSpec::Struct:
  case TypeSpec::Union:
    r += s.base == TypeSpec::Struct ? "struct" : "union";
    if (!s.name.empty())
      r += " " + s.name;
    if (s.record) {
      r += " { ";
      for (const auto& f : s.record->fields) {
        r += render_type_spec(f.spec);
        for (size_t i = 0; i < f.decls.size(); i++)
          r += (i ? ", " : " ") + render_declarator(f.decls[i]);
        r += "; ";
      }
      r += "}";
    }
    break;
  case TypeSpec::Enum:
    r += "enum";
    if (!s.name.empty())
      r += " " + s.name;
    if (s.enumeration) {
      r += " { ";
      for (size_t i = 0; i < s.enumeration->items.size(); i++) {
        const auto& it = s.enumeration->items[i];
        r += (i ? ", " : "") + it.name;
        if (it.value)
          r += " = " + render_expr(*it.value);
      }
      r += " }";
    }
    break;
  }
  return r;
}

std::string render_type_name(const TypeName& tn)
{
  std::string d = render_declarator(tn.decl);
  return render_type_spec(tn.spec) + (d.empty() ? "" : " " + d);
}

std::string render_expr(const Expr& e)
{
  switch (e.kind) {
  case ExprKind::IntLit:
  case ExprKind::FloatLit:
  case ExprKind::StrLit:
    return e.text;
  case ExprKind::Ident:
    return e.name;
  case ExprKind::Unary:
    return "(" + e.op + render_expr(*e.kids[0]) + ")";
  case ExprKind::Binary:
    return "(" + render_expr(*e.kids[0]) + " " + e.op + " " + render_expr(*e.kids[1]) + ")";
  case ExprKind::Assign:
    return "(" + render_expr(*e.kids[0]) + " " + e.op + " " + render_expr(*e.kids[1]) + ")";
  case ExprKind::IncDec:
    return e.postfix ? "(" + render_expr(*e.kids[0]) + e.op + ")"
                     : "(" + e.op + render_expr(*e.kids[0]) + ")";
  case ExprKind::Cond:
    return "(" + render_expr(*e.kids[0]) + " ? " + render_expr(*e.kids[1]) + " : "
         + render_expr(*e.kids[2]) + ")";
  case ExprKind::Cast:
    return "((" + render_type_name(*e.type_name) + ")" + render_expr(*e.kids[0]) + ")";
  case ExprKind::Call: {
    std::string s = render_expr(*e.kids[0]) + "(";
    for (size_t i = 1; i < e.kids.size(); i++)
      s += (i > 1 ? ", " : "") + render_expr(*e.kids[i]);
    return s + ")";
  }
  case ExprKind::Index:
    return render_expr(*e.kids[0]) + "[" + render_expr(*e.kids[1]) + "]";
  case ExprKind::Member:
    return render_expr(*e.kids[0]) + (e.arrow ? "->" : ".") + e.name;
  case ExprKind::SizeofType:
    return "sizeof(" + render_type_name(*e.type_name) + ")";
  case ExprKind::SizeofExpr:
    return "(sizeof " + render_expr(*e.kids[0]) + ")";
  case ExprKind::Convert:
    return render_expr(*e.kids[0]);
  case ExprKind::CompoundLhs:
    return "<lhs>";
  }
  return "?";
}

std::string render_initializer(const Initializer& in)
{
  if (!in.is_list)
    return render_expr(*in.expr);
  std::string s = "{";
  for (size_t i = 0; i < in.list.size(); i++)
    s += (i ? ", " : "") + render_initializer(in.list[i]);
  return s + "}";
}

std::string render_group_head(const DeclGroup& g)
{
  std::string s;
  switch (g.storage) {
  case DeclGroup::Auto: break;
  case DeclGroup::Static: s += "static "; break;
  case DeclGroup::Extern: s += "extern "; break;
  case DeclGroup::Typedef: s += "typedef "; break;
  }
  if (g.is_inline)
    s += "inline ";
  s += render_type_spec(g.spec);
  for (size_t i = 0; i < g.decls.size(); i++) {
    s += i ? ", " : " ";
    s += render_declarator(g.decls[i].decl);
    if (g.decls[i].init)
      s += " = " + render_initializer(*g.decls[i].init);
  }
  return s;
}

void render_stmt(const Stmt& s, int indent, std::string& out)
{
  std::string pad(indent * 2, ' ');
  auto sub = [&](const Stmt& b) { render_stmt(b, b.kind == StmtKind::Block ? indent : indent + 1, out); };
  switch (s.kind) {
  case StmtKind::Expr:
    out += pad + render_expr(*s.expr) + ";\n";
    break;
  case StmtKind::Decl:
    out += pad + render_group_head(*s.group) + ";\n";
    break;
  case StmtKind::If:
    out += pad + "if (" + render_expr(*s.expr) + ")\n";
    sub(*s.body);
    if (s.else_body) {
      out += pad + "else\n";
      sub(*s.else_body);
    }
    break;
  case StmtKind::While:
    out += pad + "while (" + render_expr(*s.expr) + ")\n";
    sub(*s.body);
    break;
  case StmtKind::DoWhile:
    out += pad + "do\n";
    sub(*s.body);
    out += pad + "while (" + render_expr(*s.expr) + ");\n";
    break;
  case StmtKind::For: {
    std::string init;
    if (s.init && s.init->kind == StmtKind::Decl)
      init = render_group_head(*s.init->group);
    else if (s.init)
      init = render_expr(*s.init->expr);
    out += pad + "for (" + init + "; " + (s.expr ? render_expr(*s.expr) : "") + "; "
         + (s.step ? render_expr(*s.step) : "") + ")\n";
    sub(*s.body);
    break;
  }
  case StmtKind::Switch:
    out += pad + "switch (" + render_expr(*s.expr) + ")\n";
    sub(*s.body);
    break;
  case StmtKind::Case:
    out += pad + "case " + render_expr(*s.expr) + ":\n";
    sub(*s.body);
    break;
  case StmtKind::Default:
    out += pad + "default:\n";
    sub(*s.body);
    break;
  case StmtKind::Break: out += pad + "break;\n"; break;
  case StmtKind::Continue: out += pad + "continue;\n"; break;
  case StmtKind::Return:
    out += pad + "return" + (s.expr ? " " + render_expr(*s.expr) : "") + ";\n";
    break;
  case StmtKind::Block:
    out += pad + "{\n";
    for (const auto& c : s.stmts)
      render_stmt(*c, indent + 1, out);
    out += pad + "}\n";
    break;
  case StmtKind::Assert:
    out += pad + "assert(" + render_expr(*s.expr) + ");\n";
    break;
  case StmtKind::Empty: out += pad + ";\n"; break;
  case StmtKind::Sample:
  case StmtKind::Drive:
    out += pad + (s.kind == StmtKind::Sample ? "C2V_SAMPLE_INPUT(" : "C2V_DRIVE_OUTPUT(")
         + render_type_name(*s.type_name) + ", " + s.name + ");\n";
    break;
  }
}

// ---- structural dump ------------------------------------------------------

const char* kind_name(ExprKind k)
{
  switch (k) {
  case ExprKind::IntLit: return "IntLit";
  case ExprKind::FloatLit: return "FloatLit";
  case ExprKind::StrLit: return "StrLit";
  case ExprKind::Ident: return "Ident";
  case ExprKind::Unary: return "Unary";
  case ExprKind::Binary: return "Binary";
  case ExprKind::Assign: return "Assign";
  case ExprKind::IncDec: return "IncDec";
  case ExprKind::Cond: return "Cond";
  case ExprKind::Cast: return "Cast";
  case ExprKind::Call: return "Call";
  case ExprKind::Index: return "Index";
  case ExprKind::Member: return "Member";
  case ExprKind::SizeofType: return "SizeofType";
  case ExprKind::SizeofExpr: return "SizeofExpr";
  case ExprKind::Convert: return "Convert";
  case ExprKind::CompoundLhs: return "CompoundLhs";
  }
  return "?";
}

void dump_type_spec(const TypeSpec& s, std::ostream& os);
void dump_expr(const Expr& e, std::ostream& os);

void dump_declarator(const Declarator& d, std::ostream& os)
{
  os << "(decl " << (d.name.empty() ? "-" : d.name);
  for (const auto& c : d.chunks) {
    switch (c.kind) {
    case DeclChunk::Pointer: os << (c.is_const ? " ptrc" : " ptr"); break;
    case DeclChunk::Array:
      os << " [";
      if (c.size)
        dump_expr(*c.size, os);
      os << "]";
      break;
    case DeclChunk::Function:
      os << " (fn" << (c.void_params ? " void" : "");
      for (const auto& p : c.params) {
        os << " ";
        dump_type_spec(p.spec, os);
        dump_declarator(p.decl, os);
      }
      os << ")";
      break;
    }
  }
  os << ")";
}

void dump_type_spec(const TypeSpec& s, std::ostream& os)
{
  os << "(spec " << int(s.base) << (s.is_unsigned ? "u" : "") << (s.is_signed ? "s" : "")
     << (s.is_const ? "c" : "") << s.long_count << " " << (s.name.empty() ? "-" : s.name);
  if (s.record) {
    os << " {";
    for (const auto& f : s.record->fields) {
      dump_type_spec(f.spec, os);
      for (const auto& d : f.decls)
        dump_declarator(d, os);
      os << ";";
    }
    os << "}";
  }
  if (s.enumeration) {
    os << " {";
    for (const auto& it : s.enumeration->items) {
      os << it.name;
      if (it.value) {
        os << "=";
        dump_expr(*it.value, os);
      }
      os << ",";
    }
    os << "}";
  }
  os << ")";
}

void dump_expr(const Expr& e, std::ostream& os)
{
  os << "(" << kind_name(e.kind);
  if (!e.op.empty())
    os << " " << e.op;
  if (e.postfix)
    os << " post";
  if (e.kind == ExprKind::Member)
    os << (e.arrow ? " ->" : " .");
  if (!e.name.empty())
    os << " " << e.name;
  if (!e.text.empty())
    os << " " << e.text;
  if (e.type_name) {
    os << " ";
    dump_type_spec(e.type_name->spec, os);
    dump_declarator(e.type_name->decl, os);
  }
  for (const auto& k : e.kids) {
    os << " ";
    dump_expr(*k, os);
  }
  os << ")";
}

void dump_init(const Initializer& in, std::ostream& os)
{
  if (!in.is_list) {
    dump_expr(*in.expr, os);
    return;
  }
  os << "{";
  for (const auto& i : in.list) {
    dump_init(i, os);
    os << ",";
  }
  os << "}";
}

void dump_group(const DeclGroup& g, std::ostream& os);

void dump_stmt(const Stmt& s, std::ostream& os)
{
  os << "(S" << int(s.kind);
  if (!s.name.empty())
    os << " " << s.name;
  if (s.type_name) {
    os << " ";
    dump_type_spec(s.type_name->spec, os);
    dump_declarator(s.type_name->decl, os);
  }
  if (s.group) {
    os << " ";
    dump_group(*s.group, os);
  }
  if (s.init) {
    os << " init:";
    dump_stmt(*s.init, os);
  }
  if (s.expr) {
    os << " ";
    dump_expr(*s.expr, os);
  }
  if (s.step) {
    os << " step:";
    dump_expr(*s.step, os);
  }
  if (s.body) {
    os << " ";
    dump_stmt(*s.body, os);
  }
  if (s.else_body) {
    os << " else:";
    dump_stmt(*s.else_body, os);
  }
  for (const auto& c : s.stmts) {
    os << "\n ";
    dump_stmt(*c, os);
  }
  os << ")";
}

void dump_group(const DeclGroup& g, std::ostream& os)
{
  os << "(group " << int(g.storage) << (g.is_inline ? " inline " : " ");
  dump_type_spec(g.spec, os);
  for (const auto& d : g.decls) {
    os << " ";
    dump_declarator(d.decl, os);
    if (d.init) {
      os << "=";
      dump_init(*d.init, os);
    }
  }
  if (g.body) {
    os << "\n";
    dump_stmt(*g.body, os);
  }
  os << ")";
}

} // namespace

TranslationUnit parse(const std::vector<Token>& tokens)
{
  if (tokens.empty() || tokens.back().kind != TokKind::End)
    internal_error("token stream must end with End");
  return Parser(tokens).unit();
}

std::string render(const Expr& e)
{
  return render_expr(e);
}

std::string render(const TranslationUnit& tu)
{
  std::string out;
  for (const auto& g : tu.groups) {
    out += render_group_head(*g);
    if (g->body) {
      out += "\n";
      render_stmt(*g->body, 0, out);
    } else
      out += ";\n";
  }
  return out;
}

std::string dump_structure(const TranslationUnit& tu)
{
  std::ostringstream os;
  for (const auto& g : tu.groups) {
    dump_group(*g, os);
    os << "\n";
  }
  return os.str();
}

} // namespace c2v
