#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <unordered_set>

#include "c2v/vemit.hpp"

namespace c2v::v {

namespace {

struct Tok
{
  enum Kind { Ident, Number, Sized, String, Punct, End } kind = End;
  std::string text;
  unsigned width = 0; // Sized
  unsigned line = 0, col = 0;
};

const std::unordered_set<std::string>& out_of_subset()
{
  static const std::unordered_set<std::string> words = {
    "always", "always_ff", "always_latch", "initial", "final", "reg", "wire", "tri", "integer",
    "int", "bit", "byte", "function", "task", "generate", "genvar", "parameter", "localparam",
    "inout", "signed", "assume", "cover", "if", "case", "for", "while", "begin", "end",
    "posedge", "negedge", "specify", "interface", "package", "import", "typedef", "struct",
    "real", "property", "sequence", "defparam", "supply0", "supply1",
  };
  return words;
}

class Parser
{
public:
  Parser(const std::string& text, const std::string& file) : src_{text}, file_{file} { lex(); }

  VModule parse()
  {
    VModule m;
    keyword("module");
    m.name = ident("module name");
    punct("(");
    if (!is_punct(")")) {
      for (;;) {
        m.ports.push_back(port());
        if (is_punct(")"))
          break;
        punct(",");
      }
    }
    punct(")");
    punct(";");
    for (;;) {
      const Tok& t = peek();
      if (t.kind == Tok::Ident && t.text == "endmodule") {
        next();
        break;
      }
      if (t.kind == Tok::Ident && t.text == "logic") {
        next();
        VWire w;
        w.width = type_width();
        w.name = ident("wire name");
        punct(";");
        m.wires.push_back(std::move(w));
      } else if (t.kind == Tok::Ident && t.text == "assign") {
        next();
        VAssign a;
        if (peek().kind == Tok::Punct && (peek().text == "{" || peek().text == "["))
          subset(peek(), "assignment to a part-select or concatenation");
        a.lhs = ident("assignment target");
        // A part-selected target is out of subset, but a malformed right-hand
        // side is reported first.
        std::optional<Tok> lhs_select;
        if (is_punct("[")) {
          lhs_select = peek();
          while (!is_punct("=") && peek().kind != Tok::End)
            next();
        }
        punct("=");
        a.rhs = expr();
        punct(";");
        if (lhs_select)
          subset(*lhs_select, "assignment to a part-select");
        m.assigns.push_back(std::move(a));
      } else if (t.kind == Tok::Ident && t.text == "always_comb") {
        m.asserts.push_back(assertion());
      } else if (t.kind == Tok::Ident
                 && (out_of_subset().count(t.text) || t.text[0] == '$' || t.text == "assert")) {
        subset(t, "'" + t.text + "' is outside the emitted subset");
      } else if (t.kind == Tok::End) {
        syntax(t, "missing endmodule");
      } else {
        syntax(t, "unexpected '" + t.text + "'");
      }
    }
    if (peek().kind != Tok::End)
      syntax(peek(), "text after endmodule");
    return m;
  }

private:
  const std::string& src_;
  std::string file_;
  std::vector<Tok> toks_;
  size_t pos_ = 0;

  [[noreturn]] void syntax(const Tok& t, const std::string& msg)
  {
    fail("E_VSYNTAX", msg, {file_, t.line, t.col});
  }
  [[noreturn]] void subset(const Tok& t, const std::string& msg)
  {
    fail("E_SUBSET", msg, {file_, t.line, t.col});
  }

  void lex()
  {
    unsigned line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
      for (size_t k = 0; k < n; k++, i++) {
        if (src_[i] == '\n') {
          line++;
          col = 1;
        } else {
          col++;
        }
      }
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        adv(1);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n')
          adv(1);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '*') {
        size_t e = src_.find("*/", i + 2);
        if (e == std::string::npos)
          syntax({Tok::End, "", 0, line, col}, "unterminated comment");
        adv(e + 2 - i);
        continue;
      }
      Tok t;
      t.line = line;
      t.col = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
        size_t j = i + 1;
        while (j < src_.size()
               && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'
                   || src_[j] == '$'))
          j++;
        t.kind = Tok::Ident;
        t.text = src_.substr(i, j - i);
        adv(j - i);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
          j++;
        t.text = src_.substr(i, j - i);
        if (j < src_.size() && src_[j] == '\'') {
          if (j + 1 >= src_.size() || src_[j + 1] != 'h')
            subset(t, "only hexadecimal sized constants are supported");
          size_t k = j + 2;
          while (k < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[k])))
            k++;
          if (k == j + 2)
            syntax(t, "missing digits in sized constant");
          if (t.text.size() > 4)
            syntax(t, "constant width out of range");
          unsigned w = std::stoul(t.text);
          if (w == 0 || w > max_width)
            syntax(t, "constant width out of range");
          std::string hex = src_.substr(j + 2, k - j - 2);
          size_t nz = hex.find_first_not_of('0');
          if (nz != std::string::npos) {
            unsigned lead = std::stoul(hex.substr(nz, 1), nullptr, 16);
            unsigned bits = (hex.size() - nz - 1) * 4 + (lead >= 8 ? 4 : lead >= 4 ? 3 : lead >= 2 ? 2 : 1);
            if (bits > w)
              syntax(t, "constant does not fit in " + std::to_string(w) + " bits");
          }
          t.kind = Tok::Sized;
          t.width = w;
          t.text = hex;
          adv(k - i);
        } else {
          t.kind = Tok::Number;
          adv(j - i);
        }
      } else if (c == '"') {
        size_t j = i + 1;
        std::string s;
        for (;;) {
          if (j >= src_.size() || src_[j] == '\n')
            syntax(t, "unterminated string");
          if (src_[j] == '"')
            break;
          if (src_[j] == '\\') {
            if (j + 1 >= src_.size())
              syntax(t, "unterminated string");
            char e = src_[j + 1];
            if (e == 'n')
              s += '\n';
            else if (e == '"' || e == '\\')
              s += e;
            else
              syntax(t, "unsupported escape in string");
            j += 2;
            continue;
          }
          if (src_[j] == '%') {
            if (j + 1 < src_.size() && src_[j + 1] == '%') {
              s += '%';
              j += 2;
              continue;
            }
            subset(t, "format specifiers are outside the emitted subset");
          }
          s += src_[j++];
        }
        t.kind = Tok::String;
        t.text = s;
        adv(j + 1 - i);
      } else {
        static const char* puncts[] = {">>>", "<<<", "===", "!==", "<<", ">>", "==", "!=", "<=",
                                       ">=", "&&", "||", "**", "(", ")", "[", "]", "{", "}",
                                       ";", ",", ":", "?", "=", "~", "&", "|", "^", "+", "-",
                                       "*", "/", "%", "<", ">", "!", "@", "#", "'", "."};
        bool found = false;
        for (const char* p : puncts) {
          size_t n = std::char_traits<char>::length(p);
          if (src_.compare(i, n, p) == 0) {
            t.kind = Tok::Punct;
            t.text = p;
            adv(n);
            found = true;
            break;
          }
        }
        if (!found)
          syntax(t, std::string("unexpected character '") + c + "'");
      }
      toks_.push_back(std::move(t));
    }
    Tok end;
    end.line = line;
    end.col = col;
    toks_.push_back(end);
  }

  const Tok& peek() const { return toks_[pos_]; }
  const Tok& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_punct(const char* p) const
  {
    return peek().kind == Tok::Punct && peek().text == p;
  }

  void punct(const char* p)
  {
    if (!is_punct(p))
      syntax(peek(), std::string("expected '") + p + "'");
    next();
  }

  void keyword(const char* k)
  {
    if (peek().kind != Tok::Ident || peek().text != k)
      syntax(peek(), std::string("expected '") + k + "'");
    next();
  }

  std::string ident(const char* what)
  {
    const Tok& t = peek();
    if (t.kind != Tok::Ident || t.text[0] == '$')
      syntax(t, std::string("expected ") + what);
    if (out_of_subset().count(t.text))
      subset(t, "'" + t.text + "' is outside the emitted subset");
    next();
    return t.text;
  }

  unsigned number()
  {
    const Tok& t = peek();
    if (t.kind != Tok::Number || t.text.size() > 6)
      syntax(t, "expected a number");
    next();
    return std::stoul(t.text);
  }

  // [unsigned] [hi:0], width 1 when no range is given.
  unsigned type_width()
  {
    bool uns = false;
    if (peek().kind == Tok::Ident && peek().text == "unsigned") {
      next();
      uns = true;
    }
    if (peek().kind == Tok::Ident && peek().text == "signed")
      subset(peek(), "signed declarations are outside the emitted subset");
    if (!is_punct("[")) {
      if (uns)
        syntax(peek(), "expected a range after 'unsigned'");
      return 1;
    }
    if (!uns)
      subset(peek(), "ranged declarations must be 'unsigned'");
    const Tok& at = peek();
    next();
    unsigned hi = number();
    punct(":");
    unsigned lo = number();
    punct("]");
    if (lo != 0 || hi + 1 > max_width || hi == 0)
      subset(at, "declaration ranges must be [W-1:0] with 1 < W <= " + std::to_string(max_width));
    return hi + 1;
  }

  VPort port()
  {
    const Tok& t = peek();
    VPort p;
    if (t.kind == Tok::Ident && t.text == "output")
      p.output = true;
    else if (t.kind == Tok::Ident && t.text == "inout")
      subset(t, "inout ports are outside the emitted subset");
    else if (!(t.kind == Tok::Ident && t.text == "input"))
      syntax(t, "expected a port direction");
    next();
    keyword("logic");
    p.width = type_width();
    p.name = ident("port name");
    return p;
  }

  VAssert assertion()
  {
    next(); // always_comb
    const Tok& at = peek();
    if (!(at.kind == Tok::Ident && at.text == "assert")) {
      if (at.kind == Tok::Ident && at.text == "begin")
        subset(at, "procedural blocks are outside the emitted subset");
      syntax(at, "expected 'assert'");
    }
    next();
    punct("(");
    const Tok& etok = peek();
    VExprPtr e = expr();
    punct(")");
    keyword("else");
    if (!(peek().kind == Tok::Ident && peek().text == "$error"))
      subset(peek(), "assertion action must be $error");
    next();
    punct("(");
    if (peek().kind != Tok::String)
      syntax(peek(), "expected a string");
    std::string msg = next().text;
    punct(")");
    punct(";");
    auto leaf = [](const VExprPtr& x) {
      return x->kind == VExpr::Id || x->kind == VExpr::Const;
    };
    if (!(e->kind == VExpr::Binary && e->op == "|" && e->args[0]->kind == VExpr::Unary
          && e->args[0]->op == "~" && leaf(e->args[0]->args[0]) && leaf(e->args[1])))
      subset(etok, "assertion must have the form ((~guard) | claim)");
    VAssert a;
    a.guard = e->args[0]->args[0];
    a.claim = e->args[1];
    size_t sep = msg.find(": ");
    if (msg.rfind("c2v_check_", 0) == 0 && sep != std::string::npos) {
      a.label = msg.substr(0, sep);
      a.message = msg.substr(sep + 2);
    } else {
      a.message = msg;
    }
    return a;
  }

  // Precedence climbing over the Verilog binary operator levels.
  static int prec(const std::string& op)
  {
    static const std::map<std::string, int> p = {
      {"|", 1}, {"^", 2}, {"&", 3}, {"==", 4}, {"!=", 4}, {"<", 5}, {"<=", 5}, {">", 5},
      {">=", 5}, {"<<", 6}, {">>", 6}, {"+", 7}, {"-", 7}, {"*", 8}, {"/", 8}, {"%", 8},
    };
    auto it = p.find(op);
    return it == p.end() ? 0 : it->second;
  }

  void reject_operator(const Tok& t)
  {
    static const std::unordered_set<std::string> ops = {">>>", "<<<", "===", "!==", "&&", "||",
                                                        "**", "!"};
    if (t.kind == Tok::Punct && ops.count(t.text))
      subset(t, "operator '" + t.text + "' is outside the emitted subset");
  }

  VExprPtr expr()
  {
    VExprPtr c = binary_expr(1);
    reject_operator(peek());
    if (!is_punct("?"))
      return c;
    next();
    VExprPtr a = expr();
    punct(":");
    VExprPtr b = expr();
    return ternary(c, a, b);
  }

  VExprPtr binary_expr(int min)
  {
    VExprPtr lhs = unary_expr();
    for (;;) {
      reject_operator(peek());
      if (peek().kind != Tok::Punct)
        return lhs;
      int p = prec(peek().text);
      if (p == 0 || p < min)
        return lhs;
      std::string op = next().text;
      VExprPtr rhs = binary_expr(p + 1);
      lhs = binary(op, lhs, rhs);
    }
  }

  VExprPtr unary_expr()
  {
    reject_operator(peek());
    if (is_punct("~") || is_punct("-")) {
      std::string op = next().text;
      return unary(op, unary_expr());
    }
    if (is_punct("&") || is_punct("|") || is_punct("^"))
      subset(peek(), "reduction operators are outside the emitted subset");
    return primary();
  }

  VExprPtr primary()
  {
    const Tok& t = peek();
    if (t.kind == Tok::Sized) {
      next();
      return constant(BitVec::from_hex(t.width, t.text));
    }
    if (t.kind == Tok::Number)
      subset(t, "unsized constants are outside the emitted subset");
    if (t.kind == Tok::Punct && t.text == "(") {
      next();
      VExprPtr e = expr();
      punct(")");
      if (is_punct("["))
        syntax(peek(), "part-select of an expression");
      return e;
    }
    if (t.kind == Tok::Punct && t.text == "{") {
      next();
      std::vector<VExprPtr> parts{expr()};
      if (is_punct("{"))
        subset(peek(), "replication is outside the emitted subset");
      while (is_punct(",")) {
        next();
        parts.push_back(expr());
      }
      punct("}");
      if (is_punct("["))
        syntax(peek(), "part-select of an expression");
      return concat(std::move(parts));
    }
    if (t.kind == Tok::Ident && t.text == "$signed") {
      next();
      punct("(");
      std::string n = ident("identifier");
      punct(")");
      if (is_punct("["))
        syntax(peek(), "part-select of an expression");
      return signed_id(n);
    }
    if (t.kind == Tok::Ident && t.text[0] == '$')
      subset(t, "system function '" + t.text + "' is outside the emitted subset");
    if (t.kind == Tok::Ident) {
      std::string n = ident("identifier");
      if (!is_punct("["))
        return id(n);
      next();
      unsigned hi = number();
      if (!is_punct(":"))
        subset(peek(), "bit-selects must be written as [i:i]");
      next();
      unsigned lo = number();
      punct("]");
      if (is_punct("["))
        syntax(peek(), "part-select of an expression");
      return select(n, hi, lo);
    }
    syntax(t, t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }
};

[[noreturn]] void bad(const std::string& msg) { fail("E_SUBSET", msg); }

struct Decls
{
  std::map<std::string, unsigned> width;
  std::map<std::string, bool> is_input;
};

Decls declarations(const VModule& m)
{
  Decls d;
  for (const auto& p : m.ports) {
    if (!d.width.emplace(p.name, p.width).second)
      bad("'" + p.name + "' declared twice");
    d.is_input[p.name] = !p.output;
  }
  for (const auto& w : m.wires) {
    if (!d.width.emplace(w.name, w.width).second)
      bad("'" + w.name + "' declared twice");
    d.is_input[w.name] = false;
  }
  return d;
}

bool signed_op(const std::string& op)
{
  return op == "/" || op == "%" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

bool compare_op(const std::string& op)
{
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

unsigned width_of(const VExpr& e, const Decls& d, bool signed_ok = false)
{
  auto decl = [&](const std::string& n) {
    auto it = d.width.find(n);
    if (it == d.width.end())
      bad("'" + n + "' is not declared");
    return it->second;
  };
  switch (e.kind) {
  case VExpr::Id:
    return decl(e.name);
  case VExpr::Const:
    return e.value.width();
  case VExpr::Signed:
    if (!signed_ok)
      bad("$signed(" + e.name + ") outside a signed operator");
    return decl(e.name);
  case VExpr::Unary:
    if (e.op != "~" && e.op != "-")
      bad("unary operator '" + e.op + "'");
    return width_of(*e.args[0], d);
  case VExpr::Binary: {
    bool sa = e.args[0]->kind == VExpr::Signed, sb = e.args[1]->kind == VExpr::Signed;
    if (sa != sb)
      bad("mixed signed and unsigned operands of '" + e.op + "'");
    bool sok = signed_op(e.op);
    unsigned a = width_of(*e.args[0], d, sok);
    unsigned b = width_of(*e.args[1], d, sok);
    if (a != b)
      bad("operands of '" + e.op + "' differ in width (" + std::to_string(a) + " vs "
          + std::to_string(b) + ")");
    static const std::unordered_set<std::string> ops = {
      "&", "|", "^", "+", "-", "*", "/", "%", "<<", ">>", "==", "!=", "<", "<=", ">", ">="};
    if (!ops.count(e.op))
      bad("binary operator '" + e.op + "'");
    return compare_op(e.op) ? 1 : a;
  }
  case VExpr::Ternary: {
    if (width_of(*e.args[0], d) != 1)
      bad("ternary condition must have width 1");
    unsigned a = width_of(*e.args[1], d), b = width_of(*e.args[2], d);
    if (a != b)
      bad("ternary arms differ in width");
    return a;
  }
  case VExpr::Select: {
    unsigned w = decl(e.name);
    if (e.lo > e.hi || e.hi >= w)
      bad("part-select [" + std::to_string(e.hi) + ":" + std::to_string(e.lo) + "] out of range for '"
          + e.name + "'");
    return e.hi - e.lo + 1;
  }
  case VExpr::Concat: {
    unsigned w = 0;
    if (e.args.empty())
      bad("empty concatenation");
    for (const auto& a : e.args)
      w += width_of(*a, d);
    if (w > max_width)
      bad("concatenation too wide");
    return w;
  }
  }
  return 0;
}

void collect_ids(const VExpr& e, std::vector<std::string>& out)
{
  if (e.kind == VExpr::Id || e.kind == VExpr::Signed || e.kind == VExpr::Select)
    out.push_back(e.name);
  for (const auto& a : e.args)
    collect_ids(*a, out);
}

} // namespace

VModule parse_subset(const std::string& text, const std::string& filename)
{
  Parser p(text, filename);
  return p.parse();
}

void validate(const VModule& m)
{
  Decls d = declarations(m);
  std::map<std::string, const VAssign*> def;
  for (const auto& a : m.assigns) {
    auto it = d.width.find(a.lhs);
    if (it == d.width.end())
      bad("assignment to undeclared '" + a.lhs + "'");
    if (d.is_input[a.lhs])
      bad("assignment to input '" + a.lhs + "'");
    if (!def.emplace(a.lhs, &a).second)
      bad("'" + a.lhs + "' assigned more than once");
    unsigned w = width_of(*a.rhs, d);
    if (w != it->second)
      bad("assignment to '" + a.lhs + "' has width " + std::to_string(w) + ", expected "
          + std::to_string(it->second));
  }
  for (const auto& [name, input] : d.is_input)
    if (!input && !def.count(name))
      bad("'" + name + "' is never assigned");
  for (const auto& a : m.asserts) {
    for (const VExprPtr& x : {a.guard, a.claim}) {
      if (x->kind != VExpr::Id && x->kind != VExpr::Const)
        bad("assertion operands must be identifiers or constants");
      if (width_of(*x, d) != 1)
        bad("assertion operands must have width 1");
    }
  }
  // Combinational loops.
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    int& s = state[n];
    if (s == 2)
      return;
    if (s == 1)
      bad("combinational loop through '" + n + "'");
    s = 1;
    auto it = def.find(n);
    if (it != def.end()) {
      std::vector<std::string> ids;
      collect_ids(*it->second->rhs, ids);
      for (const auto& x : ids)
        visit(x);
    }
    state[n] = 2;
  };
  for (const auto& [n, a] : def)
    visit(n);
}

LoweredModule lower_module(const VModule& m, bv::Context& ctx,
                           const std::unordered_map<std::string, std::string>& input_names)
{
  validate(m);
  using bv::Expr;
  using bv::Op;
  LoweredModule low;
  std::map<std::string, const VAssign*> def;
  std::map<std::string, Expr> val;
  for (const auto& a : m.assigns)
    def[a.lhs] = &a;
  for (const auto& p : m.ports) {
    if (p.output) {
      low.outputs.push_back(p);
      continue;
    }
    low.inputs.push_back(p);
    auto it = input_names.find(p.name);
    val[p.name] = ctx.var(it == input_names.end() ? p.name : it->second, p.width);
  }

  std::function<Expr(const std::string&)> value;
  std::function<Expr(const VExpr&)> lower = [&](const VExpr& e) -> Expr {
    switch (e.kind) {
    case VExpr::Id:
    case VExpr::Signed:
      return value(e.name);
    case VExpr::Const:
      return ctx.constant(e.value);
    case VExpr::Unary: {
      Expr a = lower(*e.args[0]);
      return e.op == "~" ? ctx.mk_not(a) : ctx.mk_neg(a);
    }
    case VExpr::Binary: {
      Expr a = lower(*e.args[0]);
      Expr b = lower(*e.args[1]);
      bool s = e.args[0]->kind == VExpr::Signed;
      const std::string& op = e.op;
      if (op == "&") return ctx.mk_and(a, b);
      if (op == "|") return ctx.mk_or(a, b);
      if (op == "^") return ctx.mk_xor(a, b);
      if (op == "+") return ctx.mk_add(a, b);
      if (op == "-") return ctx.mk_sub(a, b);
      if (op == "*") return ctx.mk_mul(a, b);
      if (op == "/") return s ? ctx.mk_sdiv(a, b) : ctx.mk_udiv(a, b);
      if (op == "%") return s ? ctx.mk_srem(a, b) : ctx.mk_urem(a, b);
      if (op == "<<") return ctx.mk_shl(a, b);
      if (op == ">>") return ctx.mk_lshr(a, b);
      if (op == "==") return ctx.mk_eq(a, b);
      if (op == "!=") return ctx.mk_not(ctx.mk_eq(a, b));
      if (op == "<") return s ? ctx.mk_slt(a, b) : ctx.mk_ult(a, b);
      if (op == "<=") return s ? ctx.mk_sle(a, b) : ctx.mk_ule(a, b);
      if (op == ">") return s ? ctx.mk_slt(b, a) : ctx.mk_ult(b, a);
      if (op == ">=") return s ? ctx.mk_sle(b, a) : ctx.mk_ule(b, a);
      internal_error("lower: binary operator " + op);
    }
    case VExpr::Ternary:
      return ctx.mk_ite(lower(*e.args[0]), lower(*e.args[1]), lower(*e.args[2]));
    case VExpr::Select:
      return ctx.mk_extract(value(e.name), e.hi, e.lo);
    case VExpr::Concat: {
      Expr r = lower(*e.args[0]);
      for (size_t i = 1; i < e.args.size(); i++)
        r = ctx.mk_concat(r, lower(*e.args[i]));
      return r;
    }
    }
    internal_error("lower: unknown expression");
  };
  value = [&](const std::string& n) -> Expr {
    auto it = val.find(n);
    if (it != val.end())
      return it->second;
    Expr r = lower(*def.at(n)->rhs);
    val[n] = r;
    return r;
  };

  for (const auto& p : low.outputs)
    low.output_exprs.push_back(value(p.name));
  for (const auto& a : m.asserts)
    low.assert_exprs.push_back(ctx.mk_or(ctx.mk_not(lower(*a.guard)), lower(*a.claim)));
  return low;
}

ModuleEvaluator::ModuleEvaluator(const VModule& m) : low_{lower_module(m, ctx_)}
{
  std::vector<bv::Expr> roots = low_.output_exprs;
  roots.insert(roots.end(), low_.assert_exprs.begin(), low_.assert_exprs.end());
  eval_ = std::make_unique<bv::Evaluator>(roots);
  inputs_.resize(eval_->vars().size());
}

void ModuleEvaluator::run(const bv::Env& inputs)
{
  const auto& names = eval_->vars();
  for (size_t i = 0; i < names.size(); i++) {
    auto it = inputs.find(names[i]);
    inputs_[i] = it != inputs.end() ? it->second : BitVec(eval_->var_widths()[i]);
  }
  eval_->run(inputs_);
}

const BitVec& ModuleEvaluator::output(size_t k) const
{
  return eval_->value(low_.output_exprs.at(k));
}

bool ModuleEvaluator::assert_holds(size_t k) const
{
  return eval_->value(low_.assert_exprs.at(k)).bit(0);
}

} // namespace c2v::v
