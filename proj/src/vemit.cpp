#include "c2v/vemit.hpp"

#include <json.hpp>
#include <set>
#include <unordered_set>

#include "c2v/preprocess.hpp"

namespace c2v::v {

VExprPtr id(std::string name)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Id;
  e->name = std::move(name);
  return e;
}

VExprPtr constant(const BitVec& v)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Const;
  e->value = v;
  return e;
}

VExprPtr unary(std::string op, VExprPtr a)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Unary;
  e->op = std::move(op);
  e->args = {std::move(a)};
  return e;
}

VExprPtr binary(std::string op, VExprPtr a, VExprPtr b)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Binary;
  e->op = std::move(op);
  e->args = {std::move(a), std::move(b)};
  return e;
}

VExprPtr signed_id(std::string name)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Signed;
  e->name = std::move(name);
  return e;
}

VExprPtr ternary(VExprPtr c, VExprPtr a, VExprPtr b)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Ternary;
  e->args = {std::move(c), std::move(a), std::move(b)};
  return e;
}

VExprPtr select(std::string name, unsigned hi, unsigned lo)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Select;
  e->name = std::move(name);
  e->hi = hi;
  e->lo = lo;
  return e;
}

VExprPtr concat(std::vector<VExprPtr> parts)
{
  auto e = std::make_shared<VExpr>();
  e->kind = VExpr::Concat;
  e->args = std::move(parts);
  return e;
}

bool operator==(const VExpr& a, const VExpr& b)
{
  if (a.kind != b.kind || a.name != b.name || a.op != b.op || a.hi != b.hi || a.lo != b.lo
      || a.args.size() != b.args.size())
    return false;
  if (a.kind == VExpr::Const && !(a.value == b.value))
    return false;
  for (size_t i = 0; i < a.args.size(); i++)
    if (!(*a.args[i] == *b.args[i]))
      return false;
  return true;
}

bool operator==(const VAssign& a, const VAssign& b) { return a.lhs == b.lhs && *a.rhs == *b.rhs; }

bool operator==(const VAssert& a, const VAssert& b)
{
  return *a.guard == *b.guard && *a.claim == *b.claim && a.label == b.label
         && a.message == b.message;
}

bool operator==(const VModule& a, const VModule& b)
{
  return a.name == b.name && a.ports == b.ports && a.wires == b.wires && a.assigns == b.assigns
         && a.asserts == b.asserts;
}

// ---- rendering ----

std::string render_expr(const VExpr& e)
{
  switch (e.kind) {
  case VExpr::Id:
    return e.name;
  case VExpr::Const:
    return std::to_string(e.value.width()) + "'h" + e.value.to_hex();
  case VExpr::Unary:
    return "(" + e.op + render_expr(*e.args[0]) + ")";
  case VExpr::Binary:
    return "(" + render_expr(*e.args[0]) + " " + e.op + " " + render_expr(*e.args[1]) + ")";
  case VExpr::Signed:
    return "$signed(" + e.name + ")";
  case VExpr::Ternary:
    return "(" + render_expr(*e.args[0]) + " ? " + render_expr(*e.args[1]) + " : "
           + render_expr(*e.args[2]) + ")";
  case VExpr::Select:
    return e.name + "[" + std::to_string(e.hi) + ":" + std::to_string(e.lo) + "]";
  case VExpr::Concat: {
    std::string s = "{";
    for (size_t i = 0; i < e.args.size(); i++)
      s += (i ? ", " : "") + render_expr(*e.args[i]);
    return s + "}";
  }
  }
  return {};
}

namespace {

std::string range(unsigned width)
{
  return width == 1 ? "" : "unsigned [" + std::to_string(width - 1) + ":0] ";
}

std::string quote(const std::string& s)
{
  std::string r;
  for (char c : s) {
    if (c == '"' || c == '\\')
      r += '\\';
    if (c == '%')
      r += '%';
    if (c == '\n') {
      r += "\\n";
      continue;
    }
    r += c;
  }
  return r;
}

} // namespace

std::string render_text(const VModule& m)
{
  std::string out = "module " + m.name + "(\n";
  for (size_t i = 0; i < m.ports.size(); i++) {
    const VPort& p = m.ports[i];
    out += std::string("  ") + (p.output ? "output" : "input") + " logic " + range(p.width) + p.name
           + (i + 1 < m.ports.size() ? ",\n" : "\n");
  }
  out += ");\n";
  for (const auto& w : m.wires)
    out += "  logic " + range(w.width) + w.name + ";\n";
  for (const auto& a : m.assigns)
    out += "  assign " + a.lhs + " = " + render_expr(*a.rhs) + ";\n";
  for (const auto& a : m.asserts) {
    std::string msg = a.label.empty() ? a.message : a.label + ": " + a.message;
    out += "  always_comb assert ((~" + render_expr(*a.guard) + ") | " + render_expr(*a.claim)
           + ") else $error(\"" + quote(msg) + "\");\n";
  }
  out += "endmodule\n";
  return out;
}

std::string emit_backmap(const BackMap& map)
{
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : map.entries) {
    nlohmann::ordered_json o;
    o["id"] = e.id;
    o["file"] = e.loc.file;
    o["line"] = e.loc.line;
    o["col"] = e.loc.col;
    o["expr"] = e.expr;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

// ---- emission ----

namespace {

const std::unordered_set<std::string>& reserved_words()
{
  static const std::unordered_set<std::string> words = {
    "accept_on", "alias", "always", "always_comb", "always_ff", "always_latch", "and", "assert",
    "assign", "assume", "automatic", "before", "begin", "bind", "bins", "binsof", "bit", "break",
    "buf", "bufif0", "bufif1", "byte", "case", "casex", "casez", "cell", "chandle", "checker",
    "class", "clocking", "cmos", "config", "const", "constraint", "context", "continue", "cover",
    "covergroup", "coverpoint", "cross", "deassign", "default", "defparam", "design", "disable",
    "dist", "do", "edge", "else", "end", "endcase", "endchecker", "endclass", "endclocking",
    "endconfig", "endfunction", "endgenerate", "endgroup", "endinterface", "endmodule",
    "endpackage", "endprimitive", "endprogram", "endproperty", "endspecify", "endsequence",
    "endtable", "endtask", "enum", "event", "eventually", "expect", "export", "extends", "extern",
    "final", "first_match", "for", "force", "foreach", "forever", "fork", "forkjoin", "function",
    "generate", "genvar", "global", "highz0", "highz1", "if", "iff", "ifnone", "ignore_bins",
    "illegal_bins", "implements", "implies", "import", "incdir", "include", "initial", "inout",
    "input", "inside", "instance", "int", "integer", "interconnect", "interface", "intersect",
    "join", "join_any", "join_none", "large", "let", "liblist", "library", "local", "localparam",
    "logic", "longint", "macromodule", "matches", "medium", "modport", "module", "nand",
    "negedge", "nettype", "new", "nexttime", "nmos", "nor", "noshowcancelled", "not", "notif0",
    "notif1", "null", "or", "output", "package", "packed", "parameter", "pmos", "posedge",
    "primitive", "priority", "program", "property", "protected", "pull0", "pull1", "pulldown",
    "pullup", "pulsestyle_ondetect", "pulsestyle_onevent", "pure", "rand", "randc", "randcase",
    "randsequence", "rcmos", "real", "realtime", "ref", "reg", "reject_on", "release", "repeat",
    "restrict", "return", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "s_always",
    "s_eventually", "s_nexttime", "s_until", "s_until_with", "scalared", "sequence", "shortint",
    "shortreal", "showcancelled", "signed", "small", "soft", "solve", "specify", "specparam",
    "static", "string", "strong", "strong0", "strong1", "struct", "super", "supply0", "supply1",
    "sync_accept_on", "sync_reject_on", "table", "tagged", "task", "this", "throughout", "time",
    "timeprecision", "timeunit", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand",
    "trior", "trireg", "type", "typedef", "union", "unique", "unique0", "unsigned", "until",
    "until_with", "untyped", "use", "uwire", "var", "vectored", "virtual", "void", "wait",
    "wait_order", "wand", "weak", "weak0", "weak1", "while", "wildcard", "wire", "with", "within",
    "wor", "xnor", "xor",
  };
  return words;
}

bool is_aux_name(const std::string& n)
{
  if (n.rfind("aux_", 0) != 0 || n.size() == 4)
    return false;
  return n.find_first_not_of("0123456789", 4) == std::string::npos;
}

std::string escape(const std::string& n)
{
  if (reserved_words().count(n) || n.rfind("c2v_", 0) == 0 || is_aux_name(n))
    return "c2v_" + n;
  return n;
}

class Emitter
{
public:
  Emitter(const SsaTrace& t, const std::string& name) : t_{t}, ctx_{*t.ctx}
  {
    m_.name = name;
  }

  std::pair<VModule, BackMap> run()
  {
    for (const auto& p : t_.iface.inputs)
      port(false, p);
    for (const auto& p : t_.free_vars)
      port(false, p);
    for (const auto& p : t_.iface.outputs) {
      port(true, p);
      outputs_.insert(p.name);
    }

    std::vector<std::pair<bv::Expr, bv::Expr>> checks = group_obligations();
    std::vector<bv::Expr> roots;
    for (const auto& eq : t_.equations)
      roots.push_back(eq.rhs);
    for (const auto& [g, c] : checks) {
      roots.push_back(g);
      roots.push_back(c);
    }
    count_uses(roots);

    for (const auto& eq : t_.equations) {
      cur_loc_ = eq.loc;
      std::string lhs = escape(eq.lhs);
      if (!outputs_.count(eq.lhs)) {
        declare(lhs, eq.rhs->width, eq.loc);
      }
      VExprPtr rhs;
      auto it = named_.find(eq.rhs->id);
      if (it != named_.end())
        rhs = id(it->second);
      else
        rhs = build(eq.rhs);
      m_.assigns.push_back({lhs, rhs});
      if (!named_.count(eq.rhs->id) && !eq.rhs->is_const())
        named_[eq.rhs->id] = lhs;
    }

    for (size_t k = 0; k < checks.size(); k++) {
      const Obligation& o = *group_rep_[k];
      cur_loc_ = o.loc;
      VAssert a;
      a.guard = leaf(checks[k].first);
      a.claim = leaf(checks[k].second);
      if (o.kind != ObligationKind::UserAssert)
        a.label = std::string("c2v_check_") + check_label(o.kind) + "_" + std::to_string(k);
      a.message = o.loc.file + ":" + std::to_string(o.loc.line) + ": " + o.message;
      m_.asserts.push_back(std::move(a));
    }
    return {std::move(m_), std::move(map_)};
  }

private:
  const SsaTrace& t_;
  bv::Context& ctx_;
  VModule m_;
  BackMap map_;
  std::set<std::string> outputs_;
  std::unordered_set<std::string> declared_;
  std::unordered_map<uint32_t, std::string> named_;
  std::unordered_map<uint32_t, unsigned> uses_;
  std::vector<const Obligation*> group_rep_;
  unsigned aux_ = 0;
  SourceLoc cur_loc_;

  void note(const std::string& name, const SourceLoc& loc)
  {
    if (!declared_.insert(name).second)
      fail("E_NAME_COLLISION", "identifier '" + name + "' would be declared twice");
    map_.entries.push_back({name, loc, source_line(loc)});
  }

  void port(bool output, const Port& p)
  {
    std::string n = escape(p.name);
    note(n, p.loc);
    m_.ports.push_back({output, n, p.width});
  }

  void declare(const std::string& name, unsigned width, const SourceLoc& loc)
  {
    note(name, loc);
    m_.wires.push_back({name, width});
  }

  // One assertion per user assert site; every other obligation separately.
  std::vector<std::pair<bv::Expr, bv::Expr>> group_obligations()
  {
    std::vector<std::pair<bv::Expr, bv::Expr>> out;
    std::map<std::pair<std::string, std::pair<unsigned, unsigned>>, size_t> site;
    std::vector<std::vector<const Obligation*>> groups;
    for (const auto& o : t_.obligations) {
      if (o.kind == ObligationKind::UserAssert) {
        auto key = std::make_pair(o.loc.file + "\n" + o.message, std::make_pair(o.loc.line, o.loc.col));
        auto it = site.find(key);
        if (it != site.end()) {
          groups[it->second].push_back(&o);
          continue;
        }
        site[key] = groups.size();
      }
      groups.push_back({&o});
    }
    for (const auto& g : groups) {
      group_rep_.push_back(g.front());
      if (g.size() == 1) {
        out.emplace_back(g.front()->guard, g.front()->claim);
        continue;
      }
      bv::Expr all = ctx_.bool_const(true);
      for (const Obligation* o : g)
        all = ctx_.mk_and(all, ctx_.mk_implies(o->guard, o->claim));
      out.emplace_back(ctx_.bool_const(true), ctx_.simplify(all));
    }
    return out;
  }

  void count_uses(const std::vector<bv::Expr>& roots)
  {
    std::unordered_set<uint32_t> seen;
    std::vector<bv::Expr> stack;
    for (bv::Expr r : roots) {
      uses_[r->id]++;
      stack.push_back(r);
    }
    while (!stack.empty()) {
      bv::Expr e = stack.back();
      stack.pop_back();
      if (!seen.insert(e->id).second)
        continue;
      for (unsigned i = 0; i < e->nargs; i++) {
        uses_[e->args[i]->id]++;
        stack.push_back(e->args[i]);
      }
    }
  }

  std::string new_aux(bv::Expr e, VExprPtr rhs)
  {
    std::string name = "aux_" + std::to_string(aux_++);
    auto loc = ctx_.loc_of(e);
    declare(name, e->width, loc ? *loc : cur_loc_);
    m_.assigns.push_back({name, std::move(rhs)});
    return name;
  }

  // Identifier holding the value of `e`.
  std::string name_of(bv::Expr e)
  {
    if (e->is_var())
      return escape(e->name);
    auto it = named_.find(e->id);
    if (it != named_.end())
      return it->second;
    std::string n = new_aux(e, build(e));
    named_[e->id] = n;
    return n;
  }

  VExprPtr leaf(bv::Expr e)
  {
    if (e->is_const())
      return constant(e->value);
    return id(name_of(e));
  }

  VExprPtr sub(bv::Expr e)
  {
    if (e->is_const())
      return constant(e->value);
    if (e->is_var() || named_.count(e->id) || uses_[e->id] > 1)
      return id(name_of(e));
    return build(e);
  }

  VExprPtr bin(const char* op, bv::Expr e) { return binary(op, sub(e->args[0]), sub(e->args[1])); }

  VExprPtr build(bv::Expr e)
  {
    using bv::Op;
    unsigned w = e->width;
    switch (e->op) {
    case Op::Const: return constant(e->value);
    case Op::Var: return id(escape(e->name));
    case Op::Not: return unary("~", sub(e->args[0]));
    case Op::Neg: return unary("-", sub(e->args[0]));
    case Op::And: return bin("&", e);
    case Op::Or: return bin("|", e);
    case Op::Xor: return bin("^", e);
    case Op::Add: return bin("+", e);
    case Op::Sub: return bin("-", e);
    case Op::Mul: return bin("*", e);
    case Op::Shl: return bin("<<", e);
    case Op::Lshr: return bin(">>", e);
    case Op::Eq: return bin("==", e);
    case Op::Ult: return bin("<", e);
    case Op::Ule: return bin("<=", e);
    case Op::Slt:
    case Op::Sle:
      return binary(e->op == Op::Slt ? "<" : "<=", signed_id(name_of(e->args[0])),
                    signed_id(name_of(e->args[1])));
    case Op::Udiv:
    case Op::Urem: {
      VExprPtr a = leaf(e->args[0]);
      VExprPtr b = leaf(e->args[1]);
      VExprPtr zero = binary("==", b, constant(BitVec(w)));
      if (e->op == Op::Udiv)
        return ternary(zero, constant(BitVec::ones(w)), binary("/", a, b));
      return ternary(zero, a, binary("%", a, b));
    }
    case Op::Sdiv:
    case Op::Srem: {
      std::string a = name_of(e->args[0]);
      std::string b = name_of(e->args[1]);
      bool div = e->op == Op::Sdiv;
      std::string q = new_aux(e, binary(div ? "/" : "%", signed_id(a), signed_id(b)));
      VExprPtr zero = binary("==", id(b), constant(BitVec(w)));
      return ternary(zero, div ? constant(BitVec::ones(w)) : id(a), id(q));
    }
    case Op::Ashr: {
      std::string a = name_of(e->args[0]);
      VExprPtr s = leaf(e->args[1]);
      return ternary(select(a, w - 1, w - 1), unary("~", binary(">>", unary("~", id(a)), s)),
                     binary(">>", id(a), s));
    }
    case Op::Ite:
      return ternary(sub(e->args[0]), sub(e->args[1]), sub(e->args[2]));
    case Op::Extract:
      return select(name_of(e->args[0]), e->hi, e->lo);
    case Op::Concat:
      return concat({sub(e->args[0]), sub(e->args[1])});
    case Op::Zext:
      if (w == e->args[0]->width)
        return sub(e->args[0]);
      return concat({constant(BitVec(w - e->args[0]->width)), sub(e->args[0])});
    case Op::Sext: {
      unsigned aw = e->args[0]->width;
      if (w == aw)
        return sub(e->args[0]);
      std::string a = name_of(e->args[0]);
      return ternary(select(a, aw - 1, aw - 1), concat({constant(BitVec::ones(w - aw)), id(a)}),
                     concat({constant(BitVec(w - aw)), id(a)}));
    }
    }
    internal_error("emit: unknown operator");
  }
};

} // namespace

std::pair<VModule, BackMap> emit_module(const SsaTrace& trace, const std::string& module_name)
{
  Emitter em(trace, escape(module_name));
  return em.run();
}

} // namespace c2v::v
