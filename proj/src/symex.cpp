#include "c2v/symex.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace c2v {

const char* kind_name(ObligationKind k)
{
  switch (k) {
  case ObligationKind::UserAssert: return "user-assert";
  case ObligationKind::Unwinding: return "unwinding";
  case ObligationKind::DivByZero: return "div-by-zero";
  case ObligationKind::Overshift: return "overshift";
  case ObligationKind::Bounds: return "bounds";
  case ObligationKind::NullDeref: return "null-deref";
  }
  return "?";
}

const char* check_label(ObligationKind k)
{
  switch (k) {
  case ObligationKind::UserAssert: return "assert";
  case ObligationKind::Unwinding: return "unwind";
  case ObligationKind::DivByZero: return "div";
  case ObligationKind::Overshift: return "shift";
  case ObligationKind::Bounds: return "bounds";
  case ObligationKind::NullDeref: return "null";
  }
  return "?";
}

CheckSet parse_check_list(const std::string& list)
{
  CheckSet cs;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "div")
      cs.div = true;
    else if (item == "shift")
      cs.shift = true;
    else if (item == "bounds")
      cs.bounds = true;
    else if (item == "null")
      cs.null = true;
    else if (item == "all")
      cs = {true, true, true, true};
    else if (!item.empty())
      fail("E_USAGE", "unknown check '" + item + "' (expected div, shift, bounds, null)");
  }
  return cs;
}

namespace {

using bv::Expr;

inline constexpr unsigned max_object_bytes = max_width / 8;

struct Value
{
  Expr bits = nullptr;
  std::vector<uint32_t> pts; // object and function codes this value may point to
  bool maybe_null = false;
};

struct Object
{
  Expr content = nullptr; // 8*size bits, little-endian
  unsigned size = 0;
  std::vector<uint32_t> pts;
  bool maybe_null = true;
  Expr fresh = nullptr;   // unconstrained initial content, while untouched
};

struct State
{
  Expr guard = nullptr;
  std::map<uint32_t, Object> objects;
  std::vector<Expr> outputs; // per interface output; null = not driven yet
};

void merge_pts(std::vector<uint32_t>& into, const std::vector<uint32_t>& from)
{
  if (from.empty())
    return;
  std::vector<uint32_t> out;
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

bool is_false(Expr e) { return e->is_const() && e->value.is_zero(); }
bool is_true(Expr e) { return e->is_const() && !e->value.is_zero(); }

struct Jumps
{
  bool is_loop = false;
  std::vector<State> breaks;
  std::vector<State> continues;
};

struct Frame
{
  const FuncDecl* func = nullptr;
  std::vector<std::pair<State, Value>> returns;
  std::vector<Jumps*> jumps;
};

class Executor
{
public:
  Executor(const TypedProgram& prog, const SymexOptions& opts)
    : prog_{prog}, opts_{opts}, ctx_{std::make_shared<bv::Context>()}
  {
    for (const auto& v : prog_.vars)
      if (v->owner && v->storage != VarDecl::Global)
        locals_of_[v->owner].push_back(v->code);
  }

  SsaTrace run(const std::string& entry)
  {
    const FuncDecl* f = prog_.find_function(entry);
    if (!f || !f->body)
      fail("E_NO_ENTRY", "entry function '" + entry + "' is not defined");
    if (!f->type->elem->is_void() || !f->params.empty())
      fail("E_NO_ENTRY", "entry function '" + entry + "' must take no parameters and return void",
           f->loc);
    entry_ = f;
    reserve_interface_names(*f->body);

    st_.guard = ctx_->bool_const(true);
    for (const VarDecl* g : prog_.globals)
      init_object(*g);

    Frame frame{f, {}, {}};
    frames_.push_back(&frame);
    for (const auto& s : f->body->stmts)
      exec(*s);
    frames_.pop_back();
    finish_call(frame, nullptr);

    for (size_t k = 0; k < trace_.iface.outputs.size(); k++) {
      const Port& p = trace_.iface.outputs[k];
      Expr v = k < st_.outputs.size() && st_.outputs[k] ? st_.outputs[k] : ctx_->zero(p.width);
      trace_.equations.push_back({p.name, ctx_->simplify(v), p.loc});
    }
    trace_.ctx = ctx_;
    return std::move(trace_);
  }

private:
  const TypedProgram& prog_;
  const SymexOptions& opts_;
  std::shared_ptr<bv::Context> ctx_;
  SsaTrace trace_;
  State st_;
  std::vector<Frame*> frames_;
  const FuncDecl* entry_ = nullptr;
  int nest_ = 0;
  std::unordered_map<const FuncDecl*, std::vector<uint32_t>> locals_of_;
  std::unordered_map<std::string, unsigned> counters_;
  std::unordered_set<std::string> taken_;
  std::set<uint32_t> read_;
  std::vector<Value> compound_;
  std::unordered_map<const c2v::Expr*, bool> pure_;

  // ---- names and equations ----
  // Ports in source order, fixed before execution so that dead paths do
  // not change the interface.
  void reserve_interface_names(const Stmt& s)
  {
    if (s.kind == StmtKind::Sample || s.kind == StmtKind::Drive) {
      const VarDecl* v = s.vars.at(0);
      auto& ins = trace_.iface.inputs;
      auto& outs = trace_.iface.outputs;
      auto has = [&](const std::vector<Port>& ports) {
        return std::any_of(ports.begin(), ports.end(),
                           [&](const Port& p) { return p.name == s.name; });
      };
      if (s.kind == StmtKind::Sample) {
        if (has(ins))
          fail("E_INTERFACE", "input '" + s.name + "' is sampled twice", s.loc);
        if (has(outs))
          fail("E_INTERFACE", "'" + s.name + "' is both an input and an output", s.loc);
        ins.push_back({s.name, width_of(v->type), s.loc});
      } else {
        if (has(ins))
          fail("E_INTERFACE", "'" + s.name + "' is both an input and an output", s.loc);
        if (!has(outs))
          outs.push_back({s.name, width_of(v->type), s.loc});
      }
      taken_.insert(s.name);
    }
    if (s.init)
      reserve_interface_names(*s.init);
    if (s.body)
      reserve_interface_names(*s.body);
    if (s.else_body)
      reserve_interface_names(*s.else_body);
    for (const auto& c : s.stmts)
      reserve_interface_names(*c);
  }

  std::string fresh(const std::string& base)
  {
    for (;;) {
      std::string name = base + "_" + std::to_string(++counters_[base]);
      if (taken_.insert(name).second)
        return name;
    }
  }

  Expr define(const std::string& base, Expr rhs, const SourceLoc& loc)
  {
    rhs = ctx_->simplify(rhs);
    if (rhs->is_const() || rhs->is_var())
      return rhs;
    ctx_->set_loc(rhs, loc);
    std::string name = fresh(base);
    trace_.equations.push_back({name, rhs, loc});
    return ctx_->var(name, rhs->width);
  }

  const std::string& object_name(uint32_t code) const { return prog_.var_by_code(code)->name; }

  void obligation(ObligationKind kind, Expr claim, const SourceLoc& loc, std::string message)
  {
    Expr g = ctx_->simplify(st_.guard);
    if (is_false(g))
      return;
    trace_.obligations.push_back({kind, g, ctx_->simplify(claim), loc, std::move(message)});
  }

  // ---- bit helpers ----
  Expr c32(uint64_t v) { return ctx_->constant(32, v); }
  Expr c64(uint64_t v) { return ctx_->constant(64, v); }
  Expr truth(Expr v) { return ctx_->mk_not(ctx_->mk_eq(v, ctx_->zero(v->width))); }
  Expr code_of(Expr p) { return ctx_->mk_extract(p, 63, 32); }
  Expr offset_of(Expr p) { return ctx_->mk_extract(p, 31, 0); }
  Expr ite(Expr c, Expr a, Expr b) { return a == b ? a : ctx_->mk_ite(c, a, b); }

  static unsigned width_of(const TypeRef& t) { return 8 * size_of(t); }

  Value plain(Expr bits) { return Value{bits, {}, false}; }

  Value address_of(uint32_t code)
  {
    return Value{c64(uint64_t(code) << 32), {code}, false};
  }

  Value function_value(const FuncDecl* f) { return Value{c64(f->code), {f->code}, false}; }

  // ---- state merging ----
  Object merge_object(Expr sel, const Object& a, const Object& b, uint32_t code,
                      const SourceLoc& loc)
  {
    Object r = a;
    merge_pts(r.pts, b.pts);
    r.maybe_null = a.maybe_null || b.maybe_null;
    if (a.content == b.content)
      return r;
    if (a.fresh && a.content == a.fresh) {
      r.content = b.content;
      r.fresh = b.fresh;
      return r;
    }
    if (b.fresh && b.content == b.fresh)
      return r;
    r.fresh = nullptr;
    r.content = define(object_name(code), ite(sel, a.content, b.content), loc);
    return r;
  }

  // `sel` selects `a`; it must hold wherever a's guard does and fail
  // wherever b's guard does.
  State merge2(Expr sel, State a, State b, const SourceLoc& loc)
  {
    if (is_false(a.guard))
      return b;
    if (is_false(b.guard))
      return a;
    State r;
    r.guard = ctx_->mk_or(a.guard, b.guard);
    for (auto& [code, oa] : a.objects) {
      auto it = b.objects.find(code);
      r.objects[code] = it == b.objects.end() ? oa : merge_object(sel, oa, it->second, code, loc);
    }
    for (auto& [code, ob] : b.objects)
      if (!r.objects.count(code))
        r.objects[code] = ob;
    size_t n = std::max(a.outputs.size(), b.outputs.size());
    r.outputs.resize(n);
    for (size_t k = 0; k < n; k++) {
      Expr x = k < a.outputs.size() ? a.outputs[k] : nullptr;
      Expr y = k < b.outputs.size() ? b.outputs[k] : nullptr;
      if (x == y) {
        r.outputs[k] = x;
        continue;
      }
      unsigned w = trace_.iface.outputs[k].width;
      r.outputs[k] = define(trace_.iface.outputs[k].name,
                            ite(sel, x ? x : ctx_->zero(w), y ? y : ctx_->zero(w)), loc);
    }
    return r;
  }

  State merge_all(std::vector<State> parts, const SourceLoc& loc)
  {
    std::vector<State> live;
    for (auto& p : parts)
      if (!is_false(p.guard))
        live.push_back(std::move(p));
    if (live.empty())
      return dead();
    State r = std::move(live.back());
    for (size_t i = live.size() - 1; i-- > 0;) {
      Expr sel = live[i].guard;
      r = merge2(sel, std::move(live[i]), std::move(r), loc);
    }
    return r;
  }

  State dead()
  {
    State s;
    s.guard = ctx_->bool_const(false);
    return s;
  }

  bool alive() const { return !is_false(st_.guard); }

  // ---- memory ----
  Object& object(uint32_t code)
  {
    auto it = st_.objects.find(code);
    if (it == st_.objects.end())
      internal_error("access to object '" + object_name(code) + "' outside its lifetime");
    return it->second;
  }

  Object& create_object(const VarDecl& v)
  {
    unsigned size = size_of(v.type);
    if (size > max_object_bytes)
      fail("E_UNSUPPORTED", "object '" + v.name + "' is " + std::to_string(size)
                                + " bytes; objects are limited to "
                                + std::to_string(max_object_bytes) + " bytes",
           v.loc);
    Object& o = st_.objects[v.code];
    o = Object{};
    o.size = size;
    return o;
  }

  void init_object(const VarDecl& v)
  {
    Object& o = create_object(v);
    if (v.has_init || v.storage == VarDecl::Global) {
      o.content = ctx_->zero(8 * o.size);
      o.maybe_null = true;
      for (const auto& item : v.init) {
        Value val = eval(*item.expr);
        Object& oo = object(v.code);
        oo.content = define(v.name, write_bytes(oo, c32(item.offset), val.bits), item.expr->loc);
        merge_pts(oo.pts, val.pts);
        oo.maybe_null = oo.maybe_null || val.maybe_null;
      }
      return;
    }
    std::string name = fresh("nondet");
    trace_.free_vars.push_back({name, 8 * o.size, v.loc});
    o.content = o.fresh = ctx_->var(name, 8 * o.size);
    o.maybe_null = true;
  }

  Expr read_bytes(const Object& o, Expr off, unsigned n)
  {
    unsigned w = 8 * o.size;
    uint64_t k;
    if (off->is_const() && off->value.fits_u64(k) && k + n <= o.size)
      return ctx_->mk_extract(o.content, 8 * unsigned(k + n) - 1, 8 * unsigned(k));
    unsigned wc = std::max(w, 8 * n);
    Expr c = ctx_->mk_resize(o.content, wc);
    Expr amt = ctx_->mk_mul(ctx_->mk_resize(off, wc), ctx_->constant(wc, 8));
    Expr r = ctx_->mk_extract(ctx_->mk_lshr(c, amt), 8 * n - 1, 0);
    return ite(ctx_->mk_ult(off, c32(o.size)), r, ctx_->zero(8 * n));
  }

  Expr write_bytes(const Object& o, Expr off, Expr v)
  {
    unsigned w = 8 * o.size;
    unsigned n = v->width / 8;
    uint64_t k;
    if (off->is_const() && off->value.fits_u64(k) && k + n <= o.size) {
      Expr r = v;
      if (k > 0)
        r = ctx_->mk_concat(r, ctx_->mk_extract(o.content, 8 * unsigned(k) - 1, 0));
      if (k + n < o.size)
        r = ctx_->mk_concat(ctx_->mk_extract(o.content, w - 1, 8 * unsigned(k + n)), r);
      return r;
    }
    unsigned wm = std::max(w, 8 * n);
    Expr c = ctx_->mk_resize(o.content, wm);
    Expr amt = ctx_->mk_mul(ctx_->mk_resize(off, wm), ctx_->constant(wm, 8));
    Expr mask = ctx_->mk_shl(ctx_->mk_resize(ctx_->ones(8 * n), wm), amt);
    Expr val = ctx_->mk_shl(ctx_->mk_resize(v, wm), amt);
    Expr r = ctx_->mk_or(ctx_->mk_and(c, ctx_->mk_not(mask)), val);
    if (wm > w)
      r = ctx_->mk_extract(r, w - 1, 0);
    return ite(ctx_->mk_ult(off, c32(o.size)), r, o.content);
  }

  std::vector<uint32_t> object_targets(const Value& p, const SourceLoc& loc)
  {
    std::vector<uint32_t> t;
    for (uint32_t c : p.pts)
      if (c < func_code_base)
        t.push_back(c);
    if (t.empty() && !p.maybe_null)
      fail("E_WILD_POINTER", "dereferenced pointer has no possible target", loc);
    return t;
  }

  void deref_checks(const Value& p, const std::vector<uint32_t>& targets, unsigned n,
                    const SourceLoc& loc)
  {
    Expr code = code_of(p.bits);
    bool exact = targets.size() == 1 && !p.maybe_null;
    if (opts_.checks.null && p.maybe_null)
      obligation(ObligationKind::NullDeref, truth(code), loc, "null pointer dereference");
    if (!opts_.checks.bounds)
      return;
    for (uint32_t c : targets) {
      auto it = st_.objects.find(c);
      unsigned size = it == st_.objects.end() ? 0 : it->second.size;
      Expr in = n <= size ? ctx_->mk_ule(offset_of(p.bits), c32(size - n)) : ctx_->bool_const(false);
      Expr claim = exact ? in : ctx_->mk_implies(ctx_->mk_eq(code, c32(c)), in);
      obligation(ObligationKind::Bounds, claim, loc, "out-of-bounds access to '" + object_name(c) + "'");
    }
  }

  Value load(const Value& p, unsigned n, const SourceLoc& loc)
  {
    auto targets = object_targets(p, loc);
    deref_checks(p, targets, n, loc);
    bool exact = targets.size() == 1 && !p.maybe_null;
    Expr off = offset_of(p.bits);
    Expr code = code_of(p.bits);
    Value r{ctx_->zero(8 * n), {}, false};
    for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
      uint32_t c = *it;
      read_.insert(c);
      auto oit = st_.objects.find(c);
      if (oit == st_.objects.end())
        continue;
      const Object& o = oit->second;
      Expr slice = read_bytes(o, off, n);
      r.bits = exact ? slice : ite(ctx_->mk_eq(code, c32(c)), slice, r.bits);
      merge_pts(r.pts, o.pts);
      r.maybe_null = r.maybe_null || o.maybe_null;
    }
    return r;
  }

  void store(const Value& p, const Value& v, const SourceLoc& loc)
  {
    unsigned n = v.bits->width / 8;
    auto targets = object_targets(p, loc);
    deref_checks(p, targets, n, loc);
    bool exact = targets.size() == 1 && !p.maybe_null;
    Expr off = offset_of(p.bits);
    Expr code = code_of(p.bits);
    for (uint32_t c : targets) {
      auto oit = st_.objects.find(c);
      if (oit == st_.objects.end())
        continue;
      Object& o = oit->second;
      Expr nc = write_bytes(o, off, v.bits);
      if (!exact)
        nc = ite(ctx_->mk_eq(code, c32(c)), nc, o.content);
      o.content = define(object_name(c), nc, loc);
      o.fresh = nullptr;
      uint64_t k;
      bool whole = exact && n == o.size && off->is_const() && off->value.fits_u64(k) && k == 0;
      if (whole) {
        o.pts = v.pts;
        o.maybe_null = v.maybe_null;
      } else {
        merge_pts(o.pts, v.pts);
        o.maybe_null = o.maybe_null || v.maybe_null;
      }
    }
  }

  // ---- expressions ----
  bool pure(const c2v::Expr& e)
  {
    auto it = pure_.find(&e);
    if (it != pure_.end())
      return it->second;
    bool p = e.kind != ExprKind::Assign && e.kind != ExprKind::IncDec && e.kind != ExprKind::Call;
    for (const auto& k : e.kids)
      p = pure(*k) && p;
    pure_[&e] = p;
    return p;
  }

  Value zero_value(const TypeRef& t)
  {
    if (t->is_void())
      return Value{};
    return plain(ctx_->zero(width_of(t)));
  }

  // Evaluates `e` on the paths where `c` holds; other paths keep the state.
  Value eval_under(Expr c, const c2v::Expr& e)
  {
    Expr g = st_.guard;
    Expr gc = ctx_->mk_and(g, c);
    if (pure(e)) {
      st_.guard = gc;
      Value v = eval(e);
      st_.guard = g;
      return v;
    }
    if (is_false(gc))
      return zero_value(e.type);
    State other = st_;
    other.guard = ctx_->mk_and(g, ctx_->mk_not(c));
    st_.guard = gc;
    Value v = eval(e);
    Expr sel = st_.guard == gc ? c : st_.guard;
    st_ = merge2(sel, std::move(st_), std::move(other), e.loc);
    return v;
  }

  Value ptr_add(const Value& p, Expr delta32)
  {
    Value r = p;
    r.bits = ctx_->mk_concat(code_of(p.bits), ctx_->mk_add(offset_of(p.bits), delta32));
    return r;
  }

  Value ptr_index(const Value& p, Expr index64, unsigned elem_size, bool negate)
  {
    Expr d = ctx_->mk_extract(ctx_->mk_mul(index64, c64(elem_size)), 31, 0);
    if (negate)
      d = ctx_->mk_neg(d);
    return ptr_add(p, d);
  }

  Value eval_lvalue(const c2v::Expr& e)
  {
    switch (e.kind) {
    case ExprKind::Ident:
      if (e.var)
        return address_of(e.var->code);
      break;
    case ExprKind::Unary:
      if (e.op == "*")
        return eval(*e.kids[0]);
      break;
    case ExprKind::Index: {
      Value p = eval(*e.kids[0]);
      Value i = eval(*e.kids[1]);
      return ptr_index(p, i.bits, size_of(e.type), false);
    }
    case ExprKind::Member: {
      Value base = e.arrow ? eval(*e.kids[0]) : eval_lvalue(*e.kids[0]);
      return ptr_add(base, c32(e.field->offset));
    }
    default:
      break;
    }
    fail("E_UNSUPPORTED", "expression is not addressable", e.loc);
  }

  Value convert(const c2v::Expr& e)
  {
    const c2v::Expr& k = *e.kids[0];
    switch (e.conv) {
    case ConvKind::LValueToRValue:
      return load(eval_lvalue(k), size_of(e.type), e.loc);
    case ConvKind::ArrayDecay:
      return eval_lvalue(k);
    case ConvKind::FuncDecay:
      if (k.kind == ExprKind::Ident && k.func)
        return function_value(k.func);
      if (k.kind == ExprKind::Unary && k.op == "*")
        return eval(*k.kids[0]);
      break;
    case ConvKind::None:
    case ConvKind::Bitcast:
    case ConvKind::PtrToPtr:
      return eval(k);
    case ConvKind::IntToInt: {
      Value v = eval(k);
      unsigned to = width_of(e.type);
      if (to > v.bits->width && k.type->is_signed && !k.type->is_bool())
        v.bits = ctx_->mk_sext(v.bits, to);
      else
        v.bits = ctx_->mk_resize(v.bits, to);
      return v;
    }
    case ConvKind::IntToBool:
    case ConvKind::PtrToBool: {
      Value v = eval(k);
      return plain(ctx_->mk_zext(truth(v.bits), 8));
    }
    case ConvKind::PtrToInt: {
      Value v = eval(k);
      v.bits = ctx_->mk_resize(v.bits, width_of(e.type));
      return v;
    }
    case ConvKind::IntToPtr: {
      Value v = eval(k);
      if (v.bits->width < 64 && k.type->is_signed && !k.type->is_bool())
        v.bits = ctx_->mk_sext(v.bits, 64);
      else
        v.bits = ctx_->mk_resize(v.bits, 64);
      v.maybe_null = v.maybe_null || v.pts.empty();
      return v;
    }
    }
    fail("E_UNSUPPORTED", "unsupported conversion", e.loc);
  }

  Value unary(const c2v::Expr& e)
  {
    const c2v::Expr& k = *e.kids[0];
    if (e.op == "&") {
      if (k.kind == ExprKind::Ident && k.func)
        return function_value(k.func);
      return eval_lvalue(k);
    }
    if (e.op == "*")
      return load(eval(k), size_of(e.type), e.loc);
    Value v = eval(k);
    if (e.op == "+")
      return v;
    if (e.op == "-") {
      if (e.type->is_float()) {
        unsigned w = v.bits->width;
        BitVec sign(w);
        sign.set_bit(w - 1, true);
        return plain(ctx_->mk_xor(v.bits, ctx_->constant(sign)));
      }
      return plain(ctx_->mk_neg(v.bits));
    }
    if (e.op == "~")
      return plain(ctx_->mk_not(v.bits));
    if (e.op == "!")
      return plain(ctx_->mk_zext(ctx_->mk_eq(v.bits, ctx_->zero(v.bits->width)), 32));
    fail("E_UNSUPPORTED", "unsupported operator '" + e.op + "'", e.loc);
  }

  Expr shift_amount(Expr b, unsigned w)
  {
    unsigned wb = b->width;
    if (wb <= w)
      return ctx_->mk_zext(b, w);
    return ite(ctx_->mk_ult(b, ctx_->constant(wb, w)), ctx_->mk_extract(b, w - 1, 0),
               ctx_->constant(w, w));
  }

  Value binary(const c2v::Expr& e)
  {
    const std::string& op = e.op;
    const c2v::Expr& ka = *e.kids[0];
    const c2v::Expr& kb = *e.kids[1];
    if (op == "&&" || op == "||") {
      Expr a = truth(eval(ka).bits);
      Expr b = truth(eval_under(op == "&&" ? a : ctx_->mk_not(a), kb).bits);
      Expr r = op == "&&" ? ctx_->mk_and(a, b) : ctx_->mk_or(a, b);
      return plain(ctx_->mk_zext(r, 32));
    }
    if (op == ",") {
      eval(ka);
      return eval(kb);
    }
    Value va = eval(ka);
    Value vb = eval(kb);
    Expr a = va.bits, b = vb.bits;
    const TypeRef& ta = ka.type;
    if (ta->is_pointer() && kb.type->is_pointer() && op == "-") {
      Expr d = ctx_->mk_sext(ctx_->mk_sub(offset_of(a), offset_of(b)), 64);
      return plain(ctx_->mk_sdiv(d, c64(size_of(ta->elem))));
    }
    if (ta->is_pointer() && (op == "+" || op == "-"))
      return ptr_index(va, b, size_of(ta->elem), op == "-");
    bool sgn = ta->is_signed && !ta->is_bool() && !ta->is_pointer();
    auto cmp = [&](Expr c) { return plain(ctx_->mk_zext(c, 32)); };
    if (op == "==")
      return cmp(ctx_->mk_eq(a, b));
    if (op == "!=")
      return cmp(ctx_->mk_not(ctx_->mk_eq(a, b)));
    if (op == "<")
      return cmp(sgn ? ctx_->mk_slt(a, b) : ctx_->mk_ult(a, b));
    if (op == ">")
      return cmp(sgn ? ctx_->mk_slt(b, a) : ctx_->mk_ult(b, a));
    if (op == "<=")
      return cmp(sgn ? ctx_->mk_sle(a, b) : ctx_->mk_ule(a, b));
    if (op == ">=")
      return cmp(sgn ? ctx_->mk_sle(b, a) : ctx_->mk_ule(b, a));

    Value r;
    r.pts = va.pts;
    merge_pts(r.pts, vb.pts);
    r.maybe_null = va.maybe_null || vb.maybe_null;
    if (op == "<<" || op == ">>") {
      unsigned w = a->width;
      if (opts_.checks.shift)
        obligation(ObligationKind::Overshift, ctx_->mk_ult(b, ctx_->constant(b->width, w)), e.loc,
                   "shift amount out of range");
      Expr amt = shift_amount(b, w);
      r.bits = op == "<<" ? ctx_->mk_shl(a, amt) : sgn ? ctx_->mk_ashr(a, amt) : ctx_->mk_lshr(a, amt);
      return r;
    }
    if (op == "/" || op == "%") {
      if (opts_.checks.div)
        obligation(ObligationKind::DivByZero, truth(b), e.loc, "division by zero");
      if (op == "/")
        r.bits = sgn ? ctx_->mk_sdiv(a, b) : ctx_->mk_udiv(a, b);
      else
        r.bits = sgn ? ctx_->mk_srem(a, b) : ctx_->mk_urem(a, b);
      return r;
    }
    if (op == "+")
      r.bits = ctx_->mk_add(a, b);
    else if (op == "-")
      r.bits = ctx_->mk_sub(a, b);
    else if (op == "*")
      r.bits = ctx_->mk_mul(a, b);
    else if (op == "&")
      r.bits = ctx_->mk_and(a, b);
    else if (op == "|")
      r.bits = ctx_->mk_or(a, b);
    else if (op == "^")
      r.bits = ctx_->mk_xor(a, b);
    else
      fail("E_UNSUPPORTED", "unsupported operator '" + op + "'", e.loc);
    return r;
  }

  Value assign(const c2v::Expr& e)
  {
    Value p = eval_lvalue(*e.kids[0]);
    bool compound = e.kind == ExprKind::IncDec || e.op != "=";
    Value old;
    if (compound) {
      old = load(p, size_of(e.type), e.loc);
      compound_.push_back(old);
    }
    Value v = eval(*e.kids[1]);
    if (compound)
      compound_.pop_back();
    store(p, v, e.loc);
    if (e.kind == ExprKind::IncDec && e.postfix)
      return old;
    return v;
  }

  Value call(const c2v::Expr& e)
  {
    std::vector<Value> args;
    for (size_t i = 1; i < e.kids.size(); i++)
      args.push_back(eval(*e.kids[i]));
    const c2v::Expr& callee = *e.kids[0];
    if (callee.kind == ExprKind::Ident && callee.func)
      return inline_call(callee.func, std::move(args), e.loc);

    Value fp = eval(callee);
    const TypeRef& ft = callee.type->elem;
    bool any_fn = false;
    for (uint32_t c : fp.pts)
      any_fn = any_fn || c >= func_code_base;
    std::vector<const FuncDecl*> cands;
    for (const auto& f : prog_.funcs) {
      if (!f->address_taken || !f->body || !same_type(f->type, ft))
        continue;
      if (any_fn && !std::binary_search(fp.pts.begin(), fp.pts.end(), f->code))
        continue;
      cands.push_back(f.get());
    }
    if (cands.empty())
      fail("E_NO_CANDIDATES", "no address-taken function of type " + to_string(ft)
                                  + " can be called here",
           e.loc);
    std::vector<Expr> match;
    Expr any = ctx_->bool_const(false);
    for (const FuncDecl* f : cands) {
      match.push_back(ctx_->mk_eq(fp.bits, c64(f->code)));
      any = ctx_->mk_or(any, match.back());
    }
    if (opts_.checks.null)
      obligation(ObligationKind::NullDeref, any, e.loc,
                 "function pointer matches no candidate");
    if (cands.size() == 1 && (is_true(ctx_->simplify(match[0])) || !fp.maybe_null))
      return inline_call(cands[0], std::move(args), e.loc);

    State entry = std::move(st_);
    std::vector<State> states;
    std::vector<Value> results;
    for (size_t i = 0; i < cands.size(); i++) {
      st_ = entry;
      st_.guard = ctx_->mk_and(entry.guard, match[i]);
      if (!alive())
        continue;
      results.push_back(inline_call(cands[i], args, e.loc));
      states.push_back(std::move(st_));
    }
    Value r = combine(states, results, e.type, "call", e.loc);
    st_ = merge_all(std::move(states), e.loc);
    return r;
  }

  // Value selected by the guards of `states` (disjoint paths).
  Value combine(const std::vector<State>& states, const std::vector<Value>& vals,
                const TypeRef& t, const std::string& base, const SourceLoc& loc)
  {
    if (t->is_void())
      return Value{};
    Value r = zero_value(t);
    bool first = true;
    for (size_t i = states.size(); i-- > 0;) {
      if (is_false(states[i].guard))
        continue;
      r.bits = first ? vals[i].bits : ite(states[i].guard, vals[i].bits, r.bits);
      first = false;
      merge_pts(r.pts, vals[i].pts);
      r.maybe_null = r.maybe_null || vals[i].maybe_null;
    }
    r.bits = define(base, r.bits, loc);
    return r;
  }

  Value inline_call(const FuncDecl* f, std::vector<Value> args, const SourceLoc& loc)
  {
    if (!f->body)
      fail("E_UNSUPPORTED", "call to function '" + f->name + "' which has no definition", loc);
    if (f->uses_interface)
      fail("E_INTERFACE", "interface macros may only appear in the entry function ('" + f->name
                              + "' uses them)",
           loc);
    if (frames_.size() > 256)
      internal_error("call nesting too deep");
    if (!alive())
      return zero_value(f->type->elem);
    for (size_t i = 0; i < f->params.size(); i++) {
      const VarDecl& p = *f->params[i];
      Object& o = create_object(p);
      o.content = define(p.name, args[i].bits, loc);
      o.pts = args[i].pts;
      o.maybe_null = args[i].maybe_null;
    }
    Frame frame{f, {}, {}};
    frames_.push_back(&frame);
    int saved_nest = nest_;
    nest_++;
    exec(*f->body);
    nest_ = saved_nest;
    frames_.pop_back();
    return finish_call(frame, f);
  }

  Value finish_call(Frame& frame, const FuncDecl* f)
  {
    std::vector<State> states;
    std::vector<Value> vals;
    const TypeRef rt = frame.func->type->elem;
    for (auto& [s, v] : frame.returns) {
      states.push_back(std::move(s));
      vals.push_back(v);
    }
    states.push_back(std::move(st_));
    vals.push_back(zero_value(rt));
    Value r = combine(states, vals, rt, frame.func->name, frame.func->loc);
    st_ = merge_all(std::move(states), frame.func->loc);
    if (f)
      for (uint32_t c : locals_of_[f])
        st_.objects.erase(c);
    return r;
  }

  Value eval(const c2v::Expr& e)
  {
    switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
      return plain(ctx_->constant(width_of(e.type), e.ival));
    case ExprKind::Ident:
      if (e.func)
        return function_value(e.func);
      return load(eval_lvalue(e), size_of(e.type), e.loc);
    case ExprKind::Convert:
      return convert(e);
    case ExprKind::Unary:
      return unary(e);
    case ExprKind::Binary:
      return binary(e);
    case ExprKind::Assign:
    case ExprKind::IncDec:
      return assign(e);
    case ExprKind::Cond: {
      Expr c = truth(eval(*e.kids[0]).bits);
      Value a = eval_under(c, *e.kids[1]);
      Value b = eval_under(ctx_->mk_not(c), *e.kids[2]);
      if (e.type->is_void())
        return Value{};
      Value r{ite(c, a.bits, b.bits), a.pts, a.maybe_null || b.maybe_null};
      merge_pts(r.pts, b.pts);
      return r;
    }
    case ExprKind::Cast:
      eval(*e.kids[0]);
      return Value{};
    case ExprKind::Call:
      return call(e);
    case ExprKind::Index:
      return load(eval_lvalue(e), size_of(e.type), e.loc);
    case ExprKind::Member: {
      if (e.lvalue)
        return load(eval_lvalue(e), size_of(e.type), e.loc);
      Value base = eval(*e.kids[0]);
      unsigned lo = 8 * e.field->offset;
      base.bits = ctx_->mk_extract(base.bits, lo + width_of(e.type) - 1, lo);
      return base;
    }
    case ExprKind::CompoundLhs:
      if (compound_.empty())
        internal_error("compound target outside an assignment");
      return compound_.back();
    case ExprKind::StrLit:
    case ExprKind::SizeofType:
    case ExprKind::SizeofExpr:
      break;
    }
    fail("E_UNSUPPORTED", "unsupported expression", e.loc);
  }

  // ---- statements ----
  Jumps& innermost(bool loop, const SourceLoc& loc)
  {
    auto& js = frames_.back()->jumps;
    for (auto it = js.rbegin(); it != js.rend(); ++it)
      if (!loop || (*it)->is_loop)
        return **it;
    fail("E_UNSUPPORTED", "jump outside of loop or switch", loc);
  }

  void exec_nested(const Stmt& s)
  {
    nest_++;
    exec(s);
    nest_--;
  }

  void exec(const Stmt& s)
  {
    if (!alive())
      return;
    switch (s.kind) {
    case StmtKind::Expr:
      if (s.expr)
        eval(*s.expr);
      break;
    case StmtKind::Decl:
      for (const VarDecl* v : s.vars)
        init_object(*v);
      break;
    case StmtKind::Block:
      for (const auto& c : s.stmts)
        exec(*c);
      break;
    case StmtKind::Empty:
      break;
    case StmtKind::If:
      exec_if(s);
      break;
    case StmtKind::While:
    case StmtKind::DoWhile:
    case StmtKind::For:
      exec_loop(s);
      break;
    case StmtKind::Switch:
      exec_switch(s);
      break;
    case StmtKind::Case:
    case StmtKind::Default:
      fail("E_UNSUPPORTED", "case label nested inside a statement of its switch", s.loc);
    case StmtKind::Break:
      innermost(false, s.loc).breaks.push_back(std::exchange(st_, dead()));
      break;
    case StmtKind::Continue:
      innermost(true, s.loc).continues.push_back(std::exchange(st_, dead()));
      break;
    case StmtKind::Return: {
      Value v = s.expr ? eval(*s.expr) : Value{};
      if (!alive())
        break;
      frames_.back()->returns.emplace_back(std::exchange(st_, dead()), v);
      break;
    }
    case StmtKind::Assert: {
      Expr c = truth(eval(*s.expr).bits);
      obligation(ObligationKind::UserAssert, c, s.loc, s.message);
      break;
    }
    case StmtKind::Sample:
      exec_sample(s);
      break;
    case StmtKind::Drive:
      exec_drive(s);
      break;
    }
  }

  void exec_if(const Stmt& s)
  {
    Expr c = truth(eval(*s.expr).bits);
    Expr g = st_.guard;
    Expr gt = ctx_->mk_and(g, c);
    Expr ge = ctx_->mk_and(g, ctx_->mk_not(c));
    State other = is_false(ge) ? dead() : st_;
    other.guard = ge;
    st_.guard = gt;
    exec_nested(*s.body);
    State then_state = std::exchange(st_, std::move(other));
    if (s.else_body)
      exec_nested(*s.else_body);
    Expr sel = then_state.guard == gt && st_.guard == ge ? c : then_state.guard;
    st_ = merge2(sel, std::move(then_state), std::move(st_), s.loc);
  }

  Expr loop_condition(const Stmt& s)
  {
    if (!s.expr)
      return ctx_->bool_const(true);
    return truth(eval(*s.expr).bits);
  }

  void exec_loop(const Stmt& s)
  {
    nest_++;
    if (s.kind == StmtKind::For && s.init)
      exec(*s.init);
    const std::string& label = prog_.loop_labels.at(s.site);
    auto it = opts_.unwindset.find(label);
    unsigned bound = it != opts_.unwindset.end() ? it->second : opts_.unwind;
    bool do_while = s.kind == StmtKind::DoWhile;
    std::vector<State> exits;
    Jumps jumps{true, {}, {}};
    for (unsigned k = 0; alive(); k++) {
      if (k > 0 || !do_while) {
        Expr c = loop_condition(s);
        if (!alive())
          break;
        if (k == bound) {
          if (opts_.unwinding_assertions)
            obligation(ObligationKind::Unwinding, ctx_->mk_not(c), s.loc,
                       "unwinding assertion loop " + label);
          st_.guard = ctx_->mk_and(st_.guard, ctx_->mk_not(c));
          break;
        }
        Expr gx = ctx_->mk_and(st_.guard, ctx_->mk_not(c));
        if (!is_false(ctx_->simplify(gx))) {
          State ex = st_;
          ex.guard = gx;
          exits.push_back(std::move(ex));
        }
        st_.guard = ctx_->mk_and(st_.guard, c);
        if (!alive())
          break;
      }
      frames_.back()->jumps.push_back(&jumps);
      exec(*s.body);
      frames_.back()->jumps.pop_back();
      if (!jumps.continues.empty()) {
        std::vector<State> parts = std::move(jumps.continues);
        jumps.continues.clear();
        parts.push_back(std::move(st_));
        st_ = merge_all(std::move(parts), s.loc);
      }
      if (s.kind == StmtKind::For && s.step && alive())
        eval(*s.step);
    }
    exits.push_back(std::move(st_));
    for (auto& b : jumps.breaks)
      exits.push_back(std::move(b));
    st_ = merge_all(std::move(exits), s.loc);
    nest_--;
  }

  static void case_values(const Stmt* s, std::vector<int64_t>& out)
  {
    while (s && (s->kind == StmtKind::Case || s->kind == StmtKind::Default)) {
      if (s->kind == StmtKind::Case)
        out.push_back(s->case_value);
      s = s->body.get();
    }
  }

  void exec_switch(const Stmt& s)
  {
    nest_++;
    Value sel = eval(*s.expr);
    unsigned w = sel.bits->width;
    std::vector<const Stmt*> body;
    if (s.body->kind == StmtKind::Block)
      for (const auto& c : s.body->stmts)
        body.push_back(c.get());
    else
      body.push_back(s.body.get());
    std::vector<int64_t> values;
    bool has_default = false;
    for (const Stmt* b : body) {
      case_values(b, values);
      for (const Stmt* l = b; l && (l->kind == StmtKind::Case || l->kind == StmtKind::Default);
           l = l->body.get())
        has_default = has_default || l->kind == StmtKind::Default;
    }
    Expr none = ctx_->bool_const(true);
    for (int64_t v : values)
      none = ctx_->mk_and(none, ctx_->mk_not(ctx_->mk_eq(sel.bits, ctx_->constant(w, uint64_t(v)))));

    State start = std::exchange(st_, dead());
    Jumps jumps{false, {}, {}};
    frames_.back()->jumps.push_back(&jumps);
    for (const Stmt* b : body) {
      while (b->kind == StmtKind::Case || b->kind == StmtKind::Default) {
        Expr hit = b->kind == StmtKind::Case
                       ? ctx_->mk_eq(sel.bits, ctx_->constant(w, uint64_t(b->case_value)))
                       : none;
        State entry = start;
        entry.guard = ctx_->mk_and(start.guard, hit);
        std::vector<State> parts;
        parts.push_back(std::move(entry));
        parts.push_back(std::move(st_));
        st_ = merge_all(std::move(parts), b->loc);
        b = b->body.get();
      }
      exec(*b);
    }
    frames_.back()->jumps.pop_back();
    std::vector<State> exits;
    exits.push_back(std::move(st_));
    for (auto& x : jumps.breaks)
      exits.push_back(std::move(x));
    if (!has_default) {
      start.guard = ctx_->mk_and(start.guard, none);
      exits.push_back(std::move(start));
    }
    st_ = merge_all(std::move(exits), s.loc);
    nest_--;
  }

  void exec_sample(const Stmt& s)
  {
    const VarDecl* v = s.vars.at(0);
    if (frames_.size() != 1 || nest_ != 0)
      fail("E_INTERFACE", "C2V_SAMPLE_INPUT(" + s.name
                              + ") must appear at the top level of the entry function",
           s.loc);
    if (read_.count(v->code))
      fail("E_INTERFACE", "'" + s.name + "' is sampled after it has been read", s.loc);
    if (!st_.objects.count(v->code))
      create_object(*v);
    Object& o = object(v->code);
    o.content = ctx_->var(s.name, width_of(v->type));
    o.fresh = nullptr;
    o.pts.clear();
    o.maybe_null = true;
  }

  void exec_drive(const Stmt& s)
  {
    if (frames_.size() != 1)
      fail("E_INTERFACE", "C2V_DRIVE_OUTPUT must appear in the entry function", s.loc);
    const VarDecl* v = s.vars.at(0);
    size_t k = 0;
    while (trace_.iface.outputs[k].name != s.name)
      k++;
    Value val = load(address_of(v->code), size_of(v->type), s.loc);
    if (st_.outputs.size() <= k)
      st_.outputs.resize(k + 1);
    st_.outputs[k] = val.bits;
  }
};

void collect_vars(Expr root, std::unordered_set<uint32_t>& seen, std::set<std::string>& names)
{
  std::vector<Expr> stack{root};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e->id).second)
      continue;
    if (e->is_var())
      names.insert(e->name);
    for (unsigned i = 0; i < e->nargs; i++)
      stack.push_back(e->args[i]);
  }
}

} // namespace

SsaTrace execute(const TypedProgram& prog, const std::string& entry, const SymexOptions& opts)
{
  if (opts.unwind == 0)
    fail("E_USAGE", "unwind bound must be at least 1");
  Executor ex(prog, opts);
  return ex.run(entry);
}

SsaTrace slice(const SsaTrace& t)
{
  std::unordered_set<uint32_t> seen;
  std::set<std::string> needed;
  std::set<std::string> outputs;
  for (const auto& p : t.iface.outputs)
    outputs.insert(p.name);
  for (const auto& o : t.obligations) {
    collect_vars(o.guard, seen, needed);
    collect_vars(o.claim, seen, needed);
  }
  std::vector<bool> keep(t.equations.size(), false);
  for (size_t i = t.equations.size(); i-- > 0;) {
    const Equation& eq = t.equations[i];
    if (!outputs.count(eq.lhs) && !needed.count(eq.lhs))
      continue;
    keep[i] = true;
    collect_vars(eq.rhs, seen, needed);
  }
  SsaTrace r;
  r.ctx = t.ctx;
  r.iface = t.iface;
  r.obligations = t.obligations;
  for (size_t i = 0; i < t.equations.size(); i++)
    if (keep[i])
      r.equations.push_back(t.equations[i]);
  for (const auto& f : t.free_vars)
    if (needed.count(f.name))
      r.free_vars.push_back(f);
  return r;
}

std::string dump_trace(const SsaTrace& t)
{
  std::string out;
  for (const auto& p : t.iface.inputs)
    out += "INPUT " + p.name + " " + std::to_string(p.width) + "\n";
  for (const auto& p : t.iface.outputs)
    out += "OUTPUT " + p.name + " " + std::to_string(p.width) + "\n";
  for (const auto& p : t.free_vars)
    out += "FREE " + p.name + " " + std::to_string(p.width) + "\n";
  for (const auto& o : t.obligations)
    out += std::string("OBLIGATION ") + kind_name(o.kind) + " @" + o.loc.file + ":"
           + std::to_string(o.loc.line) + "\n";
  bv::Dumper d(t.ctx.get());
  for (const auto& eq : t.equations) {
    out += d.emit(eq.rhs);
    out += eq.lhs + " := " + d.ref(eq.rhs) + "\n";
  }
  for (size_t i = 0; i < t.obligations.size(); i++) {
    const auto& o = t.obligations[i];
    out += d.emit(o.guard);
    out += d.emit(o.claim);
    out += "check " + std::to_string(i) + " " + kind_name(o.kind) + ": " + d.ref(o.guard) + " -> "
           + d.ref(o.claim) + "\n";
  }
  return out;
}

TraceEvaluator::TraceEvaluator(const SsaTrace& trace) : trace_{trace}
{
  bv::Context& ctx = *trace.ctx;
  std::unordered_map<std::string, bv::Expr> defs;
  std::unordered_map<uint32_t, bv::Expr> memo;
  auto subst = [&](bv::Expr root) {
    for (bv::Expr e : bv::topo_order(std::span<const bv::Expr>(&root, 1))) {
      if (memo.count(e->id))
        continue;
      bv::Expr r = e;
      if (e->is_var()) {
        auto it = defs.find(e->name);
        if (it != defs.end())
          r = it->second;
      } else if (e->nargs > 0) {
        std::array<bv::Expr, 3> args{};
        bool changed = false;
        for (unsigned i = 0; i < e->nargs; i++) {
          args[i] = memo.at(e->args[i]->id);
          changed = changed || args[i] != e->args[i];
        }
        if (changed)
          r = ctx.make(e->op, std::span<const bv::Expr>(args.data(), e->nargs), e->hi, e->lo, e->width);
      }
      memo[e->id] = r;
    }
    return memo.at(root->id);
  };
  std::unordered_map<std::string, bv::Expr> out_def;
  for (const auto& eq : trace.equations) {
    bv::Expr r = subst(eq.rhs);
    defs[eq.lhs] = r;
  }
  for (const auto& p : trace.iface.outputs) {
    auto it = defs.find(p.name);
    if (it == defs.end())
      internal_error("trace has no equation for output '" + p.name + "'");
    outputs_.push_back(it->second);
  }
  std::vector<bv::Expr> roots = outputs_;
  for (const auto& o : trace.obligations) {
    obligations_.emplace_back(subst(o.guard), subst(o.claim));
    roots.push_back(obligations_.back().first);
    roots.push_back(obligations_.back().second);
  }
  eval_ = std::make_unique<bv::Evaluator>(roots);
  inputs_.resize(eval_->vars().size());
}

void TraceEvaluator::run(const bv::Env& env)
{
  const auto& names = eval_->vars();
  for (size_t i = 0; i < names.size(); i++) {
    auto it = env.find(names[i]);
    if (it != env.end()) {
      inputs_[i] = it->second;
      continue;
    }
    bool is_input = false;
    for (const auto& p : trace_.iface.inputs)
      is_input = is_input || p.name == names[i];
    if (is_input)
      fail("E_MISSING_INPUT", "no value given for input '" + names[i] + "'");
    inputs_[i] = BitVec(eval_->var_widths()[i]);
  }
  eval_->run(inputs_);
}

const BitVec& TraceEvaluator::output(size_t k) const { return eval_->value(outputs_.at(k)); }

bool TraceEvaluator::violated(size_t k) const
{
  const auto& [g, c] = obligations_.at(k);
  return !eval_->value(g).is_zero() && eval_->value(c).is_zero();
}

} // namespace c2v
