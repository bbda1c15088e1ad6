#include "c2v/bvir.hpp"

#include <algorithm>
#include <sstream>

namespace c2v::bv {

const char* op_name(Op op)
{
  switch (op) {
  case Op::Const: return "const";
  case Op::Var: return "var";
  case Op::Not: return "not";
  case Op::And: return "and";
  case Op::Or: return "or";
  case Op::Xor: return "xor";
  case Op::Neg: return "neg";
  case Op::Add: return "add";
  case Op::Sub: return "sub";
  case Op::Mul: return "mul";
  case Op::Udiv: return "udiv";
  case Op::Urem: return "urem";
  case Op::Sdiv: return "sdiv";
  case Op::Srem: return "srem";
  case Op::Shl: return "shl";
  case Op::Lshr: return "lshr";
  case Op::Ashr: return "ashr";
  case Op::Eq: return "eq";
  case Op::Ult: return "ult";
  case Op::Ule: return "ule";
  case Op::Slt: return "slt";
  case Op::Sle: return "sle";
  case Op::Ite: return "ite";
  case Op::Extract: return "extract";
  case Op::Concat: return "concat";
  case Op::Zext: return "zext";
  case Op::Sext: return "sext";
  }
  return "?";
}

unsigned op_arity(Op op)
{
  switch (op) {
  case Op::Const:
  case Op::Var:
    return 0;
  case Op::Not:
  case Op::Neg:
  case Op::Extract:
  case Op::Zext:
  case Op::Sext:
    return 1;
  case Op::Ite:
    return 3;
  default:
    return 2;
  }
}

bool is_comparison(Op op)
{
  return op == Op::Eq || op == Op::Ult || op == Op::Ule || op == Op::Slt || op == Op::Sle;
}

static bool is_commutative(Op op)
{
  return op == Op::And || op == Op::Or || op == Op::Xor || op == Op::Add
      || op == Op::Mul || op == Op::Eq;
}

[[noreturn]] static void width_error(const std::string& what)
{
  fail("E_WIDTH_MISMATCH", what);
}

size_t Context::KeyHash::operator()(const Key& k) const
{
  size_t h = static_cast<size_t>(k.op) * 1000003u ^ k.width;
  for (uint32_t a : k.args)
    h = h * 31 + a;
  h = h * 31 + k.hi * 613 + k.lo;
  if (k.value)
    h ^= k.value->hash();
  if (k.name)
    h ^= std::hash<std::string>{}(*k.name);
  return h;
}

bool Context::KeyEq::operator()(const Key& a, const Key& b) const
{
  if (a.op != b.op || a.width != b.width || a.args != b.args || a.hi != b.hi || a.lo != b.lo)
    return false;
  if (a.value && !(*a.value == *b.value))
    return false;
  if (a.name && *a.name != *b.name)
    return false;
  return true;
}

Context::Context()
{
  locs_.emplace_back(); // index 0 means "no location"
}

Expr Context::intern(Node&& n)
{
  Key probe{n.op, n.width, {0, 0, 0}, n.hi, n.lo, nullptr, nullptr};
  for (unsigned i = 0; i < n.nargs; i++)
    probe.args[i] = n.args[i]->id + 1;
  if (n.op == Op::Const)
    probe.value = &n.value;
  if (n.op == Op::Var)
    probe.name = &n.name;
  if (auto it = table_.find(probe); it != table_.end())
    return it->second;
  n.id = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(std::move(n));
  const Node* stored = &nodes_.back();
  Key key = probe;
  key.value = stored->op == Op::Const ? &stored->value : nullptr;
  key.name = stored->op == Op::Var ? &stored->name : nullptr;
  table_.emplace(key, stored);
  return stored;
}

Expr Context::constant(const BitVec& v)
{
  Node n;
  n.op = Op::Const;
  n.width = static_cast<uint16_t>(v.width());
  n.value = v;
  return intern(std::move(n));
}

Expr Context::var(const std::string& name, unsigned width)
{
  if (width == 0 || width > max_width)
    width_error("variable '" + name + "' has invalid width " + std::to_string(width));
  Node n;
  n.op = Op::Var;
  n.width = static_cast<uint16_t>(width);
  n.name = name;
  Expr e = intern(std::move(n));
  if (e->width != width)
    width_error("variable '" + name + "' used at widths " + std::to_string(e->width)
                + " and " + std::to_string(width));
  return e;
}

Expr Context::make(Op op, std::span<const Expr> args, unsigned hi, unsigned lo, unsigned to)
{
  if (op == Op::Const || op == Op::Var)
    internal_error("make() cannot build leaves");
  if (args.size() != op_arity(op))
    internal_error(std::string("wrong operand count for ") + op_name(op));
  Node n;
  n.op = op;
  n.nargs = static_cast<uint8_t>(args.size());
  for (size_t i = 0; i < args.size(); i++)
    n.args[i] = args[i];
  unsigned w;
  switch (op) {
  case Op::Not:
  case Op::Neg:
    w = args[0]->width;
    break;
  case Op::Eq:
  case Op::Ult:
  case Op::Ule:
  case Op::Slt:
  case Op::Sle:
    if (args[0]->width != args[1]->width)
      width_error(std::string(op_name(op)) + " operands differ in width");
    w = 1;
    break;
  case Op::Ite:
    if (args[0]->width != 1)
      width_error("ite condition must have width 1");
    if (args[1]->width != args[2]->width)
      width_error("ite arms differ in width");
    w = args[1]->width;
    break;
  case Op::Extract:
    if (lo > hi || hi >= args[0]->width)
      width_error("extract [" + std::to_string(hi) + ":" + std::to_string(lo)
                  + "] out of range for width " + std::to_string(args[0]->width));
    n.hi = static_cast<uint16_t>(hi);
    n.lo = static_cast<uint16_t>(lo);
    w = hi - lo + 1;
    break;
  case Op::Concat:
    w = args[0]->width + args[1]->width;
    if (w > max_width)
      width_error("concat exceeds maximum width");
    break;
  case Op::Zext:
  case Op::Sext:
    if (to < args[0]->width || to > max_width)
      width_error(std::string(op_name(op)) + " to invalid width " + std::to_string(to));
    w = to;
    break;
  default:
    if (args[0]->width != args[1]->width)
      width_error(std::string(op_name(op)) + " operands differ in width ("
                  + std::to_string(args[0]->width) + " vs "
                  + std::to_string(args[1]->width) + ")");
    w = args[0]->width;
    break;
  }
  n.width = static_cast<uint16_t>(w);
  return intern(std::move(n));
}

Expr Context::mk(Op op, std::span<const Expr> args, unsigned hi, unsigned lo, unsigned to)
{
  Expr e = rewrite(op, args, hi, lo, to);
  if (simplified_.size() <= e->id)
    simplified_.resize(nodes_.size(), nullptr);
  simplified_[e->id] = e;
  return e;
}

Expr Context::mk_ite(Expr c, Expr a, Expr b)
{
  Expr args[] = {c, a, b};
  return mk(Op::Ite, args);
}

Expr Context::mk_extract(Expr a, unsigned hi, unsigned lo)
{
  Expr args[] = {a};
  return mk(Op::Extract, args, hi, lo);
}

Expr Context::mk_zext(Expr a, unsigned to)
{
  Expr args[] = {a};
  return mk(Op::Zext, args, 0, 0, to);
}

Expr Context::mk_sext(Expr a, unsigned to)
{
  Expr args[] = {a};
  return mk(Op::Sext, args, 0, 0, to);
}

Expr Context::mk_resize(Expr a, unsigned to)
{
  if (to == a->width)
    return a;
  if (to < a->width)
    return mk_extract(a, to - 1, 0);
  return mk_zext(a, to);
}

namespace {

bool is_zero(Expr e) { return e->is_const() && e->value.is_zero(); }
bool is_ones(Expr e) { return e->is_const() && e->value.is_ones(); }
bool is_one(Expr e)
{
  uint64_t v;
  return e->is_const() && e->value.fits_u64(v) && v == 1;
}
bool is_not_of(Expr a, Expr b) { return a->op == Op::Not && a->args[0] == b; }

} // namespace

Expr Context::rewrite(Op op, std::span<const Expr> in, unsigned hi, unsigned lo, unsigned to)
{
  std::array<Expr, 3> a{};
  for (size_t i = 0; i < in.size(); i++)
    a[i] = in[i];
  std::span<const Expr> args(a.data(), in.size());

  // Width-check first so malformed requests never reach the rules below.
  Expr raw = make(op, args, hi, lo, to);
  unsigned w = raw->width;

  bool all_const = std::all_of(args.begin(), args.end(), [](Expr e) { return e->is_const(); });
  if (all_const) {
    std::array<BitVec, 3> vals;
    for (size_t i = 0; i < args.size(); i++)
      vals[i] = args[i]->value;
    return constant(apply(op, std::span<const BitVec>(vals.data(), args.size()), hi, lo, w));
  }

  if (is_commutative(op) && args.size() == 2) {
    bool swap = a[0]->is_const() && !a[1]->is_const();
    if (!a[0]->is_const() && !a[1]->is_const() && a[0]->id > a[1]->id)
      swap = true;
    if (swap) {
      std::swap(a[0], a[1]);
      raw = make(op, args, hi, lo, to);
    }
  }
  Expr x = a[0], y = a[1], z = a[2];

  switch (op) {
  case Op::Not:
    if (x->op == Op::Not)
      return x->args[0];
    break;
  case Op::Neg:
    if (x->op == Op::Neg)
      return x->args[0];
    break;
  case Op::And:
    if (x == y)
      return x;
    if (is_zero(y))
      return y;
    if (is_ones(y))
      return x;
    if (is_not_of(x, y) || is_not_of(y, x))
      return zero(w);
    break;
  case Op::Or:
    if (x == y)
      return x;
    if (is_zero(y))
      return x;
    if (is_ones(y))
      return y;
    if (is_not_of(x, y) || is_not_of(y, x))
      return ones(w);
    break;
  case Op::Xor:
    if (x == y)
      return zero(w);
    if (is_zero(y))
      return x;
    if (is_ones(y))
      return mk_not(x);
    break;
  case Op::Add:
    if (is_zero(y))
      return x;
    break;
  case Op::Sub:
    if (is_zero(y))
      return x;
    if (x == y)
      return zero(w);
    break;
  case Op::Mul:
    if (is_zero(y))
      return y;
    if (is_one(y))
      return x;
    break;
  case Op::Udiv:
  case Op::Sdiv:
    if (is_one(y))
      return x;
    break;
  case Op::Urem:
  case Op::Srem:
    if (is_one(y))
      return zero(w);
    break;
  case Op::Shl:
  case Op::Lshr:
    if (is_zero(y) || is_zero(x))
      return x;
    if (y->is_const()) {
      uint64_t n;
      if (!y->value.fits_u64(n) || n >= w)
        return zero(w);
    }
    break;
  case Op::Ashr:
    if (is_zero(y) || is_zero(x))
      return x;
    break;
  case Op::Eq:
    if (x == y)
      return bool_const(true);
    if (w == 1 && x->width == 1 && y->is_const())
      return y->value.is_zero() ? mk_not(x) : x;
    if (x->op == Op::Ite && x->args[1]->is_const() && x->args[2]->is_const() && y->is_const())
      return mk_ite(x->args[0], bool_const(x->args[1]->value == y->value),
                    bool_const(x->args[2]->value == y->value));
    if (x->op == Op::Zext && y->is_const() && x->args[0]->width < y->width) {
      unsigned iw = x->args[0]->width;
      if (!y->value.extract(y->width - 1, iw).is_zero())
        return bool_const(false);
      return mk_eq(x->args[0], mk_extract(y, iw - 1, 0));
    }
    if (x->op == Op::Zext && y->op == Op::Zext && x->args[0]->width == y->args[0]->width)
      return mk_eq(x->args[0], y->args[0]);
    break;
  case Op::Ult:
    if (x == y || is_zero(y) || is_ones(x))
      return bool_const(false);
    break;
  case Op::Ule:
    if (x == y || is_zero(x) || is_ones(y))
      return bool_const(true);
    break;
  case Op::Slt:
    if (x == y)
      return bool_const(false);
    break;
  case Op::Sle:
    if (x == y)
      return bool_const(true);
    break;
  case Op::Ite:
    if (x->is_const())
      return x->value.is_zero() ? z : y;
    if (y == z)
      return y;
    if (x->op == Op::Not)
      return mk_ite(x->args[0], z, y);
    if (y->op == Op::Ite && y->args[0] == x)
      return mk_ite(x, y->args[1], z);
    if (z->op == Op::Ite && z->args[0] == x)
      return mk_ite(x, y, z->args[2]);
    if (w == 1 && y->is_const() && z->is_const())
      return y->value.is_zero() ? mk_not(x) : x;
    if (w == 1 && is_ones(y))
      return mk_or(x, z);
    if (w == 1 && is_zero(z))
      return mk_and(x, y);
    break;
  case Op::Extract: {
    unsigned xw = x->width;
    if (lo == 0 && hi == xw - 1)
      return x;
    switch (x->op) {
    case Op::Extract:
      return mk_extract(x->args[0], hi + x->lo, lo + x->lo);
    case Op::Concat: {
      Expr h = x->args[0], l = x->args[1];
      unsigned lw = l->width;
      if (hi < lw)
        return mk_extract(l, hi, lo);
      if (lo >= lw)
        return mk_extract(h, hi - lw, lo - lw);
      return mk_concat(mk_extract(h, hi - lw, 0), mk_extract(l, lw - 1, lo));
    }
    case Op::Zext: {
      Expr inner = x->args[0];
      unsigned iw = inner->width;
      if (hi < iw)
        return mk_extract(inner, hi, lo);
      if (lo >= iw)
        return zero(w);
      return mk_zext(mk_extract(inner, iw - 1, lo), w);
    }
    case Op::Sext: {
      Expr inner = x->args[0];
      if (hi < inner->width)
        return mk_extract(inner, hi, lo);
      break;
    }
    case Op::Not:
      return mk_not(mk_extract(x->args[0], hi, lo));
    case Op::And:
    case Op::Or:
    case Op::Xor: {
      Expr p = x->args[0], q = x->args[1];
      auto cheap = [](Expr e) {
        return e->is_const() || e->op == Op::Concat || e->op == Op::Zext || e->op == Op::Extract;
      };
      if (cheap(p) || cheap(q)) {
        Expr parts[] = {mk_extract(p, hi, lo), mk_extract(q, hi, lo)};
        return mk(x->op, parts);
      }
      break;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (lo == 0) {
        Expr parts[] = {mk_extract(x->args[0], hi, 0), mk_extract(x->args[1], hi, 0)};
        return mk(x->op, parts);
      }
      break;
    case Op::Neg:
      if (lo == 0)
        return mk_neg(mk_extract(x->args[0], hi, 0));
      break;
    case Op::Ite:
      if (x->args[1]->is_const() || x->args[2]->is_const())
        return mk_ite(x->args[0], mk_extract(x->args[1], hi, lo), mk_extract(x->args[2], hi, lo));
      break;
    case Op::Lshr:
      if (x->args[1]->is_const()) {
        uint64_t k = x->args[1]->value.to_u64(); // < xw, larger amounts folded already
        if (hi + k < xw)
          return mk_extract(x->args[0], hi + k, lo + k);
        if (lo + k >= xw)
          return zero(w);
        return mk_zext(mk_extract(x->args[0], xw - 1, lo + k), w);
      }
      break;
    case Op::Shl:
      if (x->args[1]->is_const()) {
        uint64_t k = x->args[1]->value.to_u64();
        if (hi < k)
          return zero(w);
        if (lo >= k)
          return mk_extract(x->args[0], hi - k, lo - k);
        return mk_concat(mk_extract(x->args[0], hi - k, 0), zero(k - lo));
      }
      break;
    default:
      break;
    }
    break;
  }
  case Op::Concat:
    if (x->op == Op::Extract && y->op == Op::Extract && x->args[0] == y->args[0]
        && x->lo == y->hi + 1)
      return mk_extract(x->args[0], x->hi, y->lo);
    if (x->op == Op::Extract && y->op == Op::Concat && y->args[0]->op == Op::Extract
        && y->args[0]->args[0] == x->args[0] && x->lo == y->args[0]->hi + 1)
      return mk_concat(mk_extract(x->args[0], x->hi, y->args[0]->lo), y->args[1]);
    if (x->op == Op::Concat)
      return mk_concat(x->args[0], mk_concat(x->args[1], y));
    if (is_zero(x))
      return mk_zext(y, w);
    if (x->is_const() && y->op == Op::Concat && y->args[0]->is_const())
      return mk_concat(constant(x->value.concat(y->args[0]->value)), y->args[1]);
    break;
  case Op::Zext:
    if (to == x->width)
      return x;
    if (x->op == Op::Zext)
      return mk_zext(x->args[0], to);
    break;
  case Op::Sext:
    if (to == x->width)
      return x;
    if (x->op == Op::Sext)
      return mk_sext(x->args[0], to);
    if (x->op == Op::Zext && x->width > x->args[0]->width)
      return mk_zext(x->args[0], to);
    break;
  default:
    break;
  }
  return raw;
}

Expr Context::simplify(Expr root)
{
  if (simplified_.size() < nodes_.size())
    simplified_.resize(nodes_.size(), nullptr);
  if (simplified_[root->id])
    return simplified_[root->id];

  std::vector<std::pair<Expr, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [e, expanded] = stack.back();
    stack.pop_back();
    if (simplified_.size() < nodes_.size())
      simplified_.resize(nodes_.size(), nullptr);
    if (simplified_[e->id])
      continue;
    if (e->nargs == 0) {
      simplified_[e->id] = e;
      continue;
    }
    if (!expanded) {
      stack.emplace_back(e, true);
      for (unsigned i = 0; i < e->nargs; i++)
        if (!simplified_[e->args[i]->id])
          stack.emplace_back(e->args[i], false);
      continue;
    }
    std::array<Expr, 3> kids{};
    for (unsigned i = 0; i < e->nargs; i++)
      kids[i] = simplified_[e->args[i]->id];
    Expr s = mk(e->op, std::span<const Expr>(kids.data(), e->nargs), e->hi, e->lo, e->width);
    if (simplified_.size() < nodes_.size())
      simplified_.resize(nodes_.size(), nullptr);
    simplified_[e->id] = s;
  }
  return simplified_[root->id];
}

void Context::set_loc(Expr e, const SourceLoc& loc)
{
  if (e->loc != 0 || !loc.valid())
    return;
  locs_.push_back(loc);
  const_cast<Node*>(e)->loc = static_cast<uint32_t>(locs_.size() - 1);
}

std::optional<SourceLoc> Context::loc_of(Expr e) const
{
  if (e->loc == 0)
    return std::nullopt;
  return locs_[e->loc];
}

BitVec apply(Op op, std::span<const BitVec> v, unsigned hi, unsigned lo, unsigned width)
{
  switch (op) {
  case Op::Not: return v[0].bnot();
  case Op::Neg: return v[0].neg();
  case Op::And: return v[0].band(v[1]);
  case Op::Or: return v[0].bor(v[1]);
  case Op::Xor: return v[0].bxor(v[1]);
  case Op::Add: return v[0].add(v[1]);
  case Op::Sub: return v[0].sub(v[1]);
  case Op::Mul: return v[0].mul(v[1]);
  case Op::Udiv: return v[0].udiv(v[1]);
  case Op::Urem: return v[0].urem(v[1]);
  case Op::Sdiv: return v[0].sdiv(v[1]);
  case Op::Srem: return v[0].srem(v[1]);
  case Op::Shl: return v[0].shl(v[1]);
  case Op::Lshr: return v[0].lshr(v[1]);
  case Op::Ashr: return v[0].ashr(v[1]);
  case Op::Eq: return BitVec(1, v[0] == v[1]);
  case Op::Ult: return BitVec(1, v[0].ult(v[1]));
  case Op::Ule: return BitVec(1, v[0].ule(v[1]));
  case Op::Slt: return BitVec(1, v[0].slt(v[1]));
  case Op::Sle: return BitVec(1, v[0].sle(v[1]));
  case Op::Ite: return v[0].is_zero() ? v[2] : v[1];
  case Op::Extract: return v[0].extract(hi, lo);
  case Op::Concat: return v[0].concat(v[1]);
  case Op::Zext: return v[0].zext(width);
  case Op::Sext: return v[0].sext(width);
  case Op::Const:
  case Op::Var:
    break;
  }
  internal_error("apply() on a leaf");
}

std::vector<Expr> topo_order(std::span<const Expr> roots)
{
  std::vector<Expr> order;
  std::unordered_map<uint32_t, bool> seen;
  std::vector<std::pair<Expr, bool>> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it)
    stack.emplace_back(*it, false);
  while (!stack.empty()) {
    auto [e, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      order.push_back(e);
      continue;
    }
    if (seen.count(e->id))
      continue;
    seen[e->id] = true;
    stack.emplace_back(e, true);
    for (int i = static_cast<int>(e->nargs) - 1; i >= 0; i--)
      if (!seen.count(e->args[i]->id))
        stack.emplace_back(e->args[i], false);
  }
  return order;
}

BitVec eval(Expr e, const Env& env)
{
  Expr roots[] = {e};
  Evaluator ev(roots);
  ev.run(env);
  return ev.value(e);
}

Evaluator::Evaluator(std::span<const Expr> roots)
  : order_{topo_order(roots)}
{
  values_.resize(order_.size());
  for (unsigned i = 0; i < order_.size(); i++) {
    Expr e = order_[i];
    slot_[e->id] = i;
    if (e->is_var()) {
      var_names_.push_back(e->name);
      var_widths_.push_back(e->width);
      var_slot_.push_back(i);
    } else if (e->is_const()) {
      values_[i] = e->value;
    }
  }
}

void Evaluator::run(std::span<const BitVec> inputs)
{
  if (inputs.size() != var_slot_.size())
    internal_error("Evaluator::run: input count mismatch");
  for (unsigned k = 0; k < var_slot_.size(); k++) {
    if (inputs[k].width() != var_widths_[k])
      fail("E_WIDTH_MISMATCH", "variable '" + var_names_[k] + "' bound at width "
                                   + std::to_string(inputs[k].width()) + ", expected "
                                   + std::to_string(var_widths_[k]));
    values_[var_slot_[k]] = inputs[k];
  }
  std::array<BitVec, 3> args;
  for (unsigned i = 0; i < order_.size(); i++) {
    Expr e = order_[i];
    if (e->nargs == 0)
      continue;
    if (e->op == Op::Ite) {
      values_[i] = values_[slot_[e->args[0]->id]].is_zero() ? values_[slot_[e->args[2]->id]]
                                                           : values_[slot_[e->args[1]->id]];
      continue;
    }
    for (unsigned k = 0; k < e->nargs; k++)
      args[k] = values_[slot_[e->args[k]->id]];
    values_[i] = apply(e->op, std::span<const BitVec>(args.data(), e->nargs), e->hi, e->lo, e->width);
  }
}

void Evaluator::run(const Env& env)
{
  std::vector<BitVec> inputs;
  inputs.reserve(var_names_.size());
  for (const auto& name : var_names_) {
    auto it = env.find(name);
    if (it == env.end())
      fail("E_UNBOUND_VAR", "variable '" + name + "' is not bound");
    inputs.push_back(it->second);
  }
  run(inputs);
}

const BitVec& Evaluator::value(Expr e) const
{
  auto it = slot_.find(e->id);
  if (it == slot_.end())
    internal_error("Evaluator::value: expression not among the roots");
  return values_[it->second];
}

std::string Dumper::ref(Expr e) const
{
  auto it = number_.find(e->id);
  if (it == number_.end())
    internal_error("Dumper::ref before emit");
  return "n" + std::to_string(it->second);
}

std::string Dumper::emit(Expr root)
{
  Expr roots[] = {root};
  std::ostringstream out;
  for (Expr e : topo_order(roots)) {
    if (number_.count(e->id))
      continue;
    unsigned k = static_cast<unsigned>(number_.size());
    number_[e->id] = k;
    out << 'n' << k << " = " << op_name(e->op) << '(';
    if (e->is_const())
      out << e->width << "'h" << e->value.to_hex();
    else if (e->is_var())
      out << e->name;
    else {
      for (unsigned i = 0; i < e->nargs; i++)
        out << (i ? ", " : "") << ref(e->args[i]);
      if (e->op == Op::Extract)
        out << ", " << e->hi << ", " << e->lo;
    }
    out << ") : " << e->width;
    if (ctx_)
      if (auto loc = ctx_->loc_of(e))
        out << " @" << loc->file << ':' << loc->line;
    out << '\n';
  }
  return out.str();
}

std::string dump(std::span<const Expr> roots, const Context* ctx)
{
  Dumper d(ctx);
  std::string s;
  for (Expr e : roots)
    s += d.emit(e);
  return s;
}

} // namespace c2v::bv
