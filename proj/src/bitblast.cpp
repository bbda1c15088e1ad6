#include <algorithm>

#include "c2v/equiv.hpp"

namespace c2v {

using sat::Lit;

Blaster::Blaster(sat::Cnf& cnf, const std::unordered_map<std::string, bv::Expr>* defs)
  : cnf_{cnf}, defs_{defs}
{
  true_ = fresh();
  cnf_.add({true_});
}

Lit Blaster::and2(Lit a, Lit b)
{
  if (a == -true_ || b == -true_ || a == -b)
    return -true_;
  if (a == true_ || a == b)
    return b;
  if (b == true_)
    return a;
  if (a > b)
    std::swap(a, b);
  auto [it, fresh_gate] = and_cache_.try_emplace({a, b}, 0);
  if (!fresh_gate)
    return it->second;
  Lit g = fresh();
  it->second = g;
  cnf_.add({-g, a});
  cnf_.add({-g, b});
  cnf_.add({g, -a, -b});
  return g;
}

Lit Blaster::xor2(Lit a, Lit b)
{
  if (a == b)
    return -true_;
  if (a == -b)
    return true_;
  bool flip = false;
  if (a < 0) {
    a = -a;
    flip = !flip;
  }
  if (b < 0) {
    b = -b;
    flip = !flip;
  }
  Lit r;
  if (a == true_)
    r = -b;
  else if (b == true_)
    r = -a;
  else {
    if (a > b)
      std::swap(a, b);
    auto [it, fresh_gate] = xor_cache_.try_emplace({a, b}, 0);
    if (fresh_gate) {
      Lit g = fresh();
      it->second = g;
      cnf_.add({-g, a, b});
      cnf_.add({-g, -a, -b});
      cnf_.add({g, -a, b});
      cnf_.add({g, a, -b});
    }
    r = it->second;
  }
  return flip ? -r : r;
}

Lit Blaster::mux(Lit s, Lit t, Lit f)
{
  if (s == true_ || t == f)
    return t;
  if (s == -true_)
    return f;
  if (s < 0) {
    s = -s;
    std::swap(t, f);
  }
  if (t == true_)
    return or2(s, f);
  if (t == -true_)
    return and2(-s, f);
  if (f == true_)
    return or2(-s, t);
  if (f == -true_)
    return and2(s, t);
  if (t == -f)
    return -xor2(s, t);
  auto [it, fresh_gate] = mux_cache_.try_emplace({s, t, f}, 0);
  if (!fresh_gate)
    return it->second;
  Lit g = fresh();
  it->second = g;
  cnf_.add({-s, -t, g});
  cnf_.add({-s, t, -g});
  cnf_.add({s, -f, g});
  cnf_.add({s, f, -g});
  cnf_.add({-t, -f, g});
  cnf_.add({t, f, -g});
  return g;
}

Blaster::Bits Blaster::add(const Bits& a, const Bits& b, Lit carry)
{
  Bits r(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    Lit x = xor2(a[i], b[i]);
    r[i] = xor2(x, carry);
    if (i + 1 < a.size())
      carry = or2(and2(a[i], b[i]), and2(carry, x));
  }
  return r;
}

Blaster::Bits Blaster::neg(const Bits& a)
{
  Bits inv(a.size()), zero(a.size(), -true_);
  for (size_t i = 0; i < a.size(); i++)
    inv[i] = -a[i];
  return add(inv, zero, true_);
}

Blaster::Bits Blaster::mul(const Bits& a, const Bits& b)
{
  size_t w = a.size();
  Bits acc(w, -true_);
  for (size_t i = 0; i < w; i++) {
    if (b[i] == -true_)
      continue;
    Bits part(w, -true_);
    for (size_t k = i; k < w; k++)
      part[k] = and2(a[k - i], b[i]);
    acc = add(acc, part, -true_);
  }
  return acc;
}

Lit Blaster::ult(const Bits& a, const Bits& b)
{
  Lit lt = -true_;
  for (size_t i = 0; i < a.size(); i++)
    lt = mux(xor2(a[i], b[i]), b[i], lt);
  return lt;
}

Lit Blaster::eq(const Bits& a, const Bits& b)
{
  Lit r = true_;
  for (size_t i = 0; i < a.size(); i++)
    r = and2(r, -xor2(a[i], b[i]));
  return r;
}

// Restoring division; b == 0 yields q = ones, r = a.
void Blaster::udivrem(const Bits& a, const Bits& b, Bits& q, Bits& r)
{
  size_t w = a.size();
  Bits rem(w + 1, -true_);
  Bits bx(b);
  bx.push_back(-true_);
  Bits nb(w + 1);
  for (size_t i = 0; i <= w; i++)
    nb[i] = -bx[i];
  q.assign(w, -true_);
  for (size_t i = w; i-- > 0;) {
    Bits sh(w + 1);
    sh[0] = a[i];
    for (size_t k = 1; k <= w; k++)
      sh[k] = rem[k - 1];
    Lit ge = -ult(sh, bx);
    Bits diff = add(sh, nb, true_);
    for (size_t k = 0; k <= w; k++)
      rem[k] = mux(ge, diff[k], sh[k]);
    q[i] = ge;
  }
  r.assign(rem.begin(), rem.begin() + static_cast<long>(w));
}

// dir > 0: left shift; dir < 0: right shift filling with `fill`.
Blaster::Bits Blaster::shift(const Bits& a, const Bits& amount, int dir, Lit fill)
{
  size_t w = a.size();
  Bits cur(a);
  Lit over = -true_;
  for (size_t i = 0; i < amount.size(); i++) {
    if (i >= 63 || (uint64_t{1} << i) >= w) {
      over = or2(over, amount[i]);
      continue;
    }
    size_t s = size_t{1} << i;
    Bits next(w);
    for (size_t k = 0; k < w; k++) {
      Lit moved;
      if (dir > 0)
        moved = k >= s ? cur[k - s] : -true_;
      else
        moved = k + s < w ? cur[k + s] : fill;
      next[k] = mux(amount[i], moved, cur[k]);
    }
    cur = std::move(next);
  }
  Lit f = dir > 0 ? -true_ : fill;
  for (size_t k = 0; k < w; k++)
    cur[k] = mux(over, f, cur[k]);
  return cur;
}

Blaster::Bits Blaster::blast_node(bv::Expr e)
{
  using bv::Op;
  auto arg = [&](unsigned i) -> const Bits& { return memo_.at(e->args[i]->id); };
  size_t w = e->width;
  Bits r(w);
  switch (e->op) {
  case Op::Const:
    for (size_t i = 0; i < w; i++)
      r[i] = e->value.bit(static_cast<unsigned>(i)) ? true_ : -true_;
    return r;
  case Op::Var: {
    if (defs_) {
      auto it = defs_->find(e->name);
      if (it != defs_->end()) {
        if (it->second->width != e->width)
          fail("E_WIDTH", "definition of '" + e->name + "' has the wrong width");
        return bits(it->second);
      }
    }
    auto [it, inserted] = input_index_.try_emplace(e->name, inputs_.size());
    if (!inserted) {
      if (inputs_[it->second].second.size() != w)
        fail("E_WIDTH", "variable '" + e->name + "' used at two widths");
      return inputs_[it->second].second;
    }
    for (size_t i = 0; i < w; i++)
      r[i] = fresh();
    inputs_.emplace_back(e->name, r);
    return r;
  }
  case Op::Not:
    for (size_t i = 0; i < w; i++)
      r[i] = -arg(0)[i];
    return r;
  case Op::And:
  case Op::Or:
  case Op::Xor:
    for (size_t i = 0; i < w; i++) {
      Lit a = arg(0)[i], b = arg(1)[i];
      r[i] = e->op == Op::And ? and2(a, b) : e->op == Op::Or ? or2(a, b) : xor2(a, b);
    }
    return r;
  case Op::Neg:
    return neg(arg(0));
  case Op::Add:
    return add(arg(0), arg(1), -true_);
  case Op::Sub: {
    Bits nb(w);
    for (size_t i = 0; i < w; i++)
      nb[i] = -arg(1)[i];
    return add(arg(0), nb, true_);
  }
  case Op::Mul:
    return mul(arg(0), arg(1));
  case Op::Udiv:
  case Op::Urem: {
    Bits q, rem;
    udivrem(arg(0), arg(1), q, rem);
    return e->op == Op::Udiv ? q : rem;
  }
  case Op::Sdiv:
  case Op::Srem: {
    const Bits& a = arg(0);
    const Bits& b = arg(1);
    Lit sa = a[w - 1], sb = b[w - 1];
    Bits na = neg(a), nb = neg(b), ma(w), mb(w);
    for (size_t i = 0; i < w; i++) {
      ma[i] = mux(sa, na[i], a[i]);
      mb[i] = mux(sb, nb[i], b[i]);
    }
    Bits q, rem;
    udivrem(ma, mb, q, rem);
    if (e->op == Op::Srem) {
      Bits nr = neg(rem);
      for (size_t i = 0; i < w; i++)
        r[i] = mux(sa, nr[i], rem[i]);
      return r; // b == 0 gives |a| negated back to a
    }
    Bits nq = neg(q);
    Lit flip = xor2(sa, sb);
    Lit bz = eq(b, Bits(w, -true_));
    for (size_t i = 0; i < w; i++)
      r[i] = mux(bz, true_, mux(flip, nq[i], q[i]));
    return r;
  }
  case Op::Shl:
    return shift(arg(0), arg(1), 1, -true_);
  case Op::Lshr:
    return shift(arg(0), arg(1), -1, -true_);
  case Op::Ashr:
    return shift(arg(0), arg(1), -1, arg(0)[w - 1]);
  case Op::Eq:
    return {eq(arg(0), arg(1))};
  case Op::Ult:
    return {ult(arg(0), arg(1))};
  case Op::Ule:
    return {-ult(arg(1), arg(0))};
  case Op::Slt:
  case Op::Sle: {
    Bits a = arg(0), b = arg(1);
    size_t m = a.size() - 1;
    a[m] = -a[m];
    b[m] = -b[m];
    return {e->op == Op::Slt ? ult(a, b) : -ult(b, a)};
  }
  case Op::Ite:
    for (size_t i = 0; i < w; i++)
      r[i] = mux(arg(0)[0], arg(1)[i], arg(2)[i]);
    return r;
  case Op::Extract:
    return Bits(arg(0).begin() + e->lo, arg(0).begin() + e->hi + 1);
  case Op::Concat:
    r = arg(1);
    r.insert(r.end(), arg(0).begin(), arg(0).end());
    return r;
  case Op::Zext:
  case Op::Sext: {
    r = arg(0);
    Lit fill = e->op == Op::Zext ? -true_ : r.back();
    r.resize(w, fill);
    return r;
  }
  }
  internal_error("bitblast: unknown operator");
}

const std::vector<Lit>& Blaster::bits(bv::Expr root)
{
  auto done = memo_.find(root->id);
  if (done != memo_.end())
    return done->second;
  for (bv::Expr e : bv::topo_order(std::span<const bv::Expr>(&root, 1))) {
    if (memo_.count(e->id))
      continue;
    Bits b = blast_node(e);
    memo_[e->id] = std::move(b);
  }
  return memo_.at(root->id);
}

Lit Blaster::lit(bv::Expr e)
{
  if (e->width != 1)
    fail("E_WIDTH", "expected a width-1 expression, got width " + std::to_string(e->width));
  return bits(e)[0];
}

BitVec Blaster::input_value(const std::vector<Lit>& b, const std::vector<bool>& model) const
{
  BitVec v(static_cast<unsigned>(b.size()));
  for (size_t i = 0; i < b.size(); i++) {
    Lit l = b[i];
    bool x = l > 0 ? model.at(l - 1) : !model.at(-l - 1);
    v.set_bit(static_cast<unsigned>(i), x);
  }
  return v;
}

BlastResult bitblast(bv::Expr e, const std::vector<Equation>& defs)
{
  std::unordered_map<std::string, bv::Expr> d;
  for (const auto& eq : defs)
    d[eq.lhs] = eq.rhs;
  BlastResult r;
  Blaster b(r.cnf, &d);
  Lit root = b.lit(e);
  r.cnf.add({root});
  r.inputs = b.inputs();
  return r;
}

} // namespace c2v
