#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "c2v/bvir.hpp"

using namespace c2v;
using namespace c2v::bv;
using boost::multiprecision::cpp_int;

namespace {

// Naive big-integer model of every operator, written independently of
// BitVec: values are non-negative integers below 2^w.
cpp_int mask(unsigned w) { return (cpp_int(1) << w) - 1; }
cpp_int to_signed(const cpp_int& v, unsigned w)
{
  return (v >> (w - 1)) ? v - (cpp_int(1) << w) : v;
}
cpp_int wrap(const cpp_int& v, unsigned w)
{
  cpp_int m = cpp_int(1) << w;
  cpp_int r = v % m;
  if (r < 0)
    r += m;
  return r;
}

cpp_int reference(Op op, const cpp_int& a, const cpp_int& b, unsigned w)
{
  switch (op) {
  case Op::And: return a & b;
  case Op::Or: return a | b;
  case Op::Xor: return a ^ b;
  case Op::Add: return wrap(a + b, w);
  case Op::Sub: return wrap(a - b, w);
  case Op::Mul: return wrap(a * b, w);
  case Op::Udiv: return b == 0 ? mask(w) : a / b;
  case Op::Urem: return b == 0 ? a : a % b;
  case Op::Sdiv: {
    if (b == 0)
      return mask(w);
    cpp_int sa = to_signed(a, w), sb = to_signed(b, w);
    cpp_int q = abs(sa) / abs(sb);
    if ((sa < 0) != (sb < 0))
      q = -q;
    return wrap(q, w);
  }
  case Op::Srem: {
    if (b == 0)
      return a;
    cpp_int sa = to_signed(a, w), sb = to_signed(b, w);
    cpp_int r = abs(sa) % abs(sb);
    if (sa < 0)
      r = -r;
    return wrap(r, w);
  }
  case Op::Shl: return b >= w ? cpp_int(0) : wrap(a << static_cast<unsigned>(b), w);
  case Op::Lshr: return b >= w ? cpp_int(0) : a >> static_cast<unsigned>(b);
  case Op::Ashr: {
    cpp_int sa = to_signed(a, w);
    if (b >= w)
      return sa < 0 ? mask(w) : cpp_int(0);
    // floor division by 2^b
    cpp_int d = cpp_int(1) << static_cast<unsigned>(b);
    cpp_int q = sa >= 0 ? cpp_int(sa / d) : cpp_int(-((-sa + d - 1) / d));
    return wrap(q, w);
  }
  case Op::Eq: return cpp_int(a == b);
  case Op::Ult: return cpp_int(a < b);
  case Op::Ule: return cpp_int(a <= b);
  case Op::Slt: return cpp_int(to_signed(a, w) < to_signed(b, w));
  case Op::Sle: return cpp_int(to_signed(a, w) <= to_signed(b, w));
  default: break;
  }
  ADD_FAILURE() << "no reference for " << op_name(op);
  return 0;
}

const Op binary_ops[] = {Op::And, Op::Or, Op::Xor, Op::Add, Op::Sub, Op::Mul,
                         Op::Udiv, Op::Urem, Op::Sdiv, Op::Srem, Op::Shl, Op::Lshr,
                         Op::Ashr, Op::Eq, Op::Ult, Op::Ule, Op::Slt, Op::Sle};

cpp_int to_cpp(const BitVec& v)
{
  cpp_int r = 0;
  for (int i = static_cast<int>(v.num_words()) - 1; i >= 0; i--)
    r = (r << 64) | v.word(i);
  return r;
}

BitVec from_cpp(unsigned w, cpp_int v)
{
  BitVec r(w);
  for (unsigned i = 0; i < r.num_words(); i++) {
    r.set_word(i, static_cast<uint64_t>(v & cpp_int(~uint64_t{0})));
    v >>= 64;
  }
  return r;
}

class RandomExpr
{
public:
  RandomExpr(Context& ctx, uint64_t seed) : ctx_{ctx}, rng_{seed} {}

  Expr gen(unsigned w, unsigned depth)
  {
    if (depth == 0 || pick(4) == 0)
      return leaf(w);
    unsigned choice = pick(10);
    switch (choice) {
    case 0: {
      Expr a = gen(w, depth - 1);
      Expr args[] = {a};
      return ctx_.make(pick(2) ? Op::Not : Op::Neg, args);
    }
    case 1:
    case 2:
    case 3: {
      if (w == 1) {
        unsigned ow = 1 + pick(16);
        Op cmp[] = {Op::Eq, Op::Ult, Op::Ule, Op::Slt, Op::Sle};
        Expr args[] = {gen(ow, depth - 1), gen(ow, depth - 1)};
        return ctx_.make(cmp[pick(5)], args);
      }
      Op op = binary_ops[pick(13)];
      Expr args[] = {gen(w, depth - 1), gen(w, depth - 1)};
      return ctx_.make(op, args);
    }
    case 4: {
      Expr args[] = {gen(1, depth - 1), gen(w, depth - 1), gen(w, depth - 1)};
      return ctx_.make(Op::Ite, args);
    }
    case 5:
    case 6: {
      unsigned extra = pick(9);
      if (w + extra > 64)
        extra = 0;
      unsigned lo = extra ? pick(extra + 1) : 0;
      Expr args[] = {gen(w + extra, depth - 1)};
      return ctx_.make(Op::Extract, args, lo + w - 1, lo);
    }
    case 7:
      if (w >= 2) {
        unsigned lw = 1 + pick(w - 1);
        Expr args[] = {gen(w - lw, depth - 1), gen(lw, depth - 1)};
        return ctx_.make(Op::Concat, args);
      }
      return leaf(w);
    default: {
      if (w < 2)
        return leaf(w);
      unsigned from = 1 + pick(w - 1);
      Expr args[] = {gen(from, depth - 1)};
      return ctx_.make(pick(2) ? Op::Zext : Op::Sext, args, 0, 0, w);
    }
    }
  }

  BitVec random_value(unsigned w)
  {
    BitVec v(w);
    switch (pick(6)) {
    case 0: return v;
    case 1: return BitVec::ones(w);
    case 2: return BitVec(w, pick(4));
    default:
      for (unsigned i = 0; i < v.num_words(); i++)
        v.set_word(i, rng_());
      return v;
    }
  }

  unsigned pick(unsigned n) { return static_cast<unsigned>(rng_() % n); }

private:
  Expr leaf(unsigned w)
  {
    if (pick(3) == 0)
      return ctx_.constant(random_value(w));
    return ctx_.var("v" + std::to_string(w) + "_" + std::to_string(pick(3)), w);
  }

  Context& ctx_;
  std::mt19937_64 rng_;
};

} // namespace

TEST(Simplify, AnnihilatorAnd)
{
  Context ctx;
  Expr x = ctx.var("x", 8);
  Expr args[] = {x, ctx.zero(8)};
  EXPECT_EQ(ctx.simplify(ctx.make(Op::And, args)), ctx.zero(8));
}

TEST(Simplify, IteWithConstantCondition)
{
  Context ctx;
  Expr a = ctx.var("a", 8), b = ctx.var("b", 8);
  Expr args[] = {ctx.constant(1, 1), a, b};
  EXPECT_EQ(ctx.simplify(ctx.make(Op::Ite, args)), a);
}

TEST(Simplify, ExtractSelectsLowPartOfConcat)
{
  Context ctx;
  Expr x = ctx.var("x", 8), y = ctx.var("y", 8);
  Expr cat[] = {y, x};
  Expr ex[] = {ctx.make(Op::Concat, cat)};
  EXPECT_EQ(ctx.simplify(ctx.make(Op::Extract, ex, 7, 0)), x);
}

TEST(Simplify, LocalIdentities)
{
  Context ctx;
  Expr x = ctx.var("x", 16);
  EXPECT_EQ(ctx.mk_or(x, ctx.zero(16)), x);
  EXPECT_EQ(ctx.mk_xor(x, x), ctx.zero(16));
  EXPECT_EQ(ctx.mk_not(ctx.mk_not(x)), x);
  EXPECT_EQ(ctx.mk_neg(ctx.mk_neg(x)), x);
  EXPECT_EQ(ctx.mk_add(ctx.constant(16, 3), ctx.constant(16, 4)), ctx.constant(16, 7));
}

TEST(Eval, AddWrapsAround)
{
  Context ctx;
  Expr args[] = {ctx.var("a", 8), ctx.var("b", 8)};
  Expr e = ctx.make(Op::Add, args);
  Env env{{"a", BitVec(8, 200)}, {"b", BitVec(8, 100)}};
  EXPECT_EQ(eval(e, env), BitVec(8, 44));
}

TEST(Eval, ExtractLow23Bits)
{
  Context ctx;
  Expr args[] = {ctx.constant(32, 0x40490FDB)};
  EXPECT_EQ(eval(ctx.make(Op::Extract, args, 22, 0), {}), BitVec(23, 0x490FDB));
}

TEST(Eval, Overshift)
{
  Context ctx;
  Expr args[] = {ctx.constant(8, 0xFF), ctx.constant(8, 9)};
  EXPECT_EQ(eval(ctx.make(Op::Lshr, args), {}), BitVec(8, 0));
  EXPECT_EQ(eval(ctx.make(Op::Shl, args), {}), BitVec(8, 0));
  EXPECT_EQ(eval(ctx.make(Op::Ashr, args), {}), BitVec(8, 0xFF));
}

TEST(Eval, UnboundVariable)
{
  Context ctx;
  try {
    eval(ctx.var("q", 4), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_UNBOUND_VAR");
  }
}

TEST(Eval, WidthMismatchOnBinding)
{
  Context ctx;
  try {
    eval(ctx.var("q", 4), {{"q", BitVec(5, 1)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_WIDTH_MISMATCH");
  }
}

TEST(Construction, WidthChecked)
{
  Context ctx;
  Expr args[] = {ctx.var("a", 8), ctx.var("b", 9)};
  EXPECT_THROW(ctx.make(Op::Add, args), Error);
  Expr ex[] = {ctx.var("a", 8)};
  EXPECT_THROW(ctx.make(Op::Extract, ex, 8, 0), Error);
  EXPECT_THROW(ctx.make(Op::Extract, ex, 2, 3), Error);
  Expr c[] = {ctx.var("a", 8), ctx.var("a", 8), ctx.var("a", 8)};
  EXPECT_THROW(ctx.make(Op::Ite, c), Error);
}

TEST(Eval, MatchesBigIntReferenceOnAllWidth4Pairs)
{
  for (Op op : binary_ops) {
    for (unsigned a = 0; a < 16; a++)
      for (unsigned b = 0; b < 16; b++) {
        BitVec va(4, a), vb(4, b);
        BitVec vals[] = {va, vb};
        unsigned w = is_comparison(op) ? 1 : 4;
        BitVec got = apply(op, vals, 0, 0, w);
        EXPECT_EQ(to_cpp(got), reference(op, a, b, 4))
          << op_name(op) << " " << a << " " << b;
      }
  }
}

TEST(Eval, WideOperatorsMatchBigIntReference)
{
  std::mt19937_64 rng(7);
  for (unsigned w : {63u, 64u, 65u, 100u, 128u, 200u, 512u})
    for (Op op : binary_ops)
      for (int trial = 0; trial < 60; trial++) {
        BitVec va(w), vb(w);
        for (unsigned i = 0; i < va.num_words(); i++) {
          va.set_word(i, rng());
          vb.set_word(i, trial % 3 == 0 ? rng() % 8 : rng());
        }
        if (trial % 5 == 0)
          vb = BitVec(w, rng() % (w + 3));
        BitVec vals[] = {va, vb};
        BitVec got = apply(op, vals, 0, 0, is_comparison(op) ? 1 : w);
        EXPECT_EQ(to_cpp(got), reference(op, to_cpp(va), to_cpp(vb), w))
          << op_name(op) << " width " << w;
      }
}

TEST(Eval, ExtractConcatExtendMatchReference)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; trial++) {
    unsigned w = 1 + rng() % 200;
    BitVec v(w);
    for (unsigned i = 0; i < v.num_words(); i++)
      v.set_word(i, rng());
    cpp_int cv = to_cpp(v);
    unsigned lo = rng() % w, hi = lo + rng() % (w - lo);
    EXPECT_EQ(to_cpp(v.extract(hi, lo)), (cv >> lo) & mask(hi - lo + 1));
    unsigned to = w + rng() % 100;
    EXPECT_EQ(to_cpp(v.zext(to)), cv);
    EXPECT_EQ(to_cpp(v.sext(to)), wrap(to_signed(cv, w), to));
    unsigned w2 = 1 + rng() % 100;
    BitVec lo_part = from_cpp(w2, cpp_int(rng()));
    EXPECT_EQ(to_cpp(v.concat(lo_part)), (cv << w2) | to_cpp(lo_part));
  }
}

TEST(Eval, DivisionByZeroConventions)
{
  for (unsigned w : {4u, 8u})
    for (uint64_t x = 0; x < (uint64_t{1} << w); x++) {
      BitVec vx(w, x), zero(w);
      EXPECT_EQ(vx.udiv(zero), BitVec::ones(w));
      EXPECT_EQ(vx.urem(zero), vx);
      EXPECT_EQ(vx.sdiv(zero), BitVec::ones(w));
      EXPECT_EQ(vx.srem(zero), vx);
    }
}

TEST(Simplify, SoundAndWidthPreservingOnRandomExpressions)
{
  constexpr int exprs = 100000;
  constexpr int envs = 32;
  std::mt19937_64 env_rng(11);
  for (int i = 0; i < exprs; i++) {
    Context ctx;
    RandomExpr gen(ctx, 1000 + i);
    unsigned w = 1 + gen.pick(64);
    Expr e = gen.gen(w, 1 + gen.pick(8));
    Expr s = ctx.simplify(e);
    ASSERT_EQ(s->width, e->width);
    Expr roots[] = {e, s};
    Evaluator ev(roots);
    for (int k = 0; k < envs; k++) {
      std::vector<BitVec> in;
      for (unsigned width : ev.var_widths())
        in.push_back(gen.random_value(width));
      ev.run(in);
      ASSERT_EQ(ev.value(e), ev.value(s)) << "expression " << i << "\n"
                                         << dump(roots);
    }
  }
}

TEST(Simplify, Idempotent)
{
  Context ctx;
  RandomExpr gen(ctx, 99);
  for (int i = 0; i < 2000; i++) {
    Expr s = ctx.simplify(gen.gen(1 + gen.pick(32), 6));
    EXPECT_EQ(ctx.simplify(s), s);
  }
}

TEST(Dump, StableFormat)
{
  Context ctx;
  Expr a = ctx.var("a", 8);
  Expr e = ctx.mk_extract(ctx.mk_add(a, ctx.constant(8, 1)), 3, 0);
  ctx.set_loc(e, {"f.c", 4, 2});
  Expr roots[] = {e};
  std::string text = dump(roots, &ctx);
  EXPECT_EQ(text, dump(roots, &ctx));
  EXPECT_NE(text.find("var(a) : 8"), std::string::npos);
  EXPECT_NE(text.find("@f.c:4"), std::string::npos);
}
