#include <gtest/gtest.h>

#include "c2v/equiv.hpp"

using namespace c2v;
using bv::Context;
using bv::Env;
using bv::eval;
using bv::op_name;
using bv::Op;

namespace {

// Number of assignments to the free inputs satisfying the CNF, by blocking
// clauses over the input bits.
uint64_t count_models(BlastResult br)
{
  uint64_t n = 0;
  sat::Solver s;
  s.add(br.cnf);
  for (;;) {
    sat::Status st = s.solve();
    EXPECT_NE(st, sat::Status::Unknown);
    if (st != sat::Status::Sat)
      return n;
    n++;
    std::vector<sat::Lit> block;
    for (const auto& [name, bits] : br.inputs)
      for (sat::Lit l : bits)
        block.push_back(s.lit_value(l) ? -l : l);
    if (block.empty())
      return n;
    s.add_clause(block);
  }
}

const Op kBinary[] = {Op::And, Op::Or,   Op::Xor, Op::Add, Op::Sub,  Op::Mul,  Op::Udiv,
                      Op::Urem, Op::Sdiv, Op::Srem, Op::Shl, Op::Lshr, Op::Ashr};
const Op kCompare[] = {Op::Eq, Op::Ult, Op::Ule, Op::Slt, Op::Sle};

} // namespace

TEST(Bitblast, Contradiction)
{
  Context ctx;
  bv::Expr x = ctx.var("x", 1);
  bv::Expr args[] = {x, ctx.make(Op::Not, std::span<const bv::Expr>(&x, 1))};
  BlastResult br = bitblast(ctx.make(Op::And, args));
  EXPECT_EQ(sat::solve(br.cnf).status, sat::Status::Unsat);
}

TEST(Bitblast, ModularInverse)
{
  Context ctx;
  bv::Expr x = ctx.var("x", 4), y = ctx.var("y", 4);
  bv::Expr e = ctx.mk_and(ctx.mk_eq(ctx.mk_add(x, y), ctx.zero(4)), ctx.mk_eq(x, ctx.constant(4, 3)));
  BlastResult br = bitblast(e);
  sat::Result r = sat::solve(br.cnf);
  ASSERT_EQ(r.status, sat::Status::Sat);
  Blaster dummy(br.cnf);
  for (const auto& [name, bits] : br.inputs)
    if (name == "y")
      EXPECT_EQ(dummy.input_value(bits, r.model).to_u64(), 13u);
}

TEST(Bitblast, RejectsWideRoot)
{
  Context ctx;
  try {
    bitblast(ctx.var("x", 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_WIDTH");
  }
}

// Every operator at width 4 wrapped in eq(op(x,y), z): the blasted CNF must
// admit z = op(x,y) and nothing else, for all 256 (x,y) pairs.
TEST(Bitblast, AgreesWithEvalOnAllWidth4Inputs)
{
  for (Op op : kBinary) {
    Context ctx;
    bv::Expr x = ctx.var("x", 4), y = ctx.var("y", 4);
    bv::Expr args[] = {x, y};
    bv::Expr f = ctx.make(op, args);
    sat::Cnf cnf;
    Blaster b(cnf);
    const auto& bits = b.bits(f);
    sat::Solver s;
    s.add(cnf);
    auto xb = b.bits(x), yb = b.bits(y);
    for (unsigned xv = 0; xv < 16; xv++)
      for (unsigned yv = 0; yv < 16; yv++) {
        std::vector<sat::Lit> as;
        for (unsigned i = 0; i < 4; i++) {
          as.push_back((xv >> i) & 1 ? xb[i] : -xb[i]);
          as.push_back((yv >> i) & 1 ? yb[i] : -yb[i]);
        }
        ASSERT_EQ(s.solve(as), sat::Status::Sat);
        unsigned got = 0;
        for (unsigned i = 0; i < 4; i++)
          got |= (s.lit_value(bits[i]) ? 1u : 0u) << i;
        Env env{{"x", BitVec(4, xv)}, {"y", BitVec(4, yv)}};
        ASSERT_EQ(got, eval(f, env).to_u64()) << op_name(op) << " " << xv << " " << yv;
      }
  }
}

TEST(Bitblast, ModelCountsMatchBruteForce)
{
  for (unsigned w = 1; w <= 4; w++) {
    for (Op op : kBinary) {
      Context ctx;
      bv::Expr x = ctx.var("x", w), y = ctx.var("y", w);
      bv::Expr args[] = {x, y};
      bv::Expr e = ctx.make(Op::Eq, std::array<bv::Expr, 2>{ctx.make(op, args), ctx.constant(w, 1 % (1u << w))});
      uint64_t expect = 0;
      for (unsigned a = 0; a < (1u << w); a++)
        for (unsigned c = 0; c < (1u << w); c++)
          expect += eval(e, {{"x", BitVec(w, a)}, {"y", BitVec(w, c)}}).to_u64();
      EXPECT_EQ(count_models(bitblast(e)), expect) << op_name(op) << " w=" << w;
    }
    for (Op op : kCompare) {
      Context ctx;
      bv::Expr x = ctx.var("x", w), y = ctx.var("y", w);
      bv::Expr args[] = {x, y};
      bv::Expr e = ctx.make(op, args);
      uint64_t expect = 0;
      for (unsigned a = 0; a < (1u << w); a++)
        for (unsigned c = 0; c < (1u << w); c++)
          expect += eval(e, {{"x", BitVec(w, a)}, {"y", BitVec(w, c)}}).to_u64();
      EXPECT_EQ(count_models(bitblast(e)), expect) << op_name(op) << " w=" << w;
    }
  }
}

TEST(Bitblast, StructuralOperators)
{
  Context ctx;
  bv::Expr x = ctx.var("x", 4), y = ctx.var("y", 3), c = ctx.var("c", 1);
  std::vector<bv::Expr> exprs = {
    ctx.make(Op::Extract, std::span<const bv::Expr>(&x, 1), 2, 1),
    ctx.make(Op::Concat, std::array<bv::Expr, 2>{x, y}),
    ctx.make(Op::Zext, std::span<const bv::Expr>(&y, 1), 0, 0, 6),
    ctx.make(Op::Sext, std::span<const bv::Expr>(&y, 1), 0, 0, 6),
    ctx.make(Op::Neg, std::span<const bv::Expr>(&x, 1)),
    ctx.make(Op::Ite, std::array<bv::Expr, 3>{c, ctx.make(Op::Zext, std::span<const bv::Expr>(&y, 1), 0, 0, 4), x}),
  };
  for (bv::Expr f : exprs) {
    unsigned w = f->width;
    for (unsigned v = 0; v < (1u << w); v++) {
      bv::Expr e = ctx.make(Op::Eq, std::array<bv::Expr, 2>{f, ctx.constant(w, v)});
      uint64_t expect = 0;
      for (unsigned a = 0; a < 16; a++)
        for (unsigned b = 0; b < 8; b++)
          for (unsigned cc = 0; cc < 2; cc++)
            expect += eval(e, {{"x", BitVec(4, a)}, {"y", BitVec(3, b)}, {"c", BitVec(1, cc)}}).to_u64();
      // Inputs absent from e are unconstrained; scale by their domain size.
      BlastResult br = bitblast(e);
      uint64_t scale = 16 * 8 * 2;
      for (const auto& [name, bits] : br.inputs)
        scale >>= bits.size();
      EXPECT_EQ(count_models(br) * scale, expect) << op_name(f->op) << " v=" << v;
    }
  }
}

TEST(Bitblast, DefinitionsAreInlined)
{
  Context ctx;
  bv::Expr x = ctx.var("x", 8), t = ctx.var("t_1", 8);
  std::vector<Equation> defs = {{"t_1", ctx.mk_add(x, ctx.constant(8, 1)), {}}};
  // t_1 == x is impossible once t_1 := x + 1.
  EXPECT_EQ(sat::solve(bitblast(ctx.mk_eq(t, x), defs).cnf).status, sat::Status::Unsat);
  EXPECT_EQ(sat::solve(bitblast(ctx.mk_eq(t, x)).cnf).status, sat::Status::Sat);
}
