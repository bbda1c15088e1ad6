#include <gtest/gtest.h>

#include "c2v/diag.hpp"
#include "c2v/equiv.hpp"
#include "pipeline.hpp"

using namespace c2v;
using namespace c2v::test;

namespace {

struct Checked
{
  std::unique_ptr<TypedProgram> prog;
  SsaTrace trace;
  std::vector<Verdict> verdicts;
};

Checked check_source(const std::string& body, SymexOptions so = {}, SolveOptions opts = {})
{
  Checked c;
  c.prog = std::make_unique<TypedProgram>(compile_source("#include <stdint.h>\nvoid f(void) {\n" + body + "}\n", "t.c"));
  c.trace = slice(execute(*c.prog, "f", so));
  OracleReplay replay{c.prog.get(), "f", so.checks};
  c.verdicts = check_obligations(c.trace, opts, &replay);
  return c;
}

v::VModule module_of(const std::string& stem)
{
  return build_corpus(stem).module;
}

std::string error_code(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

} // namespace

TEST(CheckObligations, IncrementNeverFixedPoint)
{
  Checked c = check_source("  uint32_t x; C2V_SAMPLE_INPUT(uint32_t, x);\n  assert(x + 1 != x);\n");
  ASSERT_EQ(c.verdicts.size(), 1u);
  EXPECT_EQ(c.verdicts[0].outcome, Outcome::Holds);
}

TEST(CheckObligations, ShiftIsDoubling)
{
  Checked c = check_source("  uint32_t x; C2V_SAMPLE_INPUT(uint32_t, x);\n  assert(x * 2 == x << 1);\n");
  ASSERT_EQ(c.verdicts.size(), 1u);
  EXPECT_EQ(c.verdicts[0].outcome, Outcome::Holds);
}

TEST(CheckObligations, RangeFailsWithOracleConfirmedCex)
{
  Checked c = check_source("  uint32_t x; C2V_SAMPLE_INPUT(uint32_t, x);\n  assert(x < 100);\n");
  ASSERT_EQ(c.verdicts.size(), 1u);
  const Verdict& v = c.verdicts[0];
  ASSERT_EQ(v.outcome, Outcome::Fails);
  ASSERT_EQ(v.cex.size(), 1u);
  EXPECT_EQ(v.cex[0].first, "x");
  EXPECT_GE(v.cex[0].second.to_u64(), 100u);
  EXPECT_EQ(v.oracle, OracleAgreement::Confirmed);
  RunResult r = interpret(*c.prog, "f", {{"x", v.cex[0].second}});
  EXPECT_FALSE(r.all_held());
}

TEST(CheckObligations, DivisionCheck)
{
  SymexOptions so;
  so.checks.div = true;
  Checked c = check_source("  uint32_t a, b; C2V_SAMPLE_INPUT(uint32_t, a); C2V_SAMPLE_INPUT(uint32_t, b);\n"
                           "  uint32_t q = b > 3 ? a / b : 0;\n  uint32_t r = a / (b | 1);\n"
                           "  uint32_t s = a % b;\n"
                           "  C2V_DRIVE_OUTPUT(uint32_t, q); C2V_DRIVE_OUTPUT(uint32_t, r);\n"
                           "  C2V_DRIVE_OUTPUT(uint32_t, s);\n",
                           so);
  ASSERT_EQ(c.verdicts.size(), 3u);
  EXPECT_EQ(c.verdicts[0].outcome, Outcome::Holds);
  EXPECT_EQ(c.verdicts[1].outcome, Outcome::Holds);
  ASSERT_EQ(c.verdicts[2].outcome, Outcome::Fails);
  EXPECT_EQ(c.verdicts[2].oracle, OracleAgreement::Confirmed);
  for (const auto& [name, val] : c.verdicts[2].cex)
    if (name == "b")
      EXPECT_TRUE(val.is_zero());
}

TEST(CheckObligations, UninitializedValueIsReported)
{
  Checked c = check_source("  uint32_t x; C2V_SAMPLE_INPUT(uint32_t, x);\n  uint32_t u;\n  assert(u != 7);\n");
  ASSERT_EQ(c.verdicts.size(), 1u);
  EXPECT_EQ(c.verdicts[0].outcome, Outcome::Fails);
  EXPECT_EQ(c.verdicts[0].note, "violation depends on uninitialized values");
  EXPECT_EQ(c.verdicts[0].oracle, OracleAgreement::NotApplicable);
}

TEST(CheckObligations, CorpusVerdicts)
{
  for (const char* stem : {"assert_props", "fp_dispatch"}) {
    Pipeline p = build_corpus(stem);
    OracleReplay replay{p.prog.get(), stem, {}};
    for (const Verdict& v : check_obligations(p.trace, {}, &replay))
      EXPECT_EQ(v.outcome, Outcome::Holds) << stem;
  }
  Pipeline p = build_corpus("assert_range");
  OracleReplay replay{p.prog.get(), "assert_range", {}};
  auto vs = check_obligations(p.trace, {}, &replay);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].outcome, Outcome::Fails);
  EXPECT_EQ(vs[0].oracle, OracleAgreement::Confirmed);
}

TEST(CheckObligations, UnwindingBounds)
{
  SymexOptions so;
  so.unwinding_assertions = true;
  so.unwind = 2;
  Pipeline low = build_corpus("sum_loop", so);
  bool fails = false;
  for (const Verdict& v : check_obligations(low.trace)) {
    fails = fails || v.outcome == Outcome::Fails;
    if (v.outcome == Outcome::Fails)
      EXPECT_TRUE(v.cex.empty());
  }
  EXPECT_TRUE(fails);
  so.unwind = 4;
  Pipeline high = build_corpus("sum_loop", so);
  for (const Verdict& v : check_obligations(high.trace))
    EXPECT_EQ(v.outcome, Outcome::Holds);
}

TEST(CheckObligations, TinyBudgetGivesUnknown)
{
  Checked c = check_source("  uint32_t x, y; C2V_SAMPLE_INPUT(uint32_t, x); C2V_SAMPLE_INPUT(uint32_t, y);\n"
                           "  assert(x * y != 0x12345679u || x == 1 || y == 1);\n",
                           {}, SolveOptions{1, 1});
  ASSERT_EQ(c.verdicts.size(), 1u);
  EXPECT_EQ(c.verdicts[0].outcome, Outcome::Unknown);
}

TEST(CheckEquiv, Reflexive)
{
  for (const char* stem : {"wrap_u8", "control_mix", "punning_mask", "mf8_add_norm"}) {
    v::VModule m = module_of(stem);
    EXPECT_EQ(check_equiv(m, m).outcome, Outcome::Holds) << stem;
  }
}

TEST(CheckEquiv, FlippedConstantBitFails)
{
  v::VModule a = module_of("wrap_u8");
  std::string text = v::render_text(a);
  size_t pos = text.find("'h");
  ASSERT_NE(pos, std::string::npos);
  char& d = text[pos + 2 + (text[pos + 2] == '0' ? 1 : 0)];
  d = d == '1' ? '0' : '1';
  v::VModule b = v::parse_subset(text);
  Verdict v = check_equiv(a, b);
  ASSERT_EQ(v.outcome, Outcome::Fails);
  v::ModuleEvaluator ea(a), eb(b);
  bv::Env env(v.cex.begin(), v.cex.end());
  ea.run(env);
  eb.run(env);
  bool differs = false;
  for (size_t k = 0; k < ea.lowered().outputs.size(); k++)
    differs = differs || !(ea.output(k) == eb.output(k));
  EXPECT_TRUE(differs);
}

TEST(CheckEquiv, MiniFloatAddersAgree)
{
  v::VModule norm = module_of("mf8_add_norm"), shift = module_of("mf8_add_shift");
  EXPECT_EQ(check_equiv(norm, shift).outcome, Outcome::Holds);
}

TEST(CheckEquiv, FlippedTieBreakIsCaught)
{
  v::VModule shift = module_of("mf8_add_shift"), flipped = module_of("mf8_add_flipped");
  Verdict ab = check_equiv(shift, flipped);
  ASSERT_EQ(ab.outcome, Outcome::Fails);
  Verdict ba = check_equiv(flipped, shift);
  EXPECT_EQ(ba.outcome, Outcome::Fails);
}

TEST(CheckEquiv, PortMismatch)
{
  v::VModule a = module_of("wrap_u8"), b = module_of("punning_mask"), f = module_of("f32_add_wrapper");
  EXPECT_EQ(error_code([&] { check_equiv(a, b); }), "E_PORT_MISMATCH");
  EXPECT_EQ(error_code([&] { check_equiv(f, f, {{"x", "res"}}); }), "E_PORT_MISMATCH");
  EXPECT_EQ(error_code([&] { check_equiv(f, f, {{"x", "nope"}}); }), "E_PORT_MISMATCH");
  EXPECT_EQ(check_equiv(f, f, {{"x", "x"}}).outcome, Outcome::Holds);
}

TEST(CheckEquiv, SwappedInputsDiffer)
{
  v::VModule f = module_of("wrap_u8");
  std::vector<PortPair> map;
  int inputs = 0;
  for (const auto& p : f.ports)
    inputs += !p.output;
  ASSERT_EQ(inputs, 2);
  // wrap_u8 depends on a - b, so swapping its inputs is observable.
  map.push_back({f.ports[0].name, f.ports[1].name});
  map.push_back({f.ports[1].name, f.ports[0].name});
  EXPECT_EQ(check_equiv(f, f, map).outcome, Outcome::Fails);
}
