#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "c2v/diag.hpp"
#include "pipeline.hpp"

using namespace c2v;
using namespace c2v::test;

namespace {

SymexOptions all_checks()
{
  SymexOptions o;
  o.checks = parse_check_list("all");
  return o;
}

RunResult run_source(const std::string& src, const std::string& entry, const bv::Env& in,
                     OracleOptions opts = {})
{
  TypedProgram p = compile_source(src, "t.c");
  return interpret(p, entry, in, opts);
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

class CorpusAgreement : public ::testing::TestWithParam<std::string>
{
};

TEST_P(CorpusAgreement, OracleTraceAndVerilogAgree)
{
  Pipeline p = build_corpus(GetParam(), all_checks());
  Agreement agree(p);
  std::mt19937_64 rng(std::hash<std::string>{}(GetParam()));
  for (int i = 0; i < 2000; i++) {
    bv::Env in = random_inputs(p.trace.iface.inputs, rng);
    std::string why = agree.check(in);
    ASSERT_EQ(why, "") << "vector " << i;
  }
}

TEST_P(CorpusAgreement, ZeroInputsAgree)
{
  Pipeline p = build_corpus(GetParam(), all_checks());
  Agreement agree(p);
  bv::Env zero;
  for (const auto& port : p.trace.iface.inputs)
    zero[port.name] = BitVec(port.width);
  EXPECT_EQ(agree.check(zero), "");
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusAgreement, ::testing::ValuesIn(corpus()),
                         [](const auto& info) { return info.param; });

TEST(Oracle, PunningMask)
{
  Pipeline p = build_corpus("punning_mask");
  bv::Env in{{"xin", BitVec(32, 0x40490FDB)}};
  RunResult r = interpret(*p.prog, "punning_mask", in);
  EXPECT_EQ(r.output("res")->to_u64(), 0x00090FDBu);
  TraceEvaluator t(p.trace);
  t.run(in);
  EXPECT_EQ(t.output(0).to_u64(), 0x00090FDBu);
  v::ModuleEvaluator m(p.module);
  m.run(in);
  EXPECT_EQ(m.output(0).to_u64(), 0x00090FDBu);
}

TEST(Oracle, IntegerPromotionAndWraparound)
{
  const char* src = "#include <stdint.h>\n"
                    "void f(void) {\n"
                    "  uint8_t a, b; C2V_SAMPLE_INPUT(uint8_t, a); C2V_SAMPLE_INPUT(uint8_t, b);\n"
                    "  int out = a + b; uint8_t w = a + b;\n"
                    "  C2V_DRIVE_OUTPUT(int, out); C2V_DRIVE_OUTPUT(uint8_t, w);\n"
                    "}\n";
  RunResult r = run_source(src, "f", {{"a", BitVec(8, 200)}, {"b", BitVec(8, 100)}});
  EXPECT_EQ(r.output("out")->to_u64(), 300u);
  EXPECT_EQ(r.output("w")->to_u64(), 44u);
}

TEST(Oracle, SignedArithmeticAndShifts)
{
  const char* src = "void f(void) {\n"
                    "  int a, b; C2V_SAMPLE_INPUT(int, a); C2V_SAMPLE_INPUT(int, b);\n"
                    "  int q = a / b, r = a % b, s = a >> 1; unsigned u = (unsigned)a >> 1;\n"
                    "  C2V_DRIVE_OUTPUT(int, q); C2V_DRIVE_OUTPUT(int, r);\n"
                    "  C2V_DRIVE_OUTPUT(int, s); C2V_DRIVE_OUTPUT(unsigned, u);\n"
                    "}\n";
  RunResult r = run_source(src, "f", {{"a", BitVec(32, uint32_t(-7))}, {"b", BitVec(32, 2)}});
  EXPECT_EQ(r.output("q")->to_u64(), uint32_t(-3));
  EXPECT_EQ(r.output("r")->to_u64(), uint32_t(-1));
  EXPECT_EQ(r.output("s")->to_u64(), uint32_t(-4));
  EXPECT_EQ(r.output("u")->to_u64(), 0x7FFFFFFCu);
}

TEST(Oracle, DivisionByZeroFollowsBitvectorSemantics)
{
  const char* src = "void f(void) {\n"
                    "  unsigned a, b; C2V_SAMPLE_INPUT(unsigned, a); C2V_SAMPLE_INPUT(unsigned, b);\n"
                    "  unsigned q = a / b, r = a % b;\n"
                    "  C2V_DRIVE_OUTPUT(unsigned, q); C2V_DRIVE_OUTPUT(unsigned, r);\n"
                    "}\n";
  OracleOptions o;
  o.checks.div = true;
  RunResult r = run_source(src, "f", {{"a", BitVec(32, 9)}, {"b", BitVec(32, 0)}}, o);
  EXPECT_EQ(r.output("q")->to_u64(), 0xFFFFFFFFu);
  EXPECT_EQ(r.output("r")->to_u64(), 9u);
  ASSERT_FALSE(r.checks.empty());
  EXPECT_FALSE(r.all_held());
  EXPECT_EQ(r.checks[0].kind, ObligationKind::DivByZero);
}

TEST(Oracle, FailedAssertIsRecordedNotFatal)
{
  const char* src = "void f(void) {\n"
                    "  int x; C2V_SAMPLE_INPUT(int, x); assert(x < 5);\n"
                    "  int y = x + 1; C2V_DRIVE_OUTPUT(int, y);\n"
                    "}\n";
  RunResult r = run_source(src, "f", {{"x", BitVec(32, 9)}});
  EXPECT_EQ(r.output("y")->to_u64(), 10u);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_FALSE(r.checks[0].held);
  EXPECT_EQ(r.checks[0].loc.line, 2u);
}

TEST(Oracle, FuelExhaustion)
{
  const char* src = "void f(void) { int i = 0; while (1) { i++; } C2V_DRIVE_OUTPUT(int, i); }\n";
  OracleOptions o;
  o.fuel = 1000;
  EXPECT_EQ(error_code([&] { run_source(src, "f", {}, o); }), "E_FUEL_EXHAUSTED");
}

TEST(Oracle, MissingInput)
{
  const char* src = "void f(void) { int x; C2V_SAMPLE_INPUT(int, x); C2V_DRIVE_OUTPUT(int, x); }\n";
  EXPECT_EQ(error_code([&] { run_source(src, "f", {}); }), "E_MISSING_INPUT");
}

TEST(Symex, SsaNamesAreSingleAssignment)
{
  for (const auto& stem : corpus()) {
    Pipeline p = build_corpus(stem, all_checks());
    std::set<std::string> seen;
    for (const auto& port : p.trace.iface.inputs)
      EXPECT_TRUE(seen.insert(port.name).second) << stem << " " << port.name;
    for (const auto& f : p.trace.free_vars)
      EXPECT_TRUE(seen.insert(f.name).second) << stem << " " << f.name;
    for (const auto& eq : p.trace.equations)
      EXPECT_TRUE(seen.insert(eq.lhs).second) << stem << " " << eq.lhs;
  }
}

TEST(Symex, InterfaceFromEntrySignature)
{
  Pipeline p = build_corpus("f32_add_wrapper");
  ASSERT_EQ(p.trace.iface.inputs.size(), 2u);
  EXPECT_EQ(p.trace.iface.inputs[0].name, "x");
  EXPECT_EQ(p.trace.iface.inputs[1].name, "y");
  ASSERT_EQ(p.trace.iface.outputs.size(), 1u);
  EXPECT_EQ(p.trace.iface.outputs[0].name, "res");
  EXPECT_EQ(p.trace.iface.outputs[0].width, 32u);
}

TEST(Symex, UnwindingObligationOnlyWhenRequested)
{
  SymexOptions o;
  o.unwind = 2;
  Pipeline plain = build_corpus("sum_loop", o);
  for (const auto& ob : plain.trace.obligations)
    EXPECT_NE(ob.kind, ObligationKind::Unwinding);
  o.unwinding_assertions = true;
  Pipeline checked = build_corpus("sum_loop", o);
  int n = 0;
  for (const auto& ob : checked.trace.obligations)
    n += ob.kind == ObligationKind::Unwinding;
  EXPECT_GE(n, 1);
}

TEST(Symex, UnwindsetOverridesDefault)
{
  SymexOptions o;
  o.unwind = 2;
  o.unwinding_assertions = true;
  Pipeline base = build_corpus("sum_loop", o);
  ASSERT_FALSE(base.prog->loop_labels.empty());
  o.unwindset[base.prog->loop_labels[0]] = 8;
  Pipeline wide = build_corpus("sum_loop", o);
  TraceEvaluator a(base.trace), b(wide.trace);
  a.run({});
  b.run({});
  bool base_fails = false, wide_fails = false;
  for (size_t k = 0; k < base.trace.obligations.size(); k++)
    base_fails = base_fails || a.violated(k);
  for (size_t k = 0; k < wide.trace.obligations.size(); k++)
    wide_fails = wide_fails || b.violated(k);
  EXPECT_TRUE(base_fails);
  EXPECT_FALSE(wide_fails);
}

TEST(Symex, SliceKeepsOutputsAndObligations)
{
  for (const auto& stem : corpus()) {
    TypedProgram prog = compile_file(corpus_path(stem));
    SsaTrace full = execute(prog, stem, all_checks());
    SsaTrace cut = slice(full);
    EXPECT_LE(cut.equations.size(), full.equations.size());
    EXPECT_EQ(cut.obligations.size(), full.obligations.size());
    std::mt19937_64 rng(9);
    TraceEvaluator a(full), b(cut);
    for (int i = 0; i < 50; i++) {
      bv::Env in = random_inputs(full.iface.inputs, rng);
      a.run(in);
      b.run(in);
      for (size_t k = 0; k < full.iface.outputs.size(); k++)
        ASSERT_EQ(a.output(k), b.output(k)) << stem;
      for (size_t k = 0; k < full.obligations.size(); k++)
        ASSERT_EQ(a.violated(k), b.violated(k)) << stem;
    }
  }
}

TEST(Frontend, Diagnostics)
{
  EXPECT_EQ(error_code([] { compile_source("int f( { }", "t.c"); }), "E_SYNTAX");
  EXPECT_EQ(error_code([] { compile_source("void f(void) { int y = z; }", "t.c"); }), "E_TYPE");
  EXPECT_EQ(error_code([] { compile_source("int f(int n) { return n ? f(n - 1) : 0; }", "t.c"); }),
            "E_RECURSION");
  EXPECT_EQ(error_code([] { compile_source("#include <nosuch.h>\n", "t.c"); }), "E_INCLUDE_NOT_FOUND");
  EXPECT_EQ(error_code([] {
              TypedProgram p = compile_source("void f(void) { int y = 1; C2V_DRIVE_OUTPUT(int, y); }", "t.c");
              execute(p, "g");
            }),
            "E_NO_ENTRY");
}

TEST(Frontend, DiagnosticLocation)
{
  try {
    compile_source("void f(void) {\n  int y = 1 +;\n}\n", "loc.c");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.loc().file, "loc.c");
    EXPECT_EQ(e.loc().line, 2u);
  }
}
