#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "c2v/diag.hpp"
#include "c2v/preprocess.hpp"
#include "c2v/typecheck.hpp"
#include "pipeline.hpp"

using namespace c2v;
using namespace c2v::test;

namespace {

std::string error_code(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::vector<std::string> lexemes(const std::string& src, PreprocessOptions opts = {})
{
  std::vector<std::string> out;
  for (const Token& t : preprocess(src, "t.c", opts))
    if (t.kind != TokKind::End)
      out.push_back(t.lexeme);
  return out;
}

std::vector<TypeRef> integer_types()
{
  std::vector<TypeRef> ts = {types::bool_type()};
  for (unsigned bits : {8u, 16u, 32u, 64u})
    for (bool s : {false, true})
      ts.push_back(types::int_type(bits, s));
  return ts;
}

} // namespace

TEST(Preprocess, ObjectMacro)
{
  EXPECT_EQ(lexemes("#define W 32\nint a[W];\n"),
            (std::vector<std::string>{"int", "a", "[", "32", "]", ";"}));
}

TEST(Preprocess, FunctionMacroAndConditionals)
{
  EXPECT_EQ(lexemes("#define SQ(x) ((x) * (x))\n#ifdef NOPE\nbad\n#else\nSQ(a + 1)\n#endif\n"),
            (std::vector<std::string>{"(", "(", "a", "+", "1", ")", "*", "(", "a", "+", "1", ")", ")"}));
  PreprocessOptions o;
  o.defines = {"NOPE"};
  EXPECT_EQ(lexemes("#ifdef NOPE\nyes\n#endif\n", o), (std::vector<std::string>{"yes"}));
  o.defines = {"V=7"};
  EXPECT_EQ(lexemes("V\n", o), (std::vector<std::string>{"7"}));
}

TEST(Preprocess, InterfaceMacrosSurvive)
{
  EXPECT_EQ(lexemes("C2V_SAMPLE_INPUT(uint32_t, x);\n"),
            (std::vector<std::string>{"C2V_SAMPLE_INPUT", "(", "uint32_t", ",", "x", ")", ";"}));
  EXPECT_EQ(error_code([] { preprocess("#define C2V_SAMPLE_INPUT(t, n) nope\n", "t.c", {}); }), "E_PP_SYNTAX");
}

TEST(Preprocess, MacroLocationIsInvocationSite)
{
  auto toks = preprocess("#define ONE 1\n\nint a = ONE;\n", "t.c", {});
  for (const Token& t : toks)
    if (t.lexeme == "1") {
      EXPECT_EQ(t.loc.line, 3u);
      EXPECT_TRUE(t.from_macro);
    }
}

TEST(Preprocess, Errors)
{
  try {
    preprocess("int a;\n#include \"missing.h\"\n", "inc.c", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_INCLUDE_NOT_FOUND");
    EXPECT_EQ(e.loc().line, 2u);
    EXPECT_NE(e.message().find("missing.h"), std::string::npos);
  }
  EXPECT_EQ(error_code([] { preprocess("#define A A B\nA\n", "t.c", {}); }), "E_MACRO_RECURSION");
  EXPECT_EQ(error_code([] { preprocess("#define A(x) B(x)\n#define B(x) A(x)\nA(1)\n", "t.c", {}); }), "E_MACRO_RECURSION");
  EXPECT_EQ(error_code([] { preprocess("#ifdef X\n", "t.c", {}); }), "E_PP_SYNTAX");
  EXPECT_EQ(error_code([] { preprocess("#endif\n", "t.c", {}); }), "E_PP_SYNTAX");
}

TEST(Parse, Unsupported)
{
  EXPECT_EQ(error_code([] { compile_source("void f(void) { goto L; }", "t.c"); }), "E_UNSUPPORTED_CONSTRUCT");
  EXPECT_EQ(error_code([] { compile_source("int f(int a, ...) { return a; }", "t.c"); }),
            "E_UNSUPPORTED_CONSTRUCT");
  EXPECT_EQ(error_code([] { compile_source("void f(void) { int x = 1 }", "t.c"); }), "E_SYNTAX");
}

TEST(Parse, RenderRoundTripOnCorpus)
{
  for (const auto& stem : corpus()) {
    TranslationUnit tu = parse(preprocess_file(corpus_path(stem), {}));
    std::string text = render(tu);
    TranslationUnit back = parse(preprocess(text, "rendered.c", {}));
    EXPECT_EQ(dump_structure(back), dump_structure(tu)) << stem;
    EXPECT_EQ(render(back), text) << stem;
  }
}

TEST(Parse, PunningSnippet)
{
  TranslationUnit tu =
    parse(preprocess("void f(void) { float x; int *xp = (int*)&x; *xp = *xp & 0x003fffff; }", "t.c", {}));
  std::string d = dump_structure(tu);
  EXPECT_NE(d.find("Cast"), std::string::npos) << d;
  EXPECT_NE(render(tu).find("((*xp) & 0x003fffff)"), std::string::npos) << render(tu);
}

TEST(Typecheck, PromotionOfNarrowOperands)
{
  TypedProgram p = compile_source("#include <stdint.h>\nvoid f(void) { uint8_t a = 1, b = 2; int c = a + b; }", "t.c");
  bool seen = false;
  for_each_expr(p, [&](const Expr& e) {
    if (e.loc.file == "t.c" && e.kind == ExprKind::Binary && e.op == "+") {
      seen = true;
      EXPECT_EQ(to_string(e.type), to_string(types::int32()));
      for (const auto& k : e.kids)
        EXPECT_EQ(to_string(k->type), to_string(types::int32()));
    }
  });
  EXPECT_TRUE(seen);
}

TEST(Typecheck, EveryCorpusExpressionIsTyped)
{
  for (const auto& stem : corpus()) {
    TypedProgram p = compile_file(corpus_path(stem));
    size_t n = 0;
    for_each_expr(p, [&](const Expr& e) {
      n++;
      EXPECT_TRUE(e.type != nullptr) << stem << ":" << e.loc.line << ":" << e.loc.col;
    });
    EXPECT_GT(n, 0u) << stem;
  }
}

TEST(Typecheck, Recursion)
{
  EXPECT_EQ(error_code([] { compile_source("int f(){return f();}", "t.c"); }), "E_RECURSION");
  EXPECT_EQ(error_code([] { compile_source("int g(void);\nint f(void){return g();}\nint g(void){return f();}", "t.c"); }),
            "E_RECURSION");
}

TEST(Typecheck, TypeErrors)
{
  EXPECT_EQ(error_code([] { compile_source("struct s { int a; };\nvoid f(void) { struct s x; int y = x + 1; }", "t.c"); }),
            "E_TYPE");
  EXPECT_EQ(error_code([] { compile_source("void g(int a);\nvoid f(void) { g(1, 2); }", "t.c"); }), "E_TYPE");
  EXPECT_EQ(error_code([] { compile_source("struct s;\nvoid f(void) { struct s x; }", "t.c"); }), "E_INCOMPLETE");
}

TEST(Types, UsualArithmeticConversionsExamples)
{
  auto u = [](unsigned b, bool s) { return types::int_type(b, s); };
  EXPECT_EQ(to_string(usual_arith_conversions(u(8, false), u(16, true))), to_string(types::int32()));
  EXPECT_EQ(to_string(usual_arith_conversions(u(32, false), u(32, true))), to_string(types::uint32()));
  EXPECT_EQ(to_string(usual_arith_conversions(u(64, true), u(32, false))), to_string(types::int64()));
  EXPECT_EQ(error_code([] { usual_arith_conversions(types::pointer_to(types::int32()), types::int32()); }), "E_TYPE");
}

TEST(Types, UsualArithmeticConversionsCommute)
{
  auto ts = integer_types();
  for (const auto& a : ts)
    for (const auto& b : ts) {
      TypeRef ab = usual_arith_conversions(a, b), ba = usual_arith_conversions(b, a);
      EXPECT_TRUE(same_type(ab, ba)) << to_string(a) << " " << to_string(b);
      EXPECT_GE(ab->bits, 32u);
      EXPECT_GE(ab->bits, std::max(a->bits, b->bits));
    }
}

TEST(Types, LayoutExamples)
{
  Layout l = layout_of(types::uint32());
  EXPECT_EQ(l.size, 4u);
  EXPECT_EQ(l.align, 4u);
  TypedProgram p = compile_source("#include <stdint.h>\nstruct s { uint8_t a; uint32_t b; };\n"
                                  "union u { uint16_t a; uint8_t b[3]; };\n"
                                  "struct s gs; union u gu;\n",
                                  "t.c");
  for (const VarDecl* g : p.globals) {
    Layout gl = layout_of(g->type);
    if (g->name == "gs") {
      EXPECT_EQ(gl.size, 8u);
      EXPECT_EQ(gl.align, 4u);
      EXPECT_EQ(gl.field_offsets, (std::vector<unsigned>{0, 4}));
    } else {
      EXPECT_EQ(gl.size, 4u);
      EXPECT_EQ(gl.align, 2u);
    }
  }
}

// Random record nests of depth <= 5: fields never overlap and fit in the
// record.
TEST(Types, RandomLayoutsAreConsistent)
{
  std::mt19937_64 rng(77);
  std::function<TypeRef(int)> gen = [&](int depth) -> TypeRef {
    unsigned pick = static_cast<unsigned>(rng() % (depth >= 5 ? 4 : 7));
    switch (pick) {
    case 0: return types::int_type(8, rng() & 1);
    case 1: return types::int_type(16, rng() & 1);
    case 2: return types::int_type(32, rng() & 1);
    case 3: return types::int_type(64, rng() & 1);
    case 4: return types::array_of(gen(depth + 1), 1 + rng() % 3);
    default: {
      auto rd = std::make_shared<RecordDecl>();
      rd->tag = "r" + std::to_string(rng() % 1000);
      rd->is_union = pick == 6 && (rng() & 1);
      unsigned n = 1 + static_cast<unsigned>(rng() % 4);
      for (unsigned i = 0; i < n; i++)
        rd->fields.push_back({"f" + std::to_string(i), gen(depth + 1), 0});
      complete_record(*rd);
      return types::record(rd);
    }
    }
  };
  for (int it = 0; it < 2000; it++) {
    TypeRef t = gen(0);
    if (!t->is_record())
      continue;
    Layout l = layout_of(t);
    const auto& fs = t->record->fields;
    ASSERT_EQ(l.field_offsets.size(), fs.size());
    EXPECT_EQ(l.size % l.align, 0u);
    for (size_t i = 0; i < fs.size(); i++) {
      unsigned sz = size_of(fs[i].type), al = align_of(fs[i].type);
      EXPECT_EQ(l.field_offsets[i] % al, 0u);
      EXPECT_LE(l.field_offsets[i] + sz, l.size);
      if (t->record->is_union)
        EXPECT_EQ(l.field_offsets[i], 0u);
      else if (i + 1 < fs.size())
        EXPECT_LE(l.field_offsets[i] + sz, l.field_offsets[i + 1]);
    }
  }
}

TEST(Typecheck, LocationsPointAtLexeme)
{
  for (const auto& stem : {"control_mix", "fp_dispatch", "punning_mask"}) {
    std::string path = corpus_path(stem);
    std::vector<std::string> lines;
    {
      std::istringstream in(read_file(path));
      for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    }
    TypedProgram p = compile_file(path);
    for_each_expr(p, [&](const Expr& e) {
      if (e.loc.file != path || e.kind != ExprKind::Ident)
        return;
      ASSERT_LE(e.loc.line, lines.size());
      EXPECT_EQ(lines[e.loc.line - 1].compare(e.loc.col - 1, e.name.size(), e.name), 0)
        << stem << ":" << e.loc.line << ":" << e.loc.col << " " << e.name;
    });
  }
}
