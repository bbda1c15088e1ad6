#include <gtest/gtest.h>

#include <json.hpp>
#include <set>

#include "c2v/diag.hpp"
#include "pipeline.hpp"

using namespace c2v;
using namespace c2v::test;
using bv::Op;

namespace {

std::string error_code(const std::string& text)
{
  try {
    v::validate(v::parse_subset(text, "t.sv"));
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

// Positions of '[' not preceded by an identifier or the `unsigned` keyword.
std::vector<size_t> lint(const std::string& text)
{
  std::vector<size_t> bad;
  for (size_t i = 0; i < text.size(); i++) {
    if (text[i] != '[')
      continue;
    size_t j = i;
    while (j > 0 && text[j - 1] == ' ')
      j--;
    char c = j > 0 ? text[j - 1] : '\n';
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      bad.push_back(i);
  }
  return bad;
}

// A random well-formed trace: a few inputs, a chain of equations over
// earlier values built with unsimplified operators, some outputs and asserts.
SsaTrace random_trace(std::mt19937_64& rng)
{
  SsaTrace t;
  t.ctx = std::make_shared<bv::Context>();
  bv::Context& ctx = *t.ctx;
  auto pick = [&](unsigned n) { return static_cast<unsigned>(rng() % n); };
  const unsigned widths[] = {1, 3, 8, 16, 32, 33};
  std::vector<bv::Expr> pool;
  unsigned ninputs = 1 + pick(3);
  for (unsigned i = 0; i < ninputs; i++) {
    unsigned w = widths[pick(6)];
    std::string name = "in" + std::to_string(i) + "_0";
    t.iface.inputs.push_back({name, w, {}});
    pool.push_back(ctx.var(name, w));
  }
  auto resize = [&](bv::Expr e, unsigned w) {
    if (e->width == w)
      return e;
    if (e->width > w)
      return ctx.make(Op::Extract, std::span<const bv::Expr>(&e, 1), w - 1, 0);
    return ctx.make(pick(2) ? Op::Zext : Op::Sext, std::span<const bv::Expr>(&e, 1), 0, 0, w);
  };
  auto operand = [&](unsigned w) {
    if (pick(5) == 0) {
      BitVec c(w);
      for (unsigned i = 0; i < c.num_words(); i++)
        c.set_word(i, rng());
      return ctx.constant(c);
    }
    return resize(pool[pick(static_cast<unsigned>(pool.size()))], w);
  };
  const Op binops[] = {Op::And, Op::Or,   Op::Xor,  Op::Add,  Op::Sub,  Op::Mul,  Op::Udiv,
                       Op::Urem, Op::Sdiv, Op::Srem, Op::Shl,  Op::Lshr, Op::Ashr, Op::Eq,
                       Op::Ult,  Op::Ule,  Op::Slt,  Op::Sle,  Op::Concat};
  unsigned neq = 2 + pick(8);
  for (unsigned k = 0; k < neq; k++) {
    unsigned w = widths[pick(6)];
    bv::Expr e;
    switch (pick(5)) {
    case 0: {
      bv::Expr a = operand(w);
      e = ctx.make(pick(2) ? Op::Not : Op::Neg, std::span<const bv::Expr>(&a, 1));
      break;
    }
    case 1: {
      bv::Expr args[] = {operand(1), operand(w), operand(w)};
      e = ctx.make(Op::Ite, args);
      break;
    }
    case 2: {
      bv::Expr args[] = {operand(w), operand(w)};
      bv::Expr inner = ctx.make(binops[pick(13)], args);
      unsigned lo = pick(w), hi = lo + pick(w - lo);
      e = ctx.make(Op::Extract, std::span<const bv::Expr>(&inner, 1), hi, lo);
      break;
    }
    default: {
      Op op = binops[pick(19)];
      unsigned wa = op == Op::Concat ? 1 + pick(16) : w;
      bv::Expr args[] = {operand(wa), operand(op == Op::Concat ? 1 + pick(16) : w)};
      e = ctx.make(op, args);
    }
    }
    std::string name = "t" + std::to_string(k) + "_1";
    t.equations.push_back({name, e, {}});
    pool.push_back(ctx.var(name, e->width));
  }
  unsigned nout = 1 + pick(2);
  for (unsigned k = 0; k < nout; k++) {
    bv::Expr e = pool[pool.size() - 1 - pick(std::min<unsigned>(3, static_cast<unsigned>(pool.size())))];
    std::string name = "out" + std::to_string(k);
    t.iface.outputs.push_back({name, e->width, {}});
    t.equations.push_back({name, e, {}});
  }
  unsigned nasserts = pick(3);
  for (unsigned k = 0; k < nasserts; k++) {
    Obligation o;
    o.kind = pick(2) ? ObligationKind::UserAssert : ObligationKind::Bounds;
    o.guard = operand(1);
    o.claim = operand(1);
    o.loc = {"r.c", k + 1, 1};
    o.message = "random \"claim\" 100%";
    t.obligations.push_back(o);
  }
  return t;
}

} // namespace

TEST(Vemit, CorpusRoundTripAndLint)
{
  SymexOptions o;
  o.checks = parse_check_list("all");
  for (const auto& stem : corpus()) {
    Pipeline p = build_corpus(stem, o);
    EXPECT_TRUE(p.module == p.emitted) << stem;
    EXPECT_EQ(v::render_text(p.module), p.text) << stem;
    EXPECT_TRUE(lint(p.text).empty()) << stem;
    EXPECT_EQ(p.text.find(")["), std::string::npos) << stem;
    EXPECT_NO_THROW(v::validate(p.module)) << stem;
    std::map<std::string, int> assigned;
    for (const auto& a : p.module.assigns)
      assigned[a.lhs]++;
    for (const auto& w : p.module.wires)
      EXPECT_EQ(assigned[w.name], 1) << stem << " " << w.name;
    for (const auto& port : p.module.ports)
      EXPECT_EQ(assigned[port.name], port.output ? 1 : 0) << stem << " " << port.name;
  }
}

TEST(Vemit, BackMapCoversEveryIdentifierOnce)
{
  for (const auto& stem : corpus()) {
    Pipeline p = build_corpus(stem);
    std::multiset<std::string> ids;
    for (const auto& e : p.backmap.entries)
      ids.insert(e.id);
    std::set<std::string> decl;
    for (const auto& port : p.emitted.ports)
      decl.insert(port.name);
    for (const auto& w : p.emitted.wires)
      decl.insert(w.name);
    EXPECT_EQ(ids.size(), decl.size()) << stem;
    for (const auto& n : decl)
      EXPECT_EQ(ids.count(n), 1u) << stem << " " << n;
    auto json = nlohmann::json::parse(v::emit_backmap(p.backmap));
    ASSERT_TRUE(json.is_array());
    ASSERT_EQ(json.size(), p.backmap.entries.size());
    for (const auto& e : json) {
      EXPECT_TRUE(e.contains("id") && e.contains("file") && e.contains("line") && e.contains("col")
                  && e.contains("expr"));
    }
  }
}

TEST(Vemit, PunningMaskBackMapPointsAtMaskLine)
{
  Pipeline p = build_corpus("punning_mask");
  bool found = false;
  for (const auto& e : p.backmap.entries)
    found = found || e.expr.find("*xp & 0x003fffff") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Vemit, EmptyBackMap)
{
  EXPECT_EQ(v::emit_backmap({}), "[]\n");
}

TEST(Vemit, F32AddHeader)
{
  Pipeline p = build_corpus("f32_add_wrapper");
  std::string head = p.text.substr(0, p.text.find(");\n") + 3);
  EXPECT_EQ(head, "module f32_add_wrapper(\n"
                  "  input logic unsigned [31:0] x,\n"
                  "  input logic unsigned [31:0] y,\n"
                  "  output logic unsigned [31:0] res\n"
                  ");\n");
}

TEST(Vemit, MinimalSkeletonAndWidthOne)
{
  SsaTrace t;
  t.ctx = std::make_shared<bv::Context>();
  t.iface.inputs.push_back({"a", 1, {}});
  t.iface.outputs.push_back({"b", 8, {}});
  v::VModule m = v::emit_module(t, "m").first;
  m.assigns.clear();
  std::string text = v::render_text(m);
  EXPECT_EQ(text, "module m(\n"
                  "  input logic a,\n"
                  "  output logic unsigned [7:0] b\n"
                  ");\n"
                  "endmodule\n");
  EXPECT_TRUE(v::parse_subset(text) == m);

  v::VModule w;
  w.name = "w";
  w.ports = {{false, "a", 1}};
  w.wires = {{"n", 1}, {"k", 4}};
  std::string wt = v::render_text(w);
  EXPECT_NE(wt.find("  logic n;\n"), std::string::npos);
  EXPECT_NE(wt.find("  logic unsigned [3:0] k;\n"), std::string::npos);
}

TEST(Vemit, AuxWireForExtractOfExpression)
{
  SsaTrace t;
  t.ctx = std::make_shared<bv::Context>();
  bv::Context& ctx = *t.ctx;
  t.iface.inputs = {{"a_0", 32, {}}, {"b_0", 32, {}}};
  t.iface.outputs = {{"t_1", 8, {}}};
  bv::Expr sum = ctx.make(Op::Add, std::array<bv::Expr, 2>{ctx.var("a_0", 32), ctx.var("b_0", 32)});
  t.equations.push_back({"t_1", ctx.make(Op::Extract, std::span<const bv::Expr>(&sum, 1), 7, 0), {}});
  std::string text = v::render_text(v::emit_module(t, "m").first);
  EXPECT_NE(text.find("  assign aux_0 = (a_0 + b_0);\n"), std::string::npos) << text;
  EXPECT_NE(text.find("  assign t_1 = aux_0[7:0];\n"), std::string::npos) << text;
}

TEST(Vemit, ReservedWordsAreEscaped)
{
  SsaTrace t;
  t.ctx = std::make_shared<bv::Context>();
  t.iface.inputs = {{"wire", 8, {}}, {"aux_3", 8, {}}};
  t.iface.outputs = {{"module", 8, {}}};
  t.equations.push_back({"module", t.ctx->var("wire", 8), {}});
  v::VModule m = v::emit_module(t, "m").first;
  EXPECT_EQ(m.ports[0].name, "c2v_wire");
  EXPECT_EQ(m.ports[1].name, "c2v_aux_3");
  EXPECT_EQ(m.ports[2].name, "c2v_module");
  EXPECT_TRUE(v::parse_subset(v::render_text(m)) == m);

  t.iface.inputs.push_back({"c2v_wire", 8, {}});
  EXPECT_EQ(v::emit_module(t, "m").first.ports[2].name, "c2v_c2v_wire");
  t.iface.inputs.push_back({"wire", 8, {}});
  try {
    v::emit_module(t, "m");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_NAME_COLLISION");
  }
}

TEST(Vemit, AssertMessageFormat)
{
  SsaTrace t;
  t.ctx = std::make_shared<bv::Context>();
  bv::Context& ctx = *t.ctx;
  t.iface.inputs = {{"x", 8, {}}};
  Obligation o;
  o.guard = ctx.bool_const(true);
  o.claim = ctx.mk_ult(ctx.var("x", 8), ctx.constant(8, 100));
  o.loc = {"file.c", 17, 3};
  o.message = "assertion x < 100 failed";
  t.obligations.push_back(o);
  std::string text = v::render_text(v::emit_module(t, "m").first);
  EXPECT_NE(text.find("always_comb assert ("), std::string::npos);
  EXPECT_NE(text.find("else $error(\"file.c:17: assertion x < 100 failed\");"), std::string::npos) << text;
}

TEST(Vparse, RejectsOutOfSubset)
{
  const std::string head = "module m(\n  input logic unsigned [3:0] a,\n  input logic unsigned [3:0] b,\n"
                           "  output logic unsigned [3:0] x\n);\n";
  EXPECT_EQ(error_code(head + "  assign x[3:0] = (a+b)[3:0];\nendmodule\n"), "E_VSYNTAX");
  EXPECT_EQ(error_code(head + "  assign x = (a + b)[3:0];\nendmodule\n"), "E_VSYNTAX");
  EXPECT_EQ(error_code(head + "  always_ff @(posedge clk) x <= a;\nendmodule\n"), "E_SUBSET");
  EXPECT_EQ(error_code(head + "  initial x = a;\nendmodule\n"), "E_SUBSET");
  EXPECT_EQ(error_code(head + "  assign x = a;\n  assign x = b;\nendmodule\n"), "E_SUBSET");
  EXPECT_EQ(error_code(head + "endmodule\n"), "E_SUBSET");
  EXPECT_EQ(error_code(head + "  assign x = (a + y);\nendmodule\n"), "E_SUBSET");
  EXPECT_EQ(error_code(head + "  assign x = (a +;\nendmodule\n"), "E_VSYNTAX");
  EXPECT_EQ(error_code(head + "  assign x = (a + b);\nendmodule\n"), "");
}

TEST(Vparse, SyntaxErrorCarriesPosition)
{
  try {
    v::parse_subset("module m(\n  input logic a\n);\n  assign = ;\nendmodule\n", "p.sv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "E_VSYNTAX");
    EXPECT_EQ(e.loc().file, "p.sv");
    EXPECT_EQ(e.loc().line, 4u);
    EXPECT_GT(e.loc().col, 0u);
  }
}

// parse_subset . render_text is the identity on random modules, and the
// re-parsed module evaluates like the trace it came from.
TEST(Vparse, RandomModulesRoundTripAndPreserveSemantics)
{
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 1000; it++) {
    SsaTrace t = random_trace(rng);
    auto [m, map] = v::emit_module(t, "r" + std::to_string(it));
    std::string text = v::render_text(m);
    v::VModule back = v::parse_subset(text);
    ASSERT_TRUE(back == m) << text;
    ASSERT_EQ(v::render_text(back), text);
    ASSERT_TRUE(lint(text).empty()) << text;
    ASSERT_NO_THROW(v::validate(back)) << text;
    TraceEvaluator te(t);
    v::ModuleEvaluator me(back);
    for (int i = 0; i < 20; i++) {
      bv::Env in = random_inputs(t.iface.inputs, rng);
      te.run(in);
      me.run(in);
      for (size_t k = 0; k < t.iface.outputs.size(); k++)
        ASSERT_EQ(te.output(k), me.output(k)) << text;
      for (size_t k = 0; k < t.obligations.size(); k++)
        ASSERT_EQ(te.violated(k), !me.assert_holds(k)) << text;
    }
  }
}

TEST(Vemit, RenderIsDeterministic)
{
  Pipeline a = build_corpus("control_mix"), b = build_corpus("control_mix");
  EXPECT_EQ(a.text, b.text);
}
