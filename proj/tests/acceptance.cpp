// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "c2v/diag.hpp"
#include "c2v/equiv.hpp"
#include "cnf_gen.hpp"
#include "pipeline.hpp"

using namespace c2v;
using namespace c2v::test;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string secs(double t)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", t);
  return buf;
}

fs::path work_dir()
{
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "c2v_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult
{
  int code = -1;
  std::string out;
};

CliResult cli(const std::string& args)
{
  fs::path o = work_dir() / "stdout";
  std::string cmd = "cd '" + work_dir().string() + "' && '" C2V_CLI "' " + args + " >'" + o.string()
                    + "' 2>&1";
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o)};
}

std::string quoted_corpus(const std::string& stem)
{
  return "'" + corpus_path(stem) + "'";
}

struct Criterion
{
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why)
  {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

// 1. Interface fidelity of the f32 adder.
Criterion interface_fidelity()
{
  Criterion c;
  auto t0 = Clock::now();
  CliResult r = cli("c2v " + quoted_corpus("f32_add_wrapper")
                    + " --entry f32_add_wrapper --unwind 64 -o f32_add.sv");
  double t = seconds_since(t0);
  c.require(r.code == 0, "c2v exited " + std::to_string(r.code) + ": " + r.out);
  std::istringstream in(slurp(work_dir() / "f32_add.sv"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l) && l != ");";)
    lines.push_back(l);
  std::vector<std::string> want = {"  input logic unsigned [31:0] x,", "  input logic unsigned [31:0] y,",
                                   "  output logic unsigned [31:0] res"};
  c.require(lines.size() == 4 && lines[0].rfind("module ", 0) == 0
                && std::vector<std::string>(lines.begin() + 1, lines.end()) == want,
            "port block differs");
  c.require(t < 10, "took " + secs(t));
  c.detail = c.pass ? "port lines byte-exact, " + secs(t) : c.detail;
  return c;
}

// Exact 1-4-3 minifloat addition with round to nearest even; any NaN is 0x7C.
unsigned mf8_add_reference(unsigned a, unsigned b)
{
  auto decode = [](unsigned u) {
    unsigned e = (u >> 3) & 15, f = u & 7;
    double mag = e == 0 ? std::ldexp(f, -9) : std::ldexp(8 + f, static_cast<int>(e) - 10);
    return (u & 0x80) ? -mag : mag;
  };
  auto is_nan = [](unsigned u) { return ((u >> 3) & 15) == 15 && (u & 7) != 0; };
  auto is_inf = [](unsigned u) { return ((u >> 3) & 15) == 15 && (u & 7) == 0; };
  if (is_nan(a) || is_nan(b))
    return 0x7C;
  if (is_inf(a) && is_inf(b))
    return (a & 0x80) == (b & 0x80) ? a : 0x7C;
  if (is_inf(a))
    return a;
  if (is_inf(b))
    return b;
  double sum = decode(a) + decode(b);
  if (sum == 0)
    return (a & 0x80) && (b & 0x80) ? 0x80 : 0x00;
  unsigned sign = sum < 0 ? 0x80 : 0;
  double m = std::fabs(sum);
  int quantum = m < std::ldexp(1, -6) ? -9 : std::ilogb(m) - 3;
  double v = std::ldexp(std::nearbyint(std::ldexp(m, -quantum)), quantum);
  if (v >= 256)
    return sign | 0x78;
  if (v < std::ldexp(1, -6))
    return sign | static_cast<unsigned>(std::ldexp(v, 9));
  int e = std::ilogb(v);
  unsigned frac = static_cast<unsigned>(std::ldexp(v, 3 - e)) - 8;
  return sign | static_cast<unsigned>(e + 7) << 3 | frac;
}

// 2. Two structurally different minifloat adders are equivalent.
Criterion minifloat_equivalence()
{
  Criterion c;
  auto t0 = Clock::now();
  for (const char* stem : {"mf8_add_norm", "mf8_add_shift"}) {
    CliResult r = cli("c2v " + quoted_corpus(stem) + " --entry " + stem + " -o " + stem + ".sv");
    c.require(r.code == 0, std::string(stem) + ": " + r.out);
  }
  CliResult r = cli("equiv mf8_add_norm.sv mf8_add_shift.sv");
  c.require(r.code == 0 && r.out == "HOLDS\n", "equiv said: " + r.out);
  v::VModule norm = v::parse_subset(slurp(work_dir() / "mf8_add_norm.sv"));
  v::VModule shift = v::parse_subset(slurp(work_dir() / "mf8_add_shift.sv"));
  v::ModuleEvaluator en(norm), es(shift);
  unsigned mismatches = 0, first = 0;
  for (unsigned a = 0; a < 256; a++)
    for (unsigned b = 0; b < 256; b++) {
      bv::Env env{{"a", BitVec(8, a)}, {"b", BitVec(8, b)}};
      en.run(env);
      es.run(env);
      uint64_t want = mf8_add_reference(a, b);
      if (en.output(0).to_u64() != want || es.output(0).to_u64() != want) {
        if (mismatches++ == 0)
          first = a << 8 | b;
      }
    }
  c.require(mismatches == 0, std::to_string(mismatches) + " of 65536 pairs disagree, first a=" + std::to_string(first >> 8)
                                 + " b=" + std::to_string(first & 255));
  double t = seconds_since(t0);
  c.require(t < 120, "took " + secs(t));
  c.detail = c.pass ? "HOLDS, 65536/65536 pairs match exact reference, " + secs(t) : c.detail;
  return c;
}

uint32_t host_op(bool mul, uint32_t a, uint32_t b)
{
  float fa, fb;
  std::memcpy(&fa, &a, 4);
  std::memcpy(&fb, &b, 4);
  volatile float x = fa, y = fb;
  float r = mul ? x * y : x + y;
  if (std::isnan(r))
    return 0x7FC00000;
  uint32_t u;
  std::memcpy(&u, &r, 4);
  return u;
}

// 3. Soft-float differential against the host FPU.
Criterion softfloat_differential()
{
  Criterion c;
  auto t0 = Clock::now();
  const std::vector<uint32_t> directed = {
    0x00000000, 0x80000000, 0x7F800000, 0xFF800000, 0x7FC00000, 0xFFC00000, 0x7FFFFFFF, 0x7F800001,
    0x7FA00000, 0xFF800001, 0x00000001, 0x80000001, 0x00000002, 0x007FFFFF, 0x807FFFFF, 0x00400000,
    0x00800000, 0x80800000, 0x00800001, 0x7F7FFFFF, 0xFF7FFFFF, 0x7F7FFFFE, 0x3F800000, 0xBF800000,
    0x3F800001, 0x3F7FFFFF, 0x33800000, 0x33800001, 0x337FFFFF, 0xB3800000, 0x34000000, 0x3F000000,
    0x40000000, 0x3FFFFFFF, 0x4B000000, 0x4B7FFFFF, 0x0C000000, 0x1F800000, 0x5F800000, 0x3E2AAAAB,
  };
  uint64_t total = 0, bad = 0;
  std::string first;
  for (bool mul : {false, true}) {
    std::string stem = mul ? "f32_mul_wrapper" : "f32_add_wrapper";
    TypedProgram prog = compile_file(corpus_path(stem));
    Interpreter in(prog, stem);
    auto one = [&](uint32_t a, uint32_t b) {
      RunResult r = in.run({{"x", BitVec(32, a)}, {"y", BitVec(32, b)}});
      uint32_t got = static_cast<uint32_t>(r.outputs.at(0).second.to_u64()), want = host_op(mul, a, b);
      total++;
      if (got != want && bad++ == 0) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s %08X %08X: got %08X want %08X", mul ? "mul" : "add", a, b, got, want);
        first = buf;
      }
    };
    for (uint32_t a : directed)
      for (uint32_t b : directed)
        one(a, b);
    std::mt19937_64 rng(mul ? 2 : 1);
    for (int i = 0; i < 1'000'000; i++) {
      uint32_t a = static_cast<uint32_t>(rng()), b = static_cast<uint32_t>(rng());
      // Every other pair has nearby exponents so alignment and rounding matter.
      if (i & 1)
        b = (b & 0x807FFFFF) | (((a >> 23 & 0xFF) + (b >> 23 & 7) - 3) & 0xFF) << 23;
      one(a, b);
    }
  }
  double t = seconds_since(t0);
  c.require(bad == 0, std::to_string(bad) + " mismatches, first " + first);
  c.require(t < 60, "took " + secs(t));
  c.detail = c.pass ? std::to_string(total) + " operations bit-exact, " + secs(t) : c.detail;
  return c;
}

// 4. Type punning through oracle, SSA evaluation and re-parsed Verilog.
Criterion punning()
{
  Criterion c;
  Pipeline p = build_corpus("punning_mask");
  bv::Env in{{"xin", BitVec(32, 0x40490FDB)}};
  uint64_t oracle = interpret(*p.prog, "punning_mask", in).outputs.at(0).second.to_u64();
  TraceEvaluator te(p.trace);
  te.run(in);
  v::ModuleEvaluator me(p.module);
  me.run(in);
  char buf[96];
  std::snprintf(buf, sizeof buf, "oracle %08lX, ssa %08lX, verilog %08lX", static_cast<unsigned long>(oracle),
                static_cast<unsigned long>(te.output(0).to_u64()), static_cast<unsigned long>(me.output(0).to_u64()));
  c.require(oracle == 0x00090FDB && te.output(0).to_u64() == 0x00090FDB && me.output(0).to_u64() == 0x00090FDB, buf);
  c.detail = buf;
  return c;
}

// 5. Function-pointer dispatch translates, verifies, and keeps one SVA per assert.
Criterion dispatch()
{
  Criterion c;
  CliResult t = cli("c2v " + quoted_corpus("fp_dispatch") + " --entry fp_dispatch -o fp_dispatch.sv");
  c.require(t.code == 0, "translation failed: " + t.out);
  CliResult r = cli("check " + quoted_corpus("fp_dispatch") + " --entry fp_dispatch");
  c.require(r.code == 0 && r.out.find(": FAILS") == std::string::npos && r.out.find(": UNKNOWN") == std::string::npos,
            "check exited " + std::to_string(r.code) + ": " + r.out);
  std::string src = slurp(corpus_path("fp_dispatch"));
  std::regex assert_stmt(R"((^|\n)\s*assert\s*\()");
  auto n_src = std::distance(std::sregex_iterator(src.begin(), src.end(), assert_stmt), std::sregex_iterator());
  std::string sv = slurp(work_dir() / "fp_dispatch.sv");
  size_t n_sva = 0;
  for (size_t pos = 0; (pos = sv.find("always_comb assert", pos)) != std::string::npos; pos++)
    n_sva++;
  c.require(n_src >= 1 && static_cast<size_t>(n_src) == n_sva,
            std::to_string(n_src) + " source asserts vs " + std::to_string(n_sva) + " SVA");
  c.detail = c.pass ? std::to_string(n_sva) + " asserts, all HOLDS" : c.detail;
  return c;
}

// 6. Emission lint over the corpus.
Criterion lint()
{
  Criterion c;
  size_t modules = 0;
  for (const auto& stem : corpus())
    for (bool checks : {false, true}) {
      SymexOptions o;
      if (checks)
        o.checks = parse_check_list("all");
      Pipeline p = build_corpus(stem, o);
      modules++;
      for (size_t i = 0; i < p.text.size(); i++) {
        if (p.text[i] != '[')
          continue;
        size_t j = i;
        while (j > 0 && p.text[j - 1] == ' ')
          j--;
        char prev = j > 0 ? p.text[j - 1] : '\n';
        c.require(std::isalnum(static_cast<unsigned char>(prev)) || prev == '_',
                  stem + ": part-select of a non-identifier at offset " + std::to_string(i));
      }
      std::map<std::string, int> assigned;
      for (const auto& a : p.module.assigns)
        assigned[a.lhs]++;
      for (const auto& w : p.module.wires)
        c.require(assigned[w.name] == 1, stem + ": wire " + w.name + " assigned " + std::to_string(assigned[w.name]) + " times");
      try {
        v::validate(p.module);
      } catch (const Error& e) {
        c.require(false, stem + ": " + e.format());
      }
      c.require(p.module == p.emitted, stem + ": parse_subset(render_text(m)) != m");
      c.require(v::render_text(p.module) == p.text, stem + ": render is not a fixpoint");
    }
  c.detail = c.pass ? std::to_string(modules) + " modules, zero violations" : c.detail;
  return c;
}

// 7. Three-way agreement on random vectors for every corpus program.
Criterion agreement()
{
  Criterion c;
  auto t0 = Clock::now();
  size_t vectors = 0;
  for (const auto& stem : corpus()) {
    SymexOptions o;
    o.checks = parse_check_list("all");
    Pipeline p = build_corpus(stem, o);
    Agreement agree(p);
    std::mt19937_64 rng(std::hash<std::string>{}(stem) ^ 0x5eed);
    for (int i = 0; i < 10'000 && c.pass; i++) {
      std::string why = agree.check(random_inputs(p.trace.iface.inputs, rng));
      vectors++;
      c.require(why.empty(), stem + " vector " + std::to_string(i) + ": " + why);
    }
  }
  c.detail = c.pass ? std::to_string(corpus().size()) + " programs x 10000 vectors, " + secs(seconds_since(t0))
                    : c.detail;
  return c;
}

// 8. SAT engine sanity.
Criterion sat_sanity()
{
  Criterion c;
  auto t0 = Clock::now();
  sat::Result php = sat::solve(pigeonhole(5, 4));
  double t_php = seconds_since(t0);
  c.require(php.status == sat::Status::Unsat, "PHP(5,4) not UNSAT");
  c.require(t_php < 10, "PHP(5,4) took " + secs(t_php));
  std::mt19937_64 rng(100);
  unsigned nsat = 0;
  for (int i = 0; i < 100; i++) {
    Cnf cnf = random_3sat(100, 426, rng);
    sat::Result r = sat::solve(cnf);
    c.require(r.status != sat::Status::Unknown, "n=100 instance " + std::to_string(i) + " UNKNOWN");
    if (r.status == sat::Status::Sat) {
      nsat++;
      c.require(satisfies(cnf, r.model), "n=100 instance " + std::to_string(i) + " model invalid");
    }
  }
  unsigned small = 0;
  for (int i = 0; i < 300; i++) {
    unsigned n = 5 + static_cast<unsigned>(rng() % 16);
    Cnf cnf = random_3sat(n, static_cast<unsigned>(n * 4.26), rng);
    sat::Result r = sat::solve(cnf);
    c.require(r.status != sat::Status::Unknown, "small instance UNKNOWN");
    c.require((r.status == sat::Status::Sat) == brute_force_sat(cnf), "small instance verdict differs from enumeration");
    if (r.status == sat::Status::Sat)
      c.require(satisfies(cnf, r.model), "small instance model invalid");
    small++;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "PHP(5,4) UNSAT in %.2f s; 100/100 n=100 resolved (%u SAT); %u n<=20 match enumeration", t_php,
                nsat, small);
  if (c.pass)
    c.detail = buf;
  return c;
}

// 9. Unwinding obligations for the sum loop.
Criterion unwinding()
{
  Criterion c;
  CliResult hi = cli("check " + quoted_corpus("sum_loop") + " --entry sum_loop --unwind 4 --unwinding-assertions");
  c.require(hi.code == 0 && hi.out.find("unwinding") != std::string::npos && hi.out.find(": HOLDS") != std::string::npos,
            "bound 4: exit " + std::to_string(hi.code) + ": " + hi.out);
  CliResult lo = cli("check " + quoted_corpus("sum_loop") + " --entry sum_loop --unwind 2 --unwinding-assertions");
  c.require(lo.code == 4 && lo.out.find(": FAILS (no inputs)") != std::string::npos,
            "bound 2: exit " + std::to_string(lo.code) + ": " + lo.out);
  c.detail = c.pass ? "HOLDS at 4, FAILS (no inputs) at 2" : c.detail;
  return c;
}

} // namespace

int main()
{
  const std::vector<std::pair<const char*, std::function<Criterion()>>> criteria = {
    {"interface fidelity", interface_fidelity},
    {"mini-float equivalence", minifloat_equivalence},
    {"soft-float differential", softfloat_differential},
    {"punning", punning},
    {"function-pointer dispatch", dispatch},
    {"emission lint", lint},
    {"three-way agreement", agreement},
    {"SAT engine sanity", sat_sanity},
    {"unwinding semantics", unwinding},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); i++) {
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failed += !c.pass;
    std::printf("%s criterion %zu (%s): %s\n", c.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
