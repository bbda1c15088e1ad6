// c2v: translate C-lite to Verilog, run, check and compare.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "c2v/equiv.hpp"
#include "c2v/oracle.hpp"
#include "c2v/symex.hpp"
#include "c2v/vemit.hpp"

using namespace c2v;

namespace {

enum Exit { kOk = 0, kDiag = 1, kInternal = 2, kAssertFailed = 3, kFails = 4, kUnknown = 5 };

struct Config
{
  std::vector<std::string> paths;
  std::string entry = "main";
  unsigned unwind = 32;
  bool unwinding_assertions = false;
  std::string checks;
  std::string unwindset;
  std::string out;
  std::string map;
  std::vector<std::string> bindings;
  uint64_t seed = 1;
  uint64_t budget = 1'000'000;
  std::string dump_cnf;
  std::vector<std::string> includes;
  std::vector<std::string> defines;
};

std::string hex(const BitVec& v)
{
  std::string h = v.to_hex();
  for (char& c : h)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "0x" + h;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail("E_IO", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    fail("E_IO", "cannot write '" + path + "'");
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty())
      out.push_back(cur);
  return out;
}

TypedProgram compile(const Config& c)
{
  if (c.paths.size() != 1)
    fail("E_USAGE", "expected exactly one C source file");
  PreprocessOptions po;
  po.include_dirs = c.includes;
  po.defines = c.defines;
  return compile_file(c.paths[0], po);
}

SymexOptions symex_options(const Config& c)
{
  SymexOptions o;
  o.unwind = c.unwind;
  o.unwinding_assertions = c.unwinding_assertions;
  if (!c.checks.empty())
    o.checks = parse_check_list(c.checks);
  for (const auto& item : split(c.unwindset, ',')) {
    size_t colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0)
      fail("E_USAGE", "bad --unwindset entry '" + item + "' (expected LOOP:N)");
    unsigned long n;
    try {
      n = std::stoul(item.substr(colon + 1));
    } catch (const std::exception&) {
      fail("E_USAGE", "bad bound in --unwindset entry '" + item + "'");
    }
    if (n < 1)
      fail("E_USAGE", "unwind bound must be at least 1");
    o.unwindset[item.substr(0, colon)] = static_cast<unsigned>(n);
  }
  return o;
}

std::string map_path(const std::string& sv)
{
  if (sv.size() > 3 && sv.compare(sv.size() - 3, 3, ".sv") == 0)
    return sv.substr(0, sv.size() - 3) + ".map.json";
  return sv + ".map.json";
}

int cmd_c2v(const Config& c)
{
  TypedProgram prog = compile(c);
  SsaTrace t = slice(execute(prog, c.entry, symex_options(c)));
  auto [m, map] = v::emit_module(t, c.entry);
  std::string out = c.out.empty() ? c.entry + ".sv" : c.out;
  write_file(out, v::render_text(m));
  write_file(map_path(out), v::emit_backmap(map));
  std::printf("%s: inputs=%zu outputs=%zu equations=%zu obligations=%zu\n", out.c_str(),
              t.iface.inputs.size(), t.iface.outputs.size(), t.equations.size(), t.obligations.size());
  return kOk;
}

BitVec parse_value(const std::string& text, unsigned width, const std::string& name)
{
  std::string digits = text;
  bool is_hex = digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X');
  if (is_hex)
    digits = digits.substr(2);
  if (digits.empty()
      || digits.find_first_not_of(is_hex ? "0123456789abcdefABCDEF_" : "0123456789") != std::string::npos)
    fail("E_USAGE", "bad value '" + text + "' for '" + name + "'");
  BitVec v(width);
  if (is_hex) {
    std::string sig = digits.substr(std::min(digits.find_first_not_of("0_"), digits.size()));
    if (sig.size() * 4 > width + 3)
      fail("E_USAGE", "value '" + text + "' does not fit in " + std::to_string(width) + " bits");
    v = BitVec::from_hex(width, sig.empty() ? "0" : sig);
    BitVec wide = BitVec::from_hex(std::min(width + 4, max_width), sig.empty() ? "0" : sig);
    if (!(wide.extract(width - 1, 0).zext(wide.width()) == wide))
      fail("E_USAGE", "value '" + text + "' does not fit in " + std::to_string(width) + " bits");
  } else {
    BitVec ten(width, 10);
    for (char d : digits) {
      BitVec next = v.mul(ten).add(BitVec(width, static_cast<uint64_t>(d - '0')));
      if (!(next.sub(BitVec(width, static_cast<uint64_t>(d - '0'))).udiv(ten) == v))
        fail("E_USAGE", "value '" + text + "' does not fit in " + std::to_string(width) + " bits");
      v = next;
    }
  }
  return v;
}

int cmd_run(const Config& c)
{
  TypedProgram prog = compile(c);
  OracleOptions oo;
  if (!c.checks.empty())
    oo.checks = parse_check_list(c.checks);
  Interpreter interp(prog, c.entry, oo);
  bv::Env env;
  for (const auto& b : c.bindings) {
    size_t eq = b.find('=');
    if (eq == std::string::npos)
      fail("E_USAGE", "expected NAME=VALUE, got '" + b + "'");
    std::string name = b.substr(0, eq);
    const Port* port = nullptr;
    for (const auto& p : interp.inputs())
      if (p.name == name)
        port = &p;
    if (!port)
      fail("E_USAGE", "'" + name + "' is not an input of " + c.entry);
    env[name] = parse_value(b.substr(eq + 1), port->width, name);
  }
  RunResult r = interp.run(env);
  for (const auto& [name, value] : r.outputs)
    std::printf("%s=%s\n", name.c_str(), hex(value).c_str());
  bool failed = false;
  for (const auto& ck : r.checks) {
    if (ck.held)
      continue;
    failed = true;
    std::printf("%s:%u: %s failed: %s\n", ck.loc.file.c_str(), ck.loc.line, kind_name(ck.kind),
                ck.message.c_str());
  }
  return failed ? kAssertFailed : kOk;
}

int cmd_check(const Config& c)
{
  TypedProgram prog = compile(c);
  SymexOptions so = symex_options(c);
  SsaTrace t = slice(execute(prog, c.entry, so));
  OracleReplay replay{&prog, c.entry, so.checks};
  SolveOptions opts{c.budget, c.seed};
  std::vector<Verdict> vs = check_obligations(t, opts, &replay);
  size_t holds = 0, fails = 0, unknown = 0;
  for (size_t k = 0; k < vs.size(); k++) {
    const Obligation& o = t.obligations[k];
    const Verdict& v = vs[k];
    if (v.oracle == OracleAgreement::Refuted)
      internal_error("counterexample for obligation " + std::to_string(k)
                     + " is not reproduced by the interpreter");
    std::string what = o.message;
    if (what.ends_with(" failed"))
      what.resize(what.size() - 7);
    std::printf("[%zu] %s %s:%u: %s: %s", k, kind_name(o.kind), o.loc.file.c_str(), o.loc.line,
                what.c_str(), outcome_name(v.outcome));
    if (v.outcome == Outcome::Fails) {
      fails++;
      if (v.cex.empty())
        std::printf(" (no inputs)");
      for (const auto& [name, value] : v.cex)
        std::printf(" %s=%s", name.c_str(), hex(value).c_str());
    } else if (v.outcome == Outcome::Holds) {
      holds++;
    } else {
      unknown++;
    }
    if (!v.note.empty())
      std::printf(" (%s)", v.note.c_str());
    std::printf("\n");
  }
  std::printf("%zu obligations: %zu HOLDS, %zu FAILS, %zu UNKNOWN\n", vs.size(), holds, fails, unknown);
  if (fails)
    return kFails;
  return unknown ? kUnknown : kOk;
}

int cmd_equiv(const Config& c)
{
  if (c.paths.size() != 2)
    fail("E_USAGE", "expected two Verilog files");
  v::VModule a = v::parse_subset(read_file(c.paths[0]), c.paths[0]);
  v::VModule b = v::parse_subset(read_file(c.paths[1]), c.paths[1]);
  std::vector<PortPair> pairs;
  for (const auto& item : split(c.map, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      fail("E_USAGE", "bad --map entry '" + item + "' (expected A=B)");
    pairs.push_back({item.substr(0, eq), item.substr(eq + 1)});
  }
  sat::Cnf cnf;
  Verdict v = check_equiv(a, b, pairs, {c.budget, c.seed}, c.dump_cnf.empty() ? nullptr : &cnf);
  if (!c.dump_cnf.empty())
    write_file(c.dump_cnf, sat::to_dimacs(cnf));
  std::printf("%s", outcome_name(v.outcome));
  for (const auto& [name, value] : v.cex)
    std::printf(" %s=%s", name.c_str(), hex(value).c_str());
  if (!v.note.empty())
    std::printf(" (%s)", v.note.c_str());
  std::printf("\n");
  switch (v.outcome) {
  case Outcome::Holds: return kOk;
  case Outcome::Fails: return kFails;
  case Outcome::Unknown: return kUnknown;
  }
  return kInternal;
}

void add_translation_flags(CLI::App* sub, Config& c)
{
  sub->add_option("--entry", c.entry, "Entry function")->default_val("main");
  sub->add_option("--unwind", c.unwind, "Loop unwinding bound")->default_val(32)->check(CLI::PositiveNumber);
  sub->add_flag("--unwinding-assertions", c.unwinding_assertions, "Emit unwinding obligations");
  sub->add_option("--unwindset", c.unwindset, "Per-loop bounds, LOOP:N[,LOOP:N...]");
  sub->add_option("--check", c.checks, "Checks: div,shift,bounds,null or all");
  sub->add_option("-I", c.includes, "Include directory");
  sub->add_option("-D", c.defines, "Macro definition NAME or NAME=VALUE");
}

} // namespace

int main(int argc, char** argv)
{
  // `c2v FILE.c ...` is shorthand for `c2v c2v FILE.c ...`.
  std::vector<std::string> args(argv + 1, argv + argc);
  static const std::set<std::string> commands = {"c2v", "run", "check", "equiv", "-h", "--help"};
  if (!args.empty() && !commands.count(args[0]))
    args.insert(args.begin(), "c2v");

  CLI::App app{"C-lite to Verilog translator"};
  app.require_subcommand(1);
  Config c;
  auto* tr = app.add_subcommand("c2v", "Translate a C entry function to Verilog");
  tr->add_option("file", c.paths, "C source")->required();
  add_translation_flags(tr, c);
  tr->add_option("-o", c.out, "Output .sv path (map written next to it)");

  auto* run = app.add_subcommand("run", "Interpret an entry function on concrete inputs");
  std::vector<std::string> run_args;
  run->add_option("args", run_args, "C source followed by NAME=VALUE input bindings")->required();
  run->add_option("--entry", c.entry, "Entry function")->default_val("main");
  run->add_option("--check", c.checks, "Checks: div,shift,bounds,null or all");
  run->add_option("-I", c.includes, "Include directory");
  run->add_option("-D", c.defines, "Macro definition NAME or NAME=VALUE");

  auto* check = app.add_subcommand("check", "Prove or refute every obligation");
  check->add_option("file", c.paths, "C source")->required();
  add_translation_flags(check, c);
  check->add_option("--budget", c.budget, "Conflict budget per obligation")->default_val(1'000'000);
  check->add_option("--seed", c.seed, "Solver seed")->default_val(1);

  auto* eq = app.add_subcommand("equiv", "Combinational equivalence of two emitted modules");
  eq->add_option("files", c.paths, "a.sv b.sv")->required()->expected(2);
  eq->add_option("--map", c.map, "Port pairs A=B[,A=B...]; others pair by name");
  eq->add_option("--budget", c.budget, "Conflict budget")->default_val(1'000'000);
  eq->add_option("--seed", c.seed, "Solver seed")->default_val(1);
  eq->add_option("--dump-cnf", c.dump_cnf, "Write the miter CNF in DIMACS format");

  std::vector<const char*> cargv{argv[0]};
  for (const auto& a : args)
    cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E_USAGE: " << e.what() << "\n";
    return kDiag;
  }

  if (run->parsed()) {
    c.paths = {run_args[0]};
    c.bindings.assign(run_args.begin() + 1, run_args.end());
  }
  try {
    if (tr->parsed())
      return cmd_c2v(c);
    if (run->parsed())
      return cmd_run(c);
    if (check->parsed())
      return cmd_check(c);
    return cmd_equiv(c);
  } catch (const Error& e) {
    std::cerr << e.format() << "\n";
    return e.code() == "E_INTERNAL" ? kInternal : kDiag;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << "\n";
    return kInternal;
  }
}
