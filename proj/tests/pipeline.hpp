#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "c2v/oracle.hpp"
#include "c2v/preprocess.hpp"
#include "c2v/symex.hpp"
#include "c2v/typecheck.hpp"
#include "c2v/vemit.hpp"

namespace c2v::test {

inline std::string corpus_path(const std::string& stem)
{
  return std::string(C2V_CORPUS_DIR) + "/" + stem + ".c";
}

// Every corpus program; the entry function is named after the file.
inline const std::vector<std::string>& corpus()
{
  static const std::vector<std::string> names = {
    "array_index",     "assert_props",    "assert_range",  "control_mix",   "div_mod",
    "f32_add_wrapper", "f32_mul_wrapper", "fp_dispatch",   "mf8_add_flipped", "mf8_add_norm",
    "mf8_add_shift",   "punning_mask",    "sum_loop",      "wrap_u8",
  };
  return names;
}

struct Pipeline
{
  std::unique_ptr<TypedProgram> prog;
  std::string entry;
  SymexOptions opts;
  SsaTrace trace;
  v::VModule emitted;
  v::BackMap backmap;
  std::string text;
  v::VModule module;           // parse_subset(text)
  std::vector<size_t> group;   // obligation index -> assert index
  std::vector<size_t> rep;     // assert index -> first obligation
};

inline Pipeline build(const std::string& path, const std::string& entry, SymexOptions opts = {})
{
  Pipeline p;
  p.prog = std::make_unique<TypedProgram>(compile_file(path));
  p.entry = entry;
  p.opts = opts;
  p.trace = slice(execute(*p.prog, entry, opts));
  std::tie(p.emitted, p.backmap) = v::emit_module(p.trace, entry);
  p.text = v::render_text(p.emitted);
  p.module = v::parse_subset(p.text, entry + ".sv");
  std::map<std::tuple<std::string, unsigned, unsigned, std::string>, size_t> site;
  for (size_t k = 0; k < p.trace.obligations.size(); k++) {
    const Obligation& o = p.trace.obligations[k];
    if (o.kind == ObligationKind::UserAssert) {
      auto key = std::make_tuple(o.loc.file, o.loc.line, o.loc.col, o.message);
      auto [it, fresh] = site.emplace(key, p.rep.size());
      if (fresh)
        p.rep.push_back(k);
      p.group.push_back(it->second);
    } else {
      p.group.push_back(p.rep.size());
      p.rep.push_back(k);
    }
  }
  return p;
}

inline Pipeline build_corpus(const std::string& stem, SymexOptions opts = {})
{
  return build(corpus_path(stem), stem, opts);
}

inline bv::Env random_inputs(const std::vector<Port>& ports, std::mt19937_64& rng)
{
  bv::Env env;
  for (const auto& p : ports) {
    BitVec x(p.width);
    for (unsigned i = 0; i < x.num_words(); i++)
      x.set_word(i, rng());
    env[p.name] = x;
  }
  return env;
}

// Runs one input vector through the oracle, the SSA trace and the re-parsed
// module. Returns an empty string on agreement, else a description.
class Agreement
{
public:
  explicit Agreement(const Pipeline& p)
    : p_(p), interp_(*p.prog, p.entry, OracleOptions{p.opts.checks}), trace_(p.trace),
      mod_(p.module)
  {
  }

  std::string check(const bv::Env& in)
  {
    RunResult r = interp_.run(in);
    bv::Env env = in;
    for (const auto& f : p_.trace.free_vars)
      env[f.name] = BitVec(f.width);
    trace_.run(env);
    mod_.run(env);
    const auto& outs = p_.trace.iface.outputs;
    if (r.outputs.size() != outs.size())
      return "output count differs";
    for (size_t k = 0; k < outs.size(); k++) {
      const BitVec& o = r.outputs[k].second;
      const BitVec& t = trace_.output(k);
      const BitVec& m = mod_.output(k);
      if (!(o == t) || !(o == m))
        return outs[k].name + ": oracle " + o.to_hex() + " trace " + t.to_hex() + " verilog "
               + m.to_hex();
    }
    std::vector<bool> tv(p_.rep.size(), false);
    for (size_t k = 0; k < p_.trace.obligations.size(); k++)
      if (trace_.violated(k))
        tv[p_.group[k]] = true;
    for (size_t g = 0; g < p_.rep.size(); g++) {
      const Obligation& o = p_.trace.obligations[p_.rep[g]];
      bool mv = !mod_.assert_holds(g);
      if (mv != tv[g])
        return "assert " + std::to_string(g) + " (" + o.message + "): trace " + (tv[g] ? "fails" : "holds")
               + ", verilog " + (mv ? "fails" : "holds");
      if (o.kind == ObligationKind::Unwinding)
        continue;
      bool ov = false;
      for (const auto& c : r.checks)
        ov = ov || (!c.held && c.kind == o.kind && c.loc == o.loc);
      if (ov != tv[g])
        return "assert " + std::to_string(g) + " (" + o.message + "): oracle " + (ov ? "fails" : "holds")
               + ", trace " + (tv[g] ? "fails" : "holds");
    }
    return {};
  }

private:
  const Pipeline& p_;
  Interpreter interp_;
  TraceEvaluator trace_;
  v::ModuleEvaluator mod_;
};

} // namespace c2v::test
