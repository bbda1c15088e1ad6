#include "c2v/equiv.hpp"

#include <set>

#include "c2v/oracle.hpp"

namespace c2v {

const char* outcome_name(Outcome o)
{
  switch (o) {
  case Outcome::Holds: return "HOLDS";
  case Outcome::Fails: return "FAILS";
  case Outcome::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

BitVec model_value(const Blaster& b, const std::string& name, unsigned width,
                   const std::vector<bool>& model)
{
  for (const auto& [n, bits] : b.inputs())
    if (n == name)
      return b.input_value(bits, model);
  return BitVec(width);
}

std::vector<bool> solver_model(const sat::Solver& s)
{
  std::vector<bool> m(s.num_vars());
  for (unsigned v = 1; v <= s.num_vars(); v++)
    m[v - 1] = s.value(v);
  return m;
}

} // namespace

std::vector<Verdict> check_obligations(const SsaTrace& trace, const SolveOptions& opts,
                                       const OracleReplay* replay)
{
  bv::Context& ctx = *trace.ctx;
  std::unordered_map<std::string, bv::Expr> defs;
  for (const auto& eq : trace.equations)
    defs[eq.lhs] = eq.rhs;

  sat::Cnf cnf;
  Blaster blaster(cnf, &defs);
  std::vector<sat::Lit> viol;
  for (const auto& o : trace.obligations)
    viol.push_back(blaster.lit(ctx.mk_and(o.guard, ctx.mk_not(o.claim))));

  std::set<std::string> free_names;
  for (const auto& p : trace.free_vars)
    free_names.insert(p.name);
  std::vector<sat::Lit> zero_free;
  for (const auto& [n, bits] : blaster.inputs())
    if (free_names.count(n))
      for (sat::Lit l : bits)
        zero_free.push_back(-l);

  sat::Solver solver(opts.seed);
  solver.add(cnf);
  TraceEvaluator replay_trace(trace);
  std::unique_ptr<Interpreter> interp;
  if (replay && replay->prog) {
    OracleOptions oo;
    oo.checks = replay->checks;
    interp = std::make_unique<Interpreter>(*replay->prog, replay->entry, oo);
  }

  std::vector<Verdict> out;
  for (size_t k = 0; k < trace.obligations.size(); k++) {
    const Obligation& o = trace.obligations[k];
    Verdict v;
    if (viol[k] == -blaster.true_lit()) {
      v.outcome = Outcome::Holds;
      out.push_back(std::move(v));
      continue;
    }
    uint64_t before = solver.stats().conflicts;
    std::vector<sat::Lit> assume = zero_free;
    assume.push_back(viol[k]);
    sat::Status st = solver.solve(assume, opts.budget);
    bool nondet = false;
    if (st == sat::Status::Unsat && !zero_free.empty()) {
      sat::Lit only = viol[k];
      st = solver.solve(std::span<const sat::Lit>(&only, 1), opts.budget);
      nondet = true;
    }
    v.conflicts = solver.stats().conflicts - before;
    if (st == sat::Status::Unsat) {
      v.outcome = Outcome::Holds;
    } else if (st == sat::Status::Unknown) {
      v.outcome = Outcome::Unknown;
      v.note = "conflict budget exhausted";
    } else {
      v.outcome = Outcome::Fails;
      std::vector<bool> model = solver_model(solver);
      bv::Env env;
      for (const auto& p : trace.iface.inputs) {
        BitVec x = model_value(blaster, p.name, p.width, model);
        env[p.name] = x;
        v.cex.emplace_back(p.name, x);
      }
      for (const auto& p : trace.free_vars) {
        BitVec x = model_value(blaster, p.name, p.width, model);
        env[p.name] = x;
        if (nondet)
          v.cex.emplace_back(p.name, x);
      }
      replay_trace.run(env);
      if (!replay_trace.violated(k))
        internal_error("counterexample for obligation " + std::to_string(k)
                       + " does not replay on the trace");
      if (nondet)
        v.note = "violation depends on uninitialized values";
      if (interp) {
        if (nondet || o.kind == ObligationKind::Unwinding) {
          v.oracle = OracleAgreement::NotApplicable;
        } else {
          bv::Env in;
          for (const auto& p : trace.iface.inputs)
            in[p.name] = env.at(p.name);
          try {
            RunResult r = interp->run(in);
            bool seen = false;
            for (const auto& c : r.checks)
              seen = seen || (!c.held && c.kind == o.kind && c.loc == o.loc);
            v.oracle = seen ? OracleAgreement::Confirmed : OracleAgreement::Refuted;
          } catch (const Error& e) {
            if (e.code() != "E_FUEL_EXHAUSTED")
              throw;
            v.oracle = OracleAgreement::NotApplicable;
          }
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

Verdict check_equiv(const v::VModule& a, const v::VModule& b, const std::vector<PortPair>& map,
                    const SolveOptions& opts, sat::Cnf* dump)
{
  v::validate(a);
  v::validate(b);
  std::map<std::string, const v::VPort*> pa, pb;
  for (const auto& p : a.ports)
    pa[p.name] = &p;
  for (const auto& p : b.ports)
    pb[p.name] = &p;

  std::map<std::string, std::string> a2b;
  std::set<std::string> b_used;
  for (const auto& pp : map) {
    if (!pa.count(pp.a))
      fail("E_PORT_MISMATCH", "'" + pp.a + "' is not a port of " + a.name);
    if (!pb.count(pp.b))
      fail("E_PORT_MISMATCH", "'" + pp.b + "' is not a port of " + b.name);
    if (!a2b.emplace(pp.a, pp.b).second || !b_used.insert(pp.b).second)
      fail("E_PORT_MISMATCH", "port mapped twice in '" + pp.a + "=" + pp.b + "'");
  }
  for (const auto& p : a.ports) {
    if (a2b.count(p.name))
      continue;
    if (!pb.count(p.name) || b_used.count(p.name))
      fail("E_PORT_MISMATCH", "port '" + p.name + "' of " + a.name + " has no counterpart in " + b.name);
    a2b[p.name] = p.name;
    b_used.insert(p.name);
  }
  for (const auto& p : b.ports)
    if (!b_used.count(p.name))
      fail("E_PORT_MISMATCH", "port '" + p.name + "' of " + b.name + " has no counterpart in " + a.name);

  std::unordered_map<std::string, std::string> b_inputs;
  std::vector<std::pair<size_t, size_t>> out_pairs;
  for (size_t i = 0; i < a.ports.size(); i++) {
    const v::VPort& p = a.ports[i];
    const v::VPort& q = *pb.at(a2b.at(p.name));
    if (p.output != q.output)
      fail("E_PORT_MISMATCH", "'" + p.name + "' and '" + q.name + "' differ in direction");
    if (p.width != q.width)
      fail("E_PORT_MISMATCH", "'" + p.name + "' and '" + q.name + "' differ in width ("
                                  + std::to_string(p.width) + " vs " + std::to_string(q.width) + ")");
    if (!p.output)
      b_inputs[q.name] = p.name;
  }

  bv::Context ctx;
  v::LoweredModule la = v::lower_module(a, ctx);
  v::LoweredModule lb = v::lower_module(b, ctx, b_inputs);
  std::map<std::string, size_t> b_out;
  for (size_t k = 0; k < lb.outputs.size(); k++)
    b_out[lb.outputs[k].name] = k;
  bv::Expr miter = ctx.bool_const(false);
  for (size_t k = 0; k < la.outputs.size(); k++) {
    size_t j = b_out.at(a2b.at(la.outputs[k].name));
    miter = ctx.mk_or(miter, ctx.mk_not(ctx.mk_eq(la.output_exprs[k], lb.output_exprs[j])));
  }

  sat::Cnf cnf;
  Blaster blaster(cnf);
  cnf.add({blaster.lit(miter)});
  if (dump)
    *dump = cnf;
  sat::Result r = sat::solve(cnf, opts.budget, opts.seed);
  Verdict v;
  v.conflicts = r.stats.conflicts;
  if (r.status == sat::Status::Unsat) {
    v.outcome = Outcome::Holds;
    return v;
  }
  if (r.status == sat::Status::Unknown) {
    v.outcome = Outcome::Unknown;
    v.note = "conflict budget exhausted";
    return v;
  }
  v.outcome = Outcome::Fails;
  bv::Env env_a, env_b;
  for (const auto& p : la.inputs) {
    BitVec x = model_value(blaster, p.name, p.width, r.model);
    env_a[p.name] = x;
    env_b[a2b.at(p.name)] = x;
    v.cex.emplace_back(p.name, x);
  }
  v::ModuleEvaluator ea(a), eb(b);
  ea.run(env_a);
  eb.run(env_b);
  bool differs = false;
  for (size_t k = 0; k < la.outputs.size(); k++) {
    size_t j = b_out.at(a2b.at(la.outputs[k].name));
    differs = differs || !(ea.output(k) == eb.output(j));
  }
  if (!differs)
    internal_error("equivalence counterexample does not replay");
  return v;
}

} // namespace c2v
