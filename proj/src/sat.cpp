#include "c2v/sat.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "c2v/diag.hpp"

namespace c2v::sat {

std::string to_dimacs(const Cnf& cnf)
{
  std::string out = "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& c : cnf.clauses) {
    for (Lit l : c)
      out += std::to_string(l) + " ";
    out += "0\n";
  }
  return out;
}

Cnf parse_dimacs(const std::string& text)
{
  Cnf cnf;
  std::istringstream in(text);
  std::string tok;
  bool header = false;
  size_t expected = 0;
  std::vector<Lit> cur;
  while (in >> tok) {
    if (tok == "c") {
      std::getline(in, tok);
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      long v = -1, c = -1;
      if (!(in >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0)
        fail("E_DIMACS", "malformed problem line");
      cnf.num_vars = static_cast<unsigned>(v);
      expected = static_cast<size_t>(c);
      header = true;
      continue;
    }
    if (!header)
      fail("E_DIMACS", "clause before problem line");
    long l;
    try {
      size_t used;
      l = std::stol(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail("E_DIMACS", "bad literal '" + tok + "'");
    }
    if (l == 0) {
      cnf.clauses.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (static_cast<unsigned long>(std::labs(l)) > cnf.num_vars)
      fail("E_DIMACS", "literal " + tok + " exceeds the declared variable count");
    cur.push_back(static_cast<Lit>(l));
  }
  if (!cur.empty())
    fail("E_DIMACS", "unterminated clause");
  if (cnf.clauses.size() != expected)
    fail("E_DIMACS", "clause count does not match the problem line");
  return cnf;
}

const char* status_name(Status s)
{
  switch (s) {
  case Status::Sat: return "SAT";
  case Status::Unsat: return "UNSAT";
  case Status::Unknown: return "UNKNOWN";
  }
  return "?";
}

Solver::Solver(uint64_t seed) : seed_{seed} {}

unsigned Solver::new_var()
{
  uint32_t v = static_cast<uint32_t>(assigns_.size());
  assigns_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(none);
  phase_.push_back(false);
  // Tiny seeded jitter so branching ties break reproducibly per seed.
  std::mt19937_64 rng(seed_ * 0x9e3779b97f4a7c15ull + v);
  activity_.push_back(static_cast<double>(rng() % 1000) * 1e-9);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v + 1;
}

void Solver::add(const Cnf& cnf)
{
  while (num_vars() < cnf.num_vars)
    new_var();
  for (const auto& c : cnf.clauses)
    add_clause(c);
}

void Solver::add_clause(std::span<const Lit> lits)
{
  for (Lit l : lits) {
    if (l == 0)
      internal_error("zero literal in clause");
    while (num_vars() < static_cast<unsigned>(std::abs(l)))
      new_var();
  }
  original_.emplace_back(lits.begin(), lits.end());
  if (unsat_)
    return;
  backtrack(0);
  std::vector<ILit> c;
  for (Lit l : lits)
    c.push_back(ilit(l));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<ILit> kept;
  for (size_t i = 0; i < c.size(); i++) {
    if (i + 1 < c.size() && var(c[i]) == var(c[i + 1]))
      return; // tautology
    int8_t v = lval(c[i]);
    if (v == 1)
      return; // satisfied at level 0
    if (v == 0)
      kept.push_back(c[i]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], none);
    if (propagate() != none)
      unsat_ = true;
    return;
  }
  clauses_.push_back({std::move(kept)});
  attach(static_cast<uint32_t>(clauses_.size() - 1));
}

void Solver::attach(uint32_t cref)
{
  const auto& c = clauses_[cref].lits;
  watches_[c[0] ^ 1].push_back({cref, c[1]});
  watches_[c[1] ^ 1].push_back({cref, c[0]});
}

void Solver::enqueue(ILit l, uint32_t reason)
{
  uint32_t v = var(l);
  assigns_[v] = (l & 1) ? -1 : 1;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

uint32_t Solver::propagate()
{
  while (qhead_ < trail_.size()) {
    ILit p = trail_[qhead_++];
    stats_.propagations++;
    auto& ws = watches_[p];
    size_t i = 0, j = 0;
    ILit false_lit = p ^ 1;
    while (i < ws.size()) {
      Watch w = ws[i];
      if (lval(w.blocker) == 1) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& cl = clauses_[w.cref];
      if (cl.removed) {
        i++;
        continue;
      }
      auto& c = cl.lits;
      if (c[0] == false_lit)
        std::swap(c[0], c[1]);
      i++;
      ILit first = c[0];
      if (first != w.blocker && lval(first) == 1) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); k++) {
        if (lval(c[k]) != -1) {
          std::swap(c[1], c[k]);
          watches_[c[1] ^ 1].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = {w.cref, first};
      if (lval(first) == -1) {
        while (i < ws.size())
          ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return w.cref;
      }
      enqueue(first, w.cref);
    }
    ws.resize(j);
  }
  return none;
}

bool Solver::redundant(ILit l)
{
  uint32_t r = reasons_[var(l)];
  if (r == none)
    return false;
  for (ILit q : clauses_[r].lits) {
    uint32_t v = var(q);
    if (v == var(l))
      continue;
    if (!seen_[v] && levels_[v] > 0)
      return false;
  }
  return true;
}

void Solver::analyze(uint32_t confl, std::vector<ILit>& learnt, unsigned& bt_level)
{
  learnt.assign(1, 0);
  int pending = 0;
  ILit p = 0;
  bool have_p = false;
  size_t idx = trail_.size();
  std::vector<uint32_t> touched;
  for (;;) {
    Clause& c = clauses_[confl];
    if (c.learnt)
      bump_clause(c);
    for (ILit q : c.lits) {
      if (have_p && q == p)
        continue;
      uint32_t v = var(q);
      if (seen_[v] || levels_[v] == 0)
        continue;
      seen_[v] = 1;
      touched.push_back(v);
      bump_var(v);
      if (levels_[v] >= level())
        pending++;
      else
        learnt.push_back(q);
    }
    do {
      idx--;
    } while (!seen_[var(trail_[idx])]);
    p = trail_[idx];
    have_p = true;
    confl = reasons_[var(p)];
    seen_[var(p)] = 0;
    pending--;
    if (pending == 0)
      break;
  }
  learnt[0] = p ^ 1;

  size_t j = 1;
  for (size_t i = 1; i < learnt.size(); i++)
    if (!redundant(learnt[i]))
      learnt[j++] = learnt[i];
  learnt.resize(j);
  for (uint32_t v : touched)
    seen_[v] = 0;

  bt_level = 0;
  if (learnt.size() > 1) {
    size_t best = 1;
    for (size_t i = 2; i < learnt.size(); i++)
      if (levels_[var(learnt[i])] > levels_[var(learnt[best])])
        best = i;
    std::swap(learnt[1], learnt[best]);
    bt_level = levels_[var(learnt[1])];
  }
}

void Solver::backtrack(unsigned lvl)
{
  if (level() <= lvl)
    return;
  for (size_t i = trail_.size(); i > trail_lim_[lvl]; i--) {
    uint32_t v = var(trail_[i - 1]);
    phase_[v] = assigns_[v] == 1;
    assigns_[v] = 0;
    reasons_[v] = none;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

void Solver::bump_var(uint32_t v)
{
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0)
    heap_up(static_cast<size_t>(heap_pos_[v]));
}

void Solver::bump_clause(Clause& c)
{
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (auto& k : clauses_)
      if (k.learnt)
        k.activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void Solver::reduce_db()
{
  std::vector<uint32_t> learnts;
  for (uint32_t i = 0; i < clauses_.size(); i++)
    if (clauses_[i].learnt && !clauses_[i].removed)
      learnts.push_back(i);
  std::sort(learnts.begin(), learnts.end(), [&](uint32_t a, uint32_t b) {
    return clauses_[a].activity < clauses_[b].activity;
  });
  size_t drop = learnts.size() / 2;
  for (size_t i = 0; i < drop; i++) {
    Clause& c = clauses_[learnts[i]];
    if (c.lits.size() <= 2)
      continue;
    uint32_t v = var(c.lits[0]);
    if (reasons_[v] == learnts[i] && lval(c.lits[0]) == 1)
      continue; // locked
    c.removed = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    num_learnts_--;
  }
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watch& w) { return clauses_[w.cref].removed; }),
             ws.end());
}

void Solver::heap_insert(uint32_t v)
{
  if (heap_pos_[v] >= 0)
    return;
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(size_t i)
{
  uint32_t v = heap_[i];
  while (i > 0) {
    size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(size_t i)
{
  uint32_t v = heap_[i];
  for (;;) {
    size_t child = 2 * i + 1;
    if (child >= heap_.size())
      break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child]))
      child++;
    if (!heap_less(heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

uint32_t Solver::heap_pop()
{
  uint32_t v = heap_[0];
  heap_pos_[v] = -1;
  uint32_t last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return v;
}

Solver::ILit Solver::pick_branch()
{
  while (!heap_.empty()) {
    uint32_t v = heap_pop();
    if (assigns_[v] == 0)
      return 2 * v + (phase_[v] ? 0 : 1);
  }
  return none;
}

namespace {

uint64_t luby(uint64_t i)
{
  // i >= 1
  uint64_t k = 1;
  while ((1ull << k) - 1 < i)
    k++;
  while (i != (1ull << k) - 1) {
    i -= (1ull << (k - 1)) - 1;
    k = 1;
    while ((1ull << k) - 1 < i)
      k++;
  }
  return 1ull << (k - 1);
}

} // namespace

Status Solver::solve(std::span<const Lit> assumptions, uint64_t budget)
{
  model_.clear();
  if (unsat_)
    return Status::Unsat;
  for (Lit a : assumptions)
    while (num_vars() < static_cast<unsigned>(std::abs(a)))
      new_var();
  backtrack(0);
  if (propagate() != none) {
    unsat_ = true;
    return Status::Unsat;
  }
  if (max_learnts_ == 0)
    max_learnts_ = std::max<double>(clauses_.size() / 3.0, 2000);

  uint64_t spent = 0;
  uint64_t restart_no = 1;
  uint64_t restart_limit = 100 * luby(restart_no);
  uint64_t since_restart = 0;
  std::vector<ILit> learnt;
  for (;;) {
    uint32_t confl = propagate();
    if (confl != none) {
      stats_.conflicts++;
      spent++;
      since_restart++;
      if (level() == 0) {
        unsat_ = true;
        return Status::Unsat;
      }
      unsigned bt;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], none);
      } else {
        clauses_.push_back({learnt, true});
        uint32_t cref = static_cast<uint32_t>(clauses_.size() - 1);
        attach(cref);
        bump_clause(clauses_[cref]);
        num_learnts_++;
        enqueue(learnt[0], cref);
      }
      var_inc_ /= 0.95;
      cla_inc_ /= 0.999;
      continue;
    }
    if (spent >= budget) {
      backtrack(0);
      return Status::Unknown;
    }
    if (since_restart >= restart_limit) {
      stats_.restarts++;
      backtrack(0);
      since_restart = 0;
      restart_limit = 100 * luby(++restart_no);
    }
    if (num_learnts_ >= max_learnts_ + trail_.size()) {
      reduce_db();
      max_learnts_ *= 1.1;
    }
    ILit next = none;
    while (level() < assumptions.size()) {
      ILit a = ilit(assumptions[level()]);
      int8_t v = lval(a);
      if (v == 1) {
        trail_lim_.push_back(trail_.size());
      } else if (v == -1) {
        backtrack(0);
        return Status::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == none) {
      next = pick_branch();
      if (next == none) {
        model_.resize(num_vars());
        for (size_t v = 0; v < num_vars(); v++)
          model_[v] = assigns_[v] == 1;
        for (const auto& c : original_) {
          bool sat = false;
          for (Lit l : c)
            sat = sat || lit_value(l);
          if (!sat)
            internal_error("SAT model violates an input clause");
        }
        for (Lit a : assumptions)
          if (!lit_value(a))
            internal_error("SAT model violates an assumption");
        backtrack(0);
        return Status::Sat;
      }
      stats_.decisions++;
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, none);
  }
}

Result solve(const Cnf& cnf, uint64_t budget, uint64_t seed)
{
  Solver s(seed);
  s.add(cnf);
  Result r;
  r.status = s.solve({}, budget);
  if (r.status == Status::Sat) {
    r.model.resize(cnf.num_vars);
    for (unsigned v = 1; v <= cnf.num_vars; v++)
      r.model[v - 1] = s.value(v);
  }
  r.stats = s.stats();
  return r;
}

} // namespace c2v::sat
