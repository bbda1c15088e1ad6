#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace c2v::sat {

// DIMACS-style literals: +v / -v for variable v >= 1.
using Lit = int;

struct Cnf
{
  unsigned num_vars = 0;
  std::vector<std::vector<Lit>> clauses;

  unsigned new_var() { return ++num_vars; }
  void add(std::vector<Lit> clause) { clauses.push_back(std::move(clause)); }
};

std::string to_dimacs(const Cnf& cnf);
// Throws E_DIMACS.
Cnf parse_dimacs(const std::string& text);

enum class Status { Sat, Unsat, Unknown };
const char* status_name(Status s);

struct Stats
{
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
};

// CDCL: two watched literals, first-UIP learning, VSIDS, Luby restarts,
// phase saving. Incremental: clauses may be added between solve() calls,
// and solve() accepts assumptions.
class Solver
{
public:
  explicit Solver(uint64_t seed = 1);

  unsigned new_var();
  unsigned num_vars() const { return static_cast<unsigned>(assigns_.size()); }
  void add_clause(std::span<const Lit> lits);
  void add(const Cnf& cnf);

  // Unknown once `budget` conflicts are spent in this call.
  Status solve(std::span<const Lit> assumptions = {}, uint64_t budget = 1'000'000);
  // Model after Sat; variables are 1-based.
  bool value(unsigned var) const { return model_.at(var - 1); }
  bool lit_value(Lit l) const { return l > 0 ? value(l) : !value(-l); }
  const Stats& stats() const { return stats_; }

private:
  using ILit = uint32_t; // 2*var + negated
  struct Watch
  {
    uint32_t cref;
    ILit blocker;
  };
  struct Clause
  {
    std::vector<ILit> lits;
    bool learnt = false;
    bool removed = false;
    double activity = 0;
  };

  static ILit ilit(Lit l) { return l > 0 ? 2u * (l - 1) : 2u * (-l - 1) + 1; }
  static uint32_t var(ILit l) { return l >> 1; }
  int8_t lval(ILit l) const
  {
    int8_t a = assigns_[l >> 1];
    return (l & 1) ? -a : a;
  }

  void attach(uint32_t cref);
  void enqueue(ILit l, uint32_t reason);
  uint32_t propagate(); // conflicting clause or none
  void analyze(uint32_t confl, std::vector<ILit>& learnt, unsigned& bt_level);
  bool redundant(ILit l);
  void backtrack(unsigned level);
  ILit pick_branch();
  void bump_var(uint32_t v);
  void bump_clause(Clause& c);
  void reduce_db();
  unsigned level() const { return static_cast<unsigned>(trail_lim_.size()); }

  // VSIDS heap
  void heap_insert(uint32_t v);
  void heap_up(size_t i);
  void heap_down(size_t i);
  uint32_t heap_pop();
  bool heap_less(uint32_t a, uint32_t b) const { return activity_[a] > activity_[b]; }

  static constexpr uint32_t none = UINT32_MAX;

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<int8_t> assigns_; // 1 true, -1 false, 0 unassigned
  std::vector<unsigned> levels_;
  std::vector<uint32_t> reasons_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<int> heap_pos_;
  std::vector<uint32_t> heap_;
  std::vector<ILit> trail_;
  std::vector<size_t> trail_lim_;
  size_t qhead_ = 0;
  std::vector<uint8_t> seen_;
  std::vector<ILit> analyze_stack_;
  double var_inc_ = 1, cla_inc_ = 1;
  bool unsat_ = false;
  size_t num_learnts_ = 0;
  double max_learnts_ = 0;
  std::vector<bool> model_;
  std::vector<std::vector<Lit>> original_;
  uint64_t seed_;
  Stats stats_;
};

struct Result
{
  Status status = Status::Unknown;
  std::vector<bool> model; // index v-1 for variable v
  Stats stats;
};

Result solve(const Cnf& cnf, uint64_t budget = 1'000'000, uint64_t seed = 1);

} // namespace c2v::sat
