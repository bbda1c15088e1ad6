#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "c2v/bvir.hpp"
#include "c2v/typecheck.hpp"

namespace c2v {

enum class ObligationKind { UserAssert, Unwinding, DivByZero, Overshift, Bounds, NullDeref };

// "user-assert", "unwinding", "div-by-zero", ...
const char* kind_name(ObligationKind k);
// Short label used in check names: "assert", "unwind", "div", "shift", "bounds", "null".
const char* check_label(ObligationKind k);

struct Port
{
  std::string name;
  unsigned width = 0;
  SourceLoc loc;
};

struct Interface
{
  std::vector<Port> inputs;
  std::vector<Port> outputs;
};

struct Equation
{
  std::string lhs;
  bv::Expr rhs = nullptr;
  SourceLoc loc;
};

struct Obligation
{
  ObligationKind kind = ObligationKind::UserAssert;
  bv::Expr guard = nullptr; // width 1
  bv::Expr claim = nullptr; // width 1
  SourceLoc loc;
  std::string message;
};

// Equations are in definition order; the last |outputs| equations define the
// output names themselves.
struct SsaTrace
{
  std::shared_ptr<bv::Context> ctx;
  Interface iface;
  std::vector<Port> free_vars; // unconstrained values (uninitialized locals)
  std::vector<Equation> equations;
  std::vector<Obligation> obligations;
};

struct CheckSet
{
  bool div = false;
  bool shift = false;
  bool bounds = false;
  bool null = false;
};

// "div,shift,bounds,null" (any subset, or "all"). Throws E_USAGE.
CheckSet parse_check_list(const std::string& list);

struct SymexOptions
{
  unsigned unwind = 32;
  bool unwinding_assertions = false;
  CheckSet checks;
  std::map<std::string, unsigned> unwindset; // loop label ("func.k") -> bound
};

// Throws E_NO_ENTRY, E_INTERFACE, E_NO_CANDIDATES, E_WILD_POINTER, E_UNSUPPORTED.
SsaTrace execute(const TypedProgram& prog, const std::string& entry, const SymexOptions& opts = {});

// Drops equations outside the cone of influence of outputs and obligations.
SsaTrace slice(const SsaTrace& trace);

std::string dump_trace(const SsaTrace& trace);

// Evaluates a trace under many input vectors. Free variables are bound to 0
// unless given.
class TraceEvaluator
{
public:
  explicit TraceEvaluator(const SsaTrace& trace);

  void run(const bv::Env& inputs);
  const BitVec& output(size_t k) const;
  // guard holds and claim does not
  bool violated(size_t obligation) const;

private:
  const SsaTrace& trace_;
  std::vector<bv::Expr> outputs_;
  std::vector<std::pair<bv::Expr, bv::Expr>> obligations_;
  std::unique_ptr<bv::Evaluator> eval_;
  std::vector<BitVec> inputs_;
};

} // namespace c2v
