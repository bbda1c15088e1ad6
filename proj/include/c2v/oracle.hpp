#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "c2v/bvir.hpp"
#include "c2v/symex.hpp"
#include "c2v/typecheck.hpp"

namespace c2v {

struct CheckRecord
{
  ObligationKind kind = ObligationKind::UserAssert;
  SourceLoc loc;
  bool held = true;
  std::string message;
};

struct RunResult
{
  std::vector<std::pair<std::string, BitVec>> outputs; // interface order
  std::vector<CheckRecord> checks;                     // in execution order
  uint64_t steps = 0;

  const BitVec* output(const std::string& name) const;
  bool all_held() const;
};

struct OracleOptions
{
  CheckSet checks;
  uint64_t fuel = 10'000'000;
};

// Concrete interpreter for one entry function. Construct once, run many
// times; runs are independent.
class Interpreter
{
public:
  Interpreter(const TypedProgram& prog, const std::string& entry, OracleOptions opts = {});
  ~Interpreter();

  // Sampled inputs in source order.
  const std::vector<Port>& inputs() const;
  const std::vector<Port>& outputs() const;

  // Throws E_MISSING_INPUT, E_FUEL_EXHAUSTED, E_BAD_FUNCTION_POINTER.
  RunResult run(const bv::Env& inputs);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult interpret(const TypedProgram& prog, const std::string& entry, const bv::Env& inputs,
                    OracleOptions opts = {});

} // namespace c2v
