#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "c2v/bvir.hpp"
#include "c2v/sat.hpp"
#include "c2v/symex.hpp"
#include "c2v/vemit.hpp"

namespace c2v {

// Tseitin encoding of bitvector expressions into a Cnf. Variables whose
// names appear in `defs` are replaced by their definitions; all others are
// free inputs. Structurally identical gates are shared.
class Blaster
{
public:
  explicit Blaster(sat::Cnf& cnf, const std::unordered_map<std::string, bv::Expr>* defs = nullptr);

  const std::vector<sat::Lit>& bits(bv::Expr e); // LSB first
  sat::Lit lit(bv::Expr e);                      // width 1; throws E_WIDTH otherwise
  sat::Lit true_lit() const { return true_; }

  // Free input variables in first-use order.
  const std::vector<std::pair<std::string, std::vector<sat::Lit>>>& inputs() const { return inputs_; }
  BitVec input_value(const std::vector<sat::Lit>& bits, const std::vector<bool>& model) const;

private:
  using Bits = std::vector<sat::Lit>;
  sat::Lit fresh() { return static_cast<sat::Lit>(cnf_.new_var()); }
  sat::Lit and2(sat::Lit a, sat::Lit b);
  sat::Lit or2(sat::Lit a, sat::Lit b) { return -and2(-a, -b); }
  sat::Lit xor2(sat::Lit a, sat::Lit b);
  sat::Lit mux(sat::Lit s, sat::Lit t, sat::Lit f);
  Bits add(const Bits& a, const Bits& b, sat::Lit carry);
  Bits neg(const Bits& a);
  Bits mul(const Bits& a, const Bits& b);
  void udivrem(const Bits& a, const Bits& b, Bits& q, Bits& r);
  sat::Lit ult(const Bits& a, const Bits& b);
  sat::Lit eq(const Bits& a, const Bits& b);
  Bits shift(const Bits& a, const Bits& amount, int dir, sat::Lit fill);
  Bits blast_node(bv::Expr e);

  sat::Cnf& cnf_;
  const std::unordered_map<std::string, bv::Expr>* defs_;
  sat::Lit true_;
  std::unordered_map<uint32_t, Bits> memo_;
  std::map<std::pair<sat::Lit, sat::Lit>, sat::Lit> and_cache_, xor_cache_;
  std::map<std::tuple<sat::Lit, sat::Lit, sat::Lit>, sat::Lit> mux_cache_;
  std::vector<std::pair<std::string, Bits>> inputs_;
  std::unordered_map<std::string, size_t> input_index_;
};

// CNF whose models, restricted to `inputs`, are exactly the assignments
// making `e` (width 1) evaluate to 1. Throws E_WIDTH.
struct BlastResult
{
  sat::Cnf cnf;
  std::vector<std::pair<std::string, std::vector<sat::Lit>>> inputs;
};
BlastResult bitblast(bv::Expr e, const std::vector<Equation>& defs = {});

enum class Outcome { Holds, Fails, Unknown };
const char* outcome_name(Outcome o); // "HOLDS", "FAILS", "UNKNOWN"

enum class OracleAgreement { NotChecked, Confirmed, NotApplicable, Refuted };

struct Verdict
{
  Outcome outcome = Outcome::Unknown;
  std::vector<std::pair<std::string, BitVec>> cex; // FAILS only; inputs first, then free values
  OracleAgreement oracle = OracleAgreement::NotChecked;
  std::string note;
  uint64_t conflicts = 0;
};

struct SolveOptions
{
  uint64_t budget = 1'000'000;
  uint64_t seed = 1;
};

// Replays counterexamples on the concrete interpreter.
struct OracleReplay
{
  const TypedProgram* prog = nullptr;
  std::string entry;
  CheckSet checks;
};

// One verdict per obligation of `trace`. FAILS counterexamples are re-checked
// on the trace evaluator and, when `replay` is given, on the interpreter.
std::vector<Verdict> check_obligations(const SsaTrace& trace, const SolveOptions& opts = {},
                                       const OracleReplay* replay = nullptr);

struct PortPair
{
  std::string a, b;
};

// `map` pairs a-ports with b-ports; unlisted ports pair by name. Throws
// E_PORT_MISMATCH. When `dump` is given it receives the miter CNF.
Verdict check_equiv(const v::VModule& a, const v::VModule& b, const std::vector<PortPair>& map = {},
                    const SolveOptions& opts = {}, sat::Cnf* dump = nullptr);

} // namespace c2v
