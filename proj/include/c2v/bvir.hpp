#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "c2v/bitvec.hpp"
#include "c2v/diag.hpp"

namespace c2v::bv {

enum class Op : uint8_t {
  Const, Var,
  Not, And, Or, Xor, Neg,
  Add, Sub, Mul, Udiv, Urem, Sdiv, Srem,
  Shl, Lshr, Ashr,
  Eq, Ult, Ule, Slt, Sle,
  Ite, Extract, Concat, Zext, Sext,
};

const char* op_name(Op op);
unsigned op_arity(Op op);
bool is_comparison(Op op);

struct Node
{
  uint32_t id;
  Op op;
  uint16_t width;
  uint8_t nargs = 0;
  uint16_t hi = 0; // Extract only
  uint16_t lo = 0;
  uint32_t loc = 0; // index into the owning context's location table, 0 = none
  std::array<const Node*, 3> args{};
  BitVec value;     // Const only
  std::string name; // Var only

  const Node* arg(unsigned i) const { return args[i]; }
  bool is_const() const { return op == Op::Const; }
  bool is_var() const { return op == Op::Var; }
};

using Expr = const Node*;

// Owns and hash-conses every node of one compilation. Nodes are immutable
// once created; the context is not thread-safe and is meant to be confined
// to a single pipeline run.
class Context
{
public:
  Context();
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  Expr constant(const BitVec& v);
  Expr constant(unsigned width, uint64_t v) { return constant(BitVec(width, v)); }
  Expr zero(unsigned width) { return constant(BitVec(width)); }
  Expr ones(unsigned width) { return constant(BitVec::ones(width)); }
  Expr bool_const(bool b) { return constant(BitVec(1, b ? 1 : 0)); }
  Expr var(const std::string& name, unsigned width);

  // Width-checked construction without rewriting.
  Expr make(Op op, std::span<const Expr> args, unsigned hi = 0, unsigned lo = 0,
            unsigned to = 0);

  // Rewriting constructors: the result is in simplified normal form
  // provided the arguments are.
  Expr mk(Op op, std::span<const Expr> args, unsigned hi = 0, unsigned lo = 0,
          unsigned to = 0);
  Expr mk_not(Expr a) { return mk1(Op::Not, a); }
  Expr mk_neg(Expr a) { return mk1(Op::Neg, a); }
  Expr mk_and(Expr a, Expr b) { return mk2(Op::And, a, b); }
  Expr mk_or(Expr a, Expr b) { return mk2(Op::Or, a, b); }
  Expr mk_xor(Expr a, Expr b) { return mk2(Op::Xor, a, b); }
  Expr mk_add(Expr a, Expr b) { return mk2(Op::Add, a, b); }
  Expr mk_sub(Expr a, Expr b) { return mk2(Op::Sub, a, b); }
  Expr mk_mul(Expr a, Expr b) { return mk2(Op::Mul, a, b); }
  Expr mk_udiv(Expr a, Expr b) { return mk2(Op::Udiv, a, b); }
  Expr mk_urem(Expr a, Expr b) { return mk2(Op::Urem, a, b); }
  Expr mk_sdiv(Expr a, Expr b) { return mk2(Op::Sdiv, a, b); }
  Expr mk_srem(Expr a, Expr b) { return mk2(Op::Srem, a, b); }
  Expr mk_shl(Expr a, Expr b) { return mk2(Op::Shl, a, b); }
  Expr mk_lshr(Expr a, Expr b) { return mk2(Op::Lshr, a, b); }
  Expr mk_ashr(Expr a, Expr b) { return mk2(Op::Ashr, a, b); }
  Expr mk_eq(Expr a, Expr b) { return mk2(Op::Eq, a, b); }
  Expr mk_ult(Expr a, Expr b) { return mk2(Op::Ult, a, b); }
  Expr mk_ule(Expr a, Expr b) { return mk2(Op::Ule, a, b); }
  Expr mk_slt(Expr a, Expr b) { return mk2(Op::Slt, a, b); }
  Expr mk_sle(Expr a, Expr b) { return mk2(Op::Sle, a, b); }
  Expr mk_ite(Expr c, Expr a, Expr b);
  Expr mk_extract(Expr a, unsigned hi, unsigned lo);
  Expr mk_concat(Expr hi, Expr lo) { return mk2(Op::Concat, hi, lo); }
  Expr mk_zext(Expr a, unsigned to);
  Expr mk_sext(Expr a, unsigned to);
  // zext or truncate to `to` bits.
  Expr mk_resize(Expr a, unsigned to);
  Expr mk_implies(Expr a, Expr b) { return mk_or(mk_not(a), b); }

  // Bottom-up rewrite of `e` to the normal form; memoized per context.
  Expr simplify(Expr e);

  // Attach a source location to a node if it does not carry one yet.
  void set_loc(Expr e, const SourceLoc& loc);
  std::optional<SourceLoc> loc_of(Expr e) const;

  size_t size() const { return nodes_.size(); }

private:
  struct Key
  {
    Op op;
    unsigned width;
    std::array<uint32_t, 3> args;
    unsigned hi, lo;
    const BitVec* value;
    const std::string* name;
  };
  struct KeyHash { size_t operator()(const Key& k) const; };
  struct KeyEq { bool operator()(const Key& a, const Key& b) const; };

  Expr mk1(Op op, Expr a) { Expr args[] = {a}; return mk(op, args); }
  Expr mk2(Op op, Expr a, Expr b) { Expr args[] = {a, b}; return mk(op, args); }
  Expr intern(Node&& n);
  Expr rewrite(Op op, std::span<const Expr> args, unsigned hi, unsigned lo, unsigned to);

  std::deque<Node> nodes_;
  std::unordered_map<Key, const Node*, KeyHash, KeyEq> table_;
  std::vector<Expr> simplified_;
  std::vector<SourceLoc> locs_;
};

// Semantics of one operator on concrete operands. Total: division by zero
// and overshift follow the fixed conventions (udiv -> all-ones, urem ->
// dividend, sdiv -> -1, srem -> dividend, overshift -> fill bits).
BitVec apply(Op op, std::span<const BitVec> args, unsigned hi, unsigned lo, unsigned width);

using Env = std::unordered_map<std::string, BitVec>;

// Throws E_UNBOUND_VAR / E_WIDTH_MISMATCH.
BitVec eval(Expr e, const Env& env);

// Evaluates a fixed set of roots repeatedly under different environments.
class Evaluator
{
public:
  explicit Evaluator(std::span<const Expr> roots);

  const std::vector<std::string>& vars() const { return var_names_; }
  const std::vector<unsigned>& var_widths() const { return var_widths_; }
  // `inputs` is aligned with vars().
  void run(std::span<const BitVec> inputs);
  void run(const Env& env);
  const BitVec& value(Expr e) const;

private:
  std::vector<Expr> order_;
  std::unordered_map<uint32_t, unsigned> slot_;
  std::vector<std::string> var_names_;
  std::vector<unsigned> var_widths_;
  std::vector<unsigned> var_slot_;
  std::vector<BitVec> values_;
};

// Collects nodes reachable from `roots` in topological order (operands
// before users).
std::vector<Expr> topo_order(std::span<const Expr> roots);

// Textual debug form: `n<k> = op(args) : width @file:line`, one node per
// line, numbered in first-visit topological order. A Dumper keeps its
// numbering across calls so several roots can share one listing.
class Dumper
{
public:
  explicit Dumper(const Context* ctx = nullptr) : ctx_{ctx} {}
  // Lines for every node reachable from `root` not printed yet.
  std::string emit(Expr root);
  std::string ref(Expr e) const;

private:
  const Context* ctx_;
  std::unordered_map<uint32_t, unsigned> number_;
};

std::string dump(std::span<const Expr> roots, const Context* ctx = nullptr);

} // namespace c2v::bv
