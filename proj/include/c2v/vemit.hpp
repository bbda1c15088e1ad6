#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "c2v/bvir.hpp"
#include "c2v/symex.hpp"

namespace c2v::v {

struct VExpr;
using VExprPtr = std::shared_ptr<const VExpr>;

struct VExpr
{
  enum Kind { Id, Const, Unary, Binary, Signed, Ternary, Select, Concat };
  Kind kind = Id;
  std::string name;  // Id, Signed
  BitVec value;      // Const
  std::string op;    // Unary, Binary
  std::vector<VExprPtr> args;
  unsigned hi = 0, lo = 0; // Select
};

bool operator==(const VExpr& a, const VExpr& b);

VExprPtr id(std::string name);
VExprPtr constant(const BitVec& v);
VExprPtr unary(std::string op, VExprPtr a);
VExprPtr binary(std::string op, VExprPtr a, VExprPtr b);
VExprPtr signed_id(std::string name);
VExprPtr ternary(VExprPtr c, VExprPtr a, VExprPtr b);
VExprPtr select(std::string name, unsigned hi, unsigned lo);
VExprPtr concat(std::vector<VExprPtr> parts);

struct VPort
{
  bool output = false;
  std::string name;
  unsigned width = 1;
  friend bool operator==(const VPort&, const VPort&) = default;
};

struct VWire
{
  std::string name;
  unsigned width = 1;
  friend bool operator==(const VWire&, const VWire&) = default;
};

struct VAssign
{
  std::string lhs;
  VExprPtr rhs;
};

// Rendered as `always_comb assert ((~guard) | claim) else $error("label: message");`
// with the label part omitted for user assertions.
struct VAssert
{
  VExprPtr guard; // identifier or constant, width 1
  VExprPtr claim; // identifier or constant, width 1
  std::string label;
  std::string message;
};

struct VModule
{
  std::string name;
  std::vector<VPort> ports;
  std::vector<VWire> wires;
  std::vector<VAssign> assigns;
  std::vector<VAssert> asserts;
};

bool operator==(const VAssign& a, const VAssign& b);
bool operator==(const VAssert& a, const VAssert& b);
bool operator==(const VModule& a, const VModule& b);

struct BackMapEntry
{
  std::string id;
  SourceLoc loc;
  std::string expr;
};

struct BackMap
{
  std::vector<BackMapEntry> entries;
};

// Throws E_NAME_COLLISION.
std::pair<VModule, BackMap> emit_module(const SsaTrace& trace, const std::string& module_name);

std::string render_text(const VModule& m);
std::string render_expr(const VExpr& e);
std::string emit_backmap(const BackMap& map);

// Throws E_VSYNTAX (with line/col) or E_SUBSET.
VModule parse_subset(const std::string& text, const std::string& filename = "<verilog>");

// Checks widths and single assignment; throws E_SUBSET.
void validate(const VModule& m);

// Bit-level meaning of a module: one expression per output port and per
// assertion (1 = assertion passes), over variables named after the input
// ports, optionally renamed through `input_names`.
struct LoweredModule
{
  std::vector<VPort> inputs;
  std::vector<VPort> outputs;
  std::vector<bv::Expr> output_exprs;
  std::vector<bv::Expr> assert_exprs;
};

LoweredModule lower_module(const VModule& m, bv::Context& ctx,
                           const std::unordered_map<std::string, std::string>& input_names = {});

// Repeated concrete evaluation of a module.
class ModuleEvaluator
{
public:
  explicit ModuleEvaluator(const VModule& m);
  const LoweredModule& lowered() const { return low_; }
  void run(const bv::Env& inputs); // missing inputs default to zero
  const BitVec& output(size_t k) const;
  bool assert_holds(size_t k) const;

private:
  bv::Context ctx_;
  LoweredModule low_;
  std::unique_ptr<bv::Evaluator> eval_;
  std::vector<BitVec> inputs_;
};

} // namespace c2v::v
