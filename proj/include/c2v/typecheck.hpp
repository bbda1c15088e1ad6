#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "c2v/ast.hpp"

namespace c2v {

struct InitItem
{
  unsigned offset = 0; // byte offset inside the object
  ExprPtr expr;        // typed rvalue of the subobject's type
};

struct VarDecl
{
  enum Storage { Global, Local, Param };
  std::string name;
  TypeRef type;
  SourceLoc loc;
  Storage storage = Local;
  unsigned code = 0;   // object code, 1-based, unique per declaration
  bool has_init = false;
  std::vector<InitItem> init; // zero-filled first when has_init
  FuncDecl* owner = nullptr;
};

struct FuncDecl
{
  std::string name;
  TypeRef type;
  SourceLoc loc;
  unsigned code = 0;   // 0x1000 + declaration index
  std::vector<VarDecl*> params;
  Stmt* body = nullptr;
  bool address_taken = false;
  bool in_prelude = false;
  bool uses_interface = false; // contains C2V_SAMPLE_INPUT / C2V_DRIVE_OUTPUT
};

inline constexpr unsigned func_code_base = 0x1000;

struct TypedProgram
{
  TranslationUnit ast;
  std::vector<std::unique_ptr<VarDecl>> vars;   // index = code - 1
  std::vector<std::unique_ptr<FuncDecl>> funcs; // index = code - func_code_base
  std::vector<VarDecl*> globals;                // in initialization order
  std::vector<std::string> entry_candidates;
  std::vector<std::shared_ptr<RecordDecl>> records;
  std::vector<std::string> loop_labels;         // per loop site: "<function>.<k>"

  FuncDecl* find_function(const std::string& name) const;
  const VarDecl* var_by_code(uint64_t code) const;
  const FuncDecl* func_by_code(uint64_t code) const;
};

// Annotates the tree in place (types, lvalue-ness, explicit conversions,
// resolved names) and lowers float arithmetic to prelude calls.
// Throws E_TYPE, E_RECURSION, E_UNSUPPORTED_CONSTRUCT, E_UNSUPPORTED_FLOAT,
// E_INCOMPLETE.
TypedProgram typecheck(TranslationUnit tu);

// preprocess (prelude + source) -> parse -> typecheck
TypedProgram compile_source(const std::string& source, const std::string& filename,
                            const PreprocessOptions& opts = {});
TypedProgram compile_file(const std::string& path, const PreprocessOptions& opts = {});

// Visits every expression reachable from the program, including
// initializers of globals and locals.
void for_each_expr(const TypedProgram& prog, const std::function<void(const Expr&)>& fn);

} // namespace c2v
