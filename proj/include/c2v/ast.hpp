#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "c2v/ctype.hpp"
#include "c2v/diag.hpp"
#include "c2v/preprocess.hpp"

namespace c2v {

struct Expr;
struct Stmt;
struct DeclGroup;
struct VarDecl;
struct FuncDecl;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using GroupPtr = std::shared_ptr<DeclGroup>;

// ---- syntactic types ------------------------------------------------------

struct RecordSyntax;
struct EnumSyntax;

struct TypeSpec
{
  enum Base { None, Void, Bool, Char, Short, Int, Long, Float, Double, Named, Struct, Union, Enum };
  Base base = None;
  bool is_unsigned = false;
  bool is_signed = false; // explicit `signed`
  bool is_const = false;
  int long_count = 0;     // `long long` = 2
  std::string name;       // typedef name or tag
  std::shared_ptr<RecordSyntax> record; // struct/union body, if given here
  std::shared_ptr<EnumSyntax> enumeration;
  SourceLoc loc;
};

struct ParamSyntax;

struct DeclChunk
{
  enum Kind { Pointer, Array, Function };
  Kind kind = Pointer;
  bool is_const = false;            // `* const`
  std::shared_ptr<Expr> size;       // Array; null = unsized `[]`
  std::vector<ParamSyntax> params;  // Function
  bool void_params = false;         // `(void)`
};

// Derivations apply to the base type in order: chunks[0] is the one closest
// to the base. `int *a[3]` is {Pointer, Array(3)}.
struct Declarator
{
  std::string name; // empty for abstract declarators
  SourceLoc loc;
  std::vector<DeclChunk> chunks;
};

struct ParamSyntax
{
  TypeSpec spec;
  Declarator decl;
};

struct TypeName
{
  TypeSpec spec;
  Declarator decl;
  TypeRef resolved; // set by typecheck
};

struct FieldSyntax
{
  TypeSpec spec;
  std::vector<Declarator> decls;
};

struct RecordSyntax
{
  std::vector<FieldSyntax> fields;
  SourceLoc loc;
};

struct Enumerator
{
  std::string name;
  std::shared_ptr<Expr> value; // may be null
  SourceLoc loc;
};

struct EnumSyntax
{
  std::vector<Enumerator> items;
  SourceLoc loc;
};

// ---- expressions ----------------------------------------------------------

enum class ExprKind {
  IntLit, FloatLit, StrLit, Ident, Unary, Binary, Assign, IncDec, Cond, Cast, Call, Index, Member,
  SizeofType, SizeofExpr,
  Convert,     // inserted by typecheck
  CompoundLhs, // old value of the target inside a compound assignment template
};

enum class ConvKind {
  None, IntToInt, IntToBool, PtrToBool, PtrToInt, IntToPtr, PtrToPtr, ArrayDecay, FuncDecay,
  Bitcast,     // same-size reinterpretation (float storage <-> integer bits)
  LValueToRValue,
};

struct Expr
{
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  std::string op;         // Unary/Binary/Assign/IncDec spelling
  bool postfix = false;   // IncDec
  bool arrow = false;     // Member
  std::string name;       // Ident, Member field
  std::string text;       // literal spelling
  uint64_t ival = 0;      // IntLit value (or float bits after folding)
  double fval = 0;        // FloatLit
  std::vector<ExprPtr> kids;
  std::shared_ptr<TypeName> type_name; // Cast, SizeofType

  // typed annotations
  TypeRef type;
  bool lvalue = false;
  ConvKind conv = ConvKind::None;
  VarDecl* var = nullptr;
  FuncDecl* func = nullptr;
  const Field* field = nullptr;
  std::string message;    // assert companion string

  Expr() = default;
  Expr(ExprKind k, SourceLoc l) : kind(k), loc(std::move(l)) {}
};

// ---- statements -----------------------------------------------------------

enum class StmtKind {
  Expr, Decl, If, While, DoWhile, For, Switch, Case, Default, Break, Continue, Return, Block,
  Assert, Empty, Sample, Drive,
};

struct Stmt
{
  StmtKind kind = StmtKind::Empty;
  SourceLoc loc;
  ExprPtr expr;               // Expr, If/While/DoWhile/For/Switch condition, Case value,
                              // Return value, Assert condition, Drive source
  ExprPtr step;               // For
  StmtPtr init;               // For
  StmtPtr body;               // loops, If then, Switch, Case/Default labeled stmt
  StmtPtr else_body;          // If
  std::vector<StmtPtr> stmts; // Block
  GroupPtr group;             // Decl
  std::shared_ptr<TypeName> type_name; // Sample/Drive
  std::string name;           // Sample/Drive variable

  // typed annotations
  std::vector<VarDecl*> vars; // Decl: objects (re)initialized here; Sample/Drive: the variable
  std::string message;        // Assert
  unsigned site = 0;          // loop site id
  int64_t case_value = 0;     // Case

  Stmt() = default;
  Stmt(StmtKind k, SourceLoc l) : kind(k), loc(std::move(l)) {}
};

// ---- declarations ---------------------------------------------------------

struct Initializer
{
  bool is_list = false;
  ExprPtr expr;
  std::vector<Initializer> list;
  SourceLoc loc;
};

struct InitDeclarator
{
  Declarator decl;
  std::unique_ptr<Initializer> init;
};

struct DeclGroup
{
  enum Storage { Auto, Static, Extern, Typedef };
  Storage storage = Auto;
  bool is_inline = false;
  TypeSpec spec;
  std::vector<InitDeclarator> decls;
  StmtPtr body; // function definition (then decls.size() == 1)
  SourceLoc loc;
};

struct TranslationUnit
{
  std::vector<GroupPtr> groups;
};

// Recursive descent over the preprocessed stream. Throws E_SYNTAX or
// E_UNSUPPORTED_CONSTRUCT.
TranslationUnit parse(const std::vector<Token>& tokens);

// C source for the tree; parse(render(tu)) has the same structure.
std::string render(const TranslationUnit& tu);
std::string render(const Expr& e);

// Location-free structural dump, used to compare trees.
std::string dump_structure(const TranslationUnit& tu);

} // namespace c2v
