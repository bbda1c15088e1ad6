#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "c2v/diag.hpp"

namespace c2v {

enum class TypeKind { Void, Bool, Int, Float, Array, Pointer, Record, Function };

struct Type;
using TypeRef = std::shared_ptr<const Type>;

struct Field
{
  std::string name;
  TypeRef type;
  unsigned offset = 0;
};

// Struct or union. Records are nominal: two record types are the same type
// only if they share the RecordDecl.
struct RecordDecl
{
  std::string tag;
  bool is_union = false;
  bool complete = false;
  std::vector<Field> fields;
  unsigned size = 0;
  unsigned align = 1;
  SourceLoc loc;

  const Field* find(const std::string& name) const;
};

struct Type
{
  TypeKind kind = TypeKind::Void;
  unsigned bits = 0;     // Int, Float: 8/16/32/64 and 32/64
  bool is_signed = false;
  TypeRef elem;          // Array element, Pointer pointee, Function return
  uint64_t length = 0;   // Array
  std::shared_ptr<RecordDecl> record;
  std::vector<TypeRef> params;

  bool is_void() const { return kind == TypeKind::Void; }
  bool is_bool() const { return kind == TypeKind::Bool; }
  bool is_integer() const { return kind == TypeKind::Int || kind == TypeKind::Bool; }
  bool is_float() const { return kind == TypeKind::Float; }
  bool is_arithmetic() const { return is_integer() || is_float(); }
  bool is_pointer() const { return kind == TypeKind::Pointer; }
  bool is_scalar() const { return is_arithmetic() || is_pointer(); }
  bool is_array() const { return kind == TypeKind::Array; }
  bool is_record() const { return kind == TypeKind::Record; }
  bool is_function() const { return kind == TypeKind::Function; }
  bool is_function_pointer() const { return is_pointer() && elem->is_function(); }
};

namespace types {

TypeRef void_type();
TypeRef bool_type();
TypeRef int_type(unsigned bits, bool is_signed);
TypeRef int32();
TypeRef uint32();
TypeRef int64();
TypeRef uint64();
TypeRef float32();
TypeRef float64();
TypeRef pointer_to(TypeRef pointee);
TypeRef array_of(TypeRef elem, uint64_t length);
TypeRef function(TypeRef ret, std::vector<TypeRef> params);
TypeRef record(std::shared_ptr<RecordDecl> decl);

} // namespace types

bool same_type(const TypeRef& a, const TypeRef& b);
std::string to_string(const TypeRef& t);

struct Layout
{
  unsigned size = 0;
  unsigned align = 1;
  std::vector<unsigned> field_offsets;
};

// Byte layout under the fixed data model: natural alignment min(size, 8),
// fields in order padded to their alignment, records rounded to their
// largest member alignment. Throws E_INCOMPLETE.
Layout layout_of(const TypeRef& t);
unsigned size_of(const TypeRef& t);
unsigned align_of(const TypeRef& t);

// Fills field offsets, size and alignment of a record whose fields are set.
void complete_record(RecordDecl& rec);

// Integer promotion: anything narrower than int becomes int32.
TypeRef promote(const TypeRef& t);

// Common type of two integer operands. Throws E_TYPE for non-integers.
TypeRef usual_arith_conversions(const TypeRef& a, const TypeRef& b);

} // namespace c2v
