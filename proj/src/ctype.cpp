#include "c2v/ctype.hpp"

#include <algorithm>

namespace c2v {

const Field* RecordDecl::find(const std::string& name) const
{
  for (const auto& f : fields)
    if (f.name == name)
      return &f;
  return nullptr;
}

namespace types {

static TypeRef make(Type t)
{
  return std::make_shared<const Type>(std::move(t));
}

TypeRef void_type()
{
  static const TypeRef t = make(Type{});
  return t;
}

TypeRef bool_type()
{
  static const TypeRef t = make(Type{TypeKind::Bool, 8});
  return t;
}

TypeRef int_type(unsigned bits, bool is_signed)
{
  static const TypeRef table[2][4] = {
    {make(Type{TypeKind::Int, 8, false}), make(Type{TypeKind::Int, 16, false}),
     make(Type{TypeKind::Int, 32, false}), make(Type{TypeKind::Int, 64, false})},
    {make(Type{TypeKind::Int, 8, true}), make(Type{TypeKind::Int, 16, true}),
     make(Type{TypeKind::Int, 32, true}), make(Type{TypeKind::Int, 64, true})},
  };
  unsigned idx = bits == 8 ? 0 : bits == 16 ? 1 : bits == 32 ? 2 : bits == 64 ? 3 : 4;
  if (idx == 4)
    internal_error("unsupported integer width");
  return table[is_signed ? 1 : 0][idx];
}

TypeRef int32() { return int_type(32, true); }
TypeRef uint32() { return int_type(32, false); }
TypeRef int64() { return int_type(64, true); }
TypeRef uint64() { return int_type(64, false); }

TypeRef float32()
{
  static const TypeRef t = make(Type{TypeKind::Float, 32});
  return t;
}

TypeRef float64()
{
  static const TypeRef t = make(Type{TypeKind::Float, 64});
  return t;
}

TypeRef pointer_to(TypeRef pointee)
{
  Type t{TypeKind::Pointer, 64};
  t.elem = std::move(pointee);
  return make(std::move(t));
}

TypeRef array_of(TypeRef elem, uint64_t length)
{
  Type t{TypeKind::Array};
  t.elem = std::move(elem);
  t.length = length;
  return make(std::move(t));
}

TypeRef function(TypeRef ret, std::vector<TypeRef> params)
{
  Type t{TypeKind::Function};
  t.elem = std::move(ret);
  t.params = std::move(params);
  return make(std::move(t));
}

TypeRef record(std::shared_ptr<RecordDecl> decl)
{
  Type t{TypeKind::Record};
  t.record = std::move(decl);
  return make(std::move(t));
}

} // namespace types

bool same_type(const TypeRef& a, const TypeRef& b)
{
  if (a == b)
    return true;
  if (a->kind != b->kind)
    return false;
  switch (a->kind) {
  case TypeKind::Void:
  case TypeKind::Bool:
    return true;
  case TypeKind::Int:
    return a->bits == b->bits && a->is_signed == b->is_signed;
  case TypeKind::Float:
    return a->bits == b->bits;
  case TypeKind::Pointer:
    return same_type(a->elem, b->elem);
  case TypeKind::Array:
    return a->length == b->length && same_type(a->elem, b->elem);
  case TypeKind::Record:
    return a->record == b->record;
  case TypeKind::Function:
    if (!same_type(a->elem, b->elem) || a->params.size() != b->params.size())
      return false;
    for (size_t i = 0; i < a->params.size(); i++)
      if (!same_type(a->params[i], b->params[i]))
        return false;
    return true;
  }
  return false;
}

std::string to_string(const TypeRef& t)
{
  switch (t->kind) {
  case TypeKind::Void: return "void";
  case TypeKind::Bool: return "_Bool";
  case TypeKind::Int: return (t->is_signed ? "int" : "uint") + std::to_string(t->bits) + "_t";
  case TypeKind::Float: return t->bits == 32 ? "float" : "double";
  case TypeKind::Pointer: return to_string(t->elem) + "*";
  case TypeKind::Array: return to_string(t->elem) + "[" + std::to_string(t->length) + "]";
  case TypeKind::Record:
    return std::string(t->record->is_union ? "union " : "struct ")
         + (t->record->tag.empty() ? "<anonymous>" : t->record->tag);
  case TypeKind::Function: {
    std::string s = to_string(t->elem) + "(";
    for (size_t i = 0; i < t->params.size(); i++)
      s += (i ? ", " : "") + to_string(t->params[i]);
    return s + ")";
  }
  }
  return "?";
}

static unsigned round_up(unsigned v, unsigned a)
{
  return (v + a - 1) / a * a;
}

void complete_record(RecordDecl& rec)
{
  unsigned offset = 0, size = 0, align = 1;
  for (auto& f : rec.fields) {
    Layout fl = layout_of(f.type);
    align = std::max(align, fl.align);
    if (rec.is_union) {
      f.offset = 0;
      size = std::max(size, fl.size);
    } else {
      offset = round_up(offset, fl.align);
      f.offset = offset;
      offset += fl.size;
      size = offset;
    }
  }
  rec.size = round_up(size, align);
  rec.align = align;
  rec.complete = true;
}

Layout layout_of(const TypeRef& t)
{
  switch (t->kind) {
  case TypeKind::Bool:
    return {1, 1, {}};
  case TypeKind::Int:
  case TypeKind::Float:
  case TypeKind::Pointer: {
    unsigned size = t->bits / 8;
    return {size, std::min(size, 8u), {}};
  }
  case TypeKind::Array: {
    Layout el = layout_of(t->elem);
    uint64_t total = el.size * t->length;
    if (total > (uint64_t{1} << 31))
      fail("E_INCOMPLETE", "array type " + to_string(t) + " is too large");
    return {static_cast<unsigned>(total), el.align, {}};
  }
  case TypeKind::Record: {
    const RecordDecl& rec = *t->record;
    if (!rec.complete)
      fail("E_INCOMPLETE", "incomplete type " + to_string(t), rec.loc);
    Layout l{rec.size, rec.align, {}};
    for (const auto& f : rec.fields)
      l.field_offsets.push_back(f.offset);
    return l;
  }
  case TypeKind::Void:
  case TypeKind::Function:
    break;
  }
  fail("E_INCOMPLETE", "type " + to_string(t) + " has no size");
}

unsigned size_of(const TypeRef& t)
{
  return layout_of(t).size;
}

unsigned align_of(const TypeRef& t)
{
  return layout_of(t).align;
}

TypeRef promote(const TypeRef& t)
{
  if (t->is_bool() || (t->kind == TypeKind::Int && t->bits < 32))
    return types::int32();
  return t;
}

TypeRef usual_arith_conversions(const TypeRef& a, const TypeRef& b)
{
  if (!a->is_integer() || !b->is_integer())
    fail("E_TYPE", "usual arithmetic conversions need integer operands, got " + to_string(a)
                       + " and " + to_string(b));
  TypeRef pa = promote(a), pb = promote(b);
  if (same_type(pa, pb))
    return pa;
  if (pa->is_signed == pb->is_signed)
    return pa->bits >= pb->bits ? pa : pb;
  const TypeRef& u = pa->is_signed ? pb : pa;
  const TypeRef& s = pa->is_signed ? pa : pb;
  if (u->bits >= s->bits)
    return u;
  return s;
}

} // namespace c2v
