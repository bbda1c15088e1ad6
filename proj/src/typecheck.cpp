#include "c2v/typecheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

namespace c2v {

FuncDecl* TypedProgram::find_function(const std::string& name) const
{
  for (const auto& f : funcs)
    if (f->name == name)
      return f.get();
  return nullptr;
}

const VarDecl* TypedProgram::var_by_code(uint64_t code) const
{
  if (code == 0 || code > vars.size())
    return nullptr;
  return vars[code - 1].get();
}

const FuncDecl* TypedProgram::func_by_code(uint64_t code) const
{
  if (code < func_code_base || code - func_code_base >= funcs.size())
    return nullptr;
  return funcs[code - func_code_base].get();
}

namespace {

uint64_t mask_of(unsigned bits)
{
  return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
}

unsigned value_bits(const TypeRef& t)
{
  return t->is_bool() ? 1 : t->bits;
}

int64_t as_signed(uint64_t v, unsigned bits)
{
  if (bits >= 64)
    return static_cast<int64_t>(v);
  uint64_t sign = uint64_t{1} << (bits - 1);
  return static_cast<int64_t>((v ^ sign) - sign);
}

uint32_t f32_bits(float f)
{
  uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

uint64_t f64_bits(double d)
{
  uint64_t u;
  std::memcpy(&u, &d, 8);
  return u;
}

std::string decode_string(const std::string& lexemes)
{
  // lexemes: one or more "..." pieces separated by single spaces
  std::string out;
  bool in = false;
  for (size_t i = 0; i < lexemes.size(); i++) {
    char c = lexemes[i];
    if (!in) {
      if (c == '"')
        in = true;
      continue;
    }
    if (c == '"') {
      in = false;
      continue;
    }
    if (c == '\\' && i + 1 < lexemes.size()) {
      char n = lexemes[++i];
      switch (n) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      default: out += n; break;
      }
      continue;
    }
    out += c;
  }
  return out;
}

struct Entity
{
  enum Kind { Var, Func, EnumConst, Typedef };
  Kind kind = Var;
  VarDecl* var = nullptr;
  FuncDecl* func = nullptr;
  int64_t value = 0;
  TypeRef type;
};

struct TagEntry
{
  std::shared_ptr<RecordDecl> record; // null for enums
};

class Checker
{
public:
  explicit Checker(TranslationUnit tu)
  {
    prog_.ast = std::move(tu);
    scopes_.emplace_back();
    tags_.emplace_back();
  }

  TypedProgram run()
  {
    for (auto& g : prog_.ast.groups)
      global_group(*g);
    for (auto& [name, ent] : scopes_.front())
      if (ent.kind == Entity::Func && !ent.func->body && ent.func->address_taken)
        fail("E_TYPE", "function '" + name + "' is used but never defined", ent.func->loc);
    check_recursion();
    for (const auto& f : prog_.funcs) {
      if (!f->body || f->in_prelude)
        continue;
      if (f->type->elem->is_void() && f->type->params.empty())
        prog_.entry_candidates.push_back(f->name);
    }
    return std::move(prog_);
  }

private:
  TypedProgram prog_;
  std::vector<std::map<std::string, Entity>> scopes_;
  std::vector<std::map<std::string, TagEntry>> tags_;
  FuncDecl* cur_fn_ = nullptr;
  int loop_depth_ = 0;
  struct SwitchCtx
  {
    TypeRef type;
    std::set<uint64_t> values;
    bool has_default = false;
  };
  std::vector<SwitchCtx*> switches_;
  int breakable_depth_ = 0;
  unsigned anon_ = 0;
  unsigned fn_loops_ = 0;

  struct CallEdge
  {
    FuncDecl* callee = nullptr; // null for indirect
    TypeRef fn_type;            // indirect
    SourceLoc loc;
  };
  std::map<FuncDecl*, std::vector<CallEdge>> calls_;

  // ---- scopes ----
  Entity* lookup(const std::string& name)
  {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end())
        return &f->second;
    }
    return nullptr;
  }

  TagEntry* lookup_tag(const std::string& tag)
  {
    for (auto it = tags_.rbegin(); it != tags_.rend(); ++it) {
      auto f = it->find(tag);
      if (f != it->end())
        return &f->second;
    }
    return nullptr;
  }

  void push() { scopes_.emplace_back(), tags_.emplace_back(); }
  void pop() { scopes_.pop_back(), tags_.pop_back(); }

  static bool in_prelude(const SourceLoc& loc) { return loc.file == prelude_filename; }

  // ---- types ----
  TypeRef resolve_spec(const TypeSpec& s)
  {
    if ((s.is_unsigned || s.is_signed)
        && !(s.base == TypeSpec::Char || s.base == TypeSpec::Short || s.base == TypeSpec::Int
             || s.base == TypeSpec::Long))
      fail("E_TYPE", "signedness specifier on a non-integer type", s.loc);
    switch (s.base) {
    case TypeSpec::None:
    case TypeSpec::Void: return types::void_type();
    case TypeSpec::Bool: return types::bool_type();
    case TypeSpec::Char: return types::int_type(8, !s.is_unsigned);
    case TypeSpec::Short: return types::int_type(16, !s.is_unsigned);
    case TypeSpec::Int: return types::int_type(32, !s.is_unsigned);
    case TypeSpec::Long: return types::int_type(64, !s.is_unsigned);
    case TypeSpec::Float: return types::float32();
    case TypeSpec::Double:
      if (s.long_count)
        fail("E_UNSUPPORTED_FLOAT", "long double is not supported", s.loc);
      return types::float64();
    case TypeSpec::Named: {
      Entity* e = lookup(s.name);
      if (!e || e->kind != Entity::Typedef)
        fail("E_TYPE", "unknown type name '" + s.name + "'", s.loc);
      return e->type;
    }
    case TypeSpec::Struct:
    case TypeSpec::Union: return record_type(s);
    case TypeSpec::Enum: return enum_type(s);
    }
    return types::void_type();
  }

  TypeRef record_type(const TypeSpec& s)
  {
    bool is_union = s.base == TypeSpec::Union;
    if (s.record) {
      std::shared_ptr<RecordDecl> rec;
      if (!s.name.empty()) {
        auto f = tags_.back().find(s.name);
        if (f != tags_.back().end()) {
          rec = f->second.record;
          if (!rec || rec->is_union != is_union)
            fail("E_TYPE", "'" + s.name + "' redeclared as a different kind of tag", s.loc);
          if (rec->complete)
            fail("E_TYPE", "redefinition of '" + s.name + "'", s.loc);
        }
      }
      if (!rec) {
        rec = std::make_shared<RecordDecl>();
        rec->tag = s.name.empty() ? "__anon_" + std::to_string(anon_++) : s.name;
        rec->is_union = is_union;
        tags_.back()[rec->tag] = TagEntry{rec};
      }
      rec->loc = s.record->loc;
      std::set<std::string> names;
      for (const auto& f : s.record->fields) {
        TypeRef base = resolve_spec(f.spec);
        for (const auto& d : f.decls) {
          TypeRef ft = apply_declarator(base, d, nullptr);
          if (ft->is_function() || ft->is_void())
            fail("E_TYPE", "field '" + d.name + "' has invalid type " + to_string(ft), d.loc);
          if (!names.insert(d.name).second)
            fail("E_TYPE", "duplicate member '" + d.name + "'", d.loc);
          layout_of(ft);
          rec->fields.push_back(Field{d.name, ft, 0});
        }
      }
      complete_record(*rec);
      prog_.records.push_back(rec);
      return types::record(rec);
    }
    TagEntry* te = lookup_tag(s.name);
    if (te) {
      if (!te->record || te->record->is_union != is_union)
        fail("E_TYPE", "'" + s.name + "' is not a " + (is_union ? "union" : "struct"), s.loc);
      return types::record(te->record);
    }
    auto rec = std::make_shared<RecordDecl>();
    rec->tag = s.name;
    rec->is_union = is_union;
    rec->loc = s.loc;
    tags_.back()[s.name] = TagEntry{rec};
    prog_.records.push_back(rec);
    return types::record(rec);
  }

  TypeRef enum_type(const TypeSpec& s)
  {
    if (s.enumeration) {
      if (!s.name.empty())
        tags_.back()[s.name] = TagEntry{};
      int64_t next = 0;
      for (const auto& item : s.enumeration->items) {
        if (item.value)
          next = const_int(item.value);
        if (next < INT32_MIN || next > INT32_MAX)
          fail("E_TYPE", "enumerator value out of int range", item.loc);
        declare(item.name, Entity{Entity::EnumConst, nullptr, nullptr, next, types::int32()},
                item.loc);
        next++;
      }
    } else if (!lookup_tag(s.name)) {
      fail("E_TYPE", "unknown enum '" + s.name + "'", s.loc);
    }
    return types::int32();
  }

  TypeRef apply_declarator(TypeRef t, const Declarator& d, bool* unsized)
  {
    if (unsized)
      *unsized = false;
    for (size_t i = 0; i < d.chunks.size(); i++) {
      const DeclChunk& c = d.chunks[i];
      switch (c.kind) {
      case DeclChunk::Pointer:
        t = types::pointer_to(t);
        break;
      case DeclChunk::Array: {
        if (t->is_function() || t->is_void())
          fail("E_TYPE", "array of " + to_string(t), d.loc);
        uint64_t len = 0;
        if (c.size) {
          int64_t v = const_int(c.size);
          if (v < 0)
            fail("E_TYPE", "negative array size", d.loc);
          len = static_cast<uint64_t>(v);
        } else if (unsized && i + 1 == d.chunks.size()) {
          *unsized = true;
        } else {
          fail("E_INCOMPLETE", "array size missing", d.loc);
        }
        layout_of(t);
        t = types::array_of(t, len);
        break;
      }
      case DeclChunk::Function: {
        if (t->is_function() || t->is_array())
          fail("E_TYPE", "function returning " + to_string(t), d.loc);
        std::vector<TypeRef> params;
        for (const auto& p : c.params) {
          bool open_array = false;
          TypeRef pt = apply_declarator(resolve_spec(p.spec), p.decl, &open_array);
          pt = adjust_param(pt);
          if (pt->is_void())
            fail("E_TYPE", "parameter of type void", p.decl.loc);
          params.push_back(pt);
        }
        t = types::function(t, std::move(params));
        break;
      }
      }
    }
    return t;
  }

  static TypeRef adjust_param(const TypeRef& t)
  {
    if (t->is_array())
      return types::pointer_to(t->elem);
    if (t->is_function())
      return types::pointer_to(t);
    return t;
  }

  TypeRef resolve_type_name(TypeName& tn)
  {
    if (!tn.resolved)
      tn.resolved = apply_declarator(resolve_spec(tn.spec), tn.decl, nullptr);
    return tn.resolved;
  }

  void declare(const std::string& name, Entity ent, const SourceLoc& loc)
  {
    auto& scope = scopes_.back();
    auto f = scope.find(name);
    if (f != scope.end()) {
      if (f->second.kind == Entity::Typedef && ent.kind == Entity::Typedef
          && same_type(f->second.type, ent.type))
        return;
      fail("E_TYPE", "redefinition of '" + name + "'", loc);
    }
    scope[name] = std::move(ent);
  }

  // ---- constant evaluation ----
  int64_t const_int(const std::shared_ptr<Expr>& sp)
  {
    if (!sp->type) {
      ExprPtr tmp = std::make_unique<Expr>(std::move(*sp));
      tmp = rvalue(check(std::move(tmp)));
      *sp = std::move(*tmp);
    }
    if (!sp->type->is_integer())
      fail("E_TYPE", "integer constant expression expected", sp->loc);
    return as_signed(const_value(*sp), value_bits(sp->type));
  }

  // Value of a typed integer constant expression, masked to its width.
  uint64_t const_value(const Expr& e)
  {
    if (!e.type->is_integer())
      fail("E_TYPE", "integer constant expression expected", e.loc);
    unsigned w = value_bits(e.type);
    uint64_t m = mask_of(w);
    switch (e.kind) {
    case ExprKind::IntLit:
      return e.ival & m;
    case ExprKind::Convert: {
      const Expr& k = *e.kids[0];
      if (e.conv == ConvKind::IntToInt) {
        uint64_t v = const_value(k);
        unsigned kw = value_bits(k.type);
        if (k.type->is_signed)
          v = static_cast<uint64_t>(as_signed(v, kw));
        return v & m;
      }
      if (e.conv == ConvKind::IntToBool)
        return const_value(k) != 0;
      break;
    }
    case ExprKind::Unary: {
      uint64_t v = const_value(*e.kids[0]);
      if (e.op == "-")
        return (0 - v) & m;
      if (e.op == "+")
        return v;
      if (e.op == "~")
        return ~v & m;
      if (e.op == "!")
        return v == 0;
      break;
    }
    case ExprKind::Binary: {
      const Expr& a = *e.kids[0];
      const Expr& b = *e.kids[1];
      if (e.op == "&&")
        return const_value(a) && const_value(b);
      if (e.op == "||")
        return const_value(a) || const_value(b);
      if (e.op == ",")
        break;
      uint64_t x = const_value(a), y = const_value(b);
      unsigned aw = value_bits(a.type);
      bool sgn = a.type->is_signed;
      int64_t sx = as_signed(x, aw), sy = as_signed(y, aw);
      const std::string& op = e.op;
      if (op == "+")
        return (x + y) & m;
      if (op == "-")
        return (x - y) & m;
      if (op == "*")
        return (x * y) & m;
      if (op == "/" || op == "%") {
        if (y == 0)
          fail("E_TYPE", "division by zero in constant expression", e.loc);
        if (sgn) {
          if (sy == -1)
            return op == "/" ? (0 - x) & m : 0;
          return static_cast<uint64_t>(op == "/" ? sx / sy : sx % sy) & m;
        }
        return (op == "/" ? x / y : x % y) & m;
      }
      if (op == "&")
        return x & y;
      if (op == "|")
        return x | y;
      if (op == "^")
        return x ^ y;
      if (op == "<<" || op == ">>") {
        uint64_t amt = const_value(b);
        if (amt >= w)
          return op == ">>" && sgn && sx < 0 ? m : 0;
        if (op == "<<")
          return (x << amt) & m;
        if (sgn)
          return static_cast<uint64_t>(sx >> amt) & m;
        return x >> amt;
      }
      if (op == "==")
        return x == y;
      if (op == "!=")
        return x != y;
      if (op == "<")
        return sgn ? sx < sy : x < y;
      if (op == "<=")
        return sgn ? sx <= sy : x <= y;
      if (op == ">")
        return sgn ? sx > sy : x > y;
      if (op == ">=")
        return sgn ? sx >= sy : x >= y;
      break;
    }
    case ExprKind::Cond:
      return const_value(*e.kids[0]) ? const_value(*e.kids[1]) : const_value(*e.kids[2]);
    default:
      break;
    }
    fail("E_TYPE", "expression is not an integer constant", e.loc);
  }

  // ---- node helpers ----
  static ExprPtr mk(ExprKind k, const SourceLoc& loc, TypeRef t)
  {
    auto e = std::make_unique<Expr>(k, loc);
    e->type = std::move(t);
    return e;
  }

  static ExprPtr int_lit(uint64_t v, TypeRef t, const SourceLoc& loc)
  {
    auto e = mk(ExprKind::IntLit, loc, t);
    e->ival = v & mask_of(value_bits(t));
    e->text = std::to_string(e->ival);
    return e;
  }

  static ExprPtr conv_node(ExprPtr e, ConvKind k, TypeRef to)
  {
    auto c = mk(ExprKind::Convert, e->loc, std::move(to));
    c->conv = k;
    c->kids.push_back(std::move(e));
    return c;
  }

  static ExprPtr float_lit_bits(uint64_t bits, TypeRef t, const SourceLoc& loc, std::string text)
  {
    auto e = mk(ExprKind::FloatLit, loc, t);
    e->ival = bits;
    e->text = std::move(text);
    return e;
  }

  ExprPtr call_prelude(const char* name, std::vector<ExprPtr> args, const SourceLoc& loc)
  {
    Entity* ent = lookup(name);
    if (!ent || ent->kind != Entity::Func)
      internal_error(std::string("soft-float prelude function missing: ") + name);
    FuncDecl* f = ent->func;
    auto callee = mk(ExprKind::Ident, loc, f->type);
    callee->name = name;
    callee->func = f;
    auto call = mk(ExprKind::Call, loc, f->type->elem);
    call->kids.push_back(std::move(callee));
    for (size_t i = 0; i < args.size(); i++)
      call->kids.push_back(convert(std::move(args[i]), f->type->params[i], true, "argument"));
    if (cur_fn_)
      calls_[cur_fn_].push_back(CallEdge{f, nullptr, loc});
    return call;
  }

  static ExprPtr bits_of(ExprPtr e)
  {
    TypeRef to = e->type->bits == 32 ? types::uint32() : types::uint64();
    if (e->kind == ExprKind::FloatLit)
      return int_lit(e->ival, to, e->loc);
    return conv_node(std::move(e), ConvKind::Bitcast, to);
  }

  static ExprPtr as_float(ExprPtr bits)
  {
    return conv_node(std::move(bits), ConvKind::Bitcast, types::float32());
  }

  [[noreturn]] static void unsupported_float(const Expr& e, const std::string& what)
  {
    fail("E_UNSUPPORTED_FLOAT", what, e.loc);
  }

  // ---- conversions ----
  ExprPtr rvalue(ExprPtr e)
  {
    if (!e->type)
      internal_error("untyped expression");
    if (e->type->is_array()) {
      if (!e->lvalue)
        fail("E_UNSUPPORTED_CONSTRUCT", "array rvalues are not supported", e->loc);
      TypeRef pt = types::pointer_to(e->type->elem);
      return conv_node(std::move(e), ConvKind::ArrayDecay, pt);
    }
    if (e->type->is_function()) {
      if (e->kind == ExprKind::Ident && e->func)
        e->func->address_taken = true;
      TypeRef pt = types::pointer_to(e->type);
      return conv_node(std::move(e), ConvKind::FuncDecay, pt);
    }
    if (e->lvalue)
      return conv_node(std::move(e), ConvKind::LValueToRValue, e->type);
    return e;
  }

  static bool is_null_constant(const Expr& e)
  {
    if (e.kind == ExprKind::IntLit)
      return e.ival == 0;
    if (e.kind == ExprKind::Convert && (e.conv == ConvKind::IntToInt || e.conv == ConvKind::IntToPtr
                                        || e.conv == ConvKind::PtrToPtr))
      return is_null_constant(*e.kids[0]);
    return false;
  }

  ExprPtr convert(ExprPtr e, const TypeRef& to, bool explicit_cast, const char* what)
  {
    e = rvalue(std::move(e));
    const TypeRef from = e->type;
    if (same_type(from, to))
      return e;
    auto mismatch = [&]() -> ExprPtr {
      fail("E_TYPE", std::string("cannot convert ") + to_string(from) + " to " + to_string(to)
                         + " in " + what + " (expected " + to_string(to) + ", got "
                         + to_string(from) + ")",
           e->loc);
    };
    if (to->is_void())
      return mismatch();
    if (to->is_bool()) {
      if (from->is_integer())
        return conv_node(std::move(e), ConvKind::IntToBool, to);
      if (from->is_pointer())
        return conv_node(std::move(e), ConvKind::PtrToBool, to);
      if (from->is_float()) {
        if (e->kind == ExprKind::FloatLit)
          return int_lit(((e->ival << 1) != 0) ? 1 : 0, to, e->loc);
        if (from->bits != 32)
          unsupported_float(*e, "binary64 values cannot be tested");
        SourceLoc loc = e->loc;
        std::vector<ExprPtr> args;
        args.push_back(bits_of(std::move(e)));
        args.push_back(int_lit(0, types::uint32(), loc));
        ExprPtr eq = call_prelude("__c2v_f32_eq", std::move(args), loc);
        auto notz = mk(ExprKind::Binary, loc, types::int32());
        notz->op = "==";
        notz->kids.push_back(std::move(eq));
        notz->kids.push_back(int_lit(0, types::int32(), loc));
        return conv_node(std::move(notz), ConvKind::IntToBool, to);
      }
      return mismatch();
    }
    if (to->kind == TypeKind::Int) {
      if (from->is_integer())
        return conv_node(std::move(e), ConvKind::IntToInt, to);
      if (from->is_pointer()) {
        if (!explicit_cast)
          return mismatch();
        return conv_node(std::move(e), ConvKind::PtrToInt, to);
      }
      if (from->is_float())
        return float_to_int(std::move(e), to);
      return mismatch();
    }
    if (to->is_float()) {
      if (from->is_integer())
        return int_to_float(std::move(e), to);
      if (from->is_float()) {
        if (e->kind == ExprKind::FloatLit) {
          double v = literal_double(*e);
          if (to->bits == 32)
            return float_lit_bits(f32_bits(static_cast<float>(v)), to, e->loc, e->text);
          return float_lit_bits(f64_bits(v), to, e->loc, e->text);
        }
        unsupported_float(*e, "conversion between float and double is only supported for "
                              "constants");
      }
      return mismatch();
    }
    if (to->is_pointer()) {
      if (from->is_pointer()) {
        if (!explicit_cast && !to->elem->is_void() && !from->elem->is_void()
            && !same_type(to->elem, from->elem))
          return mismatch();
        return conv_node(std::move(e), ConvKind::PtrToPtr, to);
      }
      if (from->is_integer()) {
        if (!explicit_cast && !is_null_constant(*e))
          return mismatch();
        return conv_node(std::move(e), ConvKind::IntToPtr, to);
      }
      return mismatch();
    }
    return mismatch();
  }

  static float float_value(uint64_t bits)
  {
    uint32_t b = static_cast<uint32_t>(bits);
    float f;
    std::memcpy(&f, &b, 4);
    return f;
  }

  static double literal_double(const Expr& e)
  {
    if (e.type->bits == 32)
      return float_value(e.ival);
    double d;
    uint64_t b = e.ival;
    std::memcpy(&d, &b, 8);
    return d;
  }

  ExprPtr float_to_int(ExprPtr e, const TypeRef& to)
  {
    SourceLoc loc = e->loc;
    if (e->kind == ExprKind::FloatLit) {
      double d = std::trunc(literal_double(*e));
      bool ok = std::isfinite(d)
             && (to->is_signed ? (d >= std::ldexp(-1.0, to->bits - 1)
                                  && d < std::ldexp(1.0, to->bits - 1))
                               : (d >= 0 && d < std::ldexp(1.0, to->bits)));
      if (!ok)
        fail("E_TYPE", "floating constant out of range for " + to_string(to), loc);
      uint64_t v = to->is_signed ? static_cast<uint64_t>(static_cast<int64_t>(d))
                                 : static_cast<uint64_t>(d);
      return int_lit(v, to, loc);
    }
    if (e->type->bits != 32)
      unsupported_float(*e, "binary64 to integer conversion is not supported");
    if (to->bits == 64)
      unsupported_float(*e, "float to 64-bit integer conversion is not supported");
    std::vector<ExprPtr> args;
    args.push_back(bits_of(std::move(e)));
    if (!to->is_signed && to->bits == 32)
      return call_prelude("__c2v_f32_to_u32", std::move(args), loc);
    ExprPtr r = call_prelude("__c2v_f32_to_i32", std::move(args), loc);
    if (to->bits == 32 && to->is_signed)
      return r;
    return conv_node(std::move(r), ConvKind::IntToInt, to);
  }

  ExprPtr int_to_float(ExprPtr e, const TypeRef& to)
  {
    SourceLoc loc = e->loc;
    if (e->kind == ExprKind::IntLit) {
      unsigned w = value_bits(e->type);
      double d = e->type->is_signed ? static_cast<double>(as_signed(e->ival, w))
                                    : static_cast<double>(e->ival);
      if (to->bits == 32) {
        float f = e->type->is_signed ? static_cast<float>(as_signed(e->ival, w))
                                     : static_cast<float>(e->ival);
        return float_lit_bits(f32_bits(f), to, loc, e->text);
      }
      return float_lit_bits(f64_bits(d), to, loc, e->text);
    }
    if (to->bits != 32)
      unsupported_float(*e, "integer to double conversion is only supported for constants");
    TypeRef from = promote(e->type);
    if (from->bits == 64)
      unsupported_float(*e, "64-bit integer to float conversion is not supported");
    bool is_unsigned = !from->is_signed;
    if (!same_type(from, e->type))
      e = conv_node(std::move(e), ConvKind::IntToInt, from);
    std::vector<ExprPtr> args;
    args.push_back(std::move(e));
    return as_float(
        call_prelude(is_unsigned ? "__c2v_u32_to_f32" : "__c2v_i32_to_f32", std::move(args), loc));
  }

  // ---- expressions ----
  ExprPtr check(ExprPtr e)
  {
    switch (e->kind) {
    case ExprKind::IntLit: return check_int_lit(std::move(e));
    case ExprKind::FloatLit: {
      std::string t = e->text;
      bool is_f = !t.empty() && (t.back() == 'f' || t.back() == 'F');
      e->type = is_f ? types::float32() : types::float64();
      e->ival = is_f ? f32_bits(static_cast<float>(e->fval)) : f64_bits(e->fval);
      return e;
    }
    case ExprKind::StrLit:
      fail("E_UNSUPPORTED_CONSTRUCT", "string literals are only allowed as assert messages",
           e->loc);
    case ExprKind::Ident: return check_ident(std::move(e));
    case ExprKind::Unary: return check_unary(std::move(e));
    case ExprKind::Binary: {
      ExprPtr a = check(std::move(e->kids[0]));
      ExprPtr b = check(std::move(e->kids[1]));
      return binary_op(e->op, std::move(a), std::move(b), e->loc);
    }
    case ExprKind::Assign: return check_assign(std::move(e));
    case ExprKind::IncDec: return check_incdec(std::move(e));
    case ExprKind::Cond: return check_cond(std::move(e));
    case ExprKind::Cast: {
      TypeRef t = resolve_type_name(*e->type_name);
      ExprPtr k = check(std::move(e->kids[0]));
      if (t->is_void()) {
        e->kids[0] = rvalue(std::move(k));
        e->type = t;
        return e;
      }
      if (!t->is_scalar())
        fail("E_TYPE", "cast to non-scalar type " + to_string(t), e->loc);
      ExprPtr r = convert(std::move(k), t, true, "cast");
      if (r->lvalue) // identity cast on an lvalue still yields an rvalue
        r = rvalue(std::move(r));
      r->loc = e->loc;
      return r;
    }
    case ExprKind::Call: return check_call(std::move(e));
    case ExprKind::Index: return check_index(std::move(e));
    case ExprKind::Member: return check_member(std::move(e));
    case ExprKind::SizeofType: {
      TypeRef t = resolve_type_name(*e->type_name);
      return int_lit(size_of(t), types::uint64(), e->loc);
    }
    case ExprKind::SizeofExpr: {
      ExprPtr k = check(std::move(e->kids[0]));
      if (k->type->is_function())
        fail("E_TYPE", "sizeof applied to a function", e->loc);
      return int_lit(size_of(k->type), types::uint64(), e->loc);
    }
    case ExprKind::Convert:
    case ExprKind::CompoundLhs:
      return e;
    }
    internal_error("unknown expression kind");
  }

  ExprPtr check_int_lit(ExprPtr e)
  {
    const std::string& s = e->text;
    if (!s.empty() && s[0] == '\'') {
      e->type = types::int32();
      e->ival &= mask_of(32);
      return e;
    }
    bool u = false;
    int l = 0;
    for (char c : s) {
      if (c == 'u' || c == 'U')
        u = true;
      if (c == 'l' || c == 'L')
        l++;
    }
    bool dec = !(s.size() > 1 && s[0] == '0');
    std::vector<TypeRef> cands;
    if (!u && l == 0)
      cands = dec ? std::vector<TypeRef>{types::int32(), types::int64()}
                  : std::vector<TypeRef>{types::int32(), types::uint32(), types::int64(),
                                         types::uint64()};
    else if (u && l == 0)
      cands = {types::uint32(), types::uint64()};
    else if (!u)
      cands = dec ? std::vector<TypeRef>{types::int64()}
                  : std::vector<TypeRef>{types::int64(), types::uint64()};
    else
      cands = {types::uint64()};
    for (const auto& t : cands) {
      uint64_t limit = t->is_signed ? mask_of(t->bits - 1) : mask_of(t->bits);
      if (e->ival <= limit) {
        e->type = t;
        return e;
      }
    }
    fail("E_TYPE", "integer constant '" + s + "' does not fit any integer type", e->loc);
  }

  ExprPtr check_ident(ExprPtr e)
  {
    Entity* ent = lookup(e->name);
    if (!ent) {
      if (e->name == "malloc" || e->name == "calloc" || e->name == "realloc"
          || e->name == "free")
        fail("E_UNSUPPORTED_CONSTRUCT", "dynamic allocation ('" + e->name + "') is not supported",
             e->loc);
      fail("E_TYPE", "use of undeclared identifier '" + e->name + "'", e->loc);
    }
    switch (ent->kind) {
    case Entity::Var:
      e->var = ent->var;
      e->type = ent->var->type;
      e->lvalue = true;
      return e;
    case Entity::Func:
      e->func = ent->func;
      e->type = ent->func->type;
      return e;
    case Entity::EnumConst:
      return int_lit(static_cast<uint64_t>(ent->value), types::int32(), e->loc);
    case Entity::Typedef:
      break;
    }
    fail("E_TYPE", "unexpected type name '" + e->name + "'", e->loc);
  }

  ExprPtr check_unary(ExprPtr e)
  {
    const std::string op = e->op;
    ExprPtr k = check(std::move(e->kids[0]));
    e->kids.clear();
    if (op == "&") {
      if (k->type->is_function()) {
        if (k->kind == ExprKind::Ident && k->func)
          k->func->address_taken = true;
        e->type = types::pointer_to(k->type);
        e->kids.push_back(std::move(k));
        return e;
      }
      if (!k->lvalue)
        fail("E_TYPE", "cannot take the address of an rvalue", e->loc);
      e->type = types::pointer_to(k->type);
      e->kids.push_back(std::move(k));
      return e;
    }
    if (op == "*") {
      k = rvalue(std::move(k));
      if (!k->type->is_pointer())
        fail("E_TYPE", "indirection requires a pointer (got " + to_string(k->type) + ")", e->loc);
      TypeRef pt = k->type->elem;
      if (pt->is_void())
        fail("E_TYPE", "dereference of void pointer", e->loc);
      e->type = pt;
      e->lvalue = !pt->is_function();
      if (!pt->is_function())
        layout_of(pt);
      e->kids.push_back(std::move(k));
      return e;
    }
    if (op == "!") {
      ExprPtr b = to_bool(std::move(k), "operand of '!'");
      e->type = types::int32();
      e->kids.push_back(std::move(b));
      return e;
    }
    k = rvalue(std::move(k));
    if (k->type->is_float()) {
      if (op == "~")
        fail("E_TYPE", "operand of '~' must be an integer", e->loc);
      if (k->kind == ExprKind::FloatLit) {
        if (op == "-") {
          k->ival ^= k->type->bits == 32 ? uint64_t{0x80000000u} : uint64_t{1} << 63;
          k->fval = -k->fval;
          k->text = "-" + k->text;
        }
        k->loc = e->loc;
        return k;
      }
      if (k->type->bits != 32)
        unsupported_float(*k, "binary64 arithmetic is not supported");
      if (op == "+")
        return k;
      e->type = k->type;
      e->kids.push_back(std::move(k));
      return e;
    }
    if (!k->type->is_integer())
      fail("E_TYPE", "operand of '" + op + "' must be arithmetic (got " + to_string(k->type) + ")",
           e->loc);
    TypeRef t = promote(k->type);
    e->type = t;
    e->kids.push_back(convert(std::move(k), t, false, "operand"));
    return e;
  }

  ExprPtr to_bool(ExprPtr e, const char* what)
  {
    e = rvalue(std::move(e));
    if (!e->type->is_scalar())
      fail("E_TYPE", std::string(what) + " must be scalar (got " + to_string(e->type) + ")", e->loc);
    return convert(std::move(e), types::bool_type(), false, what);
  }

  static bool is_float32(const TypeRef& t) { return t->is_float() && t->bits == 32; }

  ExprPtr float_binary(const std::string& op, ExprPtr a, ExprPtr b, const SourceLoc& loc)
  {
    if ((a->type->is_float() && a->type->bits == 64 && a->kind != ExprKind::FloatLit)
        || (b->type->is_float() && b->type->bits == 64 && b->kind != ExprKind::FloatLit))
      fail("E_UNSUPPORTED_FLOAT", "binary64 arithmetic is not supported", loc);
    if (!a->type->is_arithmetic() || !b->type->is_arithmetic())
      fail("E_TYPE", "invalid operands to '" + op + "' (" + to_string(a->type) + " and "
                         + to_string(b->type) + ")",
           loc);
    a = convert(std::move(a), types::float32(), false, "operand");
    b = convert(std::move(b), types::float32(), false, "operand");
    std::vector<ExprPtr> args;
    auto call2 = [&](const char* fn, ExprPtr x, ExprPtr y) {
      std::vector<ExprPtr> as;
      as.push_back(bits_of(std::move(x)));
      as.push_back(bits_of(std::move(y)));
      return call_prelude(fn, std::move(as), loc);
    };
    if (op == "+")
      return as_float(call2("__c2v_f32_add", std::move(a), std::move(b)));
    if (op == "-")
      return as_float(call2("__c2v_f32_sub", std::move(a), std::move(b)));
    if (op == "*")
      return as_float(call2("__c2v_f32_mul", std::move(a), std::move(b)));
    if (op == "<")
      return call2("__c2v_f32_lt", std::move(a), std::move(b));
    if (op == ">")
      return call2("__c2v_f32_lt", std::move(b), std::move(a));
    if (op == "<=")
      return call2("__c2v_f32_le", std::move(a), std::move(b));
    if (op == ">=")
      return call2("__c2v_f32_le", std::move(b), std::move(a));
    if (op == "==")
      return call2("__c2v_f32_eq", std::move(a), std::move(b));
    if (op == "!=") {
      auto ne = mk(ExprKind::Binary, loc, types::int32());
      ne->op = "==";
      ne->kids.push_back(call2("__c2v_f32_eq", std::move(a), std::move(b)));
      ne->kids.push_back(int_lit(0, types::int32(), loc));
      return ne;
    }
    fail("E_UNSUPPORTED_FLOAT", "float operator '" + op + "' is not supported", loc);
  }

  ExprPtr binary_op(const std::string& op, ExprPtr a, ExprPtr b, const SourceLoc& loc)
  {
    auto node = [&](TypeRef t, ExprPtr x, ExprPtr y) {
      auto e = mk(ExprKind::Binary, loc, std::move(t));
      e->op = op;
      e->kids.push_back(std::move(x));
      e->kids.push_back(std::move(y));
      return e;
    };
    if (op == ",") {
      a = rvalue(std::move(a));
      b = rvalue(std::move(b));
      TypeRef t = b->type;
      return node(t, std::move(a), std::move(b));
    }
    if (op == "&&" || op == "||") {
      a = to_bool(std::move(a), "logical operand");
      b = to_bool(std::move(b), "logical operand");
      return node(types::int32(), std::move(a), std::move(b));
    }
    a = rvalue(std::move(a));
    b = rvalue(std::move(b));
    const TypeRef ta = a->type, tb = b->type;
    if (ta->is_float() || tb->is_float())
      return float_binary(op, std::move(a), std::move(b), loc);
    bool cmp = op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=";
    if (ta->is_pointer() || tb->is_pointer()) {
      if (cmp) {
        if (ta->is_pointer() && tb->is_pointer()) {
          if (!same_type(ta->elem, tb->elem) && !ta->elem->is_void() && !tb->elem->is_void())
            fail("E_TYPE", "comparison of distinct pointer types " + to_string(ta) + " and "
                               + to_string(tb),
                 loc);
          b = conv_node(std::move(b), ConvKind::PtrToPtr, ta);
        } else if (ta->is_pointer()) {
          b = convert(std::move(b), ta, false, "comparison");
        } else {
          a = convert(std::move(a), tb, false, "comparison");
        }
        return node(types::int32(), std::move(a), std::move(b));
      }
      if (op == "+" || op == "-") {
        if (ta->is_pointer() && tb->is_pointer()) {
          if (op != "-" || !same_type(ta->elem, tb->elem))
            fail("E_TYPE", "invalid pointer arithmetic", loc);
          layout_of(ta->elem);
          return node(types::int64(), std::move(a), std::move(b));
        }
        if (tb->is_pointer()) {
          if (op == "-")
            fail("E_TYPE", "cannot subtract a pointer from an integer", loc);
          std::swap(a, b);
        }
        if (!b->type->is_integer())
          fail("E_TYPE", "pointer offset must be an integer", loc);
        if (a->type->elem->is_void() || a->type->elem->is_function())
          fail("E_TYPE", "arithmetic on " + to_string(a->type), loc);
        layout_of(a->type->elem);
        TypeRef pt = a->type;
        b = convert(std::move(b), types::int64(), false, "pointer offset");
        return node(pt, std::move(a), std::move(b));
      }
      fail("E_TYPE", "invalid operands to '" + op + "' (" + to_string(ta) + " and " + to_string(tb)
                         + ")",
           loc);
    }
    if (!ta->is_integer() || !tb->is_integer())
      fail("E_TYPE", "invalid operands to '" + op + "' (" + to_string(ta) + " and " + to_string(tb)
                         + ")",
           loc);
    if (op == "<<" || op == ">>") {
      TypeRef pa = promote(ta), pb = promote(tb);
      a = convert(std::move(a), pa, false, "shift operand");
      b = convert(std::move(b), pb, false, "shift amount");
      return node(pa, std::move(a), std::move(b));
    }
    TypeRef t = usual_arith_conversions(ta, tb);
    a = convert(std::move(a), t, false, "operand");
    b = convert(std::move(b), t, false, "operand");
    return node(cmp ? types::int32() : t, std::move(a), std::move(b));
  }

  void require_modifiable(const Expr& lhs, const SourceLoc& loc)
  {
    if (!lhs.lvalue)
      fail("E_TYPE", "expression is not assignable", loc);
    if (lhs.type->is_array())
      fail("E_TYPE", "array is not assignable", loc);
    layout_of(lhs.type);
  }

  ExprPtr check_assign(ExprPtr e)
  {
    ExprPtr lhs = check(std::move(e->kids[0]));
    require_modifiable(*lhs, e->loc);
    ExprPtr rhs = check(std::move(e->kids[1]));
    TypeRef lt = lhs->type;
    if (e->op != "=") {
      std::string bop = e->op.substr(0, e->op.size() - 1);
      auto old = mk(ExprKind::CompoundLhs, lhs->loc, lt);
      rhs = binary_op(bop, std::move(old), std::move(rhs), e->loc);
    } else if (lt->is_record()) {
      rhs = rvalue(std::move(rhs));
      if (!same_type(lt, rhs->type))
        fail("E_TYPE", "assigning " + to_string(rhs->type) + " to " + to_string(lt), e->loc);
    }
    e->kids.clear();
    e->kids.push_back(std::move(lhs));
    e->kids.push_back(convert(std::move(rhs), lt, false, "assignment"));
    e->type = lt;
    return e;
  }

  ExprPtr check_incdec(ExprPtr e)
  {
    ExprPtr lhs = check(std::move(e->kids[0]));
    require_modifiable(*lhs, e->loc);
    TypeRef lt = lhs->type;
    if (!lt->is_scalar())
      fail("E_TYPE", "operand of '" + e->op + "' must be scalar", e->loc);
    auto old = mk(ExprKind::CompoundLhs, lhs->loc, lt);
    ExprPtr one = int_lit(1, types::int32(), e->loc);
    ExprPtr comb = binary_op(e->op == "++" ? "+" : "-", std::move(old), std::move(one), e->loc);
    e->kids.clear();
    e->kids.push_back(std::move(lhs));
    e->kids.push_back(convert(std::move(comb), lt, false, "increment"));
    e->type = lt;
    return e;
  }

  ExprPtr check_cond(ExprPtr e)
  {
    ExprPtr c = to_bool(check(std::move(e->kids[0])), "condition");
    ExprPtr a = rvalue(check(std::move(e->kids[1])));
    ExprPtr b = rvalue(check(std::move(e->kids[2])));
    TypeRef t;
    const TypeRef ta = a->type, tb = b->type;
    if (ta->is_arithmetic() && tb->is_arithmetic()) {
      if (ta->is_float() || tb->is_float())
        t = (ta->is_float() && tb->is_float() && ta->bits == 64 && tb->bits == 64)
                ? types::float64()
                : types::float32();
      else
        t = usual_arith_conversions(ta, tb);
    } else if (ta->is_pointer() && tb->is_pointer()) {
      t = ta->elem->is_void() ? tb : ta;
    } else if (ta->is_pointer() && is_null_constant(*b)) {
      t = ta;
    } else if (tb->is_pointer() && is_null_constant(*a)) {
      t = tb;
    } else if (same_type(ta, tb)) {
      t = ta;
    } else {
      fail("E_TYPE", "incompatible operand types in '?:' (" + to_string(ta) + " and "
                         + to_string(tb) + ")",
           e->loc);
    }
    e->kids.clear();
    e->kids.push_back(std::move(c));
    e->kids.push_back(t->is_void() ? std::move(a) : convert(std::move(a), t, true, "'?:' arm"));
    e->kids.push_back(t->is_void() ? std::move(b) : convert(std::move(b), t, true, "'?:' arm"));
    e->type = t;
    return e;
  }

  ExprPtr check_call(ExprPtr e)
  {
    ExprPtr callee = check(std::move(e->kids[0]));
    FuncDecl* direct = nullptr;
    TypeRef ft;
    if (callee->kind == ExprKind::Ident && callee->func) {
      direct = callee->func;
      ft = direct->type;
    } else {
      if (callee->kind == ExprKind::Unary && callee->op == "*" && callee->type->is_function())
        callee = std::move(callee->kids[0]);
      else
        callee = rvalue(std::move(callee));
      if (!callee->type->is_function_pointer())
        fail("E_TYPE", "called object is not a function (type " + to_string(callee->type) + ")",
             e->loc);
      ft = callee->type->elem;
    }
    size_t nargs = e->kids.size() - 1;
    if (nargs != ft->params.size())
      fail("E_TYPE", "call expects " + std::to_string(ft->params.size()) + " argument(s), got "
                         + std::to_string(nargs),
           e->loc);
    std::vector<ExprPtr> args;
    for (size_t i = 0; i < nargs; i++) {
      ExprPtr a = check(std::move(e->kids[i + 1]));
      if (ft->params[i]->is_record()) {
        a = rvalue(std::move(a));
        if (!same_type(a->type, ft->params[i]))
          fail("E_TYPE", "argument " + std::to_string(i + 1) + " has type " + to_string(a->type)
                             + ", expected " + to_string(ft->params[i]),
               a->loc);
        args.push_back(std::move(a));
      } else {
        args.push_back(convert(std::move(a), ft->params[i], false, "argument"));
      }
    }
    e->kids.clear();
    e->kids.push_back(std::move(callee));
    for (auto& a : args)
      e->kids.push_back(std::move(a));
    e->type = ft->elem;
    if (cur_fn_)
      calls_[cur_fn_].push_back(CallEdge{direct, direct ? nullptr : ft, e->loc});
    return e;
  }

  ExprPtr check_index(ExprPtr e)
  {
    ExprPtr a = rvalue(check(std::move(e->kids[0])));
    ExprPtr i = rvalue(check(std::move(e->kids[1])));
    if (!a->type->is_pointer() && i->type->is_pointer())
      std::swap(a, i);
    if (!a->type->is_pointer() || !i->type->is_integer())
      fail("E_TYPE", "subscripted value is not an array or pointer", e->loc);
    TypeRef et = a->type->elem;
    if (et->is_void() || et->is_function())
      fail("E_TYPE", "subscript of " + to_string(a->type), e->loc);
    layout_of(et);
    e->kids.clear();
    e->kids.push_back(std::move(a));
    e->kids.push_back(convert(std::move(i), types::int64(), false, "subscript"));
    e->type = et;
    e->lvalue = true;
    return e;
  }

  ExprPtr check_member(ExprPtr e)
  {
    ExprPtr k = check(std::move(e->kids[0]));
    TypeRef rt;
    if (e->arrow) {
      k = rvalue(std::move(k));
      if (!k->type->is_pointer() || !k->type->elem->is_record())
        fail("E_TYPE", "'->' applied to non-pointer-to-record type " + to_string(k->type), e->loc);
      rt = k->type->elem;
      e->lvalue = true;
    } else {
      if (!k->type->is_record())
        fail("E_TYPE", "member access '." + e->name + "' on non-record type "
                           + to_string(k->type),
             e->loc);
      rt = k->type;
      e->lvalue = k->lvalue;
    }
    if (!rt->record->complete)
      fail("E_INCOMPLETE", "member access into incomplete type " + to_string(rt), e->loc);
    const Field* f = rt->record->find(e->name);
    if (!f)
      fail("E_TYPE", "no member named '" + e->name + "' in " + to_string(rt), e->loc);
    e->field = f;
    e->type = f->type;
    e->kids[0] = std::move(k);
    return e;
  }

  // ---- declarations ----
  VarDecl* new_var(const std::string& name, TypeRef t, const SourceLoc& loc, VarDecl::Storage st)
  {
    auto v = std::make_unique<VarDecl>();
    v->name = name;
    v->type = std::move(t);
    v->loc = loc;
    v->storage = st;
    v->code = static_cast<unsigned>(prog_.vars.size() + 1);
    if (v->code >= func_code_base)
      fail("E_UNSUPPORTED_CONSTRUCT", "too many objects in program", loc);
    v->owner = cur_fn_;
    prog_.vars.push_back(std::move(v));
    return prog_.vars.back().get();
  }

  FuncDecl* declare_function(const std::string& name, const TypeRef& t, const SourceLoc& loc)
  {
    Entity* ent = scopes_.size() == 1 ? nullptr : lookup(name);
    auto& global = scopes_.front();
    auto f = global.find(name);
    if (f != global.end()) {
      if (f->second.kind != Entity::Func)
        fail("E_TYPE", "'" + name + "' redeclared as a different kind of symbol", loc);
      if (!same_type(f->second.func->type, t))
        fail("E_TYPE", "conflicting types for '" + name + "' (expected "
                           + to_string(f->second.func->type) + ", got " + to_string(t) + ")",
             loc);
      if (scopes_.size() > 1 && !ent)
        scopes_.back()[name] = f->second;
      return f->second.func;
    }
    auto fd = std::make_unique<FuncDecl>();
    fd->name = name;
    fd->type = t;
    fd->loc = loc;
    fd->code = static_cast<unsigned>(func_code_base + prog_.funcs.size());
    fd->in_prelude = in_prelude(loc);
    prog_.funcs.push_back(std::move(fd));
    Entity e{Entity::Func, nullptr, prog_.funcs.back().get(), 0, nullptr};
    global[name] = e;
    if (scopes_.size() > 1)
      scopes_.back()[name] = e;
    return prog_.funcs.back().get();
  }

  void global_group(DeclGroup& g)
  {
    TypeRef base = resolve_spec(g.spec);
    if (g.body) {
      auto& id = g.decls[0];
      TypeRef ft = apply_declarator(base, id.decl, nullptr);
      if (!ft->is_function())
        fail("E_SYNTAX", "function body on a non-function declarator", id.decl.loc);
      FuncDecl* f = declare_function(id.decl.name, ft, id.decl.loc);
      if (f->body)
        fail("E_TYPE", "redefinition of function '" + f->name + "'", id.decl.loc);
      f->loc = id.decl.loc;
      define_function(*f, id.decl, *g.body);
      return;
    }
    for (auto& id : g.decls) {
      bool unsized = false;
      TypeRef t = apply_declarator(base, id.decl, &unsized);
      if (g.storage == DeclGroup::Typedef) {
        declare(id.decl.name, Entity{Entity::Typedef, nullptr, nullptr, 0, t}, id.decl.loc);
        continue;
      }
      if (t->is_function()) {
        declare_function(id.decl.name, t, id.decl.loc);
        continue;
      }
      global_var(id, t, unsized);
    }
  }

  void global_var(InitDeclarator& id, TypeRef t, bool unsized)
  {
    if (unsized)
      t = sized_from_init(t, id);
    if (t->is_void())
      fail("E_TYPE", "variable '" + id.decl.name + "' has type void", id.decl.loc);
    VarDecl* v = nullptr;
    auto& global = scopes_.front();
    auto f = global.find(id.decl.name);
    if (f != global.end()) {
      if (f->second.kind != Entity::Var || !same_type(f->second.var->type, t))
        fail("E_TYPE", "conflicting declaration of '" + id.decl.name + "'", id.decl.loc);
      v = f->second.var;
      if (id.init && v->has_init)
        fail("E_TYPE", "redefinition of '" + id.decl.name + "'", id.decl.loc);
    } else {
      layout_of(t);
      v = new_var(id.decl.name, t, id.decl.loc, VarDecl::Global);
      global[id.decl.name] = Entity{Entity::Var, v, nullptr, 0, nullptr};
      prog_.globals.push_back(v);
    }
    if (id.init)
      initialize(*v, *id.init);
  }

  TypeRef sized_from_init(const TypeRef& t, const InitDeclarator& id)
  {
    if (!id.init || !id.init->is_list)
      fail("E_INCOMPLETE", "array '" + id.decl.name + "' has no size", id.decl.loc);
    return types::array_of(t->elem, id.init->list.size());
  }

  void initialize(VarDecl& v, Initializer& in)
  {
    v.has_init = true;
    v.init.clear();
    if (in.is_list) {
      size_t idx = 0;
      init_aggregate(v, v.type, 0, in.list, idx, true, in.loc);
      if (idx != in.list.size())
        fail("E_TYPE", "excess elements in initializer for '" + v.name + "'", in.loc);
    } else {
      ExprPtr e = check(std::move(in.expr));
      add_item(v, v.type, 0, std::move(e));
    }
  }

  void add_item(VarDecl& v, const TypeRef& t, unsigned off, ExprPtr e)
  {
    if (t->is_array())
      fail("E_TYPE", "array initializer must be a brace-enclosed list", e->loc);
    if (t->is_record()) {
      e = rvalue(std::move(e));
      if (!same_type(e->type, t))
        fail("E_TYPE", "initializing " + to_string(t) + " with " + to_string(e->type), e->loc);
    } else {
      e = convert(std::move(e), t, false, "initializer");
    }
    v.init.push_back(InitItem{off, std::move(e)});
  }

  // Consumes entries of `list` starting at idx for the subobject of type t.
  void init_aggregate(VarDecl& v, const TypeRef& t, unsigned off, std::vector<Initializer>& list,
                      size_t& idx, bool braced, const SourceLoc& loc)
  {
    auto sub = [&](const TypeRef& st, unsigned soff) {
      Initializer& in = list[idx];
      if (in.is_list) {
        idx++;
        if (st->is_array() || st->is_record()) {
          size_t j = 0;
          init_aggregate(v, st, soff, in.list, j, true, in.loc);
          if (j != in.list.size())
            fail("E_TYPE", "excess elements in initializer", in.loc);
        } else {
          if (in.list.size() != 1 || in.list[0].is_list)
            fail("E_TYPE", "scalar initializer must have one element", in.loc);
          add_item(v, st, soff, check(std::move(in.list[0].expr)));
        }
        return;
      }
      if (st->is_array() || st->is_record()) {
        if (st->is_record()) {
          // an expression of the record type initializes it whole
          ExprPtr e = rvalue(check(std::move(in.expr)));
          if (same_type(e->type, st)) {
            idx++;
            add_item(v, st, soff, std::move(e));
            return;
          }
          fail("E_UNSUPPORTED_CONSTRUCT", "brace elision in initializers is not supported",
               in.loc);
        }
        fail("E_UNSUPPORTED_CONSTRUCT", "brace elision in initializers is not supported", in.loc);
      }
      idx++;
      add_item(v, st, soff, check(std::move(in.expr)));
    };
    (void)braced;
    if (t->is_array()) {
      unsigned es = size_of(t->elem);
      for (uint64_t i = 0; i < t->length && idx < list.size(); i++)
        sub(t->elem, off + static_cast<unsigned>(i) * es);
      return;
    }
    if (t->is_record()) {
      const auto& fields = t->record->fields;
      for (size_t i = 0; i < fields.size() && idx < list.size(); i++) {
        sub(fields[i].type, off + fields[i].offset);
        if (t->record->is_union)
          break;
      }
      return;
    }
    if (idx < list.size())
      sub(t, off);
    (void)loc;
  }

  void define_function(FuncDecl& f, const Declarator& d, Stmt& body)
  {
    cur_fn_ = &f;
    fn_loops_ = 0;
    f.body = &body;
    f.params.clear();
    push();
    const DeclChunk& fc = d.chunks.back();
    for (size_t i = 0; i < fc.params.size(); i++) {
      const auto& p = fc.params[i];
      if (p.decl.name.empty())
        fail("E_SYNTAX", "parameter name omitted in function definition", d.loc);
      VarDecl* v = new_var(p.decl.name, f.type->params[i], p.decl.loc, VarDecl::Param);
      layout_of(v->type);
      declare(p.decl.name, Entity{Entity::Var, v, nullptr, 0, nullptr}, p.decl.loc);
      f.params.push_back(v);
    }
    if (!f.type->elem->is_void())
      layout_of(f.type->elem);
    check_block(body);
    pop();
    cur_fn_ = nullptr;
  }

  void local_group(Stmt& s)
  {
    DeclGroup& g = *s.group;
    TypeRef base = resolve_spec(g.spec);
    for (auto& id : g.decls) {
      bool unsized = false;
      TypeRef t = apply_declarator(base, id.decl, &unsized);
      if (g.storage == DeclGroup::Typedef) {
        declare(id.decl.name, Entity{Entity::Typedef, nullptr, nullptr, 0, t}, id.decl.loc);
        continue;
      }
      if (t->is_function()) {
        declare_function(id.decl.name, t, id.decl.loc);
        continue;
      }
      if (g.storage == DeclGroup::Extern)
        fail("E_UNSUPPORTED_CONSTRUCT", "block-scope extern declarations are not supported",
             id.decl.loc);
      if (unsized)
        t = sized_from_init(t, id);
      if (t->is_void())
        fail("E_TYPE", "variable '" + id.decl.name + "' has type void", id.decl.loc);
      layout_of(t);
      bool is_static = g.storage == DeclGroup::Static;
      VarDecl* v = new_var(id.decl.name, t, id.decl.loc,
                           is_static ? VarDecl::Global : VarDecl::Local);
      if (id.init)
        initialize(*v, *id.init);
      declare(id.decl.name, Entity{Entity::Var, v, nullptr, 0, nullptr}, id.decl.loc);
      if (is_static)
        prog_.globals.push_back(v);
      else
        s.vars.push_back(v);
    }
  }

  // ---- statements ----
  void check_block(Stmt& s)
  {
    push();
    for (auto& c : s.stmts)
      check_stmt(*c);
    pop();
  }

  void loop_site(Stmt& s)
  {
    s.site = static_cast<unsigned>(prog_.loop_labels.size());
    prog_.loop_labels.push_back(cur_fn_->name + "." + std::to_string(fn_loops_++));
  }

  void check_stmt(Stmt& s)
  {
    switch (s.kind) {
    case StmtKind::Expr:
      s.expr = rvalue(check(std::move(s.expr)));
      break;
    case StmtKind::Decl:
      local_group(s);
      break;
    case StmtKind::If:
      s.expr = to_bool(check(std::move(s.expr)), "condition");
      sub_stmt(*s.body);
      if (s.else_body)
        sub_stmt(*s.else_body);
      break;
    case StmtKind::While:
    case StmtKind::DoWhile:
      loop_site(s);
      s.expr = to_bool(check(std::move(s.expr)), "loop condition");
      loop_body(*s.body);
      break;
    case StmtKind::For:
      loop_site(s);
      push();
      if (s.init)
        check_stmt(*s.init);
      if (s.expr)
        s.expr = to_bool(check(std::move(s.expr)), "loop condition");
      if (s.step)
        s.step = rvalue(check(std::move(s.step)));
      loop_body(*s.body);
      pop();
      break;
    case StmtKind::Switch: {
      ExprPtr c = rvalue(check(std::move(s.expr)));
      if (!c->type->is_integer())
        fail("E_TYPE", "switch quantity is not an integer (got " + to_string(c->type) + ")", s.loc);
      TypeRef t = promote(c->type);
      s.expr = convert(std::move(c), t, false, "switch");
      SwitchCtx ctx{t, {}, false};
      switches_.push_back(&ctx);
      breakable_depth_++;
      int saved_loop = loop_depth_;
      sub_stmt(*s.body);
      loop_depth_ = saved_loop;
      breakable_depth_--;
      switches_.pop_back();
      break;
    }
    case StmtKind::Case: {
      if (switches_.empty())
        fail("E_SYNTAX", "'case' outside of switch", s.loc);
      SwitchCtx& ctx = *switches_.back();
      ExprPtr v = convert(check(std::move(s.expr)), ctx.type, false, "case label");
      uint64_t val = const_value(*v);
      if (!ctx.values.insert(val).second)
        fail("E_TYPE", "duplicate case value", s.loc);
      s.case_value = static_cast<int64_t>(val);
      s.expr = std::move(v);
      sub_stmt(*s.body);
      break;
    }
    case StmtKind::Default:
      if (switches_.empty())
        fail("E_SYNTAX", "'default' outside of switch", s.loc);
      if (switches_.back()->has_default)
        fail("E_TYPE", "multiple default labels in one switch", s.loc);
      switches_.back()->has_default = true;
      sub_stmt(*s.body);
      break;
    case StmtKind::Break:
      if (breakable_depth_ == 0)
        fail("E_SYNTAX", "'break' outside of loop or switch", s.loc);
      break;
    case StmtKind::Continue:
      if (loop_depth_ == 0)
        fail("E_SYNTAX", "'continue' outside of loop", s.loc);
      break;
    case StmtKind::Return: {
      TypeRef rt = cur_fn_->type->elem;
      if (!s.expr) {
        if (!rt->is_void())
          fail("E_TYPE", "non-void function '" + cur_fn_->name + "' must return a value", s.loc);
        break;
      }
      ExprPtr v = check(std::move(s.expr));
      if (rt->is_void()) {
        v = rvalue(std::move(v));
        if (!v->type->is_void())
          fail("E_TYPE", "void function '" + cur_fn_->name + "' returns a value", s.loc);
        s.expr = std::move(v);
      } else if (rt->is_record()) {
        v = rvalue(std::move(v));
        if (!same_type(v->type, rt))
          fail("E_TYPE", "returning " + to_string(v->type) + " from a function returning "
                             + to_string(rt),
               s.loc);
        s.expr = std::move(v);
      } else {
        s.expr = convert(std::move(v), rt, false, "return");
      }
      break;
    }
    case StmtKind::Block:
      check_block(s);
      break;
    case StmtKind::Assert:
      check_assert(s);
      break;
    case StmtKind::Empty:
      break;
    case StmtKind::Sample:
    case StmtKind::Drive:
      check_interface(s);
      break;
    }
  }

  void sub_stmt(Stmt& s)
  {
    // a lone declaration as a sub-statement gets its own scope
    push();
    check_stmt(s);
    pop();
  }

  void loop_body(Stmt& s)
  {
    loop_depth_++;
    breakable_depth_++;
    sub_stmt(s);
    breakable_depth_--;
    loop_depth_--;
  }

  void check_assert(Stmt& s)
  {
    ExprPtr& c = s.expr;
    if (c->kind == ExprKind::StrLit)
      fail("E_TYPE", "assert condition is a string literal", c->loc);
    if (c->kind == ExprKind::Binary && c->op == "&&") {
      for (int i = 1; i >= 0; i--) {
        if (c->kids[i]->kind == ExprKind::StrLit) {
          s.message = decode_string(c->kids[i]->text);
          SourceLoc l = c->kids[i]->loc;
          c->kids[i] = std::make_unique<Expr>(ExprKind::IntLit, l);
          c->kids[i]->text = "1";
          c->kids[i]->ival = 1;
          break;
        }
      }
    }
    if (s.message.empty())
      s.message = "assertion " + render(*c) + " failed";
    s.expr = to_bool(check(std::move(s.expr)), "assert condition");
  }

  void check_interface(Stmt& s)
  {
    TypeRef t = resolve_type_name(*s.type_name);
    bool sample = s.kind == StmtKind::Sample;
    const char* mac = sample ? "C2V_SAMPLE_INPUT" : "C2V_DRIVE_OUTPUT";
    if (!t->is_integer() || t->is_bool())
      fail("E_TYPE", std::string(mac) + " type must be an integer type (got " + to_string(t) + ")",
           s.loc);
    cur_fn_->uses_interface = true;
    Entity* ent = lookup(s.name);
    if (ent && ent->kind == Entity::Var) {
      VarDecl* v = ent->var;
      if (sample && v->storage != VarDecl::Local)
        fail("E_TYPE", "C2V_SAMPLE_INPUT target '" + s.name + "' must be a local variable",
             s.loc);
      if (size_of(v->type) != size_of(t))
        fail("E_TYPE", std::string(mac) + " type " + to_string(t) + " does not match '" + s.name
                           + "' of type " + to_string(v->type),
             s.loc);
      s.vars = {v};
      return;
    }
    if (!sample)
      fail("E_TYPE", "C2V_DRIVE_OUTPUT of undeclared variable '" + s.name + "'", s.loc);
    if (ent)
      fail("E_TYPE", "'" + s.name + "' is not a variable", s.loc);
    VarDecl* v = new_var(s.name, t, s.loc, VarDecl::Local);
    declare(s.name, Entity{Entity::Var, v, nullptr, 0, nullptr}, s.loc);
    s.vars = {v};
  }

  // ---- recursion ----
  void check_recursion()
  {
    std::map<FuncDecl*, std::vector<FuncDecl*>> succ;
    for (auto& [f, edges] : calls_) {
      for (const auto& e : edges) {
        if (e.callee) {
          succ[f].push_back(e.callee);
          continue;
        }
        for (const auto& g : prog_.funcs)
          if (g->address_taken && same_type(g->type, e.fn_type))
            succ[f].push_back(g.get());
      }
    }
    std::map<FuncDecl*, int> state; // 1 = on stack, 2 = done
    std::vector<FuncDecl*> stack;
    std::function<void(FuncDecl*)> dfs = [&](FuncDecl* f) {
      state[f] = 1;
      stack.push_back(f);
      for (FuncDecl* g : succ[f]) {
        if (state[g] == 1) {
          std::string cycle;
          auto it = std::find(stack.begin(), stack.end(), g);
          for (; it != stack.end(); ++it)
            cycle += (*it)->name + " -> ";
          cycle += g->name;
          fail("E_RECURSION", "recursion is not supported (unroll it by hand): " + cycle, g->loc);
        }
        if (state[g] == 0)
          dfs(g);
      }
      stack.pop_back();
      state[f] = 2;
    };
    for (const auto& f : prog_.funcs)
      if (state[f.get()] == 0)
        dfs(f.get());
  }
};

void walk_expr(const Expr& e, const std::function<void(const Expr&)>& fn)
{
  fn(e);
  for (const auto& k : e.kids)
    walk_expr(*k, fn);
}

void walk_stmt(const Stmt& s, const std::function<void(const Expr&)>& fn)
{
  if (s.expr)
    walk_expr(*s.expr, fn);
  if (s.step)
    walk_expr(*s.step, fn);
  if (s.init)
    walk_stmt(*s.init, fn);
  if (s.body)
    walk_stmt(*s.body, fn);
  if (s.else_body)
    walk_stmt(*s.else_body, fn);
  for (const auto& c : s.stmts)
    walk_stmt(*c, fn);
}

} // namespace

TypedProgram typecheck(TranslationUnit tu)
{
  return Checker(std::move(tu)).run();
}

void for_each_expr(const TypedProgram& prog, const std::function<void(const Expr&)>& fn)
{
  for (const auto& v : prog.vars)
    for (const auto& item : v->init)
      walk_expr(*item.expr, fn);
  for (const auto& f : prog.funcs)
    if (f->body)
      walk_stmt(*f->body, fn);
}

TypedProgram compile_source(const std::string& source, const std::string& filename,
                            const PreprocessOptions& opts)
{
  std::vector<Token> toks = preprocess(softfloat_prelude(), prelude_filename, {});
  toks.pop_back();
  std::vector<Token> user = preprocess(source, filename, opts);
  toks.insert(toks.end(), user.begin(), user.end());
  return typecheck(parse(toks));
}

TypedProgram compile_file(const std::string& path, const PreprocessOptions& opts)
{
  return compile_source(read_file(path), path, opts);
}

} // namespace c2v
