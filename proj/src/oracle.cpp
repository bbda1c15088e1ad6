#include "c2v/oracle.hpp"

#include <unordered_map>

namespace c2v {

const BitVec* RunResult::output(const std::string& name) const
{
  for (const auto& [n, v] : outputs)
    if (n == name)
      return &v;
  return nullptr;
}

bool RunResult::all_held() const
{
  for (const auto& c : checks)
    if (!c.held)
      return false;
  return true;
}

namespace {

struct Val
{
  uint64_t u = 0; // values of at most 8 bytes, little-endian packed
  std::shared_ptr<std::vector<uint8_t>> rec; // larger values
};

uint64_t mask(unsigned bits) { return bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1; }

uint64_t sext(uint64_t v, unsigned from)
{
  if (from >= 64)
    return v;
  uint64_t m = uint64_t(1) << (from - 1);
  return ((v & mask(from)) ^ m) - m;
}

unsigned nbytes(const TypeRef& t)
{
  switch (t->kind) {
  case TypeKind::Bool: return 1;
  case TypeKind::Int:
  case TypeKind::Float: return t->bits / 8;
  case TypeKind::Pointer: return 8;
  case TypeKind::Void: return 0;
  default: return size_of(t);
  }
}

bool is_signed_int(const TypeRef& t) { return t->kind == TypeKind::Int && t->is_signed; }

uint8_t byte_of(const Val& v, unsigned n, unsigned i)
{
  return n <= 8 ? uint8_t(v.u >> (8 * i)) : (*v.rec)[i];
}

struct Obj
{
  std::vector<uint8_t> bytes;
  bool live = false;
};

enum class Flow { Normal, Break, Continue, Return };

} // namespace

struct Interpreter::Impl
{
  const TypedProgram& prog;
  const FuncDecl* entry = nullptr;
  OracleOptions opts;
  std::vector<Obj> objs; // by object code
  std::vector<Port> ins, outs;
  std::unordered_map<const FuncDecl*, std::vector<uint32_t>> locals_of;

  RunResult* res = nullptr;
  const bv::Env* env = nullptr;
  std::vector<BitVec> out_vals;
  Val ret;
  std::vector<Val> compound;

  Impl(const TypedProgram& p, const std::string& name, OracleOptions o) : prog{p}, opts{o}
  {
    entry = prog.find_function(name);
    if (!entry || !entry->body)
      fail("E_NO_ENTRY", "entry function '" + name + "' is not defined");
    if (!entry->type->elem->is_void() || !entry->params.empty())
      fail("E_NO_ENTRY", "entry function '" + name + "' must take no parameters and return void",
           entry->loc);
    objs.resize(prog.vars.size() + 1);
    for (const auto& v : prog.vars) {
      objs[v->code].bytes.assign(size_of(v->type), 0);
      if (v->owner && v->storage != VarDecl::Global)
        locals_of[v->owner].push_back(v->code);
    }
    scan(*entry->body);
  }

  void scan(const Stmt& s)
  {
    if (s.kind == StmtKind::Sample || s.kind == StmtKind::Drive) {
      auto& ports = s.kind == StmtKind::Sample ? ins : outs;
      bool seen = false;
      for (const auto& q : ports)
        seen = seen || q.name == s.name;
      if (!seen)
        ports.push_back({s.name, 8 * nbytes(s.vars.at(0)->type), s.loc});
    }
    if (s.init)
      scan(*s.init);
    if (s.body)
      scan(*s.body);
    if (s.else_body)
      scan(*s.else_body);
    for (const auto& c : s.stmts)
      scan(*c);
  }

  void step()
  {
    if (++res->steps > opts.fuel)
      fail("E_FUEL_EXHAUSTED", "interpreter ran out of fuel after " + std::to_string(opts.fuel)
                                   + " steps");
  }

  void log(ObligationKind k, const SourceLoc& loc, bool held, const char* msg)
  {
    res->checks.push_back({k, loc, held, msg});
  }

  // ---- memory ----
  Obj* target(uint64_t p, unsigned n, const SourceLoc& loc)
  {
    uint64_t code = p >> 32;
    uint32_t off = uint32_t(p);
    if (opts.checks.null && code == 0)
      log(ObligationKind::NullDeref, loc, false, "null pointer dereference");
    if (code == 0 || code >= objs.size())
      return nullptr;
    Obj& o = objs[code];
    if (opts.checks.bounds) {
      uint64_t size = o.live ? o.bytes.size() : 0;
      log(ObligationKind::Bounds, loc, n <= size && off <= size - n, "out-of-bounds access");
    }
    return o.live ? &o : nullptr;
  }

  Val load(uint64_t p, unsigned n, const SourceLoc& loc)
  {
    Obj* o = target(p, n, loc);
    uint64_t off = uint32_t(p);
    Val v;
    if (n > 8)
      v.rec = std::make_shared<std::vector<uint8_t>>(n, 0);
    if (!o || off >= o->bytes.size())
      return v;
    for (unsigned i = 0; i < n && off + i < o->bytes.size(); i++) {
      uint8_t b = o->bytes[off + i];
      if (n <= 8)
        v.u |= uint64_t(b) << (8 * i);
      else
        (*v.rec)[i] = b;
    }
    return v;
  }

  void store(uint64_t p, const Val& v, unsigned n, const SourceLoc& loc)
  {
    Obj* o = target(p, n, loc);
    uint64_t off = uint32_t(p);
    if (!o || off >= o->bytes.size())
      return;
    for (unsigned i = 0; i < n && off + i < o->bytes.size(); i++)
      o->bytes[off + i] = byte_of(v, n, i);
  }

  void write_object(uint32_t code, unsigned offset, const Val& v, unsigned n)
  {
    auto& b = objs[code].bytes;
    for (unsigned i = 0; i < n && offset + i < b.size(); i++)
      b[offset + i] = byte_of(v, n, i);
  }

  void init_object(const VarDecl& v)
  {
    Obj& o = objs[v.code];
    std::fill(o.bytes.begin(), o.bytes.end(), 0);
    o.live = true;
    for (const auto& item : v.init)
      write_object(v.code, item.offset, eval(*item.expr), nbytes(item.expr->type));
  }

  static uint64_t address_of(uint32_t code) { return uint64_t(code) << 32; }

  // ---- expressions ----
  uint64_t eval_lvalue(const Expr& e)
  {
    switch (e.kind) {
    case ExprKind::Ident:
      if (e.var)
        return address_of(e.var->code);
      break;
    case ExprKind::Unary:
      if (e.op == "*")
        return eval(*e.kids[0]).u;
      break;
    case ExprKind::Index: {
      uint64_t p = eval(*e.kids[0]).u;
      uint64_t i = eval(*e.kids[1]).u;
      return ptr_index(p, i, size_of(e.type), false);
    }
    case ExprKind::Member: {
      uint64_t base = e.arrow ? eval(*e.kids[0]).u : eval_lvalue(*e.kids[0]);
      return ptr_add(base, e.field->offset);
    }
    default:
      break;
    }
    fail("E_UNSUPPORTED", "expression is not addressable", e.loc);
  }

  static uint64_t ptr_add(uint64_t p, uint32_t delta)
  {
    return (p & ~uint64_t(0xffffffff)) | uint32_t(uint32_t(p) + delta);
  }

  static uint64_t ptr_index(uint64_t p, uint64_t i, unsigned size, bool negate)
  {
    uint32_t d = uint32_t(i * size);
    return ptr_add(p, negate ? uint32_t(0u - d) : d);
  }

  Val scalar(uint64_t u) { return Val{u, nullptr}; }

  Val convert(const Expr& e)
  {
    const Expr& k = *e.kids[0];
    switch (e.conv) {
    case ConvKind::LValueToRValue:
      return load(eval_lvalue(k), nbytes(e.type), e.loc);
    case ConvKind::ArrayDecay:
      return scalar(eval_lvalue(k));
    case ConvKind::FuncDecay:
      if (k.kind == ExprKind::Ident && k.func)
        return scalar(k.func->code);
      if (k.kind == ExprKind::Unary && k.op == "*")
        return eval(*k.kids[0]);
      break;
    case ConvKind::None:
    case ConvKind::Bitcast:
    case ConvKind::PtrToPtr:
      return eval(k);
    case ConvKind::IntToInt: {
      uint64_t v = eval(k).u;
      unsigned ws = 8 * nbytes(k.type), wd = 8 * nbytes(e.type);
      if (wd > ws && is_signed_int(k.type))
        v = sext(v, ws);
      return scalar(v & mask(wd));
    }
    case ConvKind::IntToBool:
    case ConvKind::PtrToBool:
      return scalar(eval(k).u != 0);
    case ConvKind::PtrToInt:
      return scalar(eval(k).u & mask(8 * nbytes(e.type)));
    case ConvKind::IntToPtr: {
      uint64_t v = eval(k).u;
      unsigned ws = 8 * nbytes(k.type);
      if (ws < 64 && is_signed_int(k.type))
        v = sext(v, ws);
      return scalar(v);
    }
    }
    fail("E_UNSUPPORTED", "unsupported conversion", e.loc);
  }

  Val unary(const Expr& e)
  {
    const Expr& k = *e.kids[0];
    if (e.op == "&") {
      if (k.kind == ExprKind::Ident && k.func)
        return scalar(k.func->code);
      return scalar(eval_lvalue(k));
    }
    if (e.op == "*")
      return load(eval(k).u, nbytes(e.type), e.loc);
    uint64_t v = eval(k).u;
    unsigned w = 8 * nbytes(e.type);
    if (e.op == "+")
      return scalar(v);
    if (e.op == "-") {
      if (e.type->is_float())
        return scalar(v ^ (uint64_t(1) << (w - 1)));
      return scalar((0 - v) & mask(w));
    }
    if (e.op == "~")
      return scalar(~v & mask(w));
    if (e.op == "!")
      return scalar(v == 0);
    fail("E_UNSUPPORTED", "unsupported operator '" + e.op + "'", e.loc);
  }

  static uint64_t sdiv(uint64_t a, uint64_t b, unsigned w)
  {
    if (b == 0)
      return mask(w);
    bool na = (a >> (w - 1)) & 1, nb = (b >> (w - 1)) & 1;
    uint64_t ua = na ? (0 - a) & mask(w) : a;
    uint64_t ub = nb ? (0 - b) & mask(w) : b;
    uint64_t q = ua / ub;
    return (na != nb ? 0 - q : q) & mask(w);
  }

  static uint64_t srem(uint64_t a, uint64_t b, unsigned w)
  {
    if (b == 0)
      return a;
    bool na = (a >> (w - 1)) & 1, nb = (b >> (w - 1)) & 1;
    uint64_t ua = na ? (0 - a) & mask(w) : a;
    uint64_t ub = nb ? (0 - b) & mask(w) : b;
    uint64_t r = ua % ub;
    return (na ? 0 - r : r) & mask(w);
  }

  Val binary(const Expr& e)
  {
    const std::string& op = e.op;
    const Expr& ka = *e.kids[0];
    const Expr& kb = *e.kids[1];
    if (op == "&&") {
      if (eval(ka).u == 0)
        return scalar(0);
      return scalar(eval(kb).u != 0);
    }
    if (op == "||") {
      if (eval(ka).u != 0)
        return scalar(1);
      return scalar(eval(kb).u != 0);
    }
    if (op == ",") {
      eval(ka);
      return eval(kb);
    }
    uint64_t a = eval(ka).u;
    uint64_t b = eval(kb).u;
    const TypeRef& ta = ka.type;
    if (ta->is_pointer() && kb.type->is_pointer() && op == "-") {
      int64_t d = int64_t(sext(uint32_t(uint32_t(a) - uint32_t(b)), 32));
      return scalar(uint64_t(d / int64_t(size_of(ta->elem))));
    }
    if (ta->is_pointer() && (op == "+" || op == "-"))
      return scalar(ptr_index(a, b, size_of(ta->elem), op == "-"));
    unsigned w = 8 * nbytes(ta);
    bool sgn = is_signed_int(ta);
    if (op == "==")
      return scalar(a == b);
    if (op == "!=")
      return scalar(a != b);
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
      bool lt, eq = a == b;
      if (sgn)
        lt = int64_t(sext(a, w)) < int64_t(sext(b, w));
      else
        lt = a < b;
      if (op == "<")
        return scalar(lt);
      if (op == "<=")
        return scalar(lt || eq);
      if (op == ">")
        return scalar(!lt && !eq);
      return scalar(!lt);
    }
    if (op == "<<" || op == ">>") {
      if (opts.checks.shift)
        log(ObligationKind::Overshift, e.loc, b < w, "shift amount out of range");
      if (op == "<<")
        return scalar(b >= w ? 0 : (a << b) & mask(w));
      if (!sgn)
        return scalar(b >= w ? 0 : a >> b);
      uint64_t s = sext(a, w);
      uint64_t r = b >= w ? (int64_t(s) < 0 ? ~uint64_t(0) : 0) : uint64_t(int64_t(s) >> b);
      return scalar(r & mask(w));
    }
    if (op == "/" || op == "%") {
      if (opts.checks.div)
        log(ObligationKind::DivByZero, e.loc, b != 0, "division by zero");
      if (op == "/")
        return scalar(sgn ? sdiv(a, b, w) : b == 0 ? mask(w) : a / b);
      return scalar(sgn ? srem(a, b, w) : b == 0 ? a : a % b);
    }
    uint64_t r;
    if (op == "+")
      r = a + b;
    else if (op == "-")
      r = a - b;
    else if (op == "*")
      r = a * b;
    else if (op == "&")
      r = a & b;
    else if (op == "|")
      r = a | b;
    else if (op == "^")
      r = a ^ b;
    else
      fail("E_UNSUPPORTED", "unsupported operator '" + op + "'", e.loc);
    return scalar(r & mask(w));
  }

  Val assign(const Expr& e)
  {
    uint64_t p = eval_lvalue(*e.kids[0]);
    unsigned n = nbytes(e.type);
    bool compound_op = e.kind == ExprKind::IncDec || e.op != "=";
    Val old;
    if (compound_op) {
      old = load(p, n, e.loc);
      compound.push_back(old);
    }
    Val v = eval(*e.kids[1]);
    if (compound_op)
      compound.pop_back();
    store(p, v, n, e.loc);
    if (e.kind == ExprKind::IncDec && e.postfix)
      return old;
    return v;
  }

  Val call(const Expr& e)
  {
    std::vector<Val> args;
    args.reserve(e.kids.size() - 1);
    for (size_t i = 1; i < e.kids.size(); i++)
      args.push_back(eval(*e.kids[i]));
    const Expr& callee = *e.kids[0];
    const FuncDecl* f = nullptr;
    if (callee.kind == ExprKind::Ident && callee.func) {
      f = callee.func;
    } else {
      uint64_t code = eval(callee).u;
      f = code >= func_code_base ? prog.func_by_code(code) : nullptr;
      bool ok = f && f->body && f->address_taken && same_type(f->type, callee.type->elem);
      if (opts.checks.null)
        log(ObligationKind::NullDeref, e.loc, ok, "function pointer matches no candidate");
      if (!ok)
        fail("E_BAD_FUNCTION_POINTER", "call through a pointer that designates no candidate function",
             e.loc);
    }
    return invoke(*f, args, e.loc);
  }

  Val invoke(const FuncDecl& f, const std::vector<Val>& args, const SourceLoc& loc)
  {
    if (!f.body)
      fail("E_UNSUPPORTED", "call to function '" + f.name + "' which has no definition", loc);
    step();
    for (size_t i = 0; i < f.params.size(); i++) {
      const VarDecl& p = *f.params[i];
      Obj& o = objs[p.code];
      o.live = true;
      std::fill(o.bytes.begin(), o.bytes.end(), 0);
      write_object(p.code, 0, args[i], nbytes(p.type));
    }
    Flow fl = exec(*f.body);
    Val r;
    if (fl == Flow::Return)
      r = std::move(ret);
    else if (!f.type->elem->is_void() && nbytes(f.type->elem) > 8)
      r.rec = std::make_shared<std::vector<uint8_t>>(nbytes(f.type->elem), 0);
    ret = Val{};
    for (uint32_t c : locals_of[&f])
      objs[c].live = false;
    return r;
  }

  Val member_of(const Val& base, unsigned base_size, unsigned off, unsigned n)
  {
    Val r;
    if (n > 8)
      r.rec = std::make_shared<std::vector<uint8_t>>(n, 0);
    for (unsigned i = 0; i < n; i++) {
      uint8_t b = byte_of(base, base_size, off + i);
      if (n <= 8)
        r.u |= uint64_t(b) << (8 * i);
      else
        (*r.rec)[i] = b;
    }
    return r;
  }

  Val eval(const Expr& e)
  {
    switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
      return scalar(e.ival);
    case ExprKind::Ident:
      if (e.func)
        return scalar(e.func->code);
      return load(eval_lvalue(e), nbytes(e.type), e.loc);
    case ExprKind::Convert:
      return convert(e);
    case ExprKind::Unary:
      return unary(e);
    case ExprKind::Binary:
      return binary(e);
    case ExprKind::Assign:
    case ExprKind::IncDec:
      return assign(e);
    case ExprKind::Cond:
      return eval(*e.kids[eval(*e.kids[0]).u != 0 ? 1 : 2]);
    case ExprKind::Cast:
      eval(*e.kids[0]);
      return Val{};
    case ExprKind::Call:
      return call(e);
    case ExprKind::Index:
      return load(eval_lvalue(e), nbytes(e.type), e.loc);
    case ExprKind::Member:
      if (e.lvalue)
        return load(eval_lvalue(e), nbytes(e.type), e.loc);
      return member_of(eval(*e.kids[0]), nbytes(e.kids[0]->type), e.field->offset, nbytes(e.type));
    case ExprKind::CompoundLhs:
      return compound.back();
    default:
      break;
    }
    fail("E_UNSUPPORTED", "unsupported expression", e.loc);
  }

  // ---- statements ----
  static const Stmt* unlabel(const Stmt* s)
  {
    while (s->kind == StmtKind::Case || s->kind == StmtKind::Default)
      s = s->body.get();
    return s;
  }

  Flow exec_loop(const Stmt& s)
  {
    if (s.kind == StmtKind::For && s.init) {
      Flow f = exec(*s.init);
      if (f != Flow::Normal)
        return f;
    }
    bool first = true;
    for (;;) {
      step();
      if (!(first && s.kind == StmtKind::DoWhile) && s.expr && eval(*s.expr).u == 0)
        return Flow::Normal;
      first = false;
      Flow f = exec(*s.body);
      if (f == Flow::Break)
        return Flow::Normal;
      if (f == Flow::Return)
        return f;
      if (s.kind == StmtKind::For && s.step)
        eval(*s.step);
    }
  }

  Flow exec_switch(const Stmt& s)
  {
    uint64_t sel = eval(*s.expr).u;
    std::vector<const Stmt*> body;
    if (s.body->kind == StmtKind::Block)
      for (const auto& c : s.body->stmts)
        body.push_back(c.get());
    else
      body.push_back(s.body.get());
    size_t start = body.size(), dflt = body.size();
    unsigned w = 8 * nbytes(s.expr->type);
    for (size_t i = 0; i < body.size() && start == body.size(); i++)
      for (const Stmt* l = body[i];
           l->kind == StmtKind::Case || l->kind == StmtKind::Default; l = l->body.get()) {
        if (l->kind == StmtKind::Default)
          dflt = i;
        else if ((uint64_t(l->case_value) & mask(w)) == sel)
          start = i;
      }
    if (start == body.size())
      start = dflt;
    for (size_t i = start; i < body.size(); i++) {
      Flow f = exec(*unlabel(body[i]));
      if (f == Flow::Break)
        return Flow::Normal;
      if (f != Flow::Normal)
        return f;
    }
    return Flow::Normal;
  }

  Flow exec(const Stmt& s)
  {
    step();
    switch (s.kind) {
    case StmtKind::Expr:
      if (s.expr)
        eval(*s.expr);
      return Flow::Normal;
    case StmtKind::Decl:
      for (const VarDecl* v : s.vars)
        init_object(*v);
      return Flow::Normal;
    case StmtKind::Block:
      for (const auto& c : s.stmts) {
        Flow f = exec(*c);
        if (f != Flow::Normal)
          return f;
      }
      return Flow::Normal;
    case StmtKind::Empty:
      return Flow::Normal;
    case StmtKind::If:
      if (eval(*s.expr).u != 0)
        return exec(*s.body);
      if (s.else_body)
        return exec(*s.else_body);
      return Flow::Normal;
    case StmtKind::While:
    case StmtKind::DoWhile:
    case StmtKind::For:
      return exec_loop(s);
    case StmtKind::Switch:
      return exec_switch(s);
    case StmtKind::Case:
    case StmtKind::Default:
      return exec(*s.body);
    case StmtKind::Break:
      return Flow::Break;
    case StmtKind::Continue:
      return Flow::Continue;
    case StmtKind::Return:
      ret = s.expr ? eval(*s.expr) : Val{};
      return Flow::Return;
    case StmtKind::Assert:
      log(ObligationKind::UserAssert, s.loc, eval(*s.expr).u != 0, s.message.c_str());
      return Flow::Normal;
    case StmtKind::Sample: {
      const VarDecl* v = s.vars.at(0);
      auto it = env->find(s.name);
      if (it == env->end())
        fail("E_MISSING_INPUT", "no value given for input '" + s.name + "'", s.loc);
      unsigned n = nbytes(v->type);
      if (it->second.width() != 8 * n)
        fail("E_WIDTH_MISMATCH", "input '" + s.name + "' given at width "
                                     + std::to_string(it->second.width()) + ", expected "
                                     + std::to_string(8 * n));
      objs[v->code].live = true;
      write_object(v->code, 0, scalar(it->second.to_u64()), n);
      return Flow::Normal;
    }
    case StmtKind::Drive: {
      const VarDecl* v = s.vars.at(0);
      unsigned n = nbytes(v->type);
      Val val = load(address_of(v->code), n, s.loc);
      for (size_t k = 0; k < outs.size(); k++)
        if (outs[k].name == s.name)
          out_vals[k] = BitVec(8 * n, val.u);
      return Flow::Normal;
    }
    }
    return Flow::Normal;
  }

  RunResult run(const bv::Env& inputs)
  {
    RunResult r;
    res = &r;
    env = &inputs;
    for (const auto& p : ins)
      if (!inputs.count(p.name))
        fail("E_MISSING_INPUT", "no value given for input '" + p.name + "'", p.loc);
    for (auto& o : objs)
      o.live = false;
    out_vals.clear();
    for (const auto& p : outs)
      out_vals.emplace_back(p.width);
    for (const VarDecl* g : prog.globals)
      init_object(*g);
    exec(*entry->body);
    ret = Val{};
    compound.clear();
    for (size_t k = 0; k < outs.size(); k++)
      r.outputs.emplace_back(outs[k].name, out_vals[k]);
    res = nullptr;
    env = nullptr;
    return r;
  }
};

Interpreter::Interpreter(const TypedProgram& prog, const std::string& entry, OracleOptions opts)
  : impl_{std::make_unique<Impl>(prog, entry, opts)}
{
}

Interpreter::~Interpreter() = default;

const std::vector<Port>& Interpreter::inputs() const { return impl_->ins; }
const std::vector<Port>& Interpreter::outputs() const { return impl_->outs; }

RunResult Interpreter::run(const bv::Env& inputs) { return impl_->run(inputs); }

RunResult interpret(const TypedProgram& prog, const std::string& entry, const bv::Env& inputs,
                    OracleOptions opts)
{
  Interpreter in(prog, entry, opts);
  return in.run(inputs);
}

} // namespace c2v
