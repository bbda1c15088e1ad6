#include "c2v/bitvec.hpp"

#include "c2v/diag.hpp"

namespace c2v {

BitVec::BitVec(unsigned width, uint64_t value)
  : width_{width}
{
  if (width == 0 || width > max_width)
    internal_error("BitVec width out of range: " + std::to_string(width));
  words_[0] = value;
  clear_top();
}

BitVec BitVec::ones(unsigned width)
{
  BitVec r(width);
  for (unsigned i = 0; i < r.num_words(); i++)
    r.words_[i] = ~uint64_t{0};
  r.clear_top();
  return r;
}

BitVec BitVec::from_hex(unsigned width, std::string_view hex)
{
  BitVec r(width);
  unsigned pos = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    char c = *it;
    if (c == '_')
      continue;
    uint64_t d;
    if (c >= '0' && c <= '9')
      d = c - '0';
    else if (c >= 'a' && c <= 'f')
      d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      d = c - 'A' + 10;
    else
      internal_error("bad hex digit");
    for (unsigned b = 0; b < 4; b++, pos++)
      if ((d >> b) & 1) {
        if (pos >= width)
          internal_error("hex constant wider than its width");
        r.set_bit(pos, true);
      }
  }
  return r;
}

void BitVec::clear_top()
{
  unsigned n = num_words();
  for (unsigned i = n; i < max_words; i++)
    words_[i] = 0;
  if (width_ % 64)
    words_[n - 1] &= (uint64_t{1} << (width_ % 64)) - 1;
}

int64_t BitVec::to_i64() const
{
  if (width_ >= 64)
    return static_cast<int64_t>(words_[0]);
  uint64_t v = words_[0];
  if (msb())
    v |= ~uint64_t{0} << width_;
  return static_cast<int64_t>(v);
}

void BitVec::set_bit(unsigned i, bool v)
{
  uint64_t m = uint64_t{1} << (i % 64);
  if (v)
    words_[i / 64] |= m;
  else
    words_[i / 64] &= ~m;
}

void BitVec::set_word(unsigned i, uint64_t v)
{
  words_[i] = v;
  clear_top();
}

bool BitVec::is_zero() const
{
  for (unsigned i = 0; i < num_words(); i++)
    if (words_[i])
      return false;
  return true;
}

bool BitVec::is_ones() const
{
  return *this == ones(width_);
}

bool BitVec::fits_u64(uint64_t& out) const
{
  for (unsigned i = 1; i < num_words(); i++)
    if (words_[i])
      return false;
  out = words_[0];
  return true;
}

std::string BitVec::to_hex() const
{
  static const char digits[] = "0123456789abcdef";
  unsigned n = (width_ + 3) / 4;
  std::string s(n, '0');
  for (unsigned d = 0; d < n; d++) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; b++) {
      unsigned i = d * 4 + b;
      if (i < width_ && bit(i))
        v |= 1u << b;
    }
    s[n - 1 - d] = digits[v];
  }
  return s;
}

size_t BitVec::hash() const
{
  uint64_t h = 0x9e3779b97f4a7c15ull ^ width_;
  for (unsigned i = 0; i < num_words(); i++) {
    h ^= words_[i] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<size_t>(h);
}

bool operator==(const BitVec& a, const BitVec& b)
{
  if (a.width_ != b.width_)
    return false;
  for (unsigned i = 0; i < a.num_words(); i++)
    if (a.words_[i] != b.words_[i])
      return false;
  return true;
}

BitVec BitVec::bnot() const
{
  BitVec r(*this);
  for (unsigned i = 0; i < num_words(); i++)
    r.words_[i] = ~words_[i];
  r.clear_top();
  return r;
}

BitVec BitVec::neg() const
{
  return BitVec(width_).sub(*this);
}

BitVec BitVec::band(const BitVec& o) const
{
  BitVec r(*this);
  for (unsigned i = 0; i < num_words(); i++)
    r.words_[i] &= o.words_[i];
  return r;
}

BitVec BitVec::bor(const BitVec& o) const
{
  BitVec r(*this);
  for (unsigned i = 0; i < num_words(); i++)
    r.words_[i] |= o.words_[i];
  return r;
}

BitVec BitVec::bxor(const BitVec& o) const
{
  BitVec r(*this);
  for (unsigned i = 0; i < num_words(); i++)
    r.words_[i] ^= o.words_[i];
  return r;
}

BitVec BitVec::add(const BitVec& o) const
{
  BitVec r(*this);
  unsigned __int128 carry = 0;
  for (unsigned i = 0; i < num_words(); i++) {
    unsigned __int128 s = carry + words_[i] + o.words_[i];
    r.words_[i] = static_cast<uint64_t>(s);
    carry = s >> 64;
  }
  r.clear_top();
  return r;
}

BitVec BitVec::sub(const BitVec& o) const
{
  BitVec r(*this);
  uint64_t borrow = 0;
  for (unsigned i = 0; i < num_words(); i++) {
    uint64_t a = words_[i], b = o.words_[i];
    uint64_t d = a - b - borrow;
    borrow = (a < b) || (a - b < borrow) ? 1 : 0;
    r.words_[i] = d;
  }
  r.clear_top();
  return r;
}

BitVec BitVec::mul(const BitVec& o) const
{
  BitVec r(width_);
  unsigned n = num_words();
  for (unsigned i = 0; i < n; i++) {
    unsigned __int128 carry = 0;
    for (unsigned j = 0; i + j < n; j++) {
      unsigned __int128 t = static_cast<unsigned __int128>(words_[i]) * o.words_[j]
                          + r.words_[i + j] + carry;
      r.words_[i + j] = static_cast<uint64_t>(t);
      carry = t >> 64;
    }
  }
  r.clear_top();
  return r;
}

void BitVec::divmod(const BitVec& d, BitVec& q, BitVec& r) const
{
  // Restoring division; by construction a zero divisor yields
  // q = all-ones and r = dividend.
  uint64_t a64, d64;
  if (fits_u64(a64) && d.fits_u64(d64)) {
    if (d64 == 0) {
      q = ones(width_);
      r = *this;
    } else {
      q = BitVec(width_, a64 / d64);
      r = BitVec(width_, a64 % d64);
    }
    return;
  }
  q = BitVec(width_);
  r = BitVec(width_);
  for (int i = static_cast<int>(width_) - 1; i >= 0; i--) {
    bool top = r.msb();
    r = r.shl_by(1);
    r.set_bit(0, bit(i));
    if (top || !r.ult(d)) {
      r = r.sub(d);
      q.set_bit(i, true);
    }
  }
}

BitVec BitVec::udiv(const BitVec& o) const
{
  BitVec q, r;
  divmod(o, q, r);
  return q;
}

BitVec BitVec::urem(const BitVec& o) const
{
  BitVec q, r;
  divmod(o, q, r);
  return r;
}

BitVec BitVec::sdiv(const BitVec& o) const
{
  if (o.is_zero())
    return ones(width_);
  BitVec a = msb() ? neg() : *this;
  BitVec b = o.msb() ? o.neg() : o;
  BitVec q = a.udiv(b);
  return msb() != o.msb() ? q.neg() : q;
}

BitVec BitVec::srem(const BitVec& o) const
{
  if (o.is_zero())
    return *this;
  BitVec a = msb() ? neg() : *this;
  BitVec b = o.msb() ? o.neg() : o;
  BitVec r = a.urem(b);
  return msb() ? r.neg() : r;
}

static bool shift_amount(const BitVec& amount, unsigned width, unsigned& n)
{
  uint64_t v;
  if (!amount.fits_u64(v) || v >= width)
    return false;
  n = static_cast<unsigned>(v);
  return true;
}

BitVec BitVec::shl_by(unsigned n) const
{
  if (n >= width_)
    return BitVec(width_);
  BitVec r(width_);
  unsigned ws = n / 64, bs = n % 64;
  for (int i = static_cast<int>(num_words()) - 1; i >= static_cast<int>(ws); i--) {
    uint64_t v = words_[i - ws] << bs;
    if (bs && i - static_cast<int>(ws) - 1 >= 0)
      v |= words_[i - ws - 1] >> (64 - bs);
    r.words_[i] = v;
  }
  r.clear_top();
  return r;
}

BitVec BitVec::lshr_by(unsigned n) const
{
  if (n >= width_)
    return BitVec(width_);
  BitVec r(width_);
  unsigned ws = n / 64, bs = n % 64, nw = num_words();
  for (unsigned i = 0; i + ws < nw; i++) {
    uint64_t v = words_[i + ws] >> bs;
    if (bs && i + ws + 1 < nw)
      v |= words_[i + ws + 1] << (64 - bs);
    r.words_[i] = v;
  }
  return r;
}

BitVec BitVec::shl(const BitVec& amount) const
{
  unsigned n;
  if (!shift_amount(amount, width_, n))
    return BitVec(width_);
  return shl_by(n);
}

BitVec BitVec::lshr(const BitVec& amount) const
{
  unsigned n;
  if (!shift_amount(amount, width_, n))
    return BitVec(width_);
  return lshr_by(n);
}

BitVec BitVec::ashr(const BitVec& amount) const
{
  unsigned n;
  bool neg = msb();
  if (!shift_amount(amount, width_, n))
    return neg ? ones(width_) : BitVec(width_);
  if (!neg)
    return lshr_by(n);
  return bnot().lshr_by(n).bnot();
}

bool BitVec::ult(const BitVec& o) const
{
  for (int i = static_cast<int>(num_words()) - 1; i >= 0; i--)
    if (words_[i] != o.words_[i])
      return words_[i] < o.words_[i];
  return false;
}

bool BitVec::slt(const BitVec& o) const
{
  if (msb() != o.msb())
    return msb();
  return ult(o);
}

BitVec BitVec::extract(unsigned hi, unsigned lo) const
{
  if (hi < lo || hi >= width_)
    internal_error("BitVec extract out of range");
  BitVec s = lshr_by(lo);
  BitVec r(hi - lo + 1);
  for (unsigned i = 0; i < r.num_words(); i++)
    r.words_[i] = s.words_[i];
  r.clear_top();
  return r;
}

BitVec BitVec::concat(const BitVec& lo) const
{
  unsigned w = width_ + lo.width_;
  if (w > max_width)
    internal_error("BitVec concat exceeds maximum width");
  BitVec r(w);
  for (unsigned i = 0; i < lo.num_words(); i++)
    r.words_[i] = lo.words_[i];
  BitVec hi = zext(w).shl_by(lo.width_);
  return r.bor(hi);
}

BitVec BitVec::zext(unsigned to) const
{
  if (to < width_)
    internal_error("BitVec zext narrows");
  BitVec r(to);
  for (unsigned i = 0; i < num_words(); i++)
    r.words_[i] = words_[i];
  return r;
}

BitVec BitVec::sext(unsigned to) const
{
  BitVec r = zext(to);
  if (msb())
    for (unsigned i = width_; i < to; i++)
      r.set_bit(i, true);
  return r;
}

} // namespace c2v
