#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace c2v {

inline constexpr unsigned max_width = 512;

// Fixed-width two's-complement bit pattern, 1..512 bits. Bits above the
// width are kept zero so equality and hashing can compare words directly.
class BitVec
{
public:
  static constexpr unsigned max_words = max_width / 64;

  BitVec() = default;
  explicit BitVec(unsigned width, uint64_t value = 0);

  static BitVec ones(unsigned width);
  static BitVec from_hex(unsigned width, std::string_view hex);

  unsigned width() const { return width_; }
  unsigned num_words() const { return (width_ + 63) / 64; }
  uint64_t word(unsigned i) const { return words_[i]; }
  uint64_t to_u64() const { return words_[0]; }
  int64_t to_i64() const;
  bool bit(unsigned i) const { return (words_[i / 64] >> (i % 64)) & 1; }
  void set_bit(unsigned i, bool v);
  void set_word(unsigned i, uint64_t v);

  bool is_zero() const;
  bool is_ones() const;
  bool msb() const { return bit(width_ - 1); }
  // True if the value fits in 64 bits; `out` receives it.
  bool fits_u64(uint64_t& out) const;

  std::string to_hex() const; // full-width, lower-case, no prefix
  size_t hash() const;

  friend bool operator==(const BitVec& a, const BitVec& b);

  BitVec bnot() const;
  BitVec neg() const;
  BitVec band(const BitVec& o) const;
  BitVec bor(const BitVec& o) const;
  BitVec bxor(const BitVec& o) const;
  BitVec add(const BitVec& o) const;
  BitVec sub(const BitVec& o) const;
  BitVec mul(const BitVec& o) const;
  BitVec udiv(const BitVec& o) const;
  BitVec urem(const BitVec& o) const;
  BitVec sdiv(const BitVec& o) const;
  BitVec srem(const BitVec& o) const;
  BitVec shl(const BitVec& amount) const;
  BitVec lshr(const BitVec& amount) const;
  BitVec ashr(const BitVec& amount) const;
  bool eq(const BitVec& o) const { return *this == o; }
  bool ult(const BitVec& o) const;
  bool ule(const BitVec& o) const { return !o.ult(*this); }
  bool slt(const BitVec& o) const;
  bool sle(const BitVec& o) const { return !o.slt(*this); }
  BitVec extract(unsigned hi, unsigned lo) const;
  BitVec concat(const BitVec& lo) const; // *this is the high part
  BitVec zext(unsigned to) const;
  BitVec sext(unsigned to) const;

  BitVec shl_by(unsigned n) const;
  BitVec lshr_by(unsigned n) const;

private:
  void clear_top();
  void divmod(const BitVec& d, BitVec& q, BitVec& r) const;

  unsigned width_ = 1;
  std::array<uint64_t, max_words> words_{};
};

} // namespace c2v
