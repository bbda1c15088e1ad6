#include <stdint.h>

/*
 * 1-4-3 minifloat addition (sign, 4-bit exponent with bias 7, 3-bit
 * fraction), round to nearest even, every NaN returned as 0x7C.
 * Subnormal operands are normalized before alignment; the working
 * significand is 1.fff followed by three guard bits.
 */

#define MF_NAN 0x7Cu

static uint32_t shift_right_jam(uint32_t a, uint32_t dist)
{
  if (dist >= 31)
    return a != 0;
  return (a >> dist) | ((a & ((1u << dist) - 1)) != 0);
}

/* Unpacks a nonzero finite value: sig in [0x40, 0x7F], value sig * 2^(exp - 13). */
static void unpack_norm(uint32_t x, int32_t *exp, uint32_t *sig)
{
  uint32_t e = (x >> 3) & 0xF;
  uint32_t f = x & 7;
  if (e == 0) {
    int32_t ex = 1;
    uint32_t s = f << 3;
    while (s < 0x40) {
      s <<= 1;
      ex--;
    }
    *exp = ex;
    *sig = s;
    return;
  }
  *exp = (int32_t)e;
  *sig = (8 | f) << 3;
}

static uint32_t round_pack(uint32_t sign, int32_t exp, uint32_t sig)
{
  if (exp < 1) {
    sig = shift_right_jam(sig, (uint32_t)(1 - exp));
    exp = 0;
  }
  uint32_t low = sig & 7;
  sig >>= 3;
  if (low > 4 || (low == 4 && (sig & 1)))
    sig++;
  if (sig == 16) {
    sig = 8;
    exp++;
  }
  if (exp == 0 && sig >= 8)
    exp = 1;
  if (exp >= 15)
    return (sign << 7) | 0x78;
  return (sign << 7) | ((uint32_t)exp << 3) | (sig & 7);
}

static uint32_t mf8_add(uint32_t a, uint32_t b)
{
  uint32_t sa = a >> 7, sb = b >> 7;
  uint32_t ea = (a >> 3) & 0xF, eb = (b >> 3) & 0xF;
  if ((ea == 15 && (a & 7)) || (eb == 15 && (b & 7)))
    return MF_NAN;
  if (ea == 15) {
    if (eb == 15 && sa != sb)
      return MF_NAN;
    return a;
  }
  if (eb == 15)
    return b;
  if ((a & 0x7F) == 0) {
    if ((b & 0x7F) == 0)
      return (sa & sb) << 7;
    return b;
  }
  if ((b & 0x7F) == 0)
    return a;

  int32_t xa, xb;
  uint32_t ga, gb;
  unpack_norm(a, &xa, &ga);
  unpack_norm(b, &xb, &gb);
  if (xa < xb || (xa == xb && ga < gb)) {
    int32_t te = xa;
    xa = xb;
    xb = te;
    uint32_t tg = ga;
    ga = gb;
    gb = tg;
    uint32_t ts = sa;
    sa = sb;
    sb = ts;
  }
  gb = shift_right_jam(gb, (uint32_t)(xa - xb));
  if (sa == sb) {
    uint32_t sum = ga + gb;
    if (sum >= 0x80) {
      sum = shift_right_jam(sum, 1);
      xa++;
    }
    return round_pack(sa, xa, sum);
  }
  uint32_t diff = ga - gb;
  if (diff == 0)
    return 0;
  while (diff < 0x40) {
    diff <<= 1;
    xa--;
  }
  return round_pack(sa, xa, diff);
}

void mf8_add_norm(void)
{
  uint8_t a, b;
  C2V_SAMPLE_INPUT(uint8_t, a);
  C2V_SAMPLE_INPUT(uint8_t, b);
  uint8_t res = (uint8_t)mf8_add(a, b);
  C2V_DRIVE_OUTPUT(uint8_t, res);
}
