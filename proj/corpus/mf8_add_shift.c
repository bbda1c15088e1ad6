#include <stdint.h>

/*
 * 1-4-3 minifloat addition computed exactly in fixed point (units of
 * 2^-9, the smallest subnormal) and normalized afterwards with a single
 * corrective shift; round to nearest even, NaN results are 0x7C.
 */

static int32_t to_fixed(uint32_t x)
{
  uint32_t e = (x >> 3) & 0xF;
  uint32_t f = x & 7;
  int32_t m;
  if (e == 0)
    m = (int32_t)f;
  else
    m = (int32_t)((8 | f) << (e - 1));
  return (x & 0x80) ? -m : m;
}

static uint32_t msb_index(uint32_t v)
{
  uint32_t p = 0;
  for (uint32_t i = 0; i < 18; i++)
    if ((v >> i) & 1)
      p = i;
  return p;
}

static uint32_t from_fixed(uint32_t sign, uint32_t mag)
{
  uint32_t p = msb_index(mag);
  if (p <= 3)
    return (sign << 7) | mag; /* exact: subnormal, or exponent 1 */
  uint32_t shift = p - 3;
  uint32_t keep = mag >> shift;
  uint32_t rem = mag & ((1u << shift) - 1);
  uint32_t half = 1u << (shift - 1);
  if (rem > half || (rem == half && (keep & 1)))
    keep++;
  if (keep == 16) {
    keep = 8;
    shift++;
  }
  uint32_t e = shift + 1;
  if (e >= 15)
    return (sign << 7) | 0x78;
  return (sign << 7) | (e << 3) | (keep & 7);
}

void mf8_add_shift(void)
{
  uint8_t a, b;
  C2V_SAMPLE_INPUT(uint8_t, a);
  C2V_SAMPLE_INPUT(uint8_t, b);
  uint32_t ea = (a >> 3) & 0xF, eb = (b >> 3) & 0xF;
  uint32_t r;
  if ((ea == 15 && (a & 7)) || (eb == 15 && (b & 7)))
    r = 0x7C;
  else if (ea == 15)
    r = (eb == 15 && ((a ^ b) & 0x80)) ? 0x7C : a;
  else if (eb == 15)
    r = b;
  else {
    int32_t s = to_fixed(a) + to_fixed(b);
    if (s == 0)
      r = (a & b & 0x80);
    else if (s < 0)
      r = from_fixed(1, (uint32_t)(-s));
    else
      r = from_fixed(0, (uint32_t)s);
  }
  uint8_t res = (uint8_t)r;
  C2V_DRIVE_OUTPUT(uint8_t, res);
}
