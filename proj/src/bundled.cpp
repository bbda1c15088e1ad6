#include <map>

#include "c2v/preprocess.hpp"

namespace c2v {

namespace {

const char* const stdint_h = R"(#ifndef C2V_STDINT_H
#define C2V_STDINT_H
typedef signed char int8_t;
typedef unsigned char uint8_t;
typedef short int16_t;
typedef unsigned short uint16_t;
typedef int int32_t;
typedef unsigned int uint32_t;
typedef long int64_t;
typedef unsigned long uint64_t;
typedef long intptr_t;
typedef unsigned long uintptr_t;
#define INT8_MIN (-128)
#define INT8_MAX 127
#define UINT8_MAX 255
#define INT16_MIN (-32768)
#define INT16_MAX 32767
#define UINT16_MAX 65535
#define INT32_MIN (-2147483647 - 1)
#define INT32_MAX 2147483647
#define UINT32_MAX 0xFFFFFFFFu
#define INT64_MAX 0x7FFFFFFFFFFFFFFFL
#define INT64_MIN (-INT64_MAX - 1)
#define UINT64_MAX 0xFFFFFFFFFFFFFFFFUL
#endif
)";

const char* const stdbool_h = R"(#ifndef C2V_STDBOOL_H
#define C2V_STDBOOL_H
#define bool _Bool
#define true 1
#define false 0
#endif
)";

const char* const stddef_h = R"(#ifndef C2V_STDDEF_H
#define C2V_STDDEF_H
typedef unsigned long size_t;
typedef long ptrdiff_t;
#define NULL ((void *)0)
#endif
)";

const char* const string_h = R"(#ifndef C2V_STRING_H
#define C2V_STRING_H
#include <stddef.h>
static void *memcpy(void *dst, const void *src, size_t n)
{
  unsigned char *d = dst;
  const unsigned char *s = src;
  for (size_t i = 0; i < n; i++)
    d[i] = s[i];
  return dst;
}
static void *memset(void *dst, int c, size_t n)
{
  unsigned char *d = dst;
  for (size_t i = 0; i < n; i++)
    d[i] = (unsigned char)c;
  return dst;
}
#endif
)";

// Wrapper types in the style of Berkeley SoftFloat's interface; the
// arithmetic itself lives in the prelude.
const char* const softfloat_h = R"(#ifndef C2V_SOFTFLOAT_H
#define C2V_SOFTFLOAT_H
#include <stdint.h>
#include <stdbool.h>
typedef struct { uint32_t v; } float32_t;
static float32_t f32_add(float32_t a, float32_t b)
{
  float32_t z;
  z.v = __c2v_f32_add(a.v, b.v);
  return z;
}
static float32_t f32_sub(float32_t a, float32_t b)
{
  float32_t z;
  z.v = __c2v_f32_sub(a.v, b.v);
  return z;
}
static float32_t f32_mul(float32_t a, float32_t b)
{
  float32_t z;
  z.v = __c2v_f32_mul(a.v, b.v);
  return z;
}
static bool f32_eq(float32_t a, float32_t b) { return __c2v_f32_eq(a.v, b.v); }
static bool f32_lt(float32_t a, float32_t b) { return __c2v_f32_lt(a.v, b.v); }
static bool f32_le(float32_t a, float32_t b) { return __c2v_f32_le(a.v, b.v); }
static float32_t i32_to_f32(int32_t a)
{
  float32_t z;
  z.v = __c2v_i32_to_f32(a);
  return z;
}
static float32_t ui32_to_f32(uint32_t a)
{
  float32_t z;
  z.v = __c2v_u32_to_f32(a);
  return z;
}
static int32_t f32_to_i32_r_minMag(float32_t a, bool exact) { return __c2v_f32_to_i32(a.v); }
static uint32_t f32_to_ui32_r_minMag(float32_t a, bool exact) { return __c2v_f32_to_u32(a.v); }
#endif
)";

// IEEE-754 binary32 under round-to-nearest-even. Every NaN result is the
// canonical quiet NaN 0x7FC00000. Significands carry 7 guard bits below
// the rounding position; the implicit bit sits at bit 30 before packing.
// Loop-free so that symbolic execution needs no unwinding.
const char* const prelude_c = R"(#include <stdint.h>

static uint32_t __c2v_pack_f32(uint32_t sign, uint32_t exp, uint32_t sig)
{
  return (sign << 31) + (exp << 23) + sig;
}

static uint32_t __c2v_clz32(uint32_t a)
{
  uint32_t n = 0;
  if (a == 0)
    return 32;
  if (a < 0x10000u) {
    n = n + 16;
    a = a << 16;
  }
  if (a < 0x1000000u) {
    n = n + 8;
    a = a << 8;
  }
  if (a < 0x10000000u) {
    n = n + 4;
    a = a << 4;
  }
  if (a < 0x40000000u) {
    n = n + 2;
    a = a << 2;
  }
  if (a < 0x80000000u)
    n = n + 1;
  return n;
}

/* Callers guarantee dist >= 1. */
static uint32_t __c2v_shift_right_jam32(uint32_t a, uint32_t dist)
{
  if (dist < 31)
    return (a >> dist) | (uint32_t)((uint32_t)(a << ((0u - dist) & 31)) != 0);
  return (uint32_t)(a != 0);
}

static int __c2v_f32_is_nan(uint32_t a)
{
  return ((a >> 23) & 0xFF) == 0xFF && (a & 0x007FFFFF) != 0;
}

static uint32_t __c2v_round_pack_f32(uint32_t sign, int32_t exp, uint32_t sig)
{
  uint32_t round_bits = sig & 0x7F;
  if (0xFD <= (uint32_t)exp) {
    if (exp < 0) {
      sig = __c2v_shift_right_jam32(sig, (uint32_t)(-exp));
      exp = 0;
      round_bits = sig & 0x7F;
    } else if (0xFD < exp || 0x80000000u <= sig + 0x40) {
      return __c2v_pack_f32(sign, 0xFF, 0);
    }
  }
  sig = (sig + 0x40) >> 7;
  if (round_bits == 0x40)
    sig = sig & ~1u;
  if (sig == 0)
    exp = 0;
  return __c2v_pack_f32(sign, (uint32_t)exp, sig);
}

static uint32_t __c2v_norm_round_pack_f32(uint32_t sign, int32_t exp, uint32_t sig)
{
  int32_t shift = (int32_t)__c2v_clz32(sig) - 1;
  exp = exp - shift;
  if (7 <= shift && (uint32_t)exp < 0xFD) {
    if (sig == 0)
      exp = 0;
    return __c2v_pack_f32(sign, (uint32_t)exp, sig << (shift - 7));
  }
  return __c2v_round_pack_f32(sign, exp, sig << shift);
}

static uint32_t __c2v_add_mags_f32(uint32_t a, uint32_t b)
{
  int32_t exp_a = (int32_t)((a >> 23) & 0xFF);
  uint32_t sig_a = a & 0x007FFFFF;
  int32_t exp_b = (int32_t)((b >> 23) & 0xFF);
  uint32_t sig_b = b & 0x007FFFFF;
  int32_t exp_diff = exp_a - exp_b;
  uint32_t sign_z = a >> 31;
  int32_t exp_z;
  uint32_t sig_z;
  if (exp_diff == 0) {
    if (exp_a == 0)
      return a + sig_b;
    if (exp_a == 0xFF) {
      if (sig_a | sig_b)
        return 0x7FC00000;
      return a;
    }
    exp_z = exp_a;
    sig_z = 0x01000000 + sig_a + sig_b;
    if ((sig_z & 1) == 0 && exp_z < 0xFE)
      return __c2v_pack_f32(sign_z, (uint32_t)exp_z, sig_z >> 1);
    sig_z = sig_z << 6;
  } else {
    sig_a = sig_a << 6;
    sig_b = sig_b << 6;
    if (exp_diff < 0) {
      if (exp_b == 0xFF) {
        if (sig_b)
          return 0x7FC00000;
        return __c2v_pack_f32(sign_z, 0xFF, 0);
      }
      exp_z = exp_b;
      sig_a = sig_a + (exp_a ? 0x20000000u : sig_a);
      sig_a = __c2v_shift_right_jam32(sig_a, (uint32_t)(-exp_diff));
    } else {
      if (exp_a == 0xFF) {
        if (sig_a)
          return 0x7FC00000;
        return a;
      }
      exp_z = exp_a;
      sig_b = sig_b + (exp_b ? 0x20000000u : sig_b);
      sig_b = __c2v_shift_right_jam32(sig_b, (uint32_t)exp_diff);
    }
    sig_z = 0x20000000 + sig_a + sig_b;
    if (sig_z < 0x40000000) {
      exp_z = exp_z - 1;
      sig_z = sig_z << 1;
    }
  }
  return __c2v_round_pack_f32(sign_z, exp_z, sig_z);
}

static uint32_t __c2v_sub_mags_f32(uint32_t a, uint32_t b)
{
  int32_t exp_a = (int32_t)((a >> 23) & 0xFF);
  uint32_t sig_a = a & 0x007FFFFF;
  int32_t exp_b = (int32_t)((b >> 23) & 0xFF);
  uint32_t sig_b = b & 0x007FFFFF;
  int32_t exp_diff = exp_a - exp_b;
  uint32_t sign_z = a >> 31;
  if (exp_diff == 0) {
    if (exp_a == 0xFF)
      return 0x7FC00000;
    int32_t sig_diff = (int32_t)sig_a - (int32_t)sig_b;
    if (sig_diff == 0)
      return 0;
    if (exp_a)
      exp_a = exp_a - 1;
    if (sig_diff < 0) {
      sign_z = sign_z ^ 1;
      sig_diff = -sig_diff;
    }
    int32_t shift = (int32_t)__c2v_clz32((uint32_t)sig_diff) - 8;
    int32_t exp_z = exp_a - shift;
    if (exp_z < 0) {
      shift = exp_a;
      exp_z = 0;
    }
    return __c2v_pack_f32(sign_z, (uint32_t)exp_z, (uint32_t)sig_diff << shift);
  }
  sig_a = sig_a << 7;
  sig_b = sig_b << 7;
  int32_t exp_z;
  uint32_t sig_x;
  uint32_t sig_y;
  if (exp_diff < 0) {
    sign_z = sign_z ^ 1;
    if (exp_b == 0xFF) {
      if (sig_b)
        return 0x7FC00000;
      return __c2v_pack_f32(sign_z, 0xFF, 0);
    }
    exp_z = exp_b - 1;
    sig_x = sig_b | 0x40000000;
    sig_y = sig_a + (exp_a ? 0x40000000u : sig_a);
    exp_diff = -exp_diff;
  } else {
    if (exp_a == 0xFF) {
      if (sig_a)
        return 0x7FC00000;
      return a;
    }
    exp_z = exp_a - 1;
    sig_x = sig_a | 0x40000000;
    sig_y = sig_b + (exp_b ? 0x40000000u : sig_b);
  }
  return __c2v_norm_round_pack_f32(sign_z, exp_z,
                                   sig_x - __c2v_shift_right_jam32(sig_y, (uint32_t)exp_diff));
}

uint32_t __c2v_f32_add(uint32_t a, uint32_t b)
{
  if (__c2v_f32_is_nan(a) || __c2v_f32_is_nan(b))
    return 0x7FC00000;
  if ((a ^ b) >> 31)
    return __c2v_sub_mags_f32(a, b);
  return __c2v_add_mags_f32(a, b);
}

uint32_t __c2v_f32_sub(uint32_t a, uint32_t b)
{
  if (__c2v_f32_is_nan(a) || __c2v_f32_is_nan(b))
    return 0x7FC00000;
  if ((a ^ b) >> 31)
    return __c2v_add_mags_f32(a, b);
  return __c2v_sub_mags_f32(a, b);
}

uint32_t __c2v_f32_mul(uint32_t a, uint32_t b)
{
  uint32_t sign_z = (a ^ b) >> 31;
  int32_t exp_a = (int32_t)((a >> 23) & 0xFF);
  uint32_t sig_a = a & 0x007FFFFF;
  int32_t exp_b = (int32_t)((b >> 23) & 0xFF);
  uint32_t sig_b = b & 0x007FFFFF;
  if (exp_a == 0xFF) {
    if (sig_a || (exp_b == 0xFF && sig_b))
      return 0x7FC00000;
    if (((uint32_t)exp_b | sig_b) == 0)
      return 0x7FC00000;
    return __c2v_pack_f32(sign_z, 0xFF, 0);
  }
  if (exp_b == 0xFF) {
    if (sig_b)
      return 0x7FC00000;
    if (((uint32_t)exp_a | sig_a) == 0)
      return 0x7FC00000;
    return __c2v_pack_f32(sign_z, 0xFF, 0);
  }
  if (exp_a == 0) {
    if (sig_a == 0)
      return __c2v_pack_f32(sign_z, 0, 0);
    int32_t shift_a = (int32_t)__c2v_clz32(sig_a) - 8;
    exp_a = 1 - shift_a;
    sig_a = sig_a << shift_a;
  }
  if (exp_b == 0) {
    if (sig_b == 0)
      return __c2v_pack_f32(sign_z, 0, 0);
    int32_t shift_b = (int32_t)__c2v_clz32(sig_b) - 8;
    exp_b = 1 - shift_b;
    sig_b = sig_b << shift_b;
  }
  int32_t exp_z = exp_a + exp_b - 0x7F;
  sig_a = (sig_a | 0x00800000) << 7;
  sig_b = (sig_b | 0x00800000) << 8;
  uint64_t prod = (uint64_t)sig_a * (uint64_t)sig_b;
  uint32_t sig_z = (uint32_t)(prod >> 32) | (uint32_t)((uint32_t)prod != 0);
  if (sig_z < 0x40000000) {
    exp_z = exp_z - 1;
    sig_z = sig_z << 1;
  }
  return __c2v_round_pack_f32(sign_z, exp_z, sig_z);
}

uint32_t __c2v_i32_to_f32(int32_t a)
{
  uint32_t sign = (uint32_t)a >> 31;
  if (((uint32_t)a & 0x7FFFFFFF) == 0)
    return sign ? 0xCF000000 : 0;
  uint32_t abs_a = sign ? 0u - (uint32_t)a : (uint32_t)a;
  return __c2v_norm_round_pack_f32(sign, 0x9C, abs_a);
}

uint32_t __c2v_u32_to_f32(uint32_t a)
{
  if (a == 0)
    return 0;
  if (a & 0x80000000u)
    return __c2v_round_pack_f32(0, 0x9D, (a >> 1) | (a & 1));
  return __c2v_norm_round_pack_f32(0, 0x9C, a);
}

/* Truncates toward zero; NaN and out-of-range inputs give 0x80000000. */
int32_t __c2v_f32_to_i32(uint32_t a)
{
  int32_t exp = (int32_t)((a >> 23) & 0xFF);
  uint32_t sig = a & 0x007FFFFF;
  int32_t shift = 0x9E - exp;
  if (32 <= shift)
    return 0;
  if (shift <= 0)
    return (int32_t)0x80000000u;
  uint32_t abs_z = ((sig | 0x00800000) << 8) >> shift;
  if (a >> 31)
    return -(int32_t)abs_z;
  return (int32_t)abs_z;
}

/* Truncates toward zero; NaN, negative and out-of-range inputs give 0xFFFFFFFF. */
uint32_t __c2v_f32_to_u32(uint32_t a)
{
  int32_t exp = (int32_t)((a >> 23) & 0xFF);
  uint32_t sig = a & 0x007FFFFF;
  int32_t shift = 0x9E - exp;
  if (32 <= shift)
    return 0;
  if (a >> 31)
    return 0xFFFFFFFFu;
  if (shift < 0)
    return 0xFFFFFFFFu;
  return ((sig | 0x00800000) << 8) >> shift;
}

int __c2v_f32_eq(uint32_t a, uint32_t b)
{
  if (__c2v_f32_is_nan(a) || __c2v_f32_is_nan(b))
    return 0;
  return a == b || ((a | b) << 1) == 0;
}

int __c2v_f32_lt(uint32_t a, uint32_t b)
{
  if (__c2v_f32_is_nan(a) || __c2v_f32_is_nan(b))
    return 0;
  uint32_t sign_a = a >> 31;
  uint32_t sign_b = b >> 31;
  if (sign_a != sign_b)
    return sign_a && ((a | b) << 1) != 0;
  return a != b && (sign_a ^ (a < b));
}

int __c2v_f32_le(uint32_t a, uint32_t b)
{
  if (__c2v_f32_is_nan(a) || __c2v_f32_is_nan(b))
    return 0;
  uint32_t sign_a = a >> 31;
  uint32_t sign_b = b >> 31;
  if (sign_a != sign_b)
    return sign_a || ((a | b) << 1) == 0;
  return a == b || (sign_a ^ (a < b));
}
)";

} // namespace

const std::string* bundled_header(const std::string& name)
{
  static const std::map<std::string, std::string> headers = {
    {"stdint.h", stdint_h},   {"stdbool.h", stdbool_h},     {"stddef.h", stddef_h},
    {"string.h", string_h},   {"assert.h", ""},             {"SoftFloat.h", softfloat_h},
    {"softfloat.h", softfloat_h},
  };
  auto it = headers.find(name);
  return it == headers.end() ? nullptr : &it->second;
}

const std::string& softfloat_prelude()
{
  static const std::string text = prelude_c;
  return text;
}

} // namespace c2v
