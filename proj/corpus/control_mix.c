#include <stdint.h>
#include <stdbool.h>

/* Structs, switch, early return, signed comparisons and a bounded loop. */

struct acc
{
  int32_t lo;
  int32_t hi;
  uint16_t count;
};

static int32_t clamp(int32_t v, int32_t lo, int32_t hi)
{
  if (v < lo)
    return lo;
  if (v > hi)
    return hi;
  return v;
}

static void step(struct acc *a, int32_t v)
{
  if (v < a->lo)
    a->lo = v;
  if (v > a->hi)
    a->hi = v;
  a->count++;
}

void control_mix(void)
{
  int32_t v;
  uint8_t mode;
  C2V_SAMPLE_INPUT(int32_t, v);
  C2V_SAMPLE_INPUT(uint8_t, mode);
  struct acc a = {0, 0, 0};
  int32_t r;
  switch (mode & 3) {
  case 0:
    r = clamp(v, -100, 100);
    break;
  case 1:
    r = -v;
    break;
  case 2:
    r = v / 3;
    break;
  default:
    r = v >> 2;
  }
  for (int i = 0; i < 5; i++) {
    if (i == 3 && (mode & 4))
      break;
    step(&a, r + i * 7);
  }
  bool pos = r > 0;
  int32_t span = a.hi - a.lo;
  uint32_t res = (uint32_t)span ^ ((uint32_t)a.count << 24) ^ (pos ? 0x80000000u : 0);
  C2V_DRIVE_OUTPUT(uint32_t, res);
}
