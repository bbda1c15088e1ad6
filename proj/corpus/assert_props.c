#include <stdint.h>

/* Arithmetic identities that hold for every input. */
void assert_props(void)
{
  uint32_t x;
  C2V_SAMPLE_INPUT(uint32_t, x);
  assert(x + 1 != x);
  assert(x * 2 == x << 1);
  assert((x ^ x) == 0);
  uint32_t y = x - (x & 0xFF) + (x & 0xFF);
  assert(y == x);
  C2V_DRIVE_OUTPUT(uint32_t, y);
}
