#include <stdint.h>

/* Fails for every x >= 100. */
void assert_range(void)
{
  uint32_t x;
  C2V_SAMPLE_INPUT(uint32_t, x);
  assert(x < 100);
  uint32_t y = x * 7;
  C2V_DRIVE_OUTPUT(uint32_t, y);
}
