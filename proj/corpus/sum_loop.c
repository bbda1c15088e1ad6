#include <stdint.h>

void sum_loop(void)
{
  uint32_t s = 0;
  for (uint32_t i = 0; i < 4; i++)
    s += i;
  C2V_DRIVE_OUTPUT(uint32_t, s);
}
