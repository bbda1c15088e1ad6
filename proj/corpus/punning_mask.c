#include <stdint.h>

/* Clear the exponent's top bit and sign of a float through an int view. */
void punning_mask(void)
{
  uint32_t xin;
  C2V_SAMPLE_INPUT(uint32_t, xin);
  float x;
  uint32_t *bits = (uint32_t *)&x;
  *bits = xin;
  int *xp = (int *)&x;
  *xp = *xp & 0x003fffff;
  uint32_t res = *(uint32_t *)&x;
  C2V_DRIVE_OUTPUT(uint32_t, res);
}
