#include <stdint.h>

/* Narrow unsigned arithmetic wraps modulo 2^8. */
void wrap_u8(void)
{
  uint8_t a, b;
  C2V_SAMPLE_INPUT(uint8_t, a);
  C2V_SAMPLE_INPUT(uint8_t, b);
  uint8_t c = 200 + 100;
  uint8_t sum = a + b + c;
  uint8_t prod = a * b;
  int8_t neg = (int8_t)(a - b);
  int16_t wide = neg;
  uint16_t out = (uint16_t)((uint16_t)wide ^ (uint16_t)(sum << 8)) + prod;
  C2V_DRIVE_OUTPUT(uint8_t, c);
  C2V_DRIVE_OUTPUT(uint16_t, out);
}
