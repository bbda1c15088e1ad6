#include <stdint.h>

/* Signed and unsigned division, remainder and shifts on raw inputs. */
void div_mod(void)
{
  int32_t x, y;
  uint32_t u, s;
  C2V_SAMPLE_INPUT(int32_t, x);
  C2V_SAMPLE_INPUT(int32_t, y);
  C2V_SAMPLE_INPUT(uint32_t, u);
  C2V_SAMPLE_INPUT(uint32_t, s);
  int32_t q = x / y;
  int32_t r = x % y;
  uint32_t uq = u / (s | 1);
  uint32_t shl = u << (s & 31);
  int32_t sar = x >> s;
  uint32_t res = (uint32_t)q ^ (uint32_t)r ^ uq ^ shl ^ (uint32_t)sar;
  C2V_DRIVE_OUTPUT(uint32_t, res);
}
