#include <stdint.h>

/* Table lookup with a masked index and an unchecked one. */
void array_index(void)
{
  uint8_t idx;
  C2V_SAMPLE_INPUT(uint8_t, idx);
  uint8_t table[8] = {3, 1, 4, 1, 5, 9, 2, 6};
  uint8_t total = 0;
  for (int i = 0; i < 8; i++)
    total += table[i];
  uint8_t safe = table[idx & 7];
  uint8_t raw = table[idx];
  table[idx & 3] = safe;
  uint32_t res = ((uint32_t)total << 16) | ((uint32_t)raw << 8) | table[1];
  C2V_DRIVE_OUTPUT(uint32_t, res);
}
