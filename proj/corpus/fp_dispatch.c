#include <stdint.h>

/*
 * Two-pass transform selected through a table of function-pointer pairs.
 * The asserts state what each pass must have produced.
 */

typedef uint32_t (*transform_fn)(uint32_t);

struct pass_pair
{
  transform_fn first;
  transform_fn second;
};

static uint32_t low_byte(uint32_t v) { return v & 0xFF; }
static uint32_t low_nibbles(uint32_t v) { return v & 0x0F0F; }
static uint32_t triple(uint32_t v) { return v * 3; }
static uint32_t to_upper_half(uint32_t v) { return (v << 16) | (v >> 16); }

void fp_dispatch(void)
{
  uint32_t x;
  uint8_t sel;
  C2V_SAMPLE_INPUT(uint32_t, x);
  C2V_SAMPLE_INPUT(uint8_t, sel);

  struct pass_pair passes[3] = {
    {low_byte, triple},
    {low_nibbles, to_upper_half},
    {low_byte, to_upper_half},
  };
  uint32_t k = sel % 3;
  transform_fn first = passes[k].first;
  transform_fn second = passes[k].second;

  uint32_t mid = first(x);
  assert(mid <= 0x0F0F);
  assert((mid & 0xFFFFF000u) == 0);

  uint32_t res = second(mid);
  assert(res <= 0x0F0F0000u || res == mid * 3);
  C2V_DRIVE_OUTPUT(uint32_t, res);
}
