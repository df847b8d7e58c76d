#pragma once

#include <array>
#include <cstdint>

namespace stcov {

/* Philox4x32-10 counter-based generator.  A (seed, counter) pair fully
 * determines each 128-bit block, so streams are reproducible bit-for-bit
 * regardless of call order or platform. */
std::array<std::uint32_t, 4> philox4x32(std::uint64_t counter, std::uint64_t key);

/* Deterministic stream of standard normal deviates derived from a Philox
 * stream via Box-Muller; one 128-bit block yields two deviates. */
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}
  double next();

 private:
  std::uint64_t seed_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/* Uniform deviate in [0, 1) from block index `i` of the keyed stream (two
 * independent 53-bit doubles per block; `lane` selects which). */
double uniform01(std::uint64_t seed, std::uint64_t i, int lane);

}  // namespace stcov
