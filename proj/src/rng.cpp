#include "stcov/rng.hpp"

#include <cmath>

namespace stcov {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return static_cast<double>(bits >> 11) * 0x1p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t counter, std::uint64_t key) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      0u, 0u};
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

double uniform01(std::uint64_t seed, std::uint64_t i, int lane) {
  const auto blk = philox4x32(i, seed);
  return lane == 0 ? to_unit(blk[0], blk[1]) : to_unit(blk[2], blk[3]);
}

double NormalStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const auto blk = philox4x32(block_++, seed_);
  /* Offset into (0,1) so log never sees zero. */
  const double u1 = to_unit(blk[0], blk[1]) + 0x1p-54;
  const double u2 = to_unit(blk[2], blk[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.28318530717958647693 * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

}  // namespace stcov
