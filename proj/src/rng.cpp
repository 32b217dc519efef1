#include "zitter/rng.hpp"

#include <cmath>

#include "zitter/constants.hpp"

namespace zitter::rng {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t mant =
      (static_cast<std::uint64_t>(hi >> 6) << 27) | (lo >> 5);  // 53 bits
  return (static_cast<double>(mant) + 1.0) * 0x1p-53;
}

std::array<double, 2> NormalStream::pair(std::uint32_t step,
                                         std::uint32_t block) const {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32), step, block};
  const auto w = philox4x32(ctr, key_);
  const double u1 = uniform_open(w[0], w[1]);
  const double u2 = uniform_open(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace zitter::rng
