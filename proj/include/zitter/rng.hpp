#pragma once
#include <array>
#include <cstdint>

namespace zitter::rng {

// Philox 4x32-10 counter-based generator (Salmon et al. 2011). Pure function
// of (counter, key): any (path, step, slot) substream can be addressed in
// O(1), which makes ensemble output independent of thread scheduling.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Uniform in (0,1]: 53 bits assembled from two 32-bit words, never zero so a
// log() downstream is safe.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

// Standard normal draws addressed by (seed, stream, step, slot). Each
// (step, slot/2) block costs one philox evaluation producing a Box-Muller
// pair; slot picks the element.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::array<double, 2> pair(std::uint32_t step, std::uint32_t block) const;
  double normal(std::uint32_t step, std::uint32_t slot) const {
    return pair(step, slot / 2)[slot % 2];
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

}  // namespace zitter::rng
