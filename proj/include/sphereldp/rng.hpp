#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <boost/math/special_functions/erf.hpp>

namespace sphereldp {

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Philox4x32-10 (Salmon et al. 2011).
class Philox4x32 {
 public:
  using block_type = std::array<std::uint32_t, 4>;

  static block_type generate(block_type ctr, std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// Stateless addressing: draw k of (seed, stream) is a pure function of k.
class CounterRng {
 public:
  explicit CounterRng(RngSeed s, std::uint64_t start = 0) : s_(s), next_(start) {}

  Philox4x32::block_type block(std::uint64_t index) const {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(s_.stream), static_cast<std::uint32_t>(s_.stream >> 32)},
        {static_cast<std::uint32_t>(s_.seed), static_cast<std::uint32_t>(s_.seed >> 32)});
  }

  // Uniform on the open interval (0,1) with 53 random bits.
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    std::uint64_t b = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
  }

  static double normal_quantile(double u) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u); }

  double uniform_at(std::uint64_t index) const {
    auto b = block(index);
    return to_unit(b[0], b[1]);
  }
  double normal_at(std::uint64_t index) const { return normal_quantile(uniform_at(index)); }

  // Sequential draws, two uniforms per block.
  double uniform() {
    if (!have_spare_) {
      auto b = block(next_++);
      spare_ = to_unit(b[2], b[3]);
      have_spare_ = true;
      return to_unit(b[0], b[1]);
    }
    have_spare_ = false;
    return spare_;
  }
  double normal() { return normal_quantile(uniform()); }
  double exponential() { return -std::log(uniform()); }

  RngSeed seed() const { return s_; }

 private:
  RngSeed s_;
  std::uint64_t next_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace sphereldp
