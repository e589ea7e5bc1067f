#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace rrd {

// Philox4x32-10 counter-based generator. The key is the seed, the upper half
// of the 128-bit counter is the stream id, the lower half counts blocks.
class Philox {
 public:
  static constexpr const char* kName = "philox4x32-10/v1";

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, bound) without modulo bias; bound >= 1.
  std::uint64_t uniform_int(std::uint64_t bound);
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Standard normal (Marsaglia polar method).
  double normal();

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = uniform_int(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Deterministic seed derivation: mixes a base seed with a path of labels
// (experiment, trial, module, ...) through splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);
std::uint64_t label_hash(const char* label);

}  // namespace rrd
