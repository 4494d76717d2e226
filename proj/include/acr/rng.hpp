#pragma once

// Philox4x64-10 counter-based generator (Salmon et al., Random123). A stream is
// identified by its 128-bit key; here the key is (master seed, run index), so
// every run owns an independent stream regardless of scheduling order.

#include <array>
#include <cstdint>
#include <limits>

namespace acr {

class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  /// The raw 10-round bijection.
  static Counter block(Counter ctr, Key key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      buffer_ = block(counter_, key_);
      increment();
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1) with 52 random bits, never an endpoint.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
  }
  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// Standard Cauchy by inverse CDF tan(pi (u - 1/2)).
  double cauchy() noexcept;

 private:
  void increment() noexcept {
    for (auto& c : counter_)
      if (++c != 0) break;
  }

  Key key_;
  Counter counter_{};
  Counter buffer_{};
  int pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

using Rng = Philox4x64;

}  // namespace acr
