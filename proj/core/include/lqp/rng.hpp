#pragma once

#include <array>
#include <cstdint>

namespace lqp {

/// Philox4x32-10 counter-based generator.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key);
};

/// Deterministic stream for one Monte Carlo sample: counter = (index, block), key = seed.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqp
