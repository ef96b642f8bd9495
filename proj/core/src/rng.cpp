#include "lqp/rng.hpp"

#include <cmath>
#include <numbers>

namespace lqp {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, index_(index) {}

void SampleStream::refill() {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index_),
                                static_cast<std::uint32_t>(index_ >> 32),
                                static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32)};
  buf_ = Philox4x32::generate(ctr, key_);
  ++block_;
  used_ = 0;
}

double SampleStream::uniform() {
  if (used_ > 2) refill();
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(buf_[used_]) << 32 | buf_[used_ + 1]) >> 11;
  used_ += 2;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double SampleStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace lqp
