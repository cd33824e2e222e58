#pragma once

#include <array>
#include <cstdint>

namespace culturefms {

/// Advances a splitmix64 state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seedable random stream backed by xoshiro256** (Blackman & Vigna).
///
/// The 256-bit state is filled from the 64-bit seed by four successive
/// splitmix64 outputs. Only fixed-width integer arithmetic is used, so a
/// seed produces the same sequence on every platform and compiler.
///
/// uniform_int(n) rejects raw words below 2^64 mod n and returns x mod n.
/// uniform_real() takes the top 53 bits of one word and scales by 2^-53.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform integer in [0, n). Throws ContractError when n == 0.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Uniform real in [0, 1).
  double uniform_real() noexcept;

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace culturefms
