#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bessel_lab {

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Counter-based stream: (seed, stream) selects the key and the high counter words, so
// every pair gives an independent, reproducible sequence.  Satisfies
// UniformRandomBitGenerator for use with <random> distributions.
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // uniform on (0, 1), 53 bits
  double uniform();
  double normal();
  RngStream split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();
  std::uint64_t seed_, stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bessel_lab
