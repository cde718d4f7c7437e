#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace wrec {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline constexpr std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                            std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    detail::mulhilo32(kMul0, ctr[0], hi0, lo0);
    detail::mulhilo32(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/**
 * Counter-based random stream.
 *
 * The Philox key is the 64-bit master seed and the upper half of the 128-bit
 * counter is the stream index, so a stream is fully determined by
 * (master_seed, stream_index) and the number of values already drawn.
 * Distinct stream indices address disjoint counter ranges.
 *
 * Satisfies std::uniform_random_bit_generator. Single owner; copy it to fork
 * an identical sequence.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  constexpr RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : seed_(master_seed), stream_(stream_index) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t master_seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream_index() const noexcept { return stream_; }
  /// Number of 64-bit words consumed so far.
  constexpr std::uint64_t position() const noexcept { return 2 * block_ - have_; }

  constexpr result_type operator()() noexcept {
    if (have_ == 0) refill();
    --have_;
    return buffer_[1 - have_];
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Unit-rate exponential by inversion.
  double exponential() noexcept { return -std::log(uniform()); }

  /// Standard normal via Box-Muller; always consumes exactly two words.
  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  /// Gamma(shape, scale=1) by Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = 0.0, v = 0.0;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Chi-square with the given degrees of freedom, as Gamma(df/2, 2).
  double chi_square(double df) noexcept { return 2.0 * gamma(0.5 * df); }

  /// Independent child stream. The child key is derived from (seed, stream),
  /// so children do not depend on how far this stream has advanced.
  constexpr RngStream split(std::uint64_t child) const noexcept {
    return RngStream(detail::splitmix64(seed_ ^ detail::splitmix64(stream_ + 0x5851F42D4C957F2DULL)), child);
  }

  friend constexpr bool operator==(const RngStream& a, const RngStream& b) noexcept {
    return a.seed_ == b.seed_ && a.stream_ == b.stream_ && a.block_ == b.block_ && a.have_ == b.have_;
  }

 private:
  constexpr void refill() noexcept {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    have_ = 2;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned have_ = 0;
};

/// Stable 64-bit key for a (seed, tag) pair; used to give simulation cells their own seeds.
inline constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) noexcept {
  return detail::splitmix64(master_seed ^ detail::splitmix64(tag));
}

}  // namespace wrec
