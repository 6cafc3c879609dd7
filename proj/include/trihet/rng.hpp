#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace trihet {

/// Identifier written into every report and split header. Bump the suffix if
/// any of the derivation rules below change.
inline constexpr std::string_view kPrngId = "xoshiro256ss-splitmix64-v1";

/// Named substream domains. Values are part of the on-disk reproducibility
/// contract; never renumber.
enum class Stream : std::uint64_t {
  split = 1,
  train_negatives = 2,
  model_init = 3,
  dropout = 4,
  ego_root = 5,
  repeat = 6,
};

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

/// Seed of substream `index` within `domain` of `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, Stream domain, std::uint64_t index) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ static_cast<std::uint64_t>(domain));
  return mix64(h ^ index);
}

/// xoshiro256** seeded from a single 64-bit value through splitmix64.
/// All bounded draws use rejection sampling on the raw 64-bit output so the
/// sequence is identical on every platform (no std:: distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  static Rng substream(std::uint64_t base, Stream domain, std::uint64_t index) {
    return Rng(derive_seed(base, domain, index));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Split seed of repeat `r`. Repeat 0 uses the base seed itself, so the split
/// written by `prepare` is the first repeat's split; later repeats draw from
/// independent substreams and adding repeats never perturbs earlier ones.
constexpr std::uint64_t repeat_seed(std::uint64_t base, std::uint64_t r) {
  return r == 0 ? base : derive_seed(base, Stream::repeat, r);
}

/// In-place Fisher-Yates shuffle driven by `rng`.
template <class Container>
void shuffle(Container& c, Rng& rng) {
  for (std::size_t i = c.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(c[i - 1], c[j]);
  }
}

/// FNV-1a, used for graph/config/pair-set fingerprints.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void str(std::string_view s) { bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace trihet
