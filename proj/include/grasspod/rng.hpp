#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace grasspod {

/// Seeded generator with a platform-independent integer draw. The engine's
/// output sequence is fixed by the standard; the standard distributions are
/// not, so they are avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound), bound > 0, by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates over the first `count` positions: afterwards v[0, count) is
/// a uniform sample without replacement.
template <typename T>
void partial_shuffle(std::vector<T>& v, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count && i + 1 < v.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  partial_shuffle(v, v.size(), rng);
}

}  // namespace grasspod
