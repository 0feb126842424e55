#ifndef STRAINMAP_RNG_HPP
#define STRAINMAP_RNG_HPP

#include <cstdint>
#include <cstddef>
#include <vector>

namespace strainmap {

// Deterministic splitmix64 stream. Self-contained so that identical seeds
// give identical samples on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::size_t below(std::size_t n) {
    if (n <= 1) return 0;
    std::size_t v = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent stream for a (seed, index) pair; used for per-point searches.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace strainmap

#endif
