#pragma once

// Reproducible random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the conversions to bounded integers and
// doubles are done here because the std distributions are
// implementation-defined.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mrts {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Independent stream for (seed, stream) pairs, e.g. one per chain.
  static Rng stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(x)),
                      static_cast<std::uint32_t>(splitmix64(x)),
                      static_cast<std::uint32_t>(splitmix64(x)),
                      static_cast<std::uint32_t>(splitmix64(x))};
    Rng r;
    r.engine_.seed(seq);
    return r;
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, n), n > 0. Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform integer on [lo, hi].
  long long between(long long lo, long long hi) {
    return lo + static_cast<long long>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

  // Moves a uniformly chosen k-subset of v into its first k slots.
  template <class T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(below(v.size() - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mrts
