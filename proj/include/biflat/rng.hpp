#pragma once

// Deterministic sampling.  std::uniform_real_distribution is implementation
// defined, so uniforms are derived from raw mt19937_64 output to keep report
// and CSV bodies reproducible for a given seed.

#include <cstdint>
#include <random>

#include "biflat/common.hpp"

namespace biflat {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Uniform draw from [lo, hi]^n, rejection-sampled against the pairwise gap
// (and against |u^i| >= separation when the dual structure is involved).
inline Point sample_point(Rng& rng, int n, double lo, double hi,
                          double separation, bool need_nonzero_coords,
                          int max_tries = 100000) {
  for (int t = 0; t < max_tries; ++t) {
    Point p;
    p.u.resize(n);
    for (int i = 0; i < n; ++i) p.u[i] = rng.uniform(lo, hi);
    if (admissible(p, separation, need_nonzero_coords)) return p;
  }
  throw NumericError("sample_point: rejection sampling failed");
}

}  // namespace biflat
