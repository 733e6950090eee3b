#pragma once

#include <cstdint>
#include <random>

#include "vgfkit/linalg.hpp"

namespace vgfkit {

using Rng = std::mt19937_64;

// Independent stream per (seed, index), so sampled work can be split across
// threads without changing results.
inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = nd(rng);
  return a;
}

inline Vector gaussian_vector(Rng& rng, Eigen::Index n) { return gaussian(rng, n, 1).col(0); }

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_symmetric(Rng& rng, Eigen::Index m) { return symmetrize(gaussian(rng, m, m)); }

inline Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  return thin_qr(gaussian(rng, n, n)).q;
}

}  // namespace vgfkit
