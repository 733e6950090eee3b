#pragma once

#include <string>

#include "vgfkit/mset.hpp"

namespace vgfkit {

inline void require_columns(const MSet& s, const Matrix& x, const char* what) {
  if (x.cols() != dim(s))
    throw DimensionMismatch(std::string(what) + ": X has " + std::to_string(x.cols()) +
                            " columns, set dimension is " + std::to_string(dim(s)));
  if (!x.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries in X");
}

inline Matrix gram(const Matrix& x) { return symmetrize(x.transpose() * x); }

// Omega_S(X) = max_{M in S} tr(X M X^T). Defined for every set, certified or not.
inline double omega(const MSet& s, const Matrix& x) {
  require_columns(s, x, "omega");
  return support(s, gram(x)).value;
}

inline SupportResult omega_with_argmax(const MSet& s, const Matrix& x) {
  require_columns(s, x, "omega");
  return support(s, gram(x));
}

}  // namespace vgfkit
