#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "vgfkit/linalg.hpp"

namespace vgfkit {

struct InnerOptions {
  double tol = 1e-9;
  int max_iter = 5000;
  double armijo = 1e-4;
  double shrink = 0.5;
};

struct InnerResult {
  Matrix m;
  double value = std::numeric_limits<double>::infinity();
  double pg_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking
// along the projected direction. obj(M) returns {f, grad}; proj maps onto the
// feasible set. Stops when ||proj(M - grad) - M||_F <= tol (1 + |f|).
template <class Obj, class Proj>
InnerResult projected_gradient(Obj&& obj, Proj&& proj, const Matrix& start,
                               const InnerOptions& opt = {}) {
  InnerResult r;
  Matrix m = proj(start);
  auto [f, g] = obj(m);
  double alpha = 1.0 / std::max(1e-12, g.norm());
  Matrix m_prev;
  Matrix g_prev;
  for (int it = 0; it < opt.max_iter; ++it) {
    r.iterations = it;
    const Matrix pg = proj(Matrix(m - g)) - m;
    r.pg_norm = pg.norm();
    if (r.pg_norm <= opt.tol * (1.0 + std::abs(f))) {
      r.converged = true;
      break;
    }
    Matrix d = proj(Matrix(m - alpha * g)) - m;
    double slope = inner(g, d);
    if (!(slope < 0.0)) {
      d = pg;
      slope = inner(g, d);
      if (!(slope < 0.0)) {
        r.converged = true;  // stationary up to roundoff
        break;
      }
    }
    double s = 1.0;
    Matrix trial;
    double ft = 0.0;
    Matrix gt;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = m + s * d;
      auto fg = obj(trial);
      ft = fg.first;
      gt = std::move(fg.second);
      if (std::isfinite(ft) && ft <= f + opt.armijo * s * slope) {
        accepted = true;
        break;
      }
      s *= opt.shrink;
    }
    if (!accepted) break;
    m_prev = std::move(m);
    g_prev = std::move(g);
    m = std::move(trial);
    f = ft;
    g = std::move(gt);
    const Matrix sk = m - m_prev;
    const Matrix yk = g - g_prev;
    const double sy = inner(sk, yk);
    alpha = sy > 0.0 ? std::clamp(sk.squaredNorm() / sy, 1e-12, 1e12) : 1.0 / std::max(1e-12, g.norm());
  }
  r.m = std::move(m);
  r.value = f;
  return r;
}

// (M + eps I)^{-1} for PSD M, with tiny negative eigenvalues clipped to zero.
inline Matrix shifted_inverse(const Matrix& m, double eps) {
  const SymEig e = sym_eig(m);
  Vector inv(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = 1.0 / (std::max(e.values(i), 0.0) + eps);
  return symmetrize(from_eig(e.vectors, inv));
}

}  // namespace vgfkit
