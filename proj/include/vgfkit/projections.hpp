#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "vgfkit/linalg.hpp"

namespace vgfkit {

// Euclidean projection onto {w >= 0, sum(w) <= r}. Negative entries are
// clipped; if the remainder still exceeds r, the water-filling threshold is
// found by sort-and-scan.
inline Vector project_scaled_simplex(const Vector& v, double r) {
  if (!(r > 0.0)) throw InvalidInput("project_scaled_simplex: radius must be positive");
  Vector w = v.cwiseMax(0.0);
  if (w.sum() <= r) return w;
  std::vector<double> u(w.data(), w.data() + w.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - r) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (w.array() - theta).cwiseMax(0.0).matrix();
}

// Euclidean projection onto {lo <= w_i <= hi, sum(w) = total}, via bisection on
// the shift nu in w_i = clip(v_i - nu, lo, hi), finished by an exact solve
// on the free coordinates.
inline Vector project_capped_sum(const Vector& v, double lo, double hi, double total) {
  const Eigen::Index m = v.size();
  if (m == 0) return v;
  if (lo > hi || total < m * lo - 1e-12 * std::abs(total) - 1e-12 ||
      total > m * hi + 1e-12 * std::abs(total) + 1e-12)
    throw InvalidInput("project_capped_sum: infeasible bounds");
  auto at = [&](double nu) { return (v.array() - nu).cwiseMax(lo).cwiseMin(hi).matrix().eval(); };
  double a = v.minCoeff() - hi - 1.0;  // sum(at(a)) = m*hi >= total
  double b = v.maxCoeff() - lo + 1.0;  // sum(at(b)) = m*lo <= total
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    const double mid = 0.5 * (a + b);
    if (at(mid).sum() > total)
      a = mid;
    else
      b = mid;
  }
  const double nu0 = 0.5 * (a + b);
  Vector w = at(nu0);
  // Exact shift on the coordinates that are strictly inside the bounds.
  double clamped = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = v(i) - nu0;
    if (x <= lo || x >= hi) {
      clamped += w(i);
    } else {
      free_sum += v(i);
      ++free_count;
    }
  }
  if (free_count > 0) {
    const double nu = (free_sum - (total - clamped)) / free_count;
    Vector exact = at(nu);
    if (std::abs(exact.sum() - total) <= std::abs(w.sum() - total)) w = exact;
  }
  return w;
}

// Euclidean projection onto the convex hull of the given points (Wolfe's
// minimum-norm-point algorithm applied to points - x0).
inline Vector project_convex_hull(const std::vector<Vector>& points, const Vector& x0,
                                  std::vector<double>* weights_out = nullptr) {
  const std::size_t k = points.size();
  if (k == 0) throw InvalidInput("project_convex_hull: empty point set");
  std::vector<Vector> p(k);
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = points[i] - x0;
    scale = std::max(scale, p[i].squaredNorm());
  }
  const double tol = 1e-14 * std::max(1.0, scale);

  std::size_t first = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (p[i].squaredNorm() < p[first].squaredNorm()) first = i;
  std::vector<std::size_t> active{first};
  std::vector<double> w{1.0};
  Vector x = p[first];

  auto affine_min = [&](const std::vector<std::size_t>& idx) {
    const auto s = static_cast<Eigen::Index>(idx.size());
    Matrix kkt = Matrix::Zero(s + 1, s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = p[idx[a]].dot(p[idx[b]]);
      kkt(a, s) = 1.0;
      kkt(s, a) = 1.0;
    }
    Vector rhs = Vector::Zero(s + 1);
    rhs(s) = 1.0;
    Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return Vector(sol.head(s));
  };

  for (std::size_t outer = 0; outer < 50 * k + 100; ++outer) {
    std::size_t j = 0;
    double best = x.dot(p[0]);
    for (std::size_t i = 1; i < k; ++i) {
      const double d = x.dot(p[i]);
      if (d < best) {
        best = d;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= tol) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    w.push_back(0.0);
    for (std::size_t inner = 0; inner < k + 5; ++inner) {
      const Vector alpha = affine_min(active);
      bool positive = true;
      for (Eigen::Index i = 0; i < alpha.size(); ++i)
        if (alpha(i) <= 1e-15) positive = false;
      if (positive) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha(static_cast<Eigen::Index>(i));
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double ai = alpha(static_cast<Eigen::Index>(i));
        if (ai <= 1e-15 && w[i] - ai > 0.0) theta = std::min(theta, w[i] / (w[i] - ai));
      }
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = (1.0 - theta) * w[i] + theta * alpha(static_cast<Eigen::Index>(i));
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 1e-15) {
          keep_idx.push_back(active[i]);
          keep_w.push_back(w[i]);
        }
      }
      active.swap(keep_idx);
      w.swap(keep_w);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& wi : w) wi /= total;
    }
    x.setZero();
    for (std::size_t i = 0; i < active.size(); ++i) x += w[i] * p[active[i]];
  }

  if (weights_out) {
    weights_out->assign(k, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) (*weights_out)[active[i]] = w[i];
  }
  return x0 + x;
}

// Smallest root mu >= 0 of a decreasing function on [0, inf), found by
// doubling then bisection. Used by the ellipsoid and weighted-l1 projections.
template <class F>
double bisect_decreasing_root(F&& f, double hi_guess) {
  double lo = 0.0;
  double hi = std::max(hi_guess, 1e-300);
  for (int it = 0; it < 2000 && f(hi) > 0.0; ++it) hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace vgfkit
