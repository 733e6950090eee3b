#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vgfkit/gram.hpp"
#include "vgfkit/parallel.hpp"
#include "vgfkit/random.hpp"

namespace vgfkit {

enum class Verdict { convex, not_convex, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::convex: return "convex";
    case Verdict::not_convex: return "not_convex";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

struct Certificate {
  Verdict verdict = Verdict::unknown;
  double min_eig = std::numeric_limits<double>::quiet_NaN();  // of the tested matrix, if any
  std::string detail;
};

inline constexpr double kConvexityTol = 1e-10;

// Box {|M_ij| <= Mbar_ij}: the comparison matrix being PSD is sufficient, and
// necessary once n >= m - 1.
inline Certificate check_box(const Matrix& mbar, int n, double tol = kConvexityTol) {
  detail::require_nonnegative_sym(mbar, "check_box");
  const double lmin = min_eig(comparison_matrix(mbar));
  const double scale = std::max(1.0, spectral_norm_sym(mbar));
  Certificate c;
  c.min_eig = lmin;
  std::ostringstream ss;
  ss << "comparison matrix min eig " << std::setprecision(12) << (std::abs(lmin) < 1e-14 ? 0.0 : lmin);
  c.detail = ss.str();
  if (lmin >= -tol * scale)
    c.verdict = Verdict::convex;
  else if (n >= mbar.rows() - 1)
    c.verdict = Verdict::not_convex;
  else
    c.verdict = Verdict::unknown;
  return c;
}

inline Certificate check_hadamard_l2(const Matrix& mbar, double tol = kConvexityTol) {
  detail::require_nonnegative_sym(mbar, "check_hadamard_l2");
  const Matrix sq = mbar.cwiseProduct(mbar);
  const double lmin = min_eig(sq);
  Certificate c;
  c.min_eig = lmin;
  std::ostringstream ss;
  ss << "hadamard square min eig " << std::setprecision(12) << lmin;
  c.detail = ss.str();
  c.verdict = lmin >= -tol * std::max(1.0, spectral_norm_sym(sq)) ? Verdict::convex : Verdict::unknown;
  return c;
}

inline Certificate check_asym_box(const Matrix& center, const Matrix& radius,
                                  double tol = kConvexityTol) {
  validate(MSet{AsymBox{center, radius}});
  const double lmin = min_eig(comparison_matrix(radius)) + min_eig(center);
  Certificate c;
  c.min_eig = lmin;
  std::ostringstream ss;
  ss << "min eig of comparison(D) plus min eig of C " << std::setprecision(12) << lmin;
  c.detail = ss.str();
  c.verdict = lmin >= -tol * std::max(1.0, spectral_norm_sym(radius)) ? Verdict::convex
                                                                      : Verdict::unknown;
  return c;
}

inline Certificate check_spectral(const SpectralBox& b) {
  Certificate c;
  c.min_eig = b.alpha1;
  c.detail = "members have eigenvalues >= " + std::to_string(b.alpha1);
  c.verdict = b.alpha1 >= 0.0 ? Verdict::convex : Verdict::unknown;
  return c;
}

// l1-Gram sets: Mbar_ii Mbar_jj >= Mbar_ij^2 for every pair reduces the set to
// its diagonal. Sufficient only.
inline Certificate check_hadamard_l1(const Matrix& mbar) {
  detail::require_nonnegative_sym(mbar, "check_hadamard_l1");
  Certificate c;
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mbar.rows(); ++i)
    for (Eigen::Index j = i + 1; j < mbar.cols(); ++j)
      worst = std::min(worst, mbar(i, i) * mbar(j, j) - mbar(i, j) * mbar(i, j));
  c.min_eig = std::numeric_limits<double>::quiet_NaN();
  c.detail = "pairwise diagonal dominance margin " +
             (std::isinf(worst) ? std::string("inf") : std::to_string(worst));
  c.verdict = worst >= -1e-12 ? Verdict::convex : Verdict::unknown;
  return c;
}

// Dispatches to the checker for the set kind. n is the row count of X; pass a
// negative value when any n is possible.
inline Certificate certify(const MSet& s, int n = -1) {
  const int nn = n < 0 ? std::numeric_limits<int>::max() : n;
  return std::visit(
      overloaded{
          [&](const Box& b) { return check_box(b.mbar, nn); },
          [&](const AsymBox& b) { return check_asym_box(b.center, b.radius); },
          [&](const HadamardBall& h) {
            switch (h.norm_kind) {
              case HadamardNorm::linf: return check_box(h.mbar, nn);
              case HadamardNorm::l2: return check_hadamard_l2(h.mbar);
              case HadamardNorm::l1: return check_hadamard_l1(h.mbar);
            }
            return Certificate{};
          },
          [&](const SpectralBox& b) { return check_spectral(b); },
          [&](const FiniteSet& f) {
            Certificate c;
            double lmin = std::numeric_limits<double>::infinity();
            for (const Matrix& m : f.members) lmin = std::min(lmin, min_eig(m));
            c.min_eig = lmin;
            c.detail = "smallest member eigenvalue " + std::to_string(lmin);
            c.verdict = members_psd(MSet{f}) ? Verdict::convex : Verdict::unknown;
            return c;
          },
          [&](const DiagonalPolytope& d) {
            Certificate c;
            c.verdict = Verdict::convex;
            c.detail = "nonnegative diagonal members";
            c.min_eig = d.kind == DiagonalKind::fixed ? d.theta.minCoeff() : 0.0;
            return c;
          },
          [&](const TraceBall&) {
            Certificate c;
            c.verdict = Verdict::convex;
            c.detail = "members are PSD";
            c.min_eig = 0.0;
            return c;
          },
      },
      s);
}

inline bool is_certified_convex(const MSet& s, int n = -1) {
  return certify(s, n).verdict == Verdict::convex;
}

struct ProbeResult {
  bool pass = true;
  long trials = 0;  // trials examined (up to and including the counterexample)
  Matrix x;
  Matrix y;
  double theta = 0.0;
  double violation = 0.0;  // Omega(mid) - (theta Omega(X) + (1-theta) Omega(Y))
};

namespace detail {

// Columns realizing pairwise negative inner products in n >= m - 1 dimensions.
inline Matrix simplex_columns(Eigen::Index n, Eigen::Index m) {
  Matrix centered = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
  Matrix x = Matrix::Zero(n, m);
  if (m == 1) {
    x(0, 0) = 1.0;
    return x;
  }
  // Orthonormal basis of the complement of the ones vector.
  const ThinQr qr = thin_qr(centered.leftCols(m - 1));
  const Matrix coords = qr.q.transpose() * centered;  // (m-1) x m
  x.topRows(m - 1) = coords;
  return x;
}

struct Trial {
  Matrix x;
  Matrix y;
  double theta;
};

// Local test around X0: move along v u^T with u an eigenvector for a negative
// eigenvalue of the active M. Returns false when the active M is PSD.
inline bool local_trial(const MSet& s, const Matrix& x0, Rng& rng, Trial& out) {
  const SupportResult sr = omega_with_argmax(s, x0);
  const SymEig e = sym_eig(sr.argmax);
  if (e.values(0) >= 0.0) return false;
  Vector v = gaussian_vector(rng, x0.rows());
  v /= std::max(v.norm(), 1e-300);
  const Matrix d = v * e.vectors.col(0).transpose();
  const double t = std::max(x0.norm(), 1e-3) * std::pow(10.0, -uniform_int(rng, 1, 3));
  out = {x0 + t * d, x0 - t * d, 0.5};
  return true;
}

inline Trial probe_trial(const MSet& s, std::uint64_t seed, long index) {
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(index));
  const Eigen::Index m = dim(s);
  const int choices[3] = {1, static_cast<int>(std::max<Eigen::Index>(1, m - 1)), static_cast<int>(m)};
  const int n = choices[uniform_int(rng, 0, 2)];
  Trial t;
  switch (index % 4) {
    case 1: {
      if (local_trial(s, gaussian(rng, n, m), rng, t)) return t;
      break;
    }
    case 2: {
      if (n >= m - 1) {
        Matrix x0 = simplex_columns(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
          if (uniform(rng) < 0.5) x0.col(j) *= -1.0;
        x0 += 0.05 * gaussian(rng, n, m) / std::sqrt(static_cast<double>(m));
        if (local_trial(s, x0, rng, t)) return t;
      }
      break;
    }
    case 3: {
      // Signed basis columns: Gram entries sit at sign boundaries.
      auto basis = [&] {
        Matrix x = Matrix::Zero(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
          x(uniform_int(rng, 0, n - 1), j) = (uniform(rng) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.5, 2.0);
        return x;
      };
      t.x = basis();
      t.y = basis();
      t.theta = uniform(rng, 0.05, 0.95);
      return t;
    }
    default: break;
  }
  t.x = gaussian(rng, n, m);
  t.y = gaussian(rng, n, m);
  t.theta = uniform(rng, 0.05, 0.95);
  return t;
}

}  // namespace detail

// Randomized midpoint-convexity test. Stops at the first violation (lowest
// trial index), so the result does not depend on the thread count.
inline ProbeResult probe_convexity(const MSet& s, long trials, std::uint64_t seed,
                                   int threads = 1, double rel_tol = 1e-8) {
  ProbeResult res;
  const long block = 1024;
  for (long start = 0; start < trials; start += block) {
    const long count = std::min(block, trials - start);
    std::vector<double> viol(static_cast<std::size_t>(count), 0.0);
    parallel_for(count, threads, [&](long k) {
      const detail::Trial t = detail::probe_trial(s, seed, start + k);
      const double ox = omega(s, t.x);
      const double oy = omega(s, t.y);
      const double mid = omega(s, t.theta * t.x + (1.0 - t.theta) * t.y);
      const double rhs = t.theta * ox + (1.0 - t.theta) * oy;
      const double scale = std::max({1.0, std::abs(ox), std::abs(oy)});
      const double v = mid - rhs;
      viol[static_cast<std::size_t>(k)] = v > rel_tol * scale ? v : 0.0;
    });
    for (long k = 0; k < count; ++k) {
      if (viol[static_cast<std::size_t>(k)] > 0.0) {
        const detail::Trial t = detail::probe_trial(s, seed, start + k);
        res.pass = false;
        res.trials = start + k + 1;
        res.x = t.x;
        res.y = t.y;
        res.theta = t.theta;
        res.violation = viol[static_cast<std::size_t>(k)];
        return res;
      }
    }
    res.trials = start + count;
  }
  return res;
}

struct MeffResult {
  std::vector<Matrix> vertices;  // retained sign vertices
  bool all_psd = true;
};

// Sign vertices of the box (off-diagonal entries +-Mbar_ij) that attain the
// support value at some sampled Gram matrix X^T X, X in R^{n x m}.
inline MeffResult meff_box(const Matrix& mbar, int n, long samples = 100000,
                           std::uint64_t seed = 0) {
  detail::require_nonnegative_sym(mbar, "meff_box");
  const Eigen::Index m = mbar.rows();
  if (m > 4) throw NotSupported("meff_box: sign enumeration limited to m <= 4");
  if (n < 1) throw InvalidInput("meff_box: n must be positive");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (mbar(i, j) > 0.0) free.emplace_back(i, j);
  std::set<unsigned> hit;
  Rng rng = make_rng(seed);
  for (long s = 0; s < samples; ++s) {
    const Matrix x = gaussian(rng, n, m);
    const Matrix g = x.transpose() * x;
    unsigned code = 0;
    for (std::size_t k = 0; k < free.size(); ++k)
      if (g(free[k].first, free[k].second) < 0.0) code |= 1u << k;
    hit.insert(code);
    if (hit.size() == (1u << free.size())) break;
  }
  MeffResult r;
  for (unsigned code : hit) {
    Matrix v = mbar;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (code & (1u << k)) {
        v(free[k].first, free[k].second) = -mbar(free[k].first, free[k].second);
        v(free[k].second, free[k].first) = -mbar(free[k].first, free[k].second);
      }
    }
    if (!is_psd(v)) r.all_psd = false;
    r.vertices.push_back(std::move(v));
  }
  return r;
}

}  // namespace vgfkit
