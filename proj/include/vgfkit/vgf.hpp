#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vgfkit/convexity.hpp"
#include "vgfkit/gram.hpp"
#include "vgfkit/inner.hpp"
#include "vgfkit/random.hpp"

namespace vgfkit {

inline void require_certified(const MSet& s, bool force, const char* what) {
  if (force) return;
  const Certificate c = certify(s);
  if (c.verdict != Verdict::convex)
    throw NotCertified(std::string(what) + ": set '" + kind_name(s) + "' is not certified convex (" +
                       to_string(c.verdict) + ", " + c.detail + "); pass force to override");
}

// ||X||_S = sqrt(Omega_S(X)).
inline double vgf_norm(const MSet& s, const Matrix& x, bool force = false) {
  require_columns(s, x, "vgf_norm");
  require_certified(s, force, "vgf_norm");
  return std::sqrt(std::max(0.0, omega(s, x)));
}

// 2 X M with M attaining Omega_S(X).
inline Matrix subgradient(const MSet& s, const Matrix& x, bool force = false) {
  require_columns(s, x, "subgradient");
  require_certified(s, force, "subgradient");
  return 2.0 * x * support(s, gram(x)).argmax;
}

namespace detail {

inline bool box_face_is_psd(const Matrix& mbar) {
  return min_eig(comparison_matrix(mbar)) >= -kConvexityTol * std::max(1.0, spectral_norm_sym(mbar));
}

}  // namespace detail

// Projection onto a subset of S intersected with the PSD cone that still holds a
// minimizer of any objective decreasing in the Loewner order (the conjugate and
// prox inner problems). Boxes with a PSD comparison matrix use the face where
// the diagonal sits at its upper bound; sets inside the cone use their own
// projection; the rest alternate with the cone.
inline std::function<Matrix(const Matrix&)> monotone_domain_projection(const MSet& s) {
  const Box* box = std::get_if<Box>(&s);
  const HadamardBall* had = std::get_if<HadamardBall>(&s);
  Matrix mbar;
  if (box) mbar = box->mbar;
  if (had && had->norm_kind == HadamardNorm::linf) mbar = had->mbar;
  if (mbar.size() > 0 && detail::box_face_is_psd(mbar)) {
    return [mbar](const Matrix& a) {
      Matrix out = symmetrize(a).cwiseMin(mbar).cwiseMax(-mbar);
      out.diagonal() = mbar.diagonal();
      return out;
    };
  }
  if (members_psd(s) || (std::holds_alternative<AsymBox>(s) && is_certified_convex(s)))
    return [s](const Matrix& a) { return project(s, a); };
  return [s](const Matrix& a) { return project_psd_intersection(s, a); };
}

struct ConjugateOptions {
  double tol = 1e-9;
  int max_iter = 5000;
  bool force = false;
};

struct ConjugateResult {
  double value = 0.0;  // +inf when Y is outside every feasible range
  Matrix m;            // achieving M
  int iterations = 0;
  bool converged = true;
};

// Omega*(Y) = 1/4 inf_{M in S, M >= 0} tr(Y M^+ Y^T), by projected gradient on
// the smoothed objective 1/4 tr(Y (M + eps I)^{-1} Y^T) with eps driven to 1e-10.
inline ConjugateResult conjugate(const MSet& s, const Matrix& y, const ConjugateOptions& opt = {}) {
  require_columns(s, y, "conjugate");
  require_certified(s, opt.force, "conjugate");
  const Eigen::Index m = y.cols();
  const auto proj = monotone_domain_projection(s);
  ConjugateResult res;
  Matrix cur = proj(Matrix::Identity(m, m));
  if (y.cwiseAbs().maxCoeff() == 0.0) {
    res.m = cur;
    res.value = 0.0;
    return res;
  }
  const Matrix g = gram(y);
  const double mscale = std::max(1.0, spectral_norm_sym(cur));
  const double schedule[] = {1e-4, 1e-6, 1e-8, 1e-10};
  InnerOptions io;
  io.tol = opt.tol;
  io.max_iter = opt.max_iter;
  std::vector<double> stage_values;
  for (double e : schedule) {
    const double eps = e * mscale;
    auto obj = [&](const Matrix& mm) {
      const Matrix a = shifted_inverse(mm, eps);
      const Matrix ag = a * g;
      return std::make_pair(0.25 * ag.trace(), Matrix(-0.25 * symmetrize(ag * a)));
    };
    const InnerResult r = projected_gradient(obj, proj, cur, io);
    cur = r.m;
    res.iterations += r.iterations;
    res.converged = r.converged;
    stage_values.push_back(r.value);
  }
  res.m = cur;
  const std::size_t k = stage_values.size();
  // A value that keeps growing like 1/eps means no feasible M covers range(Y^T).
  if (stage_values[k - 1] > 10.0 * stage_values[k - 2] && stage_values[k - 2] > 10.0 * stage_values[k - 3]) {
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }
  const SymEig e = sym_eig(cur);
  const double lmax = std::max(e.values(m - 1), 0.0);
  if (lmax > 0.0 && e.values(0) > 1e-6 * lmax) {
    res.value = 0.25 * (pinv(cur) * g).trace();
  } else {
    res.value = stage_values[k - 1];
  }
  if (!res.converged) {
    // Accept a stalled final stage when the last two stages agree.
    const double drift = std::abs(stage_values[k - 1] - stage_values[k - 2]);
    if (drift > 1e-6 * std::max(1.0, std::abs(res.value)))
      throw SolverError("conjugate: inner solver did not converge", res.value);
  }
  return res;
}

// 2 sqrt(Omega*(Y)).
inline double dual_norm(const MSet& s, const Matrix& y, const ConjugateOptions& opt = {}) {
  const double v = conjugate(s, y, opt).value;
  return std::isinf(v) ? v : 2.0 * std::sqrt(std::max(0.0, v));
}

struct ConjSubgradientResult {
  Matrix z;
  double fenchel_residual;  // |<Z,Y> - Omega(Z) - Omega*(Y)| / max(1, |<Z,Y>|)
};

// Z = 1/2 Y M^{-1} for the achieving M. Needs M positive definite.
inline ConjSubgradientResult conj_subgradient(const MSet& s, const Matrix& y,
                                              const ConjugateOptions& opt = {}) {
  ConjugateOptions o = opt;
  o.tol = std::min(o.tol, 1e-10);
  const ConjugateResult c = conjugate(s, y, o);
  if (std::isinf(c.value)) throw InvalidInput("conj_subgradient: conjugate is infinite at Y");
  const SymEig e = sym_eig(c.m);
  const Eigen::Index m = c.m.rows();
  if (!(e.values(0) > 1e-8 * std::max(1.0, e.values(m - 1))))
    throw NotSupported(
        "conj_subgradient: achieving M is singular; the kernel correction term is not computed");
  const Matrix z = 0.5 * y * pinv(c.m);
  const double zy = inner(z, y);
  const double resid = std::abs(zy - omega(s, z) - c.value) / std::max(1.0, std::abs(zy));
  if (resid > 1e-6)
    throw SolverError("conj_subgradient: Fenchel equality residual " + std::to_string(resid),
                      c.value);
  return {z, resid};
}

namespace detail {

inline void require_zero_row_sums(const Matrix& mm, const char* what) {
  const double r = (mm * Vector::Ones(mm.cols())).cwiseAbs().maxCoeff();
  if (r > 1e-9 * std::max(1.0, max_abs(mm)))
    throw InvalidInput(std::string(what) + ": set member with nonzero row sums");
}

}  // namespace detail

// Omega as a function of the distance matrix Dist_ij = 1/2 ||x_i - x_j||^2, for
// sets whose members satisfy M 1 = 0. Membership is checked exactly for finite
// sets and on sampled members otherwise.
inline double omega_edm(const MSet& s, const Matrix& x, std::uint64_t seed = 0) {
  require_columns(s, x, "omega_edm");
  const Eigen::Index m = x.cols();
  if (const auto* f = std::get_if<FiniteSet>(&s)) {
    for (const Matrix& mm : f->members) detail::require_zero_row_sums(mm, "omega_edm");
  } else {
    Rng rng = make_rng(seed);
    for (int i = 0; i < 64; ++i) {
      const Matrix a = random_symmetric(rng, m);
      detail::require_zero_row_sums(project(s, 3.0 * a), "omega_edm");
      detail::require_zero_row_sums(support(s, a).argmax, "omega_edm");
    }
  }
  Matrix dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) dist(i, j) = 0.5 * (x.col(i) - x.col(j)).squaredNorm();
  // <diag(M 1) - M, Dist> = <-M, Dist> since Dist has a zero diagonal.
  return support(s, Matrix(-dist)).value;
}

// Psi(X) = Omega(|X|), entrywise absolute value.
inline double psi_abs(const MSet& s, const Matrix& x, bool force = false) {
  require_columns(s, x, "psi_abs");
  require_certified(s, force, "psi_abs");
  return omega(s, x.cwiseAbs());
}

struct PsiProbeResult {
  Verdict verdict = Verdict::convex;  // convex or not_convex (violation found)
  std::string detail;
};

// (a) 2 X M >= 0 on sampled X >= 0; (b) Omega(|X|) against min_{Y >= |X|} Omega(Y)
// by projected subgradient descent; (c) midpoint convexity of Psi.
inline PsiProbeResult psi_convexity_probe(const MSet& s, int trials, std::uint64_t seed,
                                          int min_checks = 50, bool force = false) {
  require_certified(s, force, "psi_convexity_probe");
  const Eigen::Index m = dim(s);
  PsiProbeResult out;
  Rng rng = make_rng(seed);
  const double tol = 1e-8;
  for (int t = 0; t < trials; ++t) {
    const int n = uniform_int(rng, 1, static_cast<int>(m) + 1);
    const Matrix x = gaussian(rng, n, m).cwiseAbs();
    const Matrix sg = 2.0 * x * support(s, gram(x)).argmax;
    if (sg.minCoeff() < -tol * std::max(1.0, max_abs(sg))) {
      out.verdict = Verdict::not_convex;
      out.detail = "negative subgradient entry at a nonnegative X (trial " + std::to_string(t) + ")";
      return out;
    }
    const Matrix a = gaussian(rng, n, m);
    const Matrix b = gaussian(rng, n, m);
    const double th = uniform(rng, 0.05, 0.95);
    const double lhs = omega(s, (th * a + (1 - th) * b).cwiseAbs());
    const double rhs = th * omega(s, a.cwiseAbs()) + (1 - th) * omega(s, b.cwiseAbs());
    if (lhs - rhs > tol * std::max(1.0, std::abs(rhs))) {
      out.verdict = Verdict::not_convex;
      out.detail = "midpoint violation of Omega(|X|) (trial " + std::to_string(t) + ")";
      return out;
    }
  }
  for (int t = 0; t < min_checks; ++t) {
    const int n = uniform_int(rng, 1, static_cast<int>(m) + 1);
    const Matrix lo = gaussian(rng, n, m).cwiseAbs();
    const double base = omega(s, lo);
    Matrix yk = lo;
    double best = base;
    for (int it = 1; it <= 200; ++it) {
      const Matrix g = 2.0 * yk * support(s, gram(yk)).argmax;
      const double gn = g.norm();
      if (gn == 0.0) break;
      yk = (yk - (0.1 * lo.norm() / std::sqrt(static_cast<double>(it))) * g / gn).cwiseMax(lo);
      best = std::min(best, omega(s, yk));
    }
    if (best < base - 1e-7 * std::max(1.0, base)) {
      out.verdict = Verdict::not_convex;
      out.detail = "some Y >= |X| has Omega(Y) < Omega(|X|) (check " + std::to_string(t) + ")";
      return out;
    }
  }
  out.detail = "no violation in " + std::to_string(trials) + " samples and " +
               std::to_string(min_checks) + " minimization checks";
  return out;
}

}  // namespace vgfkit
