#pragma once

#include <cmath>
#include <string>

#include "vgfkit/inner.hpp"
#include "vgfkit/projections.hpp"
#include "vgfkit/vgf.hpp"

namespace vgfkit {

struct ProxOptions {
  double tol = 1e-12;
  int max_iter = 20000;
  bool force = false;
};

struct ProxResult {
  Matrix y;   // prox_{tau Omega}(X)
  Matrix m0;  // inner minimizer
  // (Omega(Y) - <M0, Y^T Y>) / max(1, Omega(Y)); zero iff (X - Y)/tau is a subgradient at Y.
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline Matrix resolvent(const Matrix& mm, double tau) {
  const SymEig e = sym_eig(mm);
  Vector inv(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = 1.0 / (1.0 + 2.0 * tau * std::max(e.values(i), 0.0));
  return symmetrize(from_eig(e.vectors, inv));
}

}  // namespace detail

// prox_{tau Omega}(X) = X (I + 2 tau M0)^{-1}, M0 minimizing tr(X (I + 2 tau M)^{-1} X^T)
// over S intersected with the PSD cone.
inline ProxResult prox_omega(const MSet& s, const Matrix& x, double tau, const ProxOptions& opt = {}) {
  require_columns(s, x, "prox_omega");
  if (!(tau > 0.0)) throw InvalidInput("prox_omega: tau must be positive");
  require_certified(s, opt.force, "prox_omega");
  const Eigen::Index m = x.cols();
  const auto proj = monotone_domain_projection(s);
  const Matrix g = gram(x);
  ProxResult res;
  if (g.cwiseAbs().maxCoeff() == 0.0) {
    res.y = x;
    res.m0 = proj(Matrix::Identity(m, m));
    return res;
  }
  auto obj = [&](const Matrix& mm) {
    const Matrix a = detail::resolvent(mm, tau);
    const Matrix ag = a * g;
    return std::make_pair(ag.trace(), Matrix(-2.0 * tau * symmetrize(ag * a)));
  };
  InnerOptions io;
  io.tol = opt.tol;
  io.max_iter = opt.max_iter;
  const InnerResult r = projected_gradient(obj, proj, Matrix::Identity(m, m), io);
  res.m0 = r.m;
  res.iterations = r.iterations;
  res.y = x * detail::resolvent(r.m, tau);
  const double om = omega(s, res.y);
  res.residual = (om - inner(res.m0, gram(res.y))) / std::max(1.0, om);
  if (!r.converged && res.residual > 1e-6)
    throw SolverError("prox_omega: inner solver did not converge (residual " +
                          std::to_string(res.residual) + ")",
                      r.value);
  return res;
}

// prox_{tau Omega*}(Y) from the Moreau decomposition
// prox_{tau f*}(y) + tau prox_{f/tau}(y/tau) = y.
inline Matrix prox_conjugate(const MSet& s, const Matrix& y, double tau, const ProxOptions& opt = {}) {
  if (!(tau > 0.0)) throw InvalidInput("prox_conjugate: tau must be positive");
  return y - tau * prox_omega(s, y / tau, 1.0 / tau, opt).y;
}

// Thin-QR route: prox on the m x m factor R, mapped back by Q.
inline Matrix prox_qr(const MSet& s, const Matrix& x, double tau, const ProxOptions& opt = {}) {
  require_columns(s, x, "prox_qr");
  if (x.rows() <= x.cols()) return prox_omega(s, x, tau, opt).y;
  const ThinQr qr = thin_qr(x);
  return qr.q * prox_omega(s, qr.r, tau, opt).y;
}

namespace detail {

// Euclidean projection of r >= 0 onto the ellipsoid {u : sum u_i^2 / theta_i <= c}.
// Coordinates with theta_i = 0 are forced to zero. Returns the multiplier too.
inline std::pair<Vector, double> project_ellipsoid(const Vector& r, const Vector& theta, double c) {
  double q = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (theta(i) > 0.0) q += r(i) * r(i) / theta(i);
    else if (r(i) != 0.0) q = std::numeric_limits<double>::infinity();
  if (q <= c) return {r, 0.0};
  auto excess = [&](double mu) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (theta(i) <= 0.0) continue;
      const double u = r(i) * theta(i) / (theta(i) + mu);
      sum += u * u / theta(i);
    }
    return sum - c;
  };
  const double mu = bisect_decreasing_root(excess, r.norm() * std::sqrt(theta.maxCoeff() / c));
  Vector u(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    u(i) = theta(i) > 0.0 ? r(i) * theta(i) / (theta(i) + mu) : 0.0;
  return {u, mu};
}

// Projection of r >= 0 onto {u : inf_{theta in Theta} sum u_i^2 / theta_i <= c}, a
// union of ellipsoids; the squared distance is convex in theta and minimized by
// projected gradient.
template <class ThetaProj>
Vector project_dual_ball(const Vector& r, double c, ThetaProj&& theta_proj, const Vector& theta0) {
  auto obj = [&](const Matrix& th) {
    const Vector t = th.col(0);
    const auto [u, mu] = project_ellipsoid(r, t, c);
    Matrix grad(t.size(), 1);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double d = t(i) + mu;
      grad(i, 0) = d > 0.0 ? -mu * r(i) * r(i) / (d * d) : 0.0;
    }
    return std::make_pair((u - r).squaredNorm(), grad);
  };
  auto proj = [&](const Matrix& th) { return Matrix(theta_proj(Vector(th.col(0)))); };
  InnerOptions io;
  io.tol = 1e-13;
  io.max_iter = 20000;
  const InnerResult res = projected_gradient(obj, proj, Matrix(theta0), io);
  return project_ellipsoid(r, res.m.col(0), c).first;
}

}  // namespace detail

// prox of tau ||.||_S: X minus its projection onto the dual-norm ball of radius tau.
// Available for multiples of the identity, diagonal polytopes and spectral boxes.
inline Matrix prox_vgf_norm(const MSet& s, const Matrix& x, double tau) {
  require_columns(s, x, "prox_vgf_norm");
  if (!(tau > 0.0)) throw InvalidInput("prox_vgf_norm: tau must be positive");
  const Eigen::Index m = x.cols();
  const double c = tau * tau;
  if (const auto* f = std::get_if<FiniteSet>(&s)) {
    const Matrix& a = f->members[0];
    const double w = a(0, 0);
    if (f->members.size() != 1 || !(w > 0.0) ||
        (a - w * Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-14 * w)
      throw NotSupported("prox_vgf_norm: finite sets must be a single positive multiple of I");
    const double nrm = x.norm();
    const double radius = tau * std::sqrt(w);
    return nrm <= radius ? Matrix::Zero(x.rows(), m) : Matrix((1.0 - radius / nrm) * x);
  }
  if (const auto* d = std::get_if<DiagonalPolytope>(&s)) {
    const Vector r = x.colwise().norm().transpose();
    Vector u;
    if (d->kind == DiagonalKind::fixed) {
      u = detail::project_ellipsoid(r, d->theta, c).first;
    } else {
      const int k = d->k;
      auto tp = [k](const Vector& t) { return project_capped_sum(t, 0.0, 1.0, k); };
      u = detail::project_dual_ball(r, c, tp, Vector::Constant(m, static_cast<double>(k) / m));
    }
    Matrix p = x;
    for (Eigen::Index j = 0; j < m; ++j) p.col(j) *= r(j) > 0.0 ? u(j) / r(j) : 0.0;
    return x - p;
  }
  if (const auto* b = std::get_if<SpectralBox>(&s)) {
    // Pad to at least m rows so every theta_i meets a singular value.
    const Eigen::Index n = x.rows();
    Matrix xp = Matrix::Zero(std::max(n, m), m);
    xp.topRows(n) = x;
    Eigen::JacobiSVD<Matrix> svd(xp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector sigma = svd.singularValues();
    const double a1 = b->alpha1, a2 = b->alpha2, a3 = b->alpha3;
    auto tp = [=](const Vector& t) { return project_capped_sum(t, a1, a2, a3); };
    const Vector u = detail::project_dual_ball(sigma, c, tp, Vector::Constant(m, a3 / m));
    const Matrix proj = svd.matrixU() * u.asDiagonal() * svd.matrixV().transpose();
    return x - proj.topRows(n);
  }
  throw NotSupported("prox_vgf_norm: no tractable dual-ball projection for '" + kind_name(s) + "'");
}

}  // namespace vgfkit
