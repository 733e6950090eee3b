#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "vgfkit/linalg.hpp"
#include "vgfkit/projections.hpp"

namespace vgfkit {

// {M : |M_ij| <= Mbar_ij}
struct Box {
  Matrix mbar;
};

// {M : M_ii = D_ii, |M_ij - C_ij| <= D_ij for i != j}
struct AsymBox {
  Matrix center;  // C, zero diagonal
  Matrix radius;  // D, nonnegative
};

enum class HadamardNorm { l1, l2, linf };

// {K o Mbar : ||K||_dual <= 1, K symmetric}. norm_kind names the dual norm
// on K, so that Omega(X) = ||Mbar o X^T X|| in the primal norm:
//   linf -> sum Mbar_ij |G_ij|, l2 -> ||Mbar o G||_F, l1 -> max Mbar_ij |G_ij|.
struct HadamardBall {
  Matrix mbar;
  HadamardNorm norm_kind;
};

// {M : alpha1 I <= M <= alpha2 I, tr M = alpha3}
struct SpectralBox {
  int dim;
  double alpha1;
  double alpha2;
  double alpha3;
};

// conv{M_1, ..., M_p}
struct FiniteSet {
  std::vector<Matrix> members;
};

enum class DiagonalKind { fixed, k_support };

// Diagonal matrices diag(theta): a single fixed theta, or the k-support
// polytope {0 <= theta <= 1, sum theta = k}.
struct DiagonalPolytope {
  DiagonalKind kind;
  int dim;
  Vector theta;  // used for kind == fixed
  int k = 0;     // used for kind == k_support
};

// {M >= 0 : tr M <= radius}
struct TraceBall {
  int dim;
  double radius;
};

using MSet = std::variant<Box, AsymBox, HadamardBall, SpectralBox, FiniteSet, DiagonalPolytope,
                          TraceBall>;

struct SupportResult {
  double value;
  Matrix argmax;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline const char* to_string(HadamardNorm k) {
  switch (k) {
    case HadamardNorm::l1: return "l1";
    case HadamardNorm::l2: return "l2";
    case HadamardNorm::linf: return "linf";
  }
  return "?";
}

inline std::string kind_name(const MSet& s) {
  return std::visit(overloaded{
                        [](const Box&) -> std::string { return "box"; },
                        [](const AsymBox&) -> std::string { return "asym_box"; },
                        [](const HadamardBall& h) -> std::string {
                          return std::string("hadamard_") + to_string(h.norm_kind);
                        },
                        [](const SpectralBox&) -> std::string { return "spectral_box"; },
                        [](const FiniteSet&) -> std::string { return "finite_set"; },
                        [](const DiagonalPolytope& d) -> std::string {
                          return d.kind == DiagonalKind::fixed ? "diagonal_fixed"
                                                               : "diagonal_ksupport";
                        },
                        [](const TraceBall&) -> std::string { return "trace_ball"; },
                    },
                    s);
}

inline int dim(const MSet& s) {
  return std::visit(overloaded{
                        [](const Box& b) { return static_cast<int>(b.mbar.rows()); },
                        [](const AsymBox& b) { return static_cast<int>(b.radius.rows()); },
                        [](const HadamardBall& h) { return static_cast<int>(h.mbar.rows()); },
                        [](const SpectralBox& b) { return b.dim; },
                        [](const FiniteSet& f) {
                          return f.members.empty() ? 0 : static_cast<int>(f.members[0].rows());
                        },
                        [](const DiagonalPolytope& d) { return d.dim; },
                        [](const TraceBall& t) { return t.dim; },
                    },
                    s);
}

namespace detail {

inline void require_nonnegative_sym(const Matrix& a, const char* what) {
  require_symmetric(a, what);
  if ((a.array() < 0.0).any()) throw InvalidInput(std::string(what) + ": entries must be >= 0");
}

inline void require_dims(const MSet& s, const Matrix& a, const char* what) {
  if (a.rows() != dim(s) || a.cols() != dim(s))
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(dim(s)) + "x" +
                            std::to_string(dim(s)) + " matrix, got " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()));
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Ratio |a| / b with 0/0 = 0 and x/0 = +inf.
inline double safe_ratio(double a, double b) {
  if (b > 0.0) return std::abs(a) / b;
  return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

inline Matrix masked(const Matrix& m0, const Matrix& mbar) {
  return (mbar.array() > 0.0).select(m0, 0.0);
}

// Euclidean projection onto {sum_ij M_ij^2 / Mbar_ij^2 <= 1}, zero where Mbar is zero.
inline Matrix project_weighted_frobenius_ball(const Matrix& m0, const Matrix& mbar) {
  Matrix m = masked(m0, mbar);
  double g = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (mbar(i) > 0.0) g += (m(i) / mbar(i)) * (m(i) / mbar(i));
  if (g <= 1.0) return m;
  auto excess = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (mbar(i) <= 0.0) continue;
      const double r = m(i) * mbar(i) / (mbar(i) * mbar(i) + mu);
      s += r * r;
    }
    return s - 1.0;
  };
  const double mu = bisect_decreasing_root(excess, m.cwiseProduct(mbar).norm());
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (mbar(i) > 0.0) out(i) = m(i) * mbar(i) * mbar(i) / (mbar(i) * mbar(i) + mu);
  return out;
}

// Euclidean projection onto {sum_ij |M_ij| / Mbar_ij <= 1}, zero where Mbar is zero.
inline Matrix project_weighted_l1_ball(const Matrix& m0, const Matrix& mbar) {
  Matrix m = masked(m0, mbar);
  double g = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (mbar(i) > 0.0) g += std::abs(m(i)) / mbar(i);
  if (g <= 1.0) return m;
  auto shrink = [&](double mu) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (mbar(i) > 0.0) out(i) = sgn(m(i)) * std::max(0.0, std::abs(m(i)) - mu / mbar(i));
    return out;
  };
  auto excess = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (mbar(i) > 0.0) s += std::max(0.0, std::abs(m(i)) - mu / mbar(i)) / mbar(i);
    return s - 1.0;
  };
  double mu = bisect_decreasing_root(excess, m.cwiseAbs().cwiseProduct(mbar).maxCoeff());
  // Exact threshold on the active set.
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (mbar(i) > 0.0 && std::abs(m(i)) - mu / mbar(i) > 0.0) {
      num += std::abs(m(i)) / mbar(i);
      den += 1.0 / (mbar(i) * mbar(i));
    }
  }
  if (den > 0.0) {
    const double exact = (num - 1.0) / den;
    if (std::abs(excess(exact)) <= std::abs(excess(mu))) mu = exact;
  }
  return shrink(mu);
}

// theta for sup over {alpha1 <= theta <= alpha2, sum = alpha3} of sum theta_i lambda_i,
// lambda given in ascending order: alpha2 goes to the largest values first.
inline Vector spectral_allocation(const Vector& lambda_ascending, double a1, double a2, double a3) {
  const Eigen::Index m = lambda_ascending.size();
  Vector theta = Vector::Constant(m, a1);
  double budget = a3 - m * a1;
  for (Eigen::Index i = m - 1; i >= 0 && budget > 0.0; --i) {
    const double add = std::min(a2 - a1, budget);
    theta(i) += add;
    budget -= add;
  }
  return theta;
}

}  // namespace detail

// Validates the invariants of each set kind; throws InvalidInput.
inline void validate(const MSet& s) {
  std::visit(overloaded{
                 [](const Box& b) { detail::require_nonnegative_sym(b.mbar, "box"); },
                 [](const AsymBox& b) {
                   detail::require_nonnegative_sym(b.radius, "asym_box radius");
                   require_symmetric(b.center, "asym_box center");
                   if (b.center.rows() != b.radius.rows())
                     throw InvalidInput("asym_box: center and radius differ in size");
                   if (b.center.diagonal().cwiseAbs().maxCoeff() > 0.0)
                     throw InvalidInput("asym_box: center must have zero diagonal");
                 },
                 [](const HadamardBall& h) { detail::require_nonnegative_sym(h.mbar, "hadamard"); },
                 [](const SpectralBox& b) {
                   if (b.dim <= 0) throw InvalidInput("spectral_box: dimension must be positive");
                   if (!(b.alpha1 < b.alpha2))
                     throw InvalidInput("spectral_box: need alpha1 < alpha2");
                   const double tol = 1e-12 * std::max(1.0, std::abs(b.alpha3));
                   if (b.alpha3 < b.dim * b.alpha1 - tol || b.alpha3 > b.dim * b.alpha2 + tol)
                     throw InvalidInput("spectral_box: alpha3 outside [m alpha1, m alpha2]");
                 },
                 [](const FiniteSet& f) {
                   if (f.members.empty()) throw InvalidInput("finite_set: no members");
                   for (const Matrix& m : f.members) {
                     require_symmetric(m, "finite_set member");
                     if (m.rows() != f.members[0].rows())
                       throw InvalidInput("finite_set: members differ in size");
                   }
                 },
                 [](const DiagonalPolytope& d) {
                   if (d.dim <= 0) throw InvalidInput("diagonal: dimension must be positive");
                   if (d.kind == DiagonalKind::fixed) {
                     if (d.theta.size() != d.dim)
                       throw InvalidInput("diagonal: theta length differs from dimension");
                     if ((d.theta.array() < 0.0).any())
                       throw InvalidInput("diagonal: theta must be nonnegative");
                   } else if (d.k < 1 || d.k > d.dim) {
                     throw InvalidInput("diagonal: k must lie in [1, m]");
                   }
                 },
                 [](const TraceBall& t) {
                   if (t.dim <= 0 || !(t.radius > 0.0))
                     throw InvalidInput("trace_ball: need positive dimension and radius");
                 },
             },
             s);
}

// sup_{M in S} <M, G> together with a maximizer. Ties in the box families are
// broken toward 0 off the diagonal and toward Mbar_ii on it.
inline SupportResult support(const MSet& s, const Matrix& g) {
  detail::require_dims(s, g, "support");
  const Eigen::Index m = g.rows();
  return std::visit(
      overloaded{
          [&](const Box& b) {
            Matrix arg(m, m);
            for (Eigen::Index i = 0; i < m; ++i)
              for (Eigen::Index j = 0; j < m; ++j)
                arg(i, j) = i == j ? (g(i, i) < 0.0 ? -b.mbar(i, i) : b.mbar(i, i))
                                   : b.mbar(i, j) * detail::sgn(g(i, j));
            return SupportResult{b.mbar.cwiseProduct(g.cwiseAbs()).sum(), arg};
          },
          [&](const AsymBox& b) {
            Matrix arg(m, m);
            for (Eigen::Index i = 0; i < m; ++i)
              for (Eigen::Index j = 0; j < m; ++j)
                arg(i, j) = i == j ? b.radius(i, i)
                                   : b.center(i, j) + b.radius(i, j) * detail::sgn(g(i, j));
            return SupportResult{inner(arg, g), arg};
          },
          [&](const HadamardBall& h) {
            switch (h.norm_kind) {
              case HadamardNorm::linf: return support(MSet{Box{h.mbar}}, g);
              case HadamardNorm::l2: {
                const Matrix w = h.mbar.cwiseProduct(g);
                const double nrm = w.norm();
                Matrix arg = Matrix::Zero(m, m);
                if (nrm > 0.0) arg = (w / nrm).cwiseProduct(h.mbar);
                return SupportResult{nrm, arg};
              }
              case HadamardNorm::l1: {
                Eigen::Index bi = 0, bj = 0;
                double best = -1.0;
                for (Eigen::Index i = 0; i < m; ++i)
                  for (Eigen::Index j = i; j < m; ++j) {
                    const double v = h.mbar(i, j) * std::abs(g(i, j));
                    if (v > best) {
                      best = v;
                      bi = i;
                      bj = j;
                    }
                  }
                Matrix arg = Matrix::Zero(m, m);
                if (best > 0.0) {
                  if (bi == bj) {
                    arg(bi, bi) = h.mbar(bi, bi) * detail::sgn(g(bi, bi));
                  } else {
                    arg(bi, bj) = arg(bj, bi) = 0.5 * h.mbar(bi, bj) * detail::sgn(g(bi, bj));
                  }
                }
                return SupportResult{std::max(best, 0.0), arg};
              }
            }
            throw InvalidInput("unknown hadamard norm");
          },
          [&](const SpectralBox& b) {
            const SymEig e = sym_eig(g);
            const Vector theta = detail::spectral_allocation(e.values, b.alpha1, b.alpha2, b.alpha3);
            return SupportResult{theta.dot(e.values), symmetrize(from_eig(e.vectors, theta))};
          },
          [&](const FiniteSet& f) {
            std::size_t best = 0;
            double val = inner(f.members[0], g);
            for (std::size_t i = 1; i < f.members.size(); ++i) {
              const double v = inner(f.members[i], g);
              if (v > val) {
                val = v;
                best = i;
              }
            }
            return SupportResult{val, f.members[best]};
          },
          [&](const DiagonalPolytope& d) {
            if (d.kind == DiagonalKind::fixed) {
              Matrix arg = d.theta.asDiagonal();
              return SupportResult{d.theta.dot(g.diagonal()), arg};
            }
            std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
            for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](Eigen::Index a, Eigen::Index c) { return g(a, a) > g(c, c); });
            Vector theta = Vector::Zero(m);
            for (int i = 0; i < d.k; ++i) theta(order[static_cast<std::size_t>(i)]) = 1.0;
            Matrix arg = theta.asDiagonal();
            return SupportResult{theta.dot(g.diagonal()), arg};
          },
          [&](const TraceBall& t) {
            const SymEig e = sym_eig(g);
            const double top = e.values(m - 1);
            Matrix arg = Matrix::Zero(m, m);
            if (top > 0.0) arg = t.radius * e.vectors.col(m - 1) * e.vectors.col(m - 1).transpose();
            return SupportResult{t.radius * std::max(top, 0.0), arg};
          },
      },
      s);
}

// Euclidean (Frobenius) projection of a symmetric matrix onto S.
inline Matrix project(const MSet& s, const Matrix& m0_in) {
  detail::require_dims(s, m0_in, "project");
  const Matrix m0 = symmetrize(m0_in);
  const Eigen::Index m = m0.rows();
  return std::visit(
      overloaded{
          [&](const Box& b) -> Matrix { return m0.cwiseMin(b.mbar).cwiseMax(-b.mbar); },
          [&](const AsymBox& b) -> Matrix {
            Matrix out = m0.cwiseMin(b.center + b.radius).cwiseMax(b.center - b.radius);
            out.diagonal() = b.radius.diagonal();
            return out;
          },
          [&](const HadamardBall& h) -> Matrix {
            switch (h.norm_kind) {
              case HadamardNorm::linf: return m0.cwiseMin(h.mbar).cwiseMax(-h.mbar);
              case HadamardNorm::l2: return detail::project_weighted_frobenius_ball(m0, h.mbar);
              case HadamardNorm::l1: return detail::project_weighted_l1_ball(m0, h.mbar);
            }
            throw InvalidInput("unknown hadamard norm");
          },
          [&](const SpectralBox& b) -> Matrix {
            const SymEig e = sym_eig(m0);
            const Vector theta = project_capped_sum(e.values, b.alpha1, b.alpha2, b.alpha3);
            return symmetrize(from_eig(e.vectors, theta));
          },
          [&](const FiniteSet& f) -> Matrix {
            std::vector<Vector> pts;
            pts.reserve(f.members.size());
            for (const Matrix& mm : f.members) pts.emplace_back(mm.reshaped());
            const Vector x0 = m0.reshaped();
            const Vector x = project_convex_hull(pts, x0);
            return symmetrize(x.reshaped(m, m));
          },
          [&](const DiagonalPolytope& d) -> Matrix {
            if (d.kind == DiagonalKind::fixed) return d.theta.asDiagonal();
            const Vector theta = project_capped_sum(m0.diagonal(), 0.0, 1.0, d.k);
            return theta.asDiagonal();
          },
          [&](const TraceBall& t) -> Matrix {
            const SymEig e = sym_eig(m0);
            const Vector theta = project_scaled_simplex(e.values, t.radius);
            return symmetrize(from_eig(e.vectors, theta));
          },
      },
      s);
}

// Minkowski gauge inf{t >= 0 : M in t S}; +inf when no such t exists.
inline double gauge(const MSet& s, const Matrix& mm) {
  detail::require_dims(s, mm, "gauge");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index m = mm.rows();
  const double tol = 1e-12 * std::max(1.0, max_abs(mm));
  return std::visit(
      overloaded{
          [&](const Box& b) {
            double g = 0.0;
            for (Eigen::Index i = 0; i < mm.size(); ++i)
              g = std::max(g, detail::safe_ratio(mm(i), b.mbar(i)));
            return g;
          },
          [&](const AsymBox&) -> double {
            throw NotSupported("gauge: asymmetric box does not contain the origin");
          },
          [&](const HadamardBall& h) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < mm.size(); ++i) {
              const double r = detail::safe_ratio(mm(i), h.mbar(i));
              if (std::isinf(r)) return inf;
              switch (h.norm_kind) {
                case HadamardNorm::linf: acc = std::max(acc, r); break;
                case HadamardNorm::l2: acc += r * r; break;
                case HadamardNorm::l1: acc += r; break;
              }
            }
            return h.norm_kind == HadamardNorm::l2 ? std::sqrt(acc) : acc;
          },
          [&](const SpectralBox& b) {
            if (mm.cwiseAbs().maxCoeff() == 0.0) return 0.0;
            const double t = mm.trace() / b.alpha3;
            if (!(t > 0.0)) return inf;
            const Vector ev = sym_eig(mm).values / t;
            const double etol = 1e-10 * std::max(1.0, b.alpha2);
            if (ev(0) < b.alpha1 - etol || ev(m - 1) > b.alpha2 + etol) return inf;
            return t;
          },
          [&](const FiniteSet&) -> double {
            throw NotSupported("gauge: not available for finite sets");
          },
          [&](const DiagonalPolytope& d) {
            Matrix off = mm;
            off.diagonal().setZero();
            if (off.cwiseAbs().maxCoeff() > tol) return inf;
            const Vector diag = mm.diagonal();
            if (diag.cwiseAbs().maxCoeff() == 0.0) return 0.0;
            if ((diag.array() < -tol).any()) return inf;
            if (d.kind == DiagonalKind::fixed) {
              double t = -1.0;
              for (Eigen::Index i = 0; i < m; ++i) {
                if (d.theta(i) > 0.0) {
                  t = diag(i) / d.theta(i);
                  break;
                }
              }
              if (t < 0.0 || (diag - t * d.theta).cwiseAbs().maxCoeff() > tol) return inf;
              return t;
            }
            const double t = diag.sum() / d.k;
            if (diag.maxCoeff() > t + tol) return inf;
            return t;
          },
          [&](const TraceBall& t) {
            if (!is_symmetric(mm, 1e-12) || !is_psd(mm)) return inf;
            return std::max(0.0, mm.trace()) / t.radius;
          },
      },
      s);
}

// Membership within tol (relative to max(1, max|M|)).
inline bool contains(const MSet& s, const Matrix& mm, double tol = 1e-9) {
  if (mm.rows() != dim(s) || mm.cols() != dim(s)) return false;
  if (!is_symmetric(mm, std::max(tol, kSymTol))) return false;
  const double scale = std::max(1.0, max_abs(mm));
  const double t = tol * scale;
  const Eigen::Index m = mm.rows();
  return std::visit(
      overloaded{
          [&](const Box& b) { return ((mm.cwiseAbs() - b.mbar).array() <= t).all(); },
          [&](const AsymBox& b) {
            for (Eigen::Index i = 0; i < m; ++i)
              for (Eigen::Index j = 0; j < m; ++j) {
                if (i == j && std::abs(mm(i, i) - b.radius(i, i)) > t) return false;
                if (i != j && std::abs(mm(i, j) - b.center(i, j)) > b.radius(i, j) + t)
                  return false;
              }
            return true;
          },
          [&](const HadamardBall& h) {
            for (Eigen::Index i = 0; i < mm.size(); ++i)
              if (h.mbar(i) == 0.0 && std::abs(mm(i)) > t) return false;
            return gauge(MSet{HadamardBall{h.mbar, h.norm_kind}}, detail::masked(mm, h.mbar)) <=
                   1.0 + tol;
          },
          [&](const SpectralBox& b) {
            const Vector ev = sym_eig(mm).values;
            return ev(0) >= b.alpha1 - t && ev(m - 1) <= b.alpha2 + t &&
                   std::abs(mm.trace() - b.alpha3) <= t;
          },
          [&](const FiniteSet& f) {
            return (project(MSet{f}, mm) - mm).norm() <= t;
          },
          [&](const DiagonalPolytope& d) {
            Matrix off = mm;
            off.diagonal().setZero();
            if (off.cwiseAbs().maxCoeff() > t) return false;
            const Vector diag = mm.diagonal();
            if (d.kind == DiagonalKind::fixed) return (diag - d.theta).cwiseAbs().maxCoeff() <= t;
            return (diag.array() >= -t).all() && (diag.array() <= 1.0 + t).all() &&
                   std::abs(diag.sum() - d.k) <= t;
          },
          [&](const TraceBall& tb) {
            const Vector ev = sym_eig(mm).values;
            return ev(0) >= -t && mm.trace() <= tb.radius + t;
          },
      },
      s);
}

// True when every member of S is PSD, so Omega_S is a maximum of convex quadratics.
inline bool members_psd(const MSet& s) {
  return std::visit(overloaded{
                        [](const SpectralBox& b) { return b.alpha1 >= 0.0; },
                        [](const TraceBall&) { return true; },
                        [](const DiagonalPolytope& d) {
                          return d.kind == DiagonalKind::k_support || (d.theta.array() >= 0.0).all();
                        },
                        [](const FiniteSet& f) {
                          for (const Matrix& m : f.members)
                            if (!is_psd(m)) return false;
                          return true;
                        },
                        [](const auto&) { return false; },
                    },
                    s);
}

// Projection onto S intersected with the PSD cone. Sets inside the cone use the
// plain projection; the others run Dykstra's alternating projections.
inline Matrix project_psd_intersection(const MSet& s, const Matrix& m0, int max_iter = 500,
                                       double tol = 1e-12) {
  if (members_psd(s)) return project(s, m0);
  Matrix x = symmetrize(m0);
  Matrix p = Matrix::Zero(x.rows(), x.cols());
  Matrix q = Matrix::Zero(x.rows(), x.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Matrix y = project(s, x + p);
    p = x + p - y;
    const Matrix xn = psd_part(y + q);
    q = y + q - xn;
    const double change = (xn - x).norm();
    x = xn;
    if (change <= tol * std::max(1.0, x.norm()) && (x - y).norm() <= 1e-10 * std::max(1.0, x.norm()))
      break;
  }
  return x;
}

// Named constructors that validate on the way in.
inline MSet make_box(Matrix mbar) {
  MSet s = Box{std::move(mbar)};
  validate(s);
  return s;
}
inline MSet make_asym_box(Matrix center, Matrix radius) {
  MSet s = AsymBox{std::move(center), std::move(radius)};
  validate(s);
  return s;
}
inline MSet make_hadamard(Matrix mbar, HadamardNorm kind) {
  MSet s = HadamardBall{std::move(mbar), kind};
  validate(s);
  return s;
}
inline MSet make_spectral_box(int m, double a1, double a2, double a3) {
  MSet s = SpectralBox{m, a1, a2, a3};
  validate(s);
  return s;
}
inline MSet make_finite_set(std::vector<Matrix> members) {
  MSet s = FiniteSet{std::move(members)};
  validate(s);
  return s;
}
inline MSet make_diagonal_fixed(Vector theta) {
  const int m = static_cast<int>(theta.size());
  MSet s = DiagonalPolytope{DiagonalKind::fixed, m, std::move(theta), 0};
  validate(s);
  return s;
}
inline MSet make_k_support(int m, int k) {
  MSet s = DiagonalPolytope{DiagonalKind::k_support, m, Vector(), k};
  validate(s);
  return s;
}
inline MSet make_trace_ball(int m, double r) {
  MSet s = TraceBall{m, r};
  validate(s);
  return s;
}

}  // namespace vgfkit
