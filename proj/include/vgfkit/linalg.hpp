#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "vgfkit/errors.hpp"

namespace vgfkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenvalues at or above -kPsdTol * max(1, |A|_2) count as nonnegative.
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kSymTol = 1e-12;
inline constexpr double kDefaultRankTol = 1e-12;

struct PsdSplit {
  Matrix plus;
  Matrix minus;
};

struct ThinQr {
  Matrix q;  // n x k, orthonormal columns
  Matrix r;  // k x k, upper triangular with nonnegative diagonal
};

struct SymEig {
  Vector values;  // ascending
  Matrix vectors;
};

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_symmetric(const Matrix& a, double tol = kSymTol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, max_abs(a));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol * scale) return false;
  return true;
}

inline void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw InvalidInput(std::string(what) + ": matrix is not square");
  if (!a.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
  if (!is_symmetric(a)) throw InvalidInput(std::string(what) + ": matrix is not symmetric");
}

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

inline SymEig sym_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(a));
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double spectral_norm_sym(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Vector ev = sym_eig(a).values;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline Matrix from_eig(const Matrix& vectors, const Vector& values) {
  return vectors * values.asDiagonal() * vectors.transpose();
}

// Moreau decomposition with respect to the PSD cone: a = plus - minus.
inline PsdSplit psd_project(const Matrix& a) {
  require_symmetric(a, "psd_project");
  const SymEig e = sym_eig(a);
  const Vector pos = e.values.cwiseMax(0.0);
  const Vector neg = (-e.values).cwiseMax(0.0);
  return {symmetrize(from_eig(e.vectors, pos)), symmetrize(from_eig(e.vectors, neg))};
}

inline Matrix psd_part(const Matrix& a) { return psd_project(a).plus; }

inline double min_eig(const Matrix& a) {
  require_symmetric(a, "min_eig");
  if (a.size() == 0) return 0.0;
  return sym_eig(a).values(0);
}

inline double max_eig(const Matrix& a) {
  require_symmetric(a, "max_eig");
  if (a.size() == 0) return 0.0;
  const Vector v = sym_eig(a).values;
  return v(v.size() - 1);
}

inline bool is_psd(const Matrix& a, double tol = kPsdTol) {
  if (a.size() == 0) return true;
  const Vector v = sym_eig(a).values;
  const double scale = std::max({1.0, std::abs(v(0)), std::abs(v(v.size() - 1))});
  return v(0) >= -tol * scale;
}

// Moore-Penrose pseudo-inverse of a PSD matrix. Eigenvalues below
// rank_tol * lambda_max are treated as zero.
inline Matrix pinv(const Matrix& a, double rank_tol = kDefaultRankTol) {
  require_symmetric(a, "pinv");
  if (a.size() == 0) return a;
  const SymEig e = sym_eig(a);
  const double lmax = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  if (e.values(0) < -kPsdTol * std::max(1.0, lmax))
    throw InvalidInput("pinv: matrix is indefinite");
  const double cut = rank_tol * lmax;
  Vector inv(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = e.values(i) > cut && e.values(i) > 0.0 ? 1.0 / e.values(i) : 0.0;
  return symmetrize(from_eig(e.vectors, inv));
}

// Comparison matrix: off-diagonal entries negated.
inline Matrix comparison_matrix(const Matrix& a) {
  Matrix c = -a;
  c.diagonal() = a.diagonal();
  return c;
}

inline ThinQr thin_qr(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  if (n < k) throw InvalidInput("thin_qr: needs rows >= cols");
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

// Frobenius inner product <A, B> = tr(A^T B).
inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

}  // namespace vgfkit
