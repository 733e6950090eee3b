#include <catch_amalgamated.hpp>

#include "vgfkit/errors.hpp"
#include "vgfkit/linalg.hpp"
#include "vgfkit/projections.hpp"
#include "vgfkit/random.hpp"

using namespace vgfkit;
using Catch::Approx;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("psd_project on small cases") {
  SECTION("identity is already PSD") {
    const PsdSplit s = psd_project(Matrix::Identity(2, 2));
    CHECK((s.plus - Matrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(s.minus.norm() < 1e-14);
  }
  SECTION("diagonal splits by sign") {
    const PsdSplit s = psd_project(mat2(1, 0, 0, -2));
    CHECK((s.plus - mat2(1, 0, 0, 0)).norm() < 1e-14);
    CHECK((s.minus - mat2(0, 0, 0, 2)).norm() < 1e-14);
  }
  SECTION("[0 1; 1 1] positive part") {
    const PsdSplit s = psd_project(mat2(0, 1, 1, 1));
    CHECK(s.plus(0, 0) == Approx(0.44).margin(0.01));
    CHECK(s.plus(0, 1) == Approx(0.72).margin(0.01));
    CHECK(s.plus(1, 1) == Approx(1.17).margin(0.01));
    // eigendecomposition oracle: (5 + sqrt 5)/10 etc.
    CHECK(s.plus(0, 0) == Approx(0.4472135955).epsilon(1e-9));
    CHECK(s.plus(0, 1) == Approx(0.7236067977).epsilon(1e-9));
    CHECK(s.plus(1, 1) == Approx(1.1708203932).epsilon(1e-9));
  }
  SECTION("asymmetric input is rejected") { CHECK_THROWS_AS(psd_project(mat2(0, 1, 0, 0)), InvalidInput); }
}

TEST_CASE("psd_project properties on random symmetric matrices") {
  Rng rng = make_rng(11);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = uniform_int(rng, 1, 6);
    const Matrix a = random_symmetric(rng, m) * uniform(rng, 0.1, 10.0);
    const PsdSplit s = psd_project(a);
    const double scale = std::max(1.0, spectral_norm_sym(a));
    CHECK(min_eig(s.plus) >= -1e-10 * scale);
    CHECK(min_eig(s.minus) >= -1e-10 * scale);
    CHECK((s.plus - s.minus - a).norm() <= 1e-10 * scale);
    CHECK(std::abs(inner(s.plus, s.minus)) <= 1e-10 * scale * scale);
  }
}

TEST_CASE("min_eig examples") {
  CHECK(min_eig(Matrix::Identity(3, 3)) == Approx(1.0));
  CHECK(min_eig(comparison_matrix(mat2(1, 0.8, 0.8, 1))) == Approx(0.2));
  Matrix a(3, 3);
  a << 1, 1, 2, 1, 2, 0, 2, 0, 5;
  CHECK(min_eig(a) < 0.0);
  CHECK(min_eig(a) == Approx(-0.21758071).epsilon(1e-6));
}

TEST_CASE("pinv") {
  CHECK((pinv(mat2(2, 0, 0, 0)) - mat2(0.5, 0, 0, 0)).norm() < 1e-14);
  CHECK((pinv(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK_THROWS_AS(pinv(mat2(1, 0, 0, -1)), InvalidInput);

  Rng rng = make_rng(3);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index m = uniform_int(rng, 1, 6);
    const Eigen::Index r = uniform_int(rng, 1, static_cast<int>(m));
    Vector ev = Vector::Zero(m);
    for (Eigen::Index i = 0; i < r; ++i) ev(i) = uniform(rng, 0.1, 10.0);
    const Matrix u = random_orthogonal(rng, m);
    const Matrix a = symmetrize(u * ev.asDiagonal() * u.transpose());
    const Matrix p = pinv(a);
    CHECK(is_symmetric(p));
    CHECK(is_psd(p));
    CHECK((a * p * a - a).norm() <= 1e-8 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("thin_qr") {
  Rng rng = make_rng(5);
  SECTION("orthonormal columns give a signed identity factor") {
    const Matrix q0 = random_orthogonal(rng, 6).leftCols(3);
    const ThinQr qr = thin_qr(q0);
    CHECK((qr.r.cwiseAbs() - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((qr.q * qr.r - q0).norm() < 1e-12);
  }
  SECTION("reconstruction, orthonormality, sign convention, determinism") {
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index k = uniform_int(rng, 1, 5);
      const Eigen::Index n = k + uniform_int(rng, 0, 10);
      const Matrix a = gaussian(rng, n, k);
      const ThinQr qr = thin_qr(a);
      CHECK((qr.q * qr.r - a).norm() <= 1e-12 * std::max(1.0, a.norm()));
      CHECK((qr.q.transpose() * qr.q - Matrix::Identity(k, k)).norm() <= 1e-12);
      CHECK((qr.r.diagonal().array() >= 0.0).all());
      CHECK(qr.r.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() == 0.0);
      const ThinQr again = thin_qr(a);
      CHECK(again.q == qr.q);
      CHECK(again.r == qr.r);
    }
  }
  SECTION("wide input is rejected") { CHECK_THROWS_AS(thin_qr(Matrix::Ones(2, 3)), InvalidInput); }
}

TEST_CASE("project_scaled_simplex") {
  Vector v(2);
  v << 0.2, 0.3;
  CHECK((project_scaled_simplex(v, 1.0) - v).norm() < 1e-15);
  v << 0.5, 0.8;
  Vector e(2);
  e << 0.35, 0.65;
  CHECK((project_scaled_simplex(v, 1.0) - e).norm() < 1e-12);
  v << -1.0, 2.0;
  e << 0.0, 1.0;
  CHECK((project_scaled_simplex(v, 1.0) - e).norm() < 1e-12);
  CHECK_THROWS_AS(project_scaled_simplex(v, 0.0), InvalidInput);

  // Optimality: the projection p of v satisfies <v - p, q - p> <= 0 for feasible q.
  Rng rng = make_rng(9);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = uniform_int(rng, 1, 8);
    const Vector x = 2.0 * gaussian_vector(rng, n);
    const double r = uniform(rng, 0.1, 3.0);
    const Vector p = project_scaled_simplex(x, r);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() <= r + 1e-12);
    for (int k = 0; k < 20; ++k) {
      Vector q = gaussian_vector(rng, n).cwiseAbs();
      q *= uniform(rng) * r / q.sum();
      CHECK((x - p).dot(q - p) <= 1e-10);
    }
  }
}

TEST_CASE("project_capped_sum optimality") {
  Rng rng = make_rng(10);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = uniform_int(rng, 1, 8);
    const double lo = uniform(rng, -1.0, 0.5), hi = lo + uniform(rng, 0.1, 2.0);
    const double total = uniform(rng, n * lo, n * hi);
    const Vector x = 2.0 * gaussian_vector(rng, n);
    const Vector p = project_capped_sum(x, lo, hi, total);
    CHECK(p.minCoeff() >= lo - 1e-12);
    CHECK(p.maxCoeff() <= hi + 1e-12);
    CHECK(p.sum() == Approx(total).margin(1e-9));
    // KKT: free coordinates share one shift, clamped ones sit on the correct side of it.
    double nu = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < n; ++i)
      if (p(i) > lo + 1e-9 && p(i) < hi - 1e-9) nu = x(i) - p(i);
    if (std::isnan(nu)) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (p(i) > lo + 1e-9 && p(i) < hi - 1e-9) CHECK(x(i) - p(i) == Approx(nu).margin(1e-8));
      if (p(i) <= lo + 1e-9) CHECK(x(i) - nu <= lo + 1e-8);
      if (p(i) >= hi - 1e-9) CHECK(x(i) - nu >= hi - 1e-8);
    }
  }
  Vector v(2);
  v << 5.0, 0.0;
  Vector e(2);
  e << 2.0, 1.0;
  CHECK((project_capped_sum(v, 1.0, 2.0, 3.0) - e).norm() < 1e-12);
  CHECK_THROWS_AS(project_capped_sum(v, 1.0, 2.0, 5.0), InvalidInput);
}

TEST_CASE("project_convex_hull") {
  std::vector<Vector> pts(3, Vector::Zero(2));
  pts[1] << 1.0, 0.0;
  pts[2] << 0.0, 1.0;
  Vector x(2);
  x << 1.0, 1.0;
  Vector e(2);
  e << 0.5, 0.5;
  CHECK((project_convex_hull(pts, x) - e).norm() < 1e-10);
  x << 0.2, 0.3;
  CHECK((project_convex_hull(pts, x) - x).norm() < 1e-10);
  x << -1.0, -2.0;
  CHECK(project_convex_hull(pts, x).norm() < 1e-10);
}
