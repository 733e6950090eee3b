#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "vgfkit/hierclass.hpp"
#include "vgfkit/solver.hpp"
#include "vgfkit/synthetic.hpp"

using namespace vgfkit;
using Catch::Approx;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

struct Bilinear {
  Vector F(const Vector& z) const {
    Vector f(2);
    f << z(1), -z(0);
    return f;
  }
  Vector project(const Vector& z) const { return z.cwiseMax(-1.0).cwiseMin(1.0); }
};

SaddleProblem benchmark_problem(int n, int samples, std::uint64_t seed, double lambda = 1.0) {
  const CategoryTree tree = benchmark_tree();
  const Dataset d = hierarchical_dataset(tree, n, samples, seed);
  auto loss = std::make_shared<MulticlassHingeLoss>(d.a, d.labels, build_incidence(tree));
  return SaddleProblem(loss, make_box(build_ancestor_mbar(tree, 1.0, 0.8).mbar), lambda);
}

double inner_product(const SaddlePoint& a, const SaddlePoint& b) {
  return oracle::frob_inner(a.x, b.x) + oracle::frob_inner(a.mm, b.mm) + a.g.dot(b.g);
}

}  // namespace

TEST_CASE("SaddleProblem validation") {
  auto loss = std::make_shared<MulticlassHingeLoss>(Matrix::Ones(3, 2), std::vector<int>{1, 2}, build_incidence_flat(2));
  CHECK_NOTHROW(SaddleProblem(loss, make_box(mat2(1, 0.8, 0.8, 1)), 1.0));
  CHECK_THROWS_AS(SaddleProblem(loss, make_box(mat2(1, 0.8, 0.8, 1)), 0.0), InvalidInput);
  CHECK_THROWS_AS(SaddleProblem(loss, make_box(mat2(1, 2, 2, 1)), 1.0), NotCertified);
  CHECK_THROWS_AS(SaddleProblem(loss, make_trace_ball(3, 1.0), 1.0), DimensionMismatch);
}

TEST_CASE("compute_F") {
  Rng rng = make_rng(81);
  const SaddleProblem p = benchmark_problem(14, 20, 1);
  const SaddleVI vi(p);
  SaddlePoint z = vi.initial_point();
  z.g = gaussian_vector(rng, p.p()).cwiseAbs();
  const SaddlePoint f = compute_F(p, z);
  CHECK(f.mm.norm() == 0.0);
  CHECK((f.x - p.loss->apply_D(z.g)).norm() == 0.0);

  SECTION("hinge: dg = -1 - D*(X)") {
    z.x = gaussian(rng, p.n(), p.m());
    z.g.setZero();
    const SaddlePoint fz = compute_F(p, z);
    CHECK((fz.g + Vector::Ones(p.p()) + p.loss->apply_Dstar(z.x)).norm() <= 1e-12);
    CHECK((fz.mm + p.lambda * z.x.transpose() * z.x).norm() <= 1e-12);
  }

  SECTION("monotone on feasible pairs") {
    for (int t = 0; t < 200; ++t) {
      auto sample = [&] {
        SaddlePoint s;
        s.x = gaussian(rng, p.n(), p.m());
        s.mm = p.project_m(3.0 * random_symmetric(rng, p.m()));
        s.g = p.loss->project_G(gaussian_vector(rng, p.p()));
        return s;
      };
      const SaddlePoint a = sample(), b = sample();
      const SaddlePoint fa = compute_F(p, a), fb = compute_F(p, b);
      const SaddlePoint df{fa.x - fb.x, fa.mm - fb.mm, fa.g - fb.g};
      const SaddlePoint dz{a.x - b.x, a.mm - b.mm, a.g - b.g};
      const double scale = std::max(1.0, std::abs(inner_product(fa, a)) + std::abs(inner_product(fb, b)));
      CHECK(inner_product(df, dz) >= -1e-8 * scale);
    }
  }
}

TEST_CASE("mirror_prox on a bilinear toy") {
  LineSearchParams params;
  params.max_iter = 1000;
  params.eps = 0.0;
  Vector z0(2);
  z0 << 0.9, -0.7;
  const MirrorProxOutput out = mirror_prox(Bilinear{}, z0, params, 1.0);
  CHECK(out.iterations <= 1000);
  CHECK(out.average.norm() <= 1e-3);
  CHECK(out.max_delta <= 0.0);

  LineSearchParams bad = params;
  bad.max_backtracks = 0;
  CHECK_THROWS_AS(mirror_prox(Bilinear{}, z0, bad, 1e6), SolverError);
  bad.c_dec = 1.0;
  CHECK_THROWS_AS(mirror_prox(Bilinear{}, z0, bad, 1.0), InvalidInput);
}

TEST_CASE("solve_saddle on the synthetic benchmark") {
  const SaddleProblem p = benchmark_problem(28, 120, 2);
  LineSearchParams params;
  params.max_iter = 2000;
  params.eps = 0.0;
  const SaddleSolution sol = solve_saddle(p, params);
  REQUIRE(sol.trace.size() == 2000);
  CHECK(sol.max_delta <= 0.0);
  CHECK(sol.min_eig_m >= -1e-9);
  CHECK(contains(p.mset, sol.last.mm, 1e-8));
  CHECK((p.loss->project_G(sol.last.g) - sol.last.g).norm() <= 1e-12);
  // averaged objective settles: obj(zbar_2t) <= obj(zbar_t) + 1e-9 scale
  for (std::size_t t = 64; 2 * t <= sol.trace.size(); t *= 2) {
    const double a = sol.trace[t - 1].objective, b = sol.trace[2 * t - 1].objective;
    CHECK(b <= a + 1e-9 * std::max(1.0, std::abs(a)));
  }
  // accuracy on the training set
  CHECK(evaluate(benchmark_tree(), sol.average.x, hierarchical_dataset(benchmark_tree(), 28, 120, 2).a,
                 hierarchical_dataset(benchmark_tree(), 28, 120, 2).labels)
            .accuracy >= 0.95);

  SECTION("deterministic trace") {
    const SaddleSolution again = solve_saddle(p, params);
    REQUIRE(again.trace.size() == sol.trace.size());
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
      CHECK(again.trace[i].gap == sol.trace[i].gap);
      CHECK(again.trace[i].objective == sol.trace[i].objective);
      CHECK(again.trace[i].step == sol.trace[i].step);
    }
    CHECK(again.average.x == sol.average.x);
  }

  SECTION("baseline best-so-far is non-increasing") {
    const BaselineResult b = baseline_subgradient(p, SubgradientParams{500, 0.1, 1});
    for (std::size_t i = 1; i < b.trace.size(); ++i) CHECK(b.trace[i].objective <= b.trace[i - 1].objective);
    CHECK(p.objective(b.x) == Approx(b.best_objective));
    CHECK(b.best_objective <= p.objective(Matrix::Zero(p.n(), p.m())));
  }
}

TEST_CASE("M iterates stay PSD when the plain box projection does not") {
  // Box whose comparison matrix is PSD but whose projection of a PSD matrix can be indefinite.
  const Matrix mbar = mat2(1.83217748, 0.45173886, 0.45173886, 0.68683206);
  Rng rng = make_rng(82);
  const Matrix a = gaussian(rng, 6, 30);
  std::vector<int> labels;
  for (int s = 0; s < 30; ++s) labels.push_back(a(0, s) > 0 ? 1 : 2);
  const SaddleProblem p(std::make_shared<MulticlassHingeLoss>(a, labels, build_incidence_flat(2)), make_box(mbar), 0.5);
  const Matrix g = mat2(0.24008888, -0.99466733, -0.99466733, 4.15123699);
  CHECK(min_eig(project(p.mset, g)) < 0.0);
  CHECK(min_eig(p.project_m(g)) >= -1e-12);
  LineSearchParams params;
  params.max_iter = 500;
  const SaddleSolution sol = solve_saddle(p, params);
  CHECK(sol.min_eig_m >= -1e-9);
}

TEST_CASE("reduce_problem") {
  SECTION("dimension arithmetic") {
    Rng rng = make_rng(83);
    auto loss = std::make_shared<MulticlassHingeLoss>(gaussian(rng, 5, 1), std::vector<int>{1}, build_incidence_flat(2));
    const ReducedProblem r = reduce_problem(SaddleProblem(loss, make_box(mat2(1, 0.5, 0.5, 1)), 1.0));
    CHECK_FALSE(r.identity);
    CHECK(r.problem.n() == 2);
    CHECK(r.q.rows() == 5);
    CHECK(r.q.cols() == 2);
  }
  SECTION("identity when n <= m p") {
    const SaddleProblem p = benchmark_problem(14, 20, 3);
    CHECK(reduce_problem(p).identity);
  }
  SECTION("reduced and full solves agree") {
    const SaddleProblem p = benchmark_problem(200, 6, 4);
    const ReducedProblem r = reduce_problem(p);
    REQUIRE_FALSE(r.identity);
    CHECK(r.problem.n() < p.n());
    LineSearchParams params;
    params.max_iter = 3000;
    params.eps = 0.0;
    const SaddleSolution full = solve_saddle(p, params);
    const SaddleSolution red = solve_saddle(r.problem, params);
    REQUIRE(full.last_gap <= 1e-20);
    REQUIRE(red.last_gap <= 1e-20);
    const double j_full = p.objective(full.last.x);
    CHECK(r.problem.objective(red.last.x) == Approx(j_full).margin(1e-5));
    CHECK(p.objective(r.back_map(red.last.x)) == Approx(j_full).margin(1e-5));
    CHECK(r.problem.objective(red.average.x) == Approx(p.objective(r.back_map(red.average.x))).margin(1e-9));
  }
}

TEST_CASE("representer_coeffs") {
  Rng rng = make_rng(84);
  SECTION("spectral box, squared loss") {
    const int m = 3;
    const Matrix a = gaussian(rng, 12, 5);
    const SaddleProblem p(std::make_shared<SquaredNormLoss>(a, gaussian(rng, 5, m)), make_spectral_box(m, 0.5, 2.0, 1.0 * m), 0.3);
    LineSearchParams params;
    params.max_iter = 20000;
    params.eps = 1e-20;
    const SaddleSolution sol = solve_saddle(p, params);
    const RepresenterResult r = representer_coeffs(p, sol.last);
    CHECK(r.c.rows() == m * p.p());
    CHECK(r.residual <= 1e-4);
    // doubling lambda halves C at fixed (M, g)
    const SaddleProblem p2(p.loss, p.mset, 0.6);
    CHECK((representer_coeffs(p2, sol.last).c - 0.5 * r.c).norm() <= 1e-12 * r.c.norm());
  }
  SECTION("m = 1 recovers ridge regression") {
    const Matrix a = gaussian(rng, 6, 9);
    const Matrix b = gaussian(rng, 9, 1);
    const double lambda = 0.4, alpha = 1.5;
    const SaddleProblem p(std::make_shared<SquaredNormLoss>(a, b), make_spectral_box(1, 1.0, 2.0, alpha), lambda);
    LineSearchParams params;
    params.max_iter = 20000;
    params.eps = 1e-24;
    const SaddleSolution sol = solve_saddle(p, params);
    const Matrix ridge = (a * a.transpose() + 2.0 * lambda * alpha * Matrix::Identity(6, 6)).ldlt().solve(a * b);
    CHECK((sol.last.x - ridge).norm() <= 1e-6 * ridge.norm());
    const RepresenterResult r = representer_coeffs(p, sol.last);
    CHECK(r.residual <= 1e-6);
    // C is in the data coordinates: X = A c
    CHECK((a * r.c - sol.last.x).norm() <= 1e-6 * ridge.norm());
  }
  SECTION("singular M") {
    const SaddleProblem p = benchmark_problem(14, 20, 5);
    SaddlePoint z = SaddleVI(p).initial_point();
    z.mm.setZero();
    CHECK_THROWS_AS(representer_coeffs(p, z), NotSupported);
  }
}
