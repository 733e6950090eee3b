#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "vgfkit/convexity.hpp"
#include "vgfkit/gram.hpp"
#include "vgfkit/losses.hpp"
#include "vgfkit/random.hpp"
#include "vgfkit/vgf.hpp"

namespace vgfkit {

struct LineSearchParams {
  double gamma0 = 0.0;  // <= 0: estimate from the linearized operator
  double c_dec = 2.0;
  double c_inc = 1.25;
  double eps = 1e-14;  // stop once V_{z_t}(z_{t+1}) <= eps
  long max_iter = 1000;
  int max_backtracks = 50;
  long burn_in = 10;  // iterations excluded from the weighted average
  long trace_every = 1;
  std::uint64_t seed = 0;
};

struct TraceRow {
  long iter;
  double gap;        // V_{z_t}(z_{t+1}) = 1/2 ||z_{t+1} - z_t||^2
  double objective;  // primal objective at the averaged point
  double step;       // accepted gamma_t
  double ms;         // wall time since start
};

// Per-iteration report passed to observers of the generic solver.
struct StepInfo {
  long iter;
  double gap;
  double gamma;
  double delta;
  const Vector* w;
  const Vector* z_next;
  const Vector* average;
};

struct MirrorProxOutput {
  Vector average;  // gamma-weighted average of the w_t after burn-in
  Vector last;     // final z
  long iterations = 0;
  bool converged = false;
  double last_gap = std::numeric_limits<double>::infinity();
  double max_delta = -std::numeric_limits<double>::infinity();
  double gamma = 0.0;
  double gamma0 = 0.0;
};

// Estimate of the Lipschitz constant of F at z0 by power iteration on its
// linearization (central differences, exact for quadratic F).
template <class VI>
double estimate_lipschitz(const VI& vi, const Vector& z0, const Vector& start, int steps = 10) {
  Vector v = start;
  double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;
  const double h = 1e-4 * std::max(1.0, z0.norm());
  double lip = 0.0;
  for (int i = 0; i < steps; ++i) {
    const Vector jv = (vi.F(z0 + h * v) - vi.F(z0 - h * v)) / (2.0 * h);
    lip = jv.norm();
    if (!(lip > 0.0) || !std::isfinite(lip)) return 0.0;
    v = jv / lip;
  }
  return lip;
}

// Mirror-prox with Euclidean prox-mapping and adaptive step size. VI supplies
// F(z) and project(z) on flattened points.
template <class VI>
MirrorProxOutput mirror_prox(const VI& vi, Vector z, const LineSearchParams& p, double gamma0,
                             const std::function<void(const StepInfo&)>& observe = {}) {
  if (!(p.c_dec > 1.0) || !(p.c_inc >= 1.0))
    throw InvalidInput("mirror_prox: need c_dec > 1 and c_inc >= 1");
  if (!(gamma0 > 0.0)) throw InvalidInput("mirror_prox: step size must be positive");
  MirrorProxOutput out;
  out.gamma0 = gamma0;
  double gamma = gamma0;
  Vector sum = Vector::Zero(z.size());
  double weight = 0.0;
  Vector avg = z;
  for (long t = 1; t <= p.max_iter; ++t) {
    const Vector fz = vi.F(z);
    Vector w, zn;
    double delta = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= p.max_backtracks; ++bt) {
      w = vi.project(z - gamma * fz);
      const Vector fw = vi.F(w);
      zn = vi.project(z - gamma * fw);
      delta = gamma * fw.dot(w - zn) - 0.5 * (zn - z).squaredNorm();
      if (delta <= 0.0) {
        accepted = true;
        break;
      }
      gamma /= p.c_dec;
    }
    if (!accepted)
      throw SolverError("mirror_prox: line search exceeded " + std::to_string(p.max_backtracks) +
                            " backtracks at iteration " + std::to_string(t),
                        std::numeric_limits<double>::quiet_NaN());
    const double gap = 0.5 * (zn - z).squaredNorm();
    if (t > p.burn_in) {
      sum += gamma * w;
      weight += gamma;
      avg = sum / weight;
    } else {
      avg = w;
    }
    out.max_delta = std::max(out.max_delta, delta);
    out.iterations = t;
    out.last_gap = gap;
    if (observe) observe(StepInfo{t, gap, gamma, delta, &w, &zn, &avg});
    z = std::move(zn);
    out.gamma = gamma;
    if (gap <= p.eps) {
      out.converged = true;
      break;
    }
    gamma *= p.c_inc;
  }
  out.average = avg;
  out.last = z;
  return out;
}

// min_X max_{M in S, g in G} L-hat form: lambda tr(X M X^T) + <X, D(g)> - Lhat(g).
struct SaddleProblem {
  LossPtr loss;
  MSet mset;
  double lambda = 1.0;

  SaddleProblem(LossPtr l, MSet s, double lam) : loss(std::move(l)), mset(std::move(s)), lambda(lam) {
    if (!loss) throw InvalidInput("saddle problem: missing loss");
    if (!(lambda > 0.0)) throw InvalidInput("saddle problem: lambda must be positive");
    if (dim(mset) != loss->m())
      throw DimensionMismatch("saddle problem: set dimension " + std::to_string(dim(mset)) +
                              " differs from class count " + std::to_string(loss->m()));
    if (!is_certified_convex(mset, static_cast<int>(loss->n())))
      throw NotCertified("saddle problem: Omega over '" + kind_name(mset) + "' is not certified convex");
  }

  Eigen::Index n() const { return loss->n(); }
  Eigen::Index m() const { return loss->m(); }
  Eigen::Index p() const { return loss->p(); }

  double objective(const Matrix& x) const { return loss->eval(x) + lambda * omega(mset, x); }

  // Projection of the M block onto S intersected with the PSD cone. The plain
  // projection is used when it lands in the cone (always the case for PSD
  // inputs when M in S implies M_+ in S); otherwise Dykstra's iteration.
  Matrix project_m(const Matrix& a) const {
    const Matrix p = vgfkit::project(mset, a);
    const SymEig e = sym_eig(p);
    const double scale = std::max(1.0, std::abs(e.values(e.values.size() - 1)));
    if (e.values(0) >= -1e-12 * scale) return p;
    return project_psd_intersection(mset, a, 5000, 1e-14);
  }
};

struct SaddlePoint {
  Matrix x;
  Matrix mm;
  Vector g;
};

// Flattened layout [vec X; vec M; g].
class SaddleVI {
 public:
  explicit SaddleVI(const SaddleProblem& p) : p_(p), n_(p.n()), m_(p.m()), q_(p.p()) {}

  Eigen::Index size() const { return n_ * m_ + m_ * m_ + q_; }

  Vector pack(const SaddlePoint& s) const {
    Vector z(size());
    z.head(n_ * m_) = Eigen::Map<const Vector>(s.x.data(), n_ * m_);
    z.segment(n_ * m_, m_ * m_) = Eigen::Map<const Vector>(s.mm.data(), m_ * m_);
    z.tail(q_) = s.g;
    return z;
  }

  SaddlePoint unpack(const Vector& z) const {
    SaddlePoint s;
    s.x = Eigen::Map<const Matrix>(z.data(), n_, m_);
    s.mm = Eigen::Map<const Matrix>(z.data() + n_ * m_, m_, m_);
    s.g = z.tail(q_);
    return s;
  }

  // F = [2 lambda X M + D(g); -lambda X^T X; grad Lhat(g) - D*(X)].
  SaddlePoint compute_F(const SaddlePoint& s) const {
    SaddlePoint f;
    f.x = 2.0 * p_.lambda * s.x * s.mm + p_.loss->apply_D(s.g);
    f.mm = -p_.lambda * gram(s.x);
    f.g = p_.loss->grad_lhat(s.g) - p_.loss->apply_Dstar(s.x);
    return f;
  }

  Vector F(const Vector& z) const { return pack(compute_F(unpack(z))); }

  Vector project(const Vector& z) const {
    SaddlePoint s = unpack(z);
    s.mm = p_.project_m(s.mm);
    s.g = p_.loss->project_G(s.g);
    return pack(s);
  }

  SaddlePoint initial_point() const {
    return {Matrix::Zero(n_, m_), p_.project_m(Matrix::Identity(m_, m_)), Vector::Zero(q_)};
  }

  // Random direction on the g block only.
  Vector power_start(std::uint64_t seed) const {
    Rng rng = make_rng(seed, 0x9e3779b9ULL);
    Vector v = Vector::Zero(size());
    v.tail(q_) = gaussian_vector(rng, q_);
    return v;
  }

 private:
  const SaddleProblem& p_;
  Eigen::Index n_, m_, q_;
};

inline SaddlePoint compute_F(const SaddleProblem& p, const SaddlePoint& z) { return SaddleVI(p).compute_F(z); }

struct SaddleSolution {
  SaddlePoint average;
  SaddlePoint last;
  std::vector<TraceRow> trace;
  long iterations = 0;
  bool converged = false;
  double objective = 0.0;  // at the averaged X
  double last_gap = 0.0;
  double gamma0 = 0.0;
  double min_eig_m = std::numeric_limits<double>::infinity();  // over all M iterates
  double max_delta = -std::numeric_limits<double>::infinity();
  double seconds = 0.0;
};

inline double initial_step(const SaddleProblem& p, const LineSearchParams& params) {
  if (params.gamma0 > 0.0) return params.gamma0;
  const SaddleVI vi(p);
  const double lip = estimate_lipschitz(vi, vi.pack(vi.initial_point()), vi.power_start(params.seed));
  return lip > 0.0 && std::isfinite(lip) ? 1.0 / lip : 1.0;
}

// Runs mirror-prox on the saddle problem. on_row, if set, sees each trace row as
// it is produced (for streaming to disk).
inline SaddleSolution solve_saddle(const SaddleProblem& p, const LineSearchParams& params,
                                   const std::function<void(const TraceRow&)>& on_row = {}) {
  const SaddleVI vi(p);
  SaddleSolution sol;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  const double gamma0 = initial_step(p, params);
  const Eigen::Index nm = p.n() * p.m();
  auto block_min_eig = [&](const Vector& z) {
    const Matrix a = Eigen::Map<const Matrix>(z.data() + nm, p.m(), p.m());
    return sym_eig(a).values(0);
  };
  sol.min_eig_m = block_min_eig(vi.pack(vi.initial_point()));
  auto observe = [&](const StepInfo& s) {
    sol.min_eig_m = std::min({sol.min_eig_m, block_min_eig(*s.w), block_min_eig(*s.z_next)});
    if (params.trace_every > 0 && (s.iter % params.trace_every == 0 || s.iter == 1)) {
      const Matrix xa = Eigen::Map<const Matrix>(s.average->data(), p.n(), p.m());
      TraceRow row{s.iter, s.gap, p.objective(xa), s.gamma, elapsed_ms()};
      sol.trace.push_back(row);
      if (on_row) on_row(row);
    }
  };
  const MirrorProxOutput out = mirror_prox(vi, vi.pack(vi.initial_point()), params, gamma0, observe);
  sol.average = vi.unpack(out.average);
  sol.last = vi.unpack(out.last);
  sol.iterations = out.iterations;
  sol.converged = out.converged;
  sol.last_gap = out.last_gap;
  sol.gamma0 = gamma0;
  sol.max_delta = out.max_delta;
  sol.objective = p.objective(sol.average.x);
  sol.seconds = elapsed_ms() / 1000.0;
  return sol;
}

struct ReducedProblem {
  SaddleProblem problem;
  Matrix q;  // n x q basis; empty when the reduction is the identity
  bool identity = true;

  Matrix back_map(const Matrix& x_red) const { return identity ? x_red : Matrix(q * x_red); }
};

// Thin QR of the block matrix D = [D_1 ... D_m] (n x mp). When n > mp the
// problem is rewritten in the mp-row variable X' with X = Q X'.
inline ReducedProblem reduce_problem(const SaddleProblem& p) {
  const Eigen::Index mp = p.m() * p.p();
  if (p.n() <= mp) return ReducedProblem{p, Matrix(), true};
  const Matrix d = p.loss->block_matrix();
  const ThinQr qr = thin_qr(d);
  auto reduced = std::make_shared<BlockFenchelLoss>(p.loss, qr.r);
  return ReducedProblem{SaddleProblem(reduced, p.mset, p.lambda), qr.q, false};
}

struct RepresenterResult {
  Matrix c;         // (m p) x m
  double residual;  // ||X - D C||_F / ||X||_F
};

// C = -(1/(2 lambda)) (M^{-1} kron g), so that D C = -D(g) M^{-1} / (2 lambda).
inline RepresenterResult representer_coeffs(const SaddleProblem& p, const SaddlePoint& z) {
  const SymEig e = sym_eig(z.mm);
  const Eigen::Index m = p.m();
  if (!(e.values(0) > 1e-10 * std::max(1.0, std::abs(e.values(m - 1)))))
    throw NotSupported("representer_coeffs: M is singular");
  const Matrix minv = pinv(z.mm);
  const Eigen::Index q = p.p();
  Matrix c(m * q, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c.block(i * q, j, q, 1) = minv(i, j) * z.g;
  c *= -1.0 / (2.0 * p.lambda);
  const Matrix dc = p.loss->block_matrix() * c;
  const double nx = z.x.norm();
  return {c, (z.x - dc).norm() / std::max(nx, 1e-300)};
}

struct SubgradientParams {
  long iters = 1000;
  double c = 1.0;  // step c / sqrt(t)
  long trace_every = 1;
};

struct BaselineResult {
  Matrix x;       // best iterate
  double best_objective = std::numeric_limits<double>::infinity();
  std::vector<TraceRow> trace;  // objective column holds the best-so-far value
};

// Subgradient method on L(X) + lambda Omega(X) from X = 0 with steps c / sqrt(t).
inline BaselineResult baseline_subgradient(const SaddleProblem& p, const SubgradientParams& sp) {
  const auto start = std::chrono::steady_clock::now();
  BaselineResult res;
  Matrix x = Matrix::Zero(p.n(), p.m());
  res.x = x;
  res.best_objective = p.objective(x);
  for (long t = 1; t <= sp.iters; ++t) {
    const Matrix g = p.loss->subgradient(x) + p.lambda * 2.0 * x * support(p.mset, gram(x)).argmax;
    const Matrix xn = x - (sp.c / std::sqrt(static_cast<double>(t))) * g;
    const double obj = p.objective(xn);
    if (obj < res.best_objective) {
      res.best_objective = obj;
      res.x = xn;
    }
    if (sp.trace_every > 0 && (t % sp.trace_every == 0 || t == 1)) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      res.trace.push_back(TraceRow{t, 0.5 * (xn - x).squaredNorm(), res.best_objective,
                                   sp.c / std::sqrt(static_cast<double>(t)), ms});
    }
    x = xn;
  }
  return res;
}

}  // namespace vgfkit
