#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vgfkit/linalg.hpp"
#include "vgfkit/projections.hpp"
#include "vgfkit/tree.hpp"

namespace vgfkit {

// Loss in the form L(X) = max_{g in G} <X, D(g)> - Lhat(g) with linear D.
// Every loss here is a function of v = D*(X), which value_from_dual evaluates.
class FenchelLoss {
 public:
  virtual ~FenchelLoss() = default;

  virtual Eigen::Index n() const = 0;
  virtual Eigen::Index m() const = 0;
  virtual Eigen::Index p() const = 0;  // dimension of g

  virtual Matrix apply_D(const Vector& g) const = 0;        // n x m
  virtual Vector apply_Dstar(const Matrix& x) const = 0;    // p
  virtual double lhat(const Vector& g) const = 0;
  virtual Vector grad_lhat(const Vector& g) const = 0;
  virtual Vector project_G(const Vector& g) const = 0;
  virtual double value_from_dual(const Vector& v) const = 0;  // max_g <v, g> - Lhat(g)
  virtual Vector dual_argmax(const Vector& v) const = 0;
  virtual std::string name() const = 0;

  double eval(const Matrix& x) const {
    check_x(x);
    return value_from_dual(apply_Dstar(x));
  }

  // D(g*) for a maximizing g*: a subgradient of L at X.
  Matrix subgradient(const Matrix& x) const {
    check_x(x);
    return apply_D(dual_argmax(apply_Dstar(x)));
  }

  // Block matrix [D_1 ... D_m], n x (m p), with column i of D(g) equal to D_i g.
  virtual Matrix block_matrix() const {
    const Eigen::Index pp = p();
    Matrix out = Matrix::Zero(n(), m() * pp);
    Vector e = Vector::Zero(pp);
    for (Eigen::Index c = 0; c < pp; ++c) {
      e(c) = 1.0;
      const Matrix d = apply_D(e);
      for (Eigen::Index i = 0; i < m(); ++i) out.col(i * pp + c) = d.col(i);
      e(c) = 0.0;
    }
    return out;
  }

 protected:
  void check_x(const Matrix& x) const {
    if (x.rows() != n() || x.cols() != m())
      throw DimensionMismatch(name() + ": expected X of size " + std::to_string(n()) + "x" +
                              std::to_string(m()) + ", got " + std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()));
  }
  void check_g(const Vector& g) const {
    if (g.size() != p())
      throw DimensionMismatch(name() + ": expected g of length " + std::to_string(p()));
  }
};

using LossPtr = std::shared_ptr<const FenchelLoss>;

inline double loss_eval(const FenchelLoss& l, const Matrix& x) { return l.eval(x); }

namespace detail {

inline Matrix vec_to_matrix(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}
inline Vector matrix_to_vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

}  // namespace detail

// 1/2 ||A^T X - B||_F^2 with samples as the columns of A (n x N) and B of size N x m.
// g = vec(G), G in R^{N x m}; Lhat(G) = 1/2 ||G||^2 + <B, G>.
class SquaredNormLoss : public FenchelLoss {
 public:
  SquaredNormLoss(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.cols() != b_.rows()) throw DimensionMismatch("squared loss: A and B sample counts differ");
  }
  Eigen::Index n() const override { return a_.rows(); }
  Eigen::Index m() const override { return b_.cols(); }
  Eigen::Index p() const override { return b_.size(); }
  Matrix apply_D(const Vector& g) const override {
    check_g(g);
    return a_ * detail::vec_to_matrix(g, b_.rows(), b_.cols());
  }
  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    return detail::matrix_to_vec(a_.transpose() * x);
  }
  double lhat(const Vector& g) const override {
    return 0.5 * g.squaredNorm() + g.dot(detail::matrix_to_vec(b_));
  }
  Vector grad_lhat(const Vector& g) const override { return g + detail::matrix_to_vec(b_); }
  Vector project_G(const Vector& g) const override { return g; }
  double value_from_dual(const Vector& v) const override {
    return 0.5 * (v - detail::matrix_to_vec(b_)).squaredNorm();
  }
  Vector dual_argmax(const Vector& v) const override { return v - detail::matrix_to_vec(b_); }
  std::string name() const override { return "squared"; }

 private:
  Matrix a_;
  Matrix b_;
};

// ||A^T X - B||_F, with G the unit Frobenius ball and Lhat(G) = <B, G>.
class NormLoss : public FenchelLoss {
 public:
  NormLoss(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.cols() != b_.rows()) throw DimensionMismatch("norm loss: A and B sample counts differ");
  }
  Eigen::Index n() const override { return a_.rows(); }
  Eigen::Index m() const override { return b_.cols(); }
  Eigen::Index p() const override { return b_.size(); }
  Matrix apply_D(const Vector& g) const override {
    check_g(g);
    return a_ * detail::vec_to_matrix(g, b_.rows(), b_.cols());
  }
  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    return detail::matrix_to_vec(a_.transpose() * x);
  }
  double lhat(const Vector& g) const override { return g.dot(detail::matrix_to_vec(b_)); }
  Vector grad_lhat(const Vector&) const override { return detail::matrix_to_vec(b_); }
  Vector project_G(const Vector& g) const override {
    const double nrm = g.norm();
    return nrm <= 1.0 ? g : Vector(g / nrm);
  }
  double value_from_dual(const Vector& v) const override {
    return (v - detail::matrix_to_vec(b_)).norm();
  }
  Vector dual_argmax(const Vector& v) const override {
    const Vector r = v - detail::matrix_to_vec(b_);
    const double nrm = r.norm();
    return nrm > 0.0 ? Vector(r / nrm) : Vector(Vector::Zero(r.size()));
  }
  std::string name() const override { return "norm"; }

 private:
  Matrix a_;
  Matrix b_;
};

// Mean epsilon-insensitive loss (1/N) sum (|a_s^T x - b_s| - eps)_+, m = 1.
// g = (alpha_s, beta_s) per sample in the simplex {alpha, beta >= 0, alpha + beta <= 1/N}.
class DeadzoneLoss : public FenchelLoss {
 public:
  DeadzoneLoss(Matrix a, Vector b, double eps) : a_(std::move(a)), b_(std::move(b)), eps_(eps) {
    if (a_.cols() != b_.size()) throw DimensionMismatch("deadzone loss: A and b sample counts differ");
    if (!(eps_ >= 0.0)) throw InvalidInput("deadzone loss: eps must be >= 0");
  }
  Eigen::Index n() const override { return a_.rows(); }
  Eigen::Index m() const override { return 1; }
  Eigen::Index p() const override { return 2 * b_.size(); }
  Matrix apply_D(const Vector& g) const override {
    check_g(g);
    Vector w(b_.size());
    for (Eigen::Index s = 0; s < w.size(); ++s) w(s) = g(2 * s) - g(2 * s + 1);
    return a_ * w;
  }
  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    const Vector r = a_.transpose() * x.col(0);
    Vector v(p());
    for (Eigen::Index s = 0; s < r.size(); ++s) {
      v(2 * s) = r(s);
      v(2 * s + 1) = -r(s);
    }
    return v;
  }
  double lhat(const Vector& g) const override { return grad_lhat(g).dot(g); }
  Vector grad_lhat(const Vector&) const override {
    Vector c(p());
    for (Eigen::Index s = 0; s < b_.size(); ++s) {
      c(2 * s) = b_(s) + eps_;
      c(2 * s + 1) = eps_ - b_(s);
    }
    return c;
  }
  Vector project_G(const Vector& g) const override {
    Vector out(p());
    const double r = 1.0 / static_cast<double>(b_.size());
    for (Eigen::Index s = 0; s < b_.size(); ++s)
      out.segment(2 * s, 2) = project_scaled_simplex(g.segment(2 * s, 2), r);
    return out;
  }
  double value_from_dual(const Vector& v) const override {
    const Vector c = grad_lhat(v);
    double sum = 0.0;
    for (Eigen::Index s = 0; s < b_.size(); ++s)
      sum += std::max({0.0, v(2 * s) - c(2 * s), v(2 * s + 1) - c(2 * s + 1)});
    return sum / static_cast<double>(b_.size());
  }
  Vector dual_argmax(const Vector& v) const override {
    const Vector c = grad_lhat(v);
    Vector g = Vector::Zero(p());
    const double r = 1.0 / static_cast<double>(b_.size());
    for (Eigen::Index s = 0; s < b_.size(); ++s) {
      const double up = v(2 * s) - c(2 * s);
      const double dn = v(2 * s + 1) - c(2 * s + 1);
      if (up > 0.0 && up >= dn) g(2 * s) = r;
      else if (dn > 0.0) g(2 * s + 1) = r;
    }
    return g;
  }
  std::string name() const override { return "deadzone"; }

 private:
  Matrix a_;
  Vector b_;
  double eps_;
};

// Mean hinge loss (1/N) sum max(0, 1 - b_s a_s^T x), labels b_s in {-1, +1}, m = 1.
class BinaryHingeLoss : public FenchelLoss {
 public:
  BinaryHingeLoss(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.cols() != b_.size()) throw DimensionMismatch("hinge loss: A and b sample counts differ");
    for (Eigen::Index s = 0; s < b_.size(); ++s)
      if (b_(s) != 1.0 && b_(s) != -1.0) throw InvalidInput("hinge loss: labels must be +-1");
  }
  Eigen::Index n() const override { return a_.rows(); }
  Eigen::Index m() const override { return 1; }
  Eigen::Index p() const override { return b_.size(); }
  Matrix apply_D(const Vector& g) const override {
    check_g(g);
    return -(a_ * g.cwiseProduct(b_));
  }
  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    return -(a_.transpose() * x.col(0)).cwiseProduct(b_);
  }
  double lhat(const Vector& g) const override { return -g.sum(); }
  Vector grad_lhat(const Vector& g) const override { return -Vector::Ones(g.size()); }
  Vector project_G(const Vector& g) const override {
    return g.cwiseMax(0.0).cwiseMin(1.0 / static_cast<double>(b_.size()));
  }
  double value_from_dual(const Vector& v) const override {
    return (v.array() + 1.0).cwiseMax(0.0).sum() / static_cast<double>(v.size());
  }
  Vector dual_argmax(const Vector& v) const override {
    return ((v.array() + 1.0) > 0.0).select(Vector::Constant(v.size(), 1.0 / v.size()), 0.0);
  }
  std::string name() const override { return "binary_hinge"; }

 private:
  Matrix a_;
  Vector b_;
};

// Per-class ordered pairs (i, j): class k asks x_i^T a >= 1 + x_j^T a for each pair.
struct IncidencePairs {
  int m = 0;
  std::vector<std::vector<std::pair<int, int>>> pairs;  // index 1..m; entry 0 unused

  const std::vector<std::pair<int, int>>& of(int k) const { return pairs.at(static_cast<std::size_t>(k)); }

  // m x p_k, column c has -1 at row i-1 and +1 at row j-1 for the c-th pair (i, j).
  Matrix incidence(int k) const {
    const auto& pk = of(k);
    Matrix e = Matrix::Zero(m, static_cast<Eigen::Index>(pk.size()));
    for (std::size_t c = 0; c < pk.size(); ++c) {
      e(pk[c].first - 1, static_cast<Eigen::Index>(c)) = -1.0;
      e(pk[c].second - 1, static_cast<Eigen::Index>(c)) = 1.0;
    }
    return e;
  }
};

// I(k) = {(i, j) : j in S(i), i in A(k)}. A flat tree gives {(k, j) : j != k}.
inline IncidencePairs build_incidence(const CategoryTree& tree) {
  IncidencePairs ip;
  ip.m = tree.num_classes();
  ip.pairs.assign(static_cast<std::size_t>(ip.m) + 1, {});
  for (int k = 1; k <= ip.m; ++k)
    for (int i : tree.ancestors(k))
      for (int j : tree.siblings(i)) ip.pairs[static_cast<std::size_t>(k)].emplace_back(i, j);
  return ip;
}

inline IncidencePairs build_incidence_flat(int m) { return build_incidence(CategoryTree::flat(m)); }

// (1/N) sum_s max(0, max_{(i,j) in I(b_s)} 1 + x_j^T a_s - x_i^T a_s).
// g is the concatenation over samples of blocks of length |I(b_s)|, each block in
// {g >= 0, 1^T g <= 1/N}; D(g) = A E(g) with row s of E(g) equal to (E_{b_s} g_s)^T.
class MulticlassHingeLoss : public FenchelLoss {
 public:
  MulticlassHingeLoss(Matrix a, std::vector<int> labels, IncidencePairs pairs)
      : a_(std::move(a)), labels_(std::move(labels)), pairs_(std::move(pairs)) {
    if (static_cast<Eigen::Index>(labels_.size()) != a_.cols())
      throw DimensionMismatch("multiclass hinge: label count differs from sample count");
    offsets_.reserve(labels_.size() + 1);
    offsets_.push_back(0);
    for (int k : labels_) {
      if (k < 1 || k > pairs_.m) throw InvalidInput("multiclass hinge: label " + std::to_string(k) + " out of range");
      offsets_.push_back(offsets_.back() + static_cast<Eigen::Index>(pairs_.of(k).size()));
    }
  }

  Eigen::Index n() const override { return a_.rows(); }
  Eigen::Index m() const override { return pairs_.m; }
  Eigen::Index p() const override { return offsets_.back(); }
  Eigen::Index samples() const { return a_.cols(); }
  const IncidencePairs& pairs() const { return pairs_; }
  const std::vector<int>& labels() const { return labels_; }
  const Matrix& data() const { return a_; }

  // E(g): N x m.
  Matrix e_of(const Vector& g) const {
    check_g(g);
    Matrix e = Matrix::Zero(samples(), m());
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const auto& pk = pairs_.of(labels_[static_cast<std::size_t>(s)]);
      for (std::size_t c = 0; c < pk.size(); ++c) {
        const double w = g(offsets_[static_cast<std::size_t>(s)] + static_cast<Eigen::Index>(c));
        e(s, pk[c].first - 1) -= w;
        e(s, pk[c].second - 1) += w;
      }
    }
    return e;
  }

  Matrix apply_D(const Vector& g) const override { return a_ * e_of(g); }

  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    const Matrix scores = a_.transpose() * x;  // N x m
    Vector v(p());
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const auto& pk = pairs_.of(labels_[static_cast<std::size_t>(s)]);
      for (std::size_t c = 0; c < pk.size(); ++c)
        v(offsets_[static_cast<std::size_t>(s)] + static_cast<Eigen::Index>(c)) =
            scores(s, pk[c].second - 1) - scores(s, pk[c].first - 1);
    }
    return v;
  }

  double lhat(const Vector& g) const override { return -g.sum(); }
  Vector grad_lhat(const Vector& g) const override { return -Vector::Ones(g.size()); }

  Vector project_G(const Vector& g) const override {
    check_g(g);
    Vector out(p());
    const double r = 1.0 / static_cast<double>(samples());
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const Eigen::Index lo = offsets_[static_cast<std::size_t>(s)];
      const Eigen::Index len = offsets_[static_cast<std::size_t>(s) + 1] - lo;
      if (len > 0) out.segment(lo, len) = project_scaled_simplex(g.segment(lo, len), r);
    }
    return out;
  }

  double value_from_dual(const Vector& v) const override {
    double sum = 0.0;
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const Eigen::Index lo = offsets_[static_cast<std::size_t>(s)];
      const Eigen::Index len = offsets_[static_cast<std::size_t>(s) + 1] - lo;
      if (len > 0) sum += std::max(0.0, 1.0 + v.segment(lo, len).maxCoeff());
    }
    return sum / static_cast<double>(samples());
  }

  Vector dual_argmax(const Vector& v) const override {
    Vector g = Vector::Zero(p());
    const double r = 1.0 / static_cast<double>(samples());
    for (Eigen::Index s = 0; s < samples(); ++s) {
      const Eigen::Index lo = offsets_[static_cast<std::size_t>(s)];
      const Eigen::Index len = offsets_[static_cast<std::size_t>(s) + 1] - lo;
      if (len == 0) continue;
      Eigen::Index best = 0;
      const double top = v.segment(lo, len).maxCoeff(&best);
      if (1.0 + top > 0.0) g(lo + best) = r;
    }
    return g;
  }

  std::string name() const override { return "multiclass_hinge"; }

 private:
  Matrix a_;
  std::vector<int> labels_;
  IncidencePairs pairs_;
  std::vector<Eigen::Index> offsets_;
};

// The loss seen through D'(g) = R (I_m kron g): same G and Lhat, q x m variable.
class BlockFenchelLoss : public FenchelLoss {
 public:
  BlockFenchelLoss(LossPtr base, Matrix r) : base_(std::move(base)), r_(std::move(r)) {
    if (r_.cols() != base_->m() * base_->p())
      throw DimensionMismatch("block loss: R must have m p columns");
  }
  Eigen::Index n() const override { return r_.rows(); }
  Eigen::Index m() const override { return base_->m(); }
  Eigen::Index p() const override { return base_->p(); }
  Matrix apply_D(const Vector& g) const override {
    check_g(g);
    Matrix out(n(), m());
    for (Eigen::Index i = 0; i < m(); ++i) out.col(i) = r_.middleCols(i * p(), p()) * g;
    return out;
  }
  Vector apply_Dstar(const Matrix& x) const override {
    check_x(x);
    Vector v = Vector::Zero(p());
    for (Eigen::Index i = 0; i < m(); ++i) v += r_.middleCols(i * p(), p()).transpose() * x.col(i);
    return v;
  }
  double lhat(const Vector& g) const override { return base_->lhat(g); }
  Vector grad_lhat(const Vector& g) const override { return base_->grad_lhat(g); }
  Vector project_G(const Vector& g) const override { return base_->project_G(g); }
  double value_from_dual(const Vector& v) const override { return base_->value_from_dual(v); }
  Vector dual_argmax(const Vector& v) const override { return base_->dual_argmax(v); }
  Matrix block_matrix() const override { return r_; }
  std::string name() const override { return base_->name() + "_reduced"; }

 private:
  LossPtr base_;
  Matrix r_;
};

}  // namespace vgfkit
