#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vgfkit/convexity.hpp"
#include "vgfkit/losses.hpp"
#include "vgfkit/mset_io.hpp"
#include "vgfkit/tree.hpp"

namespace vgfkit {

struct SparseSample {
  std::vector<std::pair<int, double>> features;  // 1-based indices, strictly increasing
  int label = 0;
};

// Descends from the root, taking the child with the largest score x_j^T a
// (lowest id on ties), until a leaf. With stop_at > 0 the walk also halts on
// reaching that node, which lets internal nodes act as labels.
inline int predict(const CategoryTree& tree, const Matrix& x, const Vector& a, int stop_at = 0) {
  if (tree.num_classes() < 1) throw InvalidInput("predict: empty tree");
  if (x.cols() != tree.num_classes())
    throw DimensionMismatch("predict: X has " + std::to_string(x.cols()) + " columns for " +
                            std::to_string(tree.num_classes()) + " classes");
  if (x.rows() != a.size()) throw DimensionMismatch("predict: feature dimension differs from X rows");
  const Vector scores = x.transpose() * a;
  int node = 0;
  while (!tree.is_leaf(node) && !(stop_at > 0 && node == stop_at)) {
    int best = -1;
    for (int c : tree.children(node))
      if (best < 0 || scores(c - 1) > scores(best - 1)) best = c;
    node = best;
  }
  return node;
}

struct EvalResult {
  double accuracy = 0.0;
  std::vector<int> predictions;
  std::vector<std::vector<long>> confusion;  // [true][predicted], indices 0..m
};

inline EvalResult evaluate(const CategoryTree& tree, const Matrix& x, const Matrix& a,
                           const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != a.cols())
    throw DimensionMismatch("evaluate: label count differs from sample count");
  const int m = tree.num_classes();
  EvalResult r;
  r.confusion.assign(static_cast<std::size_t>(m) + 1, std::vector<long>(static_cast<std::size_t>(m) + 1, 0));
  long correct = 0;
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    const int k = labels[static_cast<std::size_t>(s)];
    tree.require_class(k);
    const int pred = predict(tree, x, a.col(s), k);
    r.predictions.push_back(pred);
    ++r.confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(pred)];
    if (pred == k) ++correct;
  }
  r.accuracy = a.cols() > 0 ? static_cast<double>(correct) / static_cast<double>(a.cols()) : 0.0;
  return r;
}

struct AncestorMbar {
  Matrix mbar;
  double scale = 1.0;  // factor applied to rho_off
};

// Mbar_ii = delta, Mbar_ij = rho * scale on ancestor-descendant pairs, with the
// scale reduced by bisection until the comparison matrix is PSD.
inline AncestorMbar build_ancestor_mbar(const CategoryTree& tree, double delta, double rho) {
  if (!(delta > 0.0)) throw InvalidInput("build_ancestor_mbar: delta must be positive");
  if (!(rho >= 0.0)) throw InvalidInput("build_ancestor_mbar: rho must be >= 0");
  const int m = tree.num_classes();
  Matrix pattern = Matrix::Zero(m, m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      if (i != j && (tree.is_ancestor(i, j) || tree.is_ancestor(j, i))) pattern(i - 1, j - 1) = 1.0;
  auto make = [&](double s) {
    Matrix mb = rho * s * pattern;
    mb.diagonal().setConstant(delta);
    return mb;
  };
  auto ok = [&](double s) { return min_eig(comparison_matrix(make(s))) >= 0.0; };
  double scale = 1.0;
  if (!ok(1.0)) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (ok(mid))
        lo = mid;
      else
        hi = mid;
    }
    scale = lo;
  }
  return {make(scale), scale};
}

struct AnglesResult {
  Matrix degrees;
  std::vector<int> zero_columns;  // 0-based; their angles are reported as 90
};

inline AnglesResult pairwise_angles(const Matrix& x) {
  const Eigen::Index m = x.cols();
  AnglesResult r;
  r.degrees = Matrix::Zero(m, m);
  const Vector norms = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < m; ++j)
    if (norms(j) == 0.0) r.zero_columns.push_back(static_cast<int>(j));
  const double pi = std::acos(-1.0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      if (norms(i) == 0.0 || norms(j) == 0.0) {
        r.degrees(i, j) = 90.0;
        continue;
      }
      // 2 atan2(|u - v|, |u + v|) stays accurate near 0 and 180 degrees
      const Vector u = x.col(i) / norms(i), v = x.col(j) / norms(j);
      r.degrees(i, j) = 2.0 * std::atan2((u - v).norm(), (u + v).norm()) * 180.0 / pi;
    }
  return r;
}

// LIBSVM text: `label idx:val idx:val ...` with 1-based ascending indices.
inline std::vector<SparseSample> load_libsvm(std::istream& in) {
  std::vector<SparseSample> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::string tok;
    if (!(ss >> tok)) continue;
    SparseSample s;
    s.label = static_cast<int>(io::parse_int(tok, number));
    int last = 0;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("malformed feature '" + tok + "'", number);
      const long idx = io::parse_int(tok.substr(0, colon), number);
      if (idx < 1) throw ParseError("feature index must be >= 1", number);
      if (idx <= last) throw ParseError("feature indices must be strictly increasing", number);
      last = static_cast<int>(idx);
      s.features.emplace_back(last, io::parse_double(tok.substr(colon + 1), number));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<SparseSample> load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return load_libsvm(in);
}

inline int max_feature_index(const std::vector<SparseSample>& samples) {
  int n = 0;
  for (const auto& s : samples)
    if (!s.features.empty()) n = std::max(n, s.features.back().first);
  return n;
}

// Dense n x N matrix of samples as columns. Features beyond n are rejected.
inline Matrix to_dense(const std::vector<SparseSample>& samples, int n) {
  Matrix a = Matrix::Zero(n, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (const auto& [idx, val] : samples[s].features) {
      if (idx > n)
        throw DimensionMismatch("feature index " + std::to_string(idx) + " exceeds dimension " +
                                std::to_string(n));
      a(idx - 1, static_cast<Eigen::Index>(s)) = val;
    }
  return a;
}

inline std::vector<int> labels_of(const std::vector<SparseSample>& samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

// Dense columns back to LIBSVM text; exact zeros are omitted.
inline void write_libsvm(std::ostream& out, const Matrix& a, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != a.cols())
    throw DimensionMismatch("write_libsvm: label count differs from sample count");
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(12);
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    ss << labels[static_cast<std::size_t>(s)];
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, s) != 0.0) ss << ' ' << i + 1 << ':' << a(i, s);
    ss << '\n';
  }
  out << ss.str();
}

// Edge list of `parent child` lines; node 0 is the implicit root and the
// children must cover 1..m exactly once.
inline CategoryTree load_hierarchy(std::istream& in) {
  std::map<int, int> parent_of;
  std::map<int, std::size_t> line_of;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError("expected 'parent child'", number);
    const long p = io::parse_int(toks[0], number);
    const long c = io::parse_int(toks[1], number);
    if (p < 0 || c < 1) throw ParseError("node ids must be >= 0 and children >= 1", number);
    if (parent_of.count(static_cast<int>(c)))
      throw ParseError("duplicate child " + std::to_string(c), number);
    parent_of[static_cast<int>(c)] = static_cast<int>(p);
    line_of[static_cast<int>(c)] = number;
  }
  if (parent_of.empty()) throw ParseError("empty hierarchy", number);
  const int m = parent_of.rbegin()->first;
  std::vector<int> parent(static_cast<std::size_t>(m) + 1, -1);
  for (int k = 1; k <= m; ++k) {
    auto it = parent_of.find(k);
    if (it == parent_of.end()) throw ParseError("node " + std::to_string(k) + " has no parent edge", 0);
    if (it->second > m)
      throw ParseError("parent " + std::to_string(it->second) + " is not a node", line_of[k]);
    parent[static_cast<std::size_t>(k)] = it->second;
  }
  try {
    return CategoryTree(parent);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("hierarchy: ") + e.what(), 0);
  }
}

inline void write_hierarchy(std::ostream& out, const CategoryTree& tree) {
  for (int k = 1; k <= tree.num_classes(); ++k) out << tree.parent(k) << ' ' << k << '\n';
}

inline CategoryTree load_hierarchy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return load_hierarchy(in);
}

// Model file: `n m`, then m lines with the n entries of each column.
inline void write_model(std::ostream& out, const Matrix& x) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << x.rows() << ' ' << x.cols() << '\n' << std::setprecision(12);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (i) ss << ' ';
      ss << x(i, j);
    }
    ss << '\n';
  }
  out << ss.str();
}

inline Matrix read_model(std::istream& in) {
  io::Cursor cur(io::tokenize(in));
  const io::Line& head = cur.next("model header");
  if (head.tokens.size() != 2) throw ParseError("model header must be 'n m'", head.number);
  const long n = io::parse_int(head.tokens[0], head.number);
  const long m = io::parse_int(head.tokens[1], head.number);
  if (n < 1 || m < 1) throw ParseError("model dimensions must be positive", head.number);
  const Matrix cols = cur.matrix(m, n);
  if (!cur.done()) throw ParseError("trailing content in model file", cur.next("").number);
  return cols.transpose();
}

inline Matrix read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_model(in);
}

}  // namespace vgfkit
