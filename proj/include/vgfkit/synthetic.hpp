#pragma once

#include <cstdint>
#include <vector>

#include "vgfkit/random.hpp"
#include "vgfkit/tree.hpp"

namespace vgfkit {

// Two copies of the root -> {1, 2}, 2 -> {3, 4} tree hanging off one root:
// 0 -> {1, 2, 5}, 2 -> {3, 4}, 5 -> {6, 7}.
inline CategoryTree benchmark_tree() { return CategoryTree({-1, 0, 0, 2, 2, 0, 5, 5}); }

struct Dataset {
  Matrix a;  // n x N, samples as columns
  std::vector<int> labels;
};

// Each node owns a disjoint block of features carrying a unit direction u_i.
// A sample of class k is sum_{i in A(k)} u_i, each term scaled by a factor in
// [0.8, 1.2], plus Gaussian noise of total norm about `noise`. Labels are the
// leaves, drawn uniformly. Features past the last block are pure noise.
inline Dataset hierarchical_dataset(const CategoryTree& tree, int n, int samples, std::uint64_t seed,
                                    double noise = 0.1) {
  const int m = tree.num_classes();
  if (n < m) throw InvalidInput("hierarchical_dataset: need n >= number of classes");
  const int block = n / m;
  std::vector<int> leaves;
  for (int k = 1; k <= m; ++k)
    if (tree.is_leaf(k)) leaves.push_back(k);
  Rng rng = make_rng(seed);
  Dataset d;
  d.a = Matrix::Zero(n, samples);
  d.labels.resize(static_cast<std::size_t>(samples));
  const double unit = 1.0 / std::sqrt(static_cast<double>(block));
  for (int s = 0; s < samples; ++s) {
    const int k = leaves[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(leaves.size()) - 1))];
    d.labels[static_cast<std::size_t>(s)] = k;
    for (int i : tree.ancestors(k)) {
      const double w = uniform(rng, 0.8, 1.2);
      d.a.col(s).segment((i - 1) * block, block).array() += w * unit;
    }
    d.a.col(s) += (noise / std::sqrt(static_cast<double>(n))) * gaussian_vector(rng, n);
  }
  return d;
}

}  // namespace vgfkit
