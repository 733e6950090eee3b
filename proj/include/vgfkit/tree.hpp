#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "vgfkit/errors.hpp"

namespace vgfkit {

// Label hierarchy on nodes 0..m with root 0. Class k corresponds to column k-1 of X.
class CategoryTree {
 public:
  CategoryTree() = default;

  // parent[0] is ignored; parent[i] in [0, m] for i >= 1.
  explicit CategoryTree(std::vector<int> parent) : parent_(std::move(parent)) {
    if (parent_.size() < 2) throw InvalidInput("category tree needs at least one class");
    parent_[0] = -1;
    const int nodes = static_cast<int>(parent_.size());
    children_.assign(parent_.size(), {});
    for (int i = 1; i < nodes; ++i) {
      const int p = parent_[static_cast<std::size_t>(i)];
      if (p < 0 || p >= nodes || p == i)
        throw InvalidInput("node " + std::to_string(i) + " has invalid parent " + std::to_string(p));
      children_[static_cast<std::size_t>(p)].push_back(i);
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());
    // Every node must reach the root without revisiting a node.
    for (int i = 1; i < nodes; ++i) {
      int cur = i;
      for (int steps = 0; cur != 0; ++steps) {
        if (steps > nodes) throw InvalidInput("cycle through node " + std::to_string(i));
        cur = parent_[static_cast<std::size_t>(cur)];
      }
    }
  }

  static CategoryTree flat(int m) { return CategoryTree(std::vector<int>(static_cast<std::size_t>(m) + 1, 0)); }

  int num_classes() const { return static_cast<int>(parent_.size()) - 1; }
  int parent(int i) const { return parent_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& children(int i) const { return children_.at(static_cast<std::size_t>(i)); }
  bool is_leaf(int i) const { return children(i).empty(); }

  // Other children of the parent of i, ascending.
  std::vector<int> siblings(int i) const {
    require_class(i);
    std::vector<int> out;
    for (int c : children(parent(i)))
      if (c != i) out.push_back(c);
    return out;
  }

  // Path from the root to i, excluding 0 and including i, top-down.
  std::vector<int> ancestors(int i) const {
    require_class(i);
    std::vector<int> out;
    for (int cur = i; cur != 0; cur = parent(cur)) out.push_back(cur);
    std::reverse(out.begin(), out.end());
    return out;
  }

  bool is_ancestor(int a, int d) const {
    for (int cur = parent(d); cur > 0; cur = parent(cur))
      if (cur == a) return true;
    return false;
  }

  void require_class(int k) const {
    if (k < 1 || k > num_classes())
      throw InvalidInput("label " + std::to_string(k) + " outside 1.." + std::to_string(num_classes()));
  }

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
};

}  // namespace vgfkit
