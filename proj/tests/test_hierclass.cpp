#include <catch_amalgamated.hpp>

#include <sstream>

#include "vgfkit/convexity.hpp"
#include "vgfkit/hierclass.hpp"
#include "vgfkit/losses.hpp"
#include "vgfkit/synthetic.hpp"

using namespace vgfkit;
using Catch::Approx;

namespace {

CategoryTree fig_tree() { return CategoryTree({0, 0, 0, 2, 2}); }

CategoryTree parse_tree(const std::string& text) {
  std::istringstream in(text);
  return load_hierarchy(in);
}

std::vector<SparseSample> parse_svm(const std::string& text) {
  std::istringstream in(text);
  return load_libsvm(in);
}

}  // namespace

TEST_CASE("category tree") {
  const CategoryTree t = fig_tree();
  CHECK(t.num_classes() == 4);
  CHECK(t.children(0) == std::vector<int>{1, 2});
  CHECK(t.children(2) == std::vector<int>{3, 4});
  CHECK(t.siblings(3) == std::vector<int>{4});
  CHECK(t.ancestors(3) == std::vector<int>{2, 3});
  CHECK(t.is_leaf(1));
  CHECK_FALSE(t.is_leaf(2));
  CHECK_THROWS_AS(CategoryTree({0, 2, 1}), InvalidInput);
  CHECK_THROWS_AS(CategoryTree({0, 5}), InvalidInput);
}

TEST_CASE("predict") {
  Matrix x(1, 2);
  x << 2, 1;
  CHECK(predict(CategoryTree::flat(2), x, Vector::Ones(1)) == 1);
  // scores steering 0 -> 2 -> 3
  Matrix xf(1, 4);
  xf << 0.5, 1.0, 3.0, -1.0;
  CHECK(predict(fig_tree(), xf, Vector::Ones(1)) == 3);
  CHECK(predict(fig_tree(), xf, Vector::Ones(1), 2) == 2);
  // flat tree is the plain argmax
  Rng rng = make_rng(91);
  for (int t = 0; t < 100; ++t) {
    const Matrix xx = gaussian(rng, 3, 5);
    const Vector a = gaussian_vector(rng, 3);
    Eigen::Index best = 0;
    (xx.transpose() * a).maxCoeff(&best);
    CHECK(predict(CategoryTree::flat(5), xx, a) == best + 1);
  }
  // ties go to the lowest id
  CHECK(predict(fig_tree(), Matrix::Zero(2, 4), Vector::Ones(2)) == 1);
  CHECK_THROWS_AS(predict(fig_tree(), Matrix::Zero(2, 3), Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("incidence constraints hold exactly when predict returns the class") {
  Rng rng = make_rng(92);
  for (const CategoryTree& tree : {fig_tree(), benchmark_tree(), CategoryTree::flat(4)}) {
    const IncidencePairs ip = build_incidence(tree);
    for (int t = 0; t < 500; ++t) {
      const Matrix x = gaussian(rng, 4, tree.num_classes());
      const Vector a = gaussian_vector(rng, 4);
      const Vector sc = x.transpose() * a;
      for (int k = 1; k <= tree.num_classes(); ++k) {
        bool all = true;
        for (const auto& [i, j] : ip.of(k)) all = all && sc(i - 1) > sc(j - 1);
        CHECK(all == (predict(tree, x, a, tree.is_leaf(k) ? 0 : k) == k));
      }
    }
  }
}

TEST_CASE("build_ancestor_mbar") {
  const AncestorMbar chain = build_ancestor_mbar(CategoryTree({0, 0, 1}), 1.0, 0.5);
  CHECK(chain.mbar(0, 1) == 0.5);
  CHECK(chain.mbar(0, 0) == 1.0);
  CHECK(chain.scale == 1.0);

  const AncestorMbar diag = build_ancestor_mbar(fig_tree(), 2.0, 0.0);
  CHECK((diag.mbar - 2.0 * Matrix::Identity(4, 4)).norm() == 0.0);

  for (const CategoryTree& tree : {fig_tree(), benchmark_tree(), CategoryTree({0, 0, 1, 2, 3, 4})}) {
    for (double rho : {0.3, 0.8, 2.0, 10.0}) {
      const AncestorMbar r = build_ancestor_mbar(tree, 1.0, rho);
      CHECK(is_symmetric(r.mbar));
      CHECK(r.mbar.minCoeff() >= 0.0);
      CHECK(check_box(r.mbar, 1).verdict == Verdict::convex);
      CHECK(r.scale <= 1.0);
      for (int i = 1; i <= tree.num_classes(); ++i)
        for (int j = 1; j <= tree.num_classes(); ++j)
          if (i != j) CHECK((r.mbar(i - 1, j - 1) > 0.0) == (tree.is_ancestor(i, j) || tree.is_ancestor(j, i)));
    }
  }
  const AncestorMbar deep = build_ancestor_mbar(CategoryTree({0, 0, 1, 2, 3, 4}), 1.0, 10.0);
  CHECK(deep.scale < 1.0);
  CHECK(min_eig(comparison_matrix(deep.mbar)) < 1e-9);
}

TEST_CASE("LIBSVM files") {
  const auto s = parse_svm("3 1:0.5 7:1.2\n\n1\n2 2:-1e-3 # note\n");
  REQUIRE(s.size() == 3);
  CHECK(s[0].label == 3);
  CHECK(s[0].features == std::vector<std::pair<int, double>>{{1, 0.5}, {7, 1.2}});
  CHECK(s[1].features.empty());
  CHECK(max_feature_index(s) == 7);
  const Matrix a = to_dense(s, 7);
  CHECK(a(6, 0) == 1.2);
  CHECK(a.col(1).norm() == 0.0);
  CHECK_THROWS_AS(to_dense(s, 5), DimensionMismatch);

  for (const std::string bad : {"1 2:1 1:1\n", "1 0:1\n", "x 1:1\n", "1 1:y\n", "1 1-2\n"}) {
    try {
      parse_svm("1 1:1\n" + bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  Rng rng = make_rng(93);
  const Matrix dense = gaussian(rng, 5, 4);
  std::ostringstream out;
  write_libsvm(out, dense, {1, 2, 3, 4});
  const auto back = parse_svm(out.str());
  CHECK((to_dense(back, 5) - dense).norm() <= 1e-11 * dense.norm());
  CHECK(labels_of(back) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("hierarchy files") {
  const CategoryTree t = parse_tree("0 1\n0 2\n2 3\n2 4\n");
  CHECK(t.children(0) == std::vector<int>{1, 2});
  CHECK(t.children(2) == std::vector<int>{3, 4});
  std::ostringstream out;
  write_hierarchy(out, benchmark_tree());
  const CategoryTree b = parse_tree(out.str());
  for (int k = 1; k <= 7; ++k) CHECK(b.parent(k) == benchmark_tree().parent(k));
  try {
    parse_tree("0 1\n0 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_tree("0 1\n2 2\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("0 1\n3 2\n1 3\n2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("0 2\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("0 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_tree(""), ParseError);
}

TEST_CASE("model files") {
  Rng rng = make_rng(94);
  const Matrix x = gaussian(rng, 6, 3);
  std::stringstream ss;
  write_model(ss, x);
  CHECK((read_model(ss) - x).norm() <= 1e-11 * x.norm());
  std::istringstream bad("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_model(bad), ParseError);
}

TEST_CASE("evaluate") {
  const CategoryTree tree = fig_tree();
  // features aligned with the classes give a perfect classifier
  Matrix x = Matrix::Identity(4, 4);
  x(1, 2) = x(1, 3) = 1.0;  // x_3 and x_4 see the shared parent feature too
  Matrix a(4, 3);
  a.col(0) << 1, 0, 0, 0;
  a.col(1) << 0, 1, 1, 0;
  a.col(2) << 0, 1, 0, 1;
  const EvalResult r = evaluate(tree, x, a, {1, 3, 4});
  CHECK(r.accuracy == 1.0);
  CHECK(r.confusion[3][3] == 1);
  CHECK(evaluate(tree, Matrix::Zero(4, 4), a, {1, 3, 4}).accuracy == Approx(1.0 / 3.0));
  // internal labels stop the walk at the label node
  CHECK(evaluate(tree, x, a.col(1), {2}).accuracy == 1.0);

  Rng rng = make_rng(95);
  const Matrix data = gaussian(rng, 5, 1000);
  std::vector<int> labels;
  for (int s = 0; s < 1000; ++s) labels.push_back(1 + s % 2);
  const double acc = evaluate(CategoryTree::flat(2), gaussian(rng, 5, 2), data, labels).accuracy;
  CHECK(acc == Approx(0.5).margin(0.1));
  CHECK_THROWS_AS(evaluate(tree, x, a, {1, 3}), DimensionMismatch);
  CHECK_THROWS_AS(evaluate(tree, x, a, {1, 3, 9}), InvalidInput);
}

TEST_CASE("pairwise_angles") {
  Matrix x(2, 3);
  x << 1, 0, 1, 0, 1, 1;
  const AnglesResult r = pairwise_angles(x);
  CHECK(r.degrees(0, 1) == Approx(90.0));
  CHECK(r.degrees(0, 2) == Approx(45.0));
  CHECK(r.degrees(1, 1) == 0.0);
  CHECK(r.zero_columns.empty());
  Matrix same(2, 2);
  same << 1, 1, 2, 2;
  CHECK(pairwise_angles(same).degrees(0, 1) == Approx(0.0).margin(1e-6));
  Matrix z(2, 2);
  z << 1, 0, 1, 0;
  const AnglesResult zr = pairwise_angles(z);
  CHECK(zr.zero_columns == std::vector<int>{1});
  CHECK(zr.degrees(0, 1) == 90.0);
}
