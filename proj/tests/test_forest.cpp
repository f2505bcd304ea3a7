#include "forest.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace hostscope;

namespace {

Dataset make_data(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Dataset d;
  d.stage = Stage::Dedicated;
  for (std::size_t f = 0; f < rows[0].size(); ++f) d.schema.push_back("x" + std::to_string(f));
  for (std::size_t i = 0; i < rows.size(); ++i) d.add_row(rows[i], static_cast<std::uint8_t>(labels[i]));
  return d;
}

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> v(d.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<std::size_t> all_features(const Dataset& d) {
  std::vector<std::size_t> v(d.width());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Dataset separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 1);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int l = static_cast<int>(i % 2);
    rows.push_back({noise(rng), (l ? 10.0 : -10.0) + noise(rng), noise(rng)});
    labels.push_back(l);
  }
  return make_data(rows, labels);
}

} // namespace

TEST_CASE("gini impurity") {
  CHECK(gini(std::vector<std::uint64_t>{5, 5}) == 0.5);
  CHECK(gini(std::vector<std::uint64_t>{10, 0}) == 0.0);
  CHECK(gini(std::vector<std::uint64_t>{3, 1}) == doctest::Approx(0.375));
  CHECK_THROWS_AS(gini(std::vector<std::uint64_t>{0, 0}), error);
}

TEST_CASE("best split at the midpoint") {
  const auto d = make_data({{1}, {2}, {9}, {10}}, {0, 0, 1, 1});
  const auto s = best_split(d, all_rows(d), all_features(d));
  REQUIRE(s);
  CHECK(s->feature == 0);
  CHECK(s->threshold == 5.5);
  CHECK(s->decrease == 0.5);

  const auto same = make_data({{3, 3}, {3, 3}, {3, 3}}, {0, 1, 0});
  CHECK_FALSE(best_split(same, all_rows(same), all_features(same)));
}

TEST_CASE("midpoint stays below the upper value") {
  CHECK(split_midpoint(1, 2) == 1.5);
  const double lo = 1.0, hi = std::nextafter(1.0, 2.0);
  CHECK(split_midpoint(lo, hi) == lo);
}

TEST_CASE("best split equals the exhaustive oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> rows(50, std::vector<double>(5));
    std::vector<int> labels(50);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (auto& v : rows[i]) v = std::round(u(rng) * 20) / 2;  // ties on purpose
      labels[i] = u(rng) < 0.3 + 0.4 * (rows[i][trial % 5] > 5);
    }
    const auto d = make_data(rows, labels);
    const std::size_t min_leaf = 1 + static_cast<std::size_t>(trial % 3);
    const auto got = best_split(d, all_rows(d), all_features(d), min_leaf);
    const auto want = oracle::best_split(rows, labels, min_leaf);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    CHECK(got->decrease == doctest::Approx(want->decrease).epsilon(1e-12));
    CHECK(got->feature == want->feature);
    CHECK(got->threshold == want->threshold);
  }
}

TEST_CASE("trees") {
  std::mt19937_64 rng(1);
  const auto one = make_data({{4, 2}}, {1});
  const auto leaf = train_tree(one, TreeParams{}, rng);
  REQUIRE(leaf.nodes.size() == 1);
  CHECK(leaf.nodes[0].is_leaf());
  CHECK(leaf.predict(std::vector<double>{0, 0}) == 1);

  const auto d = separable(200, 3);
  const auto tree = train_tree(d, TreeParams{}, rng);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(tree.predict(d.row(i)) == d.labels[i]);

  TreeParams shallow;
  shallow.max_depth = 1;
  CHECK(train_tree(d, shallow, rng).depth() <= 1);
}

TEST_CASE("forest validation") {
  const auto one_class = make_data({{1}, {2}, {3}}, {1, 1, 1});
  CHECK_THROWS_AS(train_forest(one_class, {}), error);
  CHECK_THROWS_AS(train_forest(make_data({{1}}, {0}), {}), error);
  ForestParams none;
  none.n_trees = 0;
  CHECK_THROWS_AS(train_forest(separable(10, 1), none), error);
}

TEST_CASE("forest predictions") {
  const auto d = separable(300, 5);
  ForestParams p;
  p.seed = 9;
  const auto m = train_forest(d, p);
  CHECK(m.trees.size() == 100);
  CHECK(m.params.mtry == 1);
  double sum = 0;
  for (double v : m.importances) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::max_element(m.importances.begin(), m.importances.end()) - m.importances.begin() == 1);
  REQUIRE(m.oob_error);
  CHECK(*m.oob_error < 0.05);
  CHECK(m.oob_coverage > 0.99);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-15, 15);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> row{u(rng), u(rng), u(rng)};
    const auto pr = m.predict_proba(row);
    CHECK(pr[0] + pr[1] == doctest::Approx(1.0));
    CHECK(m.predict(row) == (pr[1] > pr[0] ? 1 : 0));
  }
  CHECK_THROWS_AS(m.predict_proba(std::vector<double>{1, 2}), error);
}

TEST_CASE("vote shares") {
  auto d = separable(40, 8);
  ForestModel m;
  m.schema = d.schema;
  Tree yes, no;
  yes.nodes.push_back(TreeNode{-1, 0, 0, 0, {1, 0}});
  no.nodes.push_back(TreeNode{-1, 0, 0, 0, {0, 1}});
  for (int i = 0; i < 97; ++i) m.trees.push_back(yes);
  for (int i = 0; i < 3; ++i) m.trees.push_back(no);
  const auto p = m.predict_proba(d.row(0));
  CHECK(p[0] == doctest::Approx(0.97));
  CHECK(p[1] == doctest::Approx(0.03));
}

TEST_CASE("single-tree forest agrees with its tree") {
  const auto d = separable(100, 4);
  ForestParams p;
  p.n_trees = 1;
  p.seed = 3;
  const auto m = train_forest(d, p);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto pr = m.predict_proba(d.row(i));
    CHECK((pr[0] == 0.0 || pr[0] == 1.0));
    CHECK(m.predict(d.row(i)) == m.trees[0].predict(d.row(i)));
  }
}

TEST_CASE("forest results do not depend on thread count") {
  const auto d = separable(150, 6);
  ForestParams p;
  p.seed = 12;
  p.n_trees = 30;
  p.jobs = 1;
  const auto a = train_forest(d, p);
  p.jobs = 4;
  const auto b = train_forest(d, p);
  CHECK(a.importances == b.importances);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
      CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
      CHECK(a.trees[t].nodes[n].counts == b.trees[t].nodes[n].counts);
    }
  }
}
