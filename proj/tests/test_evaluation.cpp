#include "evaluation.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace hostscope;
using namespace testing_support;

namespace {

Dataset noise_data(std::size_t n, bool separable, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Dataset d;
  d.stage = Stage::Hosting;
  d.schema = {"a", "b", "c", "d"};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t l = i % 2;
    const double shift = separable ? (l ? 6.0 : -6.0) : 0.0;
    d.add_row(std::vector<double>{g(rng) + shift, g(rng), g(rng), g(rng)}, l);
  }
  return d;
}

} // namespace

TEST_CASE("metrics arithmetic") {
  const auto m = metrics(Confusion{98, 2, 3, 97});
  CHECK(*m.precision == doctest::Approx(98.0));
  CHECK(*m.recall == doctest::Approx(97.0297).epsilon(1e-4));
  CHECK(*m.fpr == doctest::Approx(2.0202).epsilon(1e-4));
  const auto empty = metrics(Confusion{0, 0, 5, 5});
  CHECK_FALSE(empty.precision);
  CHECK(*empty.recall == 0.0);
}

TEST_CASE("roc and auc") {
  const std::vector<double> scores{0.9, 0.8, 0.8, 0.3, 0.1};
  const std::vector<std::uint8_t> pos{1, 1, 0, 0, 0};
  const auto roc = roc_curve(scores, pos);
  REQUIRE(roc.size() == 5);
  CHECK(roc.front().fpr == 0);
  CHECK(roc.front().tpr == 0);
  CHECK(std::isinf(roc.front().threshold));
  CHECK(roc.back().fpr == 1);
  CHECK(roc.back().tpr == 1);
  CHECK(auc(roc) == doctest::Approx(oracle::auc_pairs({0.9, 0.8, 0.8, 0.3, 0.1}, {1, 1, 0, 0, 0})));
  CHECK_THROWS_AS(roc_curve(scores, std::vector<std::uint8_t>{1, 1, 1, 1, 1}), error);
}

TEST_CASE("auc equals the pair-counting oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<int> p;
    std::vector<std::uint8_t> p8;
    for (int i = 0; i < 60; ++i) {
      s.push_back(std::round(std::uniform_real_distribution<double>(0, 1)(rng) * 10) / 10);
      p.push_back(i % 3 == 0 || (s.back() > 0.6 && i % 2));
      p8.push_back(static_cast<std::uint8_t>(p.back()));
    }
    CHECK(auc(roc_curve(s, p8)) == doctest::Approx(oracle::auc_pairs(s, p)).epsilon(1e-12));
  }
}

TEST_CASE("k-fold on separable and on coin-flip labels") {
  ForestParams p;
  p.seed = 4;
  p.n_trees = 50;
  const auto good = kfold_eval(noise_data(200, true, 1), 5, p);
  CHECK(good.pooled.auc == 1.0);
  CHECK(*good.pooled.metrics.fpr == 0.0);
  CHECK(good.folds.size() == 5);
  CHECK(good.pooled.confusion.total() == 200);

  const auto coin = kfold_eval(noise_data(400, false, 2), 5, p);
  CHECK(coin.pooled.auc >= 0.4);
  CHECK(coin.pooled.auc <= 0.6);
}

TEST_CASE("k-fold preconditions and flip") {
  ForestParams p;
  p.n_trees = 5;
  CHECK_THROWS_AS(kfold_eval(noise_data(8, true, 1), 5, p), error);
  CHECK_THROWS_AS(kfold_eval(noise_data(100, true, 1), 1, p), error);
  const auto flipped = kfold_eval(noise_data(100, true, 1), 5, p, true);
  CHECK(flipped.positive == 1);
  CHECK(report_json(flipped)["positive_label"] == "non-hosting");
}

TEST_CASE("k-fold is deterministic") {
  ForestParams p;
  p.seed = 21;
  p.n_trees = 20;
  const auto d = noise_data(120, false, 3);
  const auto a = kfold_eval(d, 4, p);
  p.jobs = 3;
  const auto b = kfold_eval(d, 4, p);
  CHECK(a.scores == b.scores);
  CHECK(report_json(a).dump() == report_json(b).dump());
}

TEST_CASE("report shapes") {
  ForestParams p;
  p.n_trees = 10;
  const auto r = kfold_eval(noise_data(60, true, 5), 3, p);
  const auto j = report_json(r);
  CHECK(j.contains("precision"));
  CHECK(j.contains("recall"));
  CHECK(j.contains("fpr"));
  CHECK(j.contains("auc"));
  CHECK(j["k"] == 3);
  CHECK(j["roc"].front()[2].is_null());
  TempDir dir;
  write_roc_csv(dir / "roc.csv", r.pooled.roc);
  const auto text = read_file(dir / "roc.csv");
  CHECK(text.rfind("fpr,tpr,threshold\n0,0,inf\n", 0) == 0);
}
