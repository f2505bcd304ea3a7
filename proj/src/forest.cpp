#include "forest.hpp"

#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace hostscope {

double gini(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) fail(errc::invalid_argument, "gini of an empty node");
  double sum_sq = 0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double split_midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, std::size_t min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  min_leaf = std::max<std::size_t>(min_leaf, 1);

  ClassCounts parent{};
  for (auto r : rows) ++parent[data.labels[r]];
  const double parent_gini = gini(parent);
  if (parent_gini == 0.0) return std::nullopt;

  std::vector<std::size_t> order(features.begin(), features.end());
  std::sort(order.begin(), order.end());

  std::vector<std::pair<double, std::uint8_t>> column(n);
  std::optional<Split> best;
  const double total = static_cast<double>(n);
  for (auto f : order) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {data.at(rows[i], f), data.labels[rows[i]]};
    std::sort(column.begin(), column.end());
    ClassCounts left{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[column[i].second];
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t n_left = i + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const ClassCounts right{parent[0] - left[0], parent[1] - left[1]};
      const double decrease = parent_gini - (static_cast<double>(n_left) / total) * gini(left) -
                              (static_cast<double>(n_right) / total) * gini(right);
      if (decrease > kMinImpurityDecrease && (!best || decrease > best->decrease))
        best = Split{f, split_midpoint(column[i].first, column[i + 1].first), decrease};
    }
  }
  return best;
}

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) node = &nodes[row[node->feature] <= node->threshold ? node->left : node->right];
  return *node;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].is_leaf()) d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
  }
  return deepest;
}

namespace {

class TreeGrower {
public:
  TreeGrower(const Dataset& data, const TreeParams& params, std::mt19937_64& rng, std::vector<double>* importance,
             std::size_t n_root)
      : data_(data), params_(params), rng_(rng), importance_(importance), n_root_(n_root) {
    features_.resize(data.width());
    std::iota(features_.begin(), features_.end(), 0);
    mtry_ = params.mtry == 0 ? data.width() : std::min(params.mtry, data.width());
  }

  std::uint32_t grow(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, std::size_t depth) {
    const auto self = static_cast<std::uint32_t>(tree.nodes.size());
    TreeNode node;
    for (std::size_t i = begin; i < end; ++i) ++node.counts[data_.labels[idx[i]]];
    tree.nodes.push_back(node);

    const std::size_t n = end - begin;
    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    const bool at_depth = params_.max_depth != 0 && depth >= params_.max_depth;
    if (pure || at_depth || n < 2 * std::max<std::size_t>(params_.min_leaf, 1)) return self;

    // partial Fisher-Yates: the first mtry_ entries become the sample
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, features_.size() - 1);
      std::swap(features_[i], features_[pick(rng_)]);
    }
    const std::vector<std::size_t> sampled(features_.begin(), features_.begin() + mtry_);
    const auto split =
        best_split(data_, std::span(idx).subspan(begin, n), sampled, std::max<std::size_t>(params_.min_leaf, 1));
    if (!split) return self;

    if (importance_)
      (*importance_)[split->feature] += static_cast<double>(n) / static_cast<double>(n_root_) * split->decrease;
    const auto mid = static_cast<std::size_t>(
        std::partition(idx.begin() + begin, idx.begin() + end,
                       [&](std::size_t r) { return data_.at(r, split->feature) <= split->threshold; }) -
        idx.begin());
    const auto left = grow(idx, begin, mid, depth + 1);
    const auto right = grow(idx, mid, end, depth + 1);
    auto& me = tree.nodes[self];
    me.feature = static_cast<std::int32_t>(split->feature);
    me.threshold = split->threshold;
    me.left = left;
    me.right = right;
    return self;
  }

  Tree tree;

private:
  const Dataset& data_;
  const TreeParams& params_;
  std::mt19937_64& rng_;
  std::vector<double>* importance_;
  std::size_t n_root_;
  std::vector<std::size_t> features_;
  std::size_t mtry_;
};

} // namespace

Tree train_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                std::mt19937_64& rng, std::vector<double>* importance) {
  if (rows.empty()) fail(errc::data, "cannot grow a tree on zero rows");
  if (importance) importance->assign(data.width(), 0.0);
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  TreeGrower grower(data, params, rng, importance, idx.size());
  grower.grow(idx, 0, idx.size(), 0);
  return std::move(grower.tree);
}

Tree train_tree(const Dataset& data, const TreeParams& params, std::mt19937_64& rng) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  return train_tree(data, rows, params, rng);
}

std::array<double, 2> ForestModel::predict_proba(std::span<const double> row) const {
  if (row.size() != schema.size())
    fail(errc::schema, fmt::format("row has {} values, model expects {}", row.size(), schema.size()));
  if (trees.empty()) fail(errc::data, "model has no trees");
  std::array<std::size_t, 2> votes{};
  for (const auto& t : trees) ++votes[t.predict(row)];
  const double n = static_cast<double>(trees.size());
  return {static_cast<double>(votes[0]) / n, static_cast<double>(votes[1]) / n};
}

std::uint8_t ForestModel::predict(std::span<const double> row) const {
  const auto p = predict_proba(row);
  return p[1] > p[0] ? 1 : 0;
}

ForestModel train_forest(const Dataset& data, ForestParams params) {
  const std::size_t n = data.size();
  if (n < 2) fail(errc::data, "training needs at least 2 rows");
  if (data.count(0) == 0 || data.count(1) == 0) fail(errc::data, "training data contains a single class");
  if (params.n_trees == 0) fail(errc::config, "n_trees must be positive");
  if (params.mtry == 0)
    params.mtry = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(std::sqrt(double(data.width())))));
  params.mtry = std::min<std::uint32_t>(params.mtry, static_cast<std::uint32_t>(data.width()));

  const TreeParams tree_params{params.mtry, params.max_depth, std::max<std::uint32_t>(params.min_leaf, 1)};
  std::vector<Tree> trees(params.n_trees);
  std::vector<std::vector<double>> importance(params.n_trees);
  std::vector<std::vector<char>> in_bag(params.n_trees);

  parallel_for(params.n_trees, params.jobs, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(params.seed, t));
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<std::size_t> sample(n);
    in_bag[t].assign(n, 0);
    for (auto& s : sample) {
      s = draw(rng);
      in_bag[t][s] = 1;
    }
    trees[t] = train_tree(data, sample, tree_params, rng, &importance[t]);
  });

  ForestModel model;
  model.stage = data.stage;
  model.schema = data.schema;
  model.params = params;
  model.importances.assign(data.width(), 0.0);
  for (const auto& imp : importance)
    for (std::size_t f = 0; f < imp.size(); ++f) model.importances[f] += imp[f];
  const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (total > 0)
    for (auto& v : model.importances) v /= total;

  std::vector<std::array<std::uint32_t, 2>> oob_votes(n, {0, 0});
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t r = 0; r < n; ++r)
      if (!in_bag[t][r]) ++oob_votes[r][trees[t].predict(data.row(r))];
  std::size_t covered = 0, wrong = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& v = oob_votes[r];
    if (v[0] + v[1] == 0) continue;
    ++covered;
    const std::uint8_t predicted = v[1] > v[0] ? 1 : 0;
    wrong += predicted != data.labels[r];
  }
  model.oob_coverage = static_cast<double>(covered) / static_cast<double>(n);
  if (covered > 0) model.oob_error = static_cast<double>(wrong) / static_cast<double>(covered);
  model.trees = std::move(trees);
  return model;
}

} // namespace hostscope
