#pragma once

#include "dataset.hpp"

#include <array>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace hostscope {

using ClassCounts = std::array<std::uint64_t, 2>;

/// Gini impurity 1 - sum(p_c^2). Throws errc::invalid_argument on zero total.
double gini(std::span<const std::uint64_t> counts);

/// Smallest impurity decrease treated as an improvement.
inline constexpr double kMinImpurityDecrease = 1e-12;

struct Split {
  std::size_t feature = 0;
  double threshold = 0;
  double decrease = 0;
};

/// Midpoint between consecutive distinct sorted values, kept strictly below
/// `hi` so that `lo <= t < hi` routes lo left and hi right.
double split_midpoint(double lo, double hi);

/// Exhaustive CART split over `features` for the rows listed in `rows`
/// (duplicates allowed). Ties go to the lower feature index, then the lower
/// threshold. Returns nullopt when no split lowers impurity by more than
/// kMinImpurityDecrease with both sides holding at least `min_leaf` rows.
std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, std::size_t min_leaf = 1);

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  ClassCounts counts{};

  bool is_leaf() const { return feature < 0; }
  /// Majority label; ties go to label 0.
  std::uint8_t vote() const { return counts[1] > counts[0] ? 1 : 0; }
};

/// Flat binary tree; node 0 is the root. Values <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;
  const TreeNode& leaf_for(std::span<const double> row) const;
  std::uint8_t predict(std::span<const double> row) const { return leaf_for(row).vote(); }
  std::size_t depth() const;
};

struct TreeParams {
  std::size_t mtry = 0;       // 0 = all features
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_leaf = 1;
};

/// Grows a CART tree on `rows`, sampling `mtry` features per node without
/// replacement from `rng`. When `importance` is given, each split adds its
/// impurity decrease weighted by the node's share of `rows`.
Tree train_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                std::mt19937_64& rng, std::vector<double>* importance = nullptr);
Tree train_tree(const Dataset& data, const TreeParams& params, std::mt19937_64& rng);

struct ForestParams {
  std::uint32_t n_trees = 100;
  std::uint32_t mtry = 0;       // 0 = floor(sqrt(width))
  std::uint32_t max_depth = 0;  // 0 = unbounded
  std::uint32_t min_leaf = 1;
  std::uint64_t seed = 0;
  unsigned jobs = 1;  // does not affect results
};

struct ForestModel {
  Stage stage = Stage::Hosting;
  std::vector<std::string> schema;
  ForestParams params;  // mtry resolved
  std::vector<Tree> trees;
  std::vector<double> importances;
  std::optional<double> oob_error;
  double oob_coverage = 0;  // share of training rows with at least one OOB vote

  /// Share of trees voting each label.
  std::array<double, 2> predict_proba(std::span<const double> row) const;
  /// Argmax of predict_proba; ties go to label 0.
  std::uint8_t predict(std::span<const double> row) const;
};

/// Bootstrap-aggregated forest. Tree i uses seed derive_seed(seed, i), so the
/// result does not depend on `jobs`.
ForestModel train_forest(const Dataset& data, ForestParams params);

} // namespace hostscope
