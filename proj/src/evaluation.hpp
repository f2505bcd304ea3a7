#pragma once

#include "forest.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace hostscope {

/// 2x2 confusion counts relative to a designated positive label.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Percentages; absent when the denominator is zero.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fpr;
};

Metrics metrics(const Confusion& c);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  double threshold = 0;  // +inf for the (0,0) origin
};

/// ROC over every distinct score: a row is called positive when its score is
/// >= threshold. Starts at (0,0) and ends at (1,1). Needs both classes.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> is_positive);

/// Trapezoid area under a curve ordered by increasing fpr.
double auc(std::span<const RocPoint> roc);

struct EvalReport {
  Confusion confusion;
  Metrics metrics;
  std::vector<RocPoint> roc;
  double auc = 0;
};

/// Confusion from hard predictions plus ROC/AUC from scores.
EvalReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> is_positive,
                    std::span<const std::uint8_t> predicted_positive);

struct KfoldResult {
  Stage stage = Stage::Hosting;
  std::uint8_t positive = 0;
  std::size_t k = 0;
  EvalReport pooled;
  std::vector<EvalReport> folds;
  /// Held-out P(positive) for every row of the input dataset.
  std::vector<double> scores;
};

/// Stratified k-fold cross-validation. Fold membership is shuffled with
/// derive_seed(params.seed, "folds"); fold f trains with a seed derived from
/// (params.seed, "kfold", f). The positive label is index 0 unless flipped.
KfoldResult kfold_eval(const Dataset& data, std::size_t k, const ForestParams& params, bool flip_positive = false);

nlohmann::json report_json(const EvalReport& r, bool with_roc = true);
nlohmann::json report_json(const KfoldResult& r);
void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> roc);

} // namespace hostscope
