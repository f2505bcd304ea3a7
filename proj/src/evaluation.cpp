#include "evaluation.hpp"

#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace hostscope {

namespace {

std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

} // namespace

Metrics metrics(const Confusion& c) {
  return {percent(c.tp, c.tp + c.fp), percent(c.tp, c.tp + c.fn), percent(c.fp, c.fp + c.tn)};
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> is_positive) {
  if (scores.size() != is_positive.size()) fail(errc::invalid_argument, "scores and labels differ in length");
  std::uint64_t pos = 0;
  for (auto p : is_positive) pos += p ? 1 : 0;
  const std::uint64_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) fail(errc::data, "ROC needs both positive and negative rows");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> roc{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == t; ++i) (is_positive[order[i]] ? tp : fp) += 1;
    roc.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos), t});
  }
  return roc;
}

double auc(std::span<const RocPoint> roc) {
  double area = 0;
  for (std::size_t i = 1; i < roc.size(); ++i)
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  return area;
}

EvalReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> is_positive,
                    std::span<const std::uint8_t> predicted_positive) {
  if (predicted_positive.size() != is_positive.size())
    fail(errc::invalid_argument, "predictions and labels differ in length");
  EvalReport r;
  for (std::size_t i = 0; i < is_positive.size(); ++i) {
    if (is_positive[i])
      (predicted_positive[i] ? r.confusion.tp : r.confusion.fn) += 1;
    else
      (predicted_positive[i] ? r.confusion.fp : r.confusion.tn) += 1;
  }
  r.metrics = metrics(r.confusion);
  r.roc = roc_curve(scores, is_positive);
  r.auc = auc(r.roc);
  return r;
}

KfoldResult kfold_eval(const Dataset& data, std::size_t k, const ForestParams& params, bool flip_positive) {
  if (k < 2) fail(errc::invalid_argument, "k must be at least 2");
  for (std::uint8_t label = 0; label < 2; ++label)
    if (data.count(label) < k)
      fail(errc::data, fmt::format("class '{}' has {} rows, fewer than k = {}", stage_labels(data.stage)[label],
                                   data.count(label), k));

  std::vector<std::size_t> fold_of(data.size());
  std::mt19937_64 rng(derive_seed(params.seed, "folds"));
  for (std::uint8_t label = 0; label < 2; ++label) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data.labels[i] == label) members.push_back(i);
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) fold_of[members[j]] = j % k;
  }

  KfoldResult result;
  result.stage = data.stage;
  result.positive = flip_positive ? 1 : 0;
  result.k = k;
  result.scores.assign(data.size(), 0.0);
  std::vector<std::uint8_t> predicted(data.size()), actual(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) actual[i] = data.labels[i] == result.positive;

  const std::uint64_t kfold_seed = derive_seed(params.seed, "kfold");
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    ForestParams fp = params;
    fp.seed = derive_seed(kfold_seed, f);
    const auto model = train_forest(data.subset(train_rows), fp);

    std::vector<double> fold_scores;
    std::vector<std::uint8_t> fold_actual, fold_pred;
    for (auto i : test_rows) {
      const auto p = model.predict_proba(data.row(i));
      const std::uint8_t label = p[1] > p[0] ? 1 : 0;
      result.scores[i] = p[result.positive];
      predicted[i] = label == result.positive;
      fold_scores.push_back(result.scores[i]);
      fold_actual.push_back(actual[i]);
      fold_pred.push_back(predicted[i]);
    }
    result.folds.push_back(evaluate(fold_scores, fold_actual, fold_pred));
  }
  result.pooled = evaluate(result.scores, actual, predicted);
  return result;
}

nlohmann::json report_json(const EvalReport& r, bool with_roc) {
  nlohmann::json j;
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}};
  j["precision"] = opt(r.metrics.precision);
  j["recall"] = opt(r.metrics.recall);
  j["fpr"] = opt(r.metrics.fpr);
  j["auc"] = r.auc;
  if (with_roc) {
    auto roc = nlohmann::json::array();
    for (const auto& p : r.roc)
      roc.push_back({p.fpr, p.tpr, std::isinf(p.threshold) ? nlohmann::json(nullptr) : nlohmann::json(p.threshold)});
    j["roc"] = std::move(roc);
  }
  return j;
}

nlohmann::json report_json(const KfoldResult& r) {
  nlohmann::json j = report_json(r.pooled);
  j["stage"] = stage_name(r.stage);
  j["positive_label"] = stage_labels(r.stage)[r.positive];
  j["k"] = r.k;
  j["n"] = r.pooled.confusion.total();
  auto folds = nlohmann::json::array();
  for (const auto& f : r.folds) folds.push_back(report_json(f, false));
  j["folds"] = std::move(folds);
  return j;
}

void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> roc) {
  std::ofstream out(path);
  if (!out) fail(errc::io, fmt::format("cannot write '{}'", path.string()));
  out << "fpr,tpr,threshold\n";
  for (const auto& p : roc)
    out << fmt::format("{},{},{}\n", p.fpr, p.tpr, std::isinf(p.threshold) ? std::string("inf") : fmt::format("{}", p.threshold));
  if (!out) fail(errc::io, fmt::format("write to '{}' failed", path.string()));
}

} // namespace hostscope
