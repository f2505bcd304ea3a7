#include "features_dedicated.hpp"

#include "error.hpp"
#include "features_hosting.hpp"

#include <algorithm>
#include <cmath>

namespace hostscope {

namespace {

std::pair<double, double> mean_and_pstd(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size()))};
}

} // namespace

std::vector<double> daily_churn_series(const PdnsStore& store, IpV4 ip, std::int64_t reference, int window_days) {
  if (window_days < 2) fail(errc::invalid_argument, "churn window must span at least 2 days");
  const std::int64_t last_day = day_of(reference);
  const std::int64_t first_day = last_day - window_days + 1;
  const auto apexes = store.apex_ids(ip);

  // presence[a * window + d]: apex a active on window day d
  std::vector<char> presence(apexes.size() * static_cast<std::size_t>(window_days), 0);
  for (const auto& r : store.records(ip)) {
    const auto apex = store.name(r.name).apex;
    if (apex == kNoId) continue;
    const std::int64_t lo = std::max(first_day, day_of(r.time_first));
    const std::int64_t hi = std::min(last_day, day_of(r.time_last));
    if (lo > hi) continue;
    const auto a = static_cast<std::size_t>(std::lower_bound(apexes.begin(), apexes.end(), apex) - apexes.begin());
    char* row = presence.data() + a * window_days;
    std::fill(row + (lo - first_day), row + (hi - first_day) + 1, 1);
  }

  std::vector<double> churn(window_days - 1, 0.0);
  for (std::size_t a = 0; a < apexes.size(); ++a) {
    const char* row = presence.data() + a * window_days;
    for (int d = 1; d < window_days; ++d)
      if (row[d] != row[d - 1]) churn[d - 1] += 1.0;
  }
  return churn;
}

std::pair<double, double> churn_stats(std::span<const double> series) {
  if (series.empty()) fail(errc::invalid_argument, "churn series is empty (window too small)");
  return mean_and_pstd(series);
}

std::pair<double, double> duration_stats(const PdnsStore& store, IpV4 ip) {
  const auto apexes = store.apex_ids(ip);
  if (apexes.empty()) return {0.0, 0.0};
  std::vector<std::int64_t> first(apexes.size(), INT64_MAX), last(apexes.size(), INT64_MIN);
  for (const auto& r : store.records(ip)) {
    const auto apex = store.name(r.name).apex;
    if (apex == kNoId) continue;
    const auto a = static_cast<std::size_t>(std::lower_bound(apexes.begin(), apexes.end(), apex) - apexes.begin());
    first[a] = std::min(first[a], r.time_first);
    last[a] = std::max(last[a], r.time_last);
  }
  std::vector<double> years(apexes.size());
  for (std::size_t a = 0; a < apexes.size(); ++a)
    years[a] = static_cast<double>(last[a] - first[a]) / kSecondsPerYear;
  return mean_and_pstd(years);
}

DedicatedFeatures extract_dedicated_features(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip,
                                             std::int64_t reference) {
  DedicatedFeatures g;
  const auto counts = resolution_counts(pdns, ip);
  g.g1_num_tld2 = counts.n_tld2;
  g.g2_num_tld3 = counts.n_tld3;
  g.g3_num_domains = counts.n_names;
  const auto history = whois_history_features(whois, ip, reference);
  g.g4_num_owners = history.f9_num_owners;
  g.g5_num_whois = history.f16_num_whois;
  const auto series = daily_churn_series(pdns, ip, reference);
  std::tie(g.g6_avg_daily_churn, g.g7_std_daily_churn) = churn_stats(series);
  std::tie(g.g8_avg_duration, g.g9_std_duration) = duration_stats(pdns, ip);
  return g;
}

const std::vector<std::string>& DedicatedFeatures::schema() {
  static const std::vector<std::string> names{
      "g1_num_tld2",        "g2_num_tld3",        "g3_num_domains",  "g4_num_owners",  "g5_num_whois",
      "g6_avg_daily_churn", "g7_std_daily_churn", "g8_avg_duration", "g9_std_duration"};
  return names;
}

std::vector<double> DedicatedFeatures::to_row() const {
  return {static_cast<double>(g1_num_tld2),   static_cast<double>(g2_num_tld3),  static_cast<double>(g3_num_domains),
          static_cast<double>(g4_num_owners), static_cast<double>(g5_num_whois), g6_avg_daily_churn,
          g7_std_daily_churn,                 g8_avg_duration,                   g9_std_duration};
}

} // namespace hostscope
