#pragma once

#include "ingest.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hostscope {

inline constexpr int kChurnWindowDays = 60;

/// The 9 dedicated/shared features of one hosting address.
struct DedicatedFeatures {
  std::uint64_t g1_num_tld2 = 0;
  std::uint64_t g2_num_tld3 = 0;
  std::uint64_t g3_num_domains = 0;
  std::uint64_t g4_num_owners = 0;
  std::uint64_t g5_num_whois = 0;
  double g6_avg_daily_churn = 0;
  double g7_std_daily_churn = 0;
  double g8_avg_duration = 0;
  double g9_std_duration = 0;

  std::vector<double> to_row() const;
  static const std::vector<std::string>& schema();
};

/// Symmetric-difference sizes between consecutive daily apex sets over the
/// `window_days` UTC days ending on the day of `reference`. Returns
/// window_days - 1 values.
std::vector<double> daily_churn_series(const PdnsStore& store, IpV4 ip, std::int64_t reference,
                                       int window_days = kChurnWindowDays);

/// (mean, population standard deviation). Throws on an empty series.
std::pair<double, double> churn_stats(std::span<const double> series);

/// Per-apex lifetime on `ip` (latest last-seen minus earliest first-seen, in
/// years); returns (mean, population std), or (0, 0) with no apexes.
std::pair<double, double> duration_stats(const PdnsStore& store, IpV4 ip);

DedicatedFeatures extract_dedicated_features(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip,
                                             std::int64_t reference);

} // namespace hostscope
