#pragma once

#include "ingest.hpp"

#include <string>
#include <vector>

namespace hostscope {

/// f15 value for an address with no WHOIS history, in years.
inline constexpr double kEmptyWhoisYears = 10.0;

struct PrefixStats {
  double f4_pct_dns_in_24 = 0;
  double f5_mean_tld3_in_24 = 0;
  std::uint64_t f6_max_tld3_in_24 = 0;
  double f7_mean_tld2_in_24 = 0;
  std::uint64_t f8_max_tld2_in_24 = 0;
};

struct WhoisHistoryFeatures {
  std::uint64_t f9_num_owners = 0;
  std::uint64_t f10_num_inetnums = 0;
  std::uint64_t f11_max_inetnum_size = 0;
  std::uint64_t f12_min_inetnum_size = 0;
  std::uint64_t f13_inetnum_size = 0;
  NetType f14_net_type = NetType::Unknown;
  double f15_years_since_update = kEmptyWhoisYears;
  std::uint64_t f16_num_whois = 0;
};

/// The 16 hosting/non-hosting features of one address. f14 stays categorical
/// here and is one-hot expanded by to_row().
struct HostingFeatures {
  std::uint64_t f1_num_tld2 = 0;
  std::uint64_t f2_num_tld3 = 0;
  std::uint64_t f3_num_domains = 0;
  PrefixStats prefix;
  WhoisHistoryFeatures whois;

  /// 20 model columns in schema() order.
  std::vector<double> to_row() const;
  static const std::vector<std::string>& schema();
};

ResolutionSummary resolution_counts(const PdnsStore& store, IpV4 ip);

/// Statistics over all 256 addresses of ip's /24, the address itself
/// included. Means divide by 256.
PrefixStats prefix_stats(const PdnsStore& store, IpV4 ip);

/// Owners, inetnums and update recency over the snapshots observed within the
/// store horizon before `reference`. A WHOIS record is one observation time;
/// it may carry several nested inetnum snapshots. f13/f14 describe the most
/// specific (smallest) inetnum of the latest record; f15 uses the latest
/// `updated` stamp; f16 counts records.
WhoisHistoryFeatures whois_history_features(const WhoisStore& store, IpV4 ip, std::int64_t reference);

HostingFeatures extract_hosting_features(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip,
                                         std::int64_t reference);

} // namespace hostscope
