#include "features_hosting.hpp"

#include <algorithm>
#include <set>

namespace hostscope {

ResolutionSummary resolution_counts(const PdnsStore& store, IpV4 ip) { return store.summary(ip); }

PrefixStats prefix_stats(const PdnsStore& store, IpV4 ip) {
  PrefixStats out;
  const auto members = store.prefix_ips(Prefix24(ip));
  std::uint64_t sum_tld3 = 0, sum_tld2 = 0;
  for (IpV4 member : members) {
    const auto s = store.summary(member);
    sum_tld3 += s.n_tld3;
    sum_tld2 += s.n_tld2;
    out.f6_max_tld3_in_24 = std::max(out.f6_max_tld3_in_24, s.n_tld3);
    out.f8_max_tld2_in_24 = std::max(out.f8_max_tld2_in_24, s.n_tld2);
  }
  constexpr double n = Prefix24::size();
  out.f4_pct_dns_in_24 = 100.0 * static_cast<double>(members.size()) / n;
  out.f5_mean_tld3_in_24 = static_cast<double>(sum_tld3) / n;
  out.f7_mean_tld2_in_24 = static_cast<double>(sum_tld2) / n;
  return out;
}

WhoisHistoryFeatures whois_history_features(const WhoisStore& store, IpV4 ip, std::int64_t reference) {
  WhoisHistoryFeatures out;
  const auto history = store.history(ip, reference);
  if (history.empty()) return out;

  std::set<std::string> owners;
  std::set<std::pair<IpV4, IpV4>> ranges;
  std::set<std::int64_t> records;
  std::uint64_t max_size = 0, min_size = ~std::uint64_t{0};
  std::int64_t latest_update = history.front().updated;
  for (const auto& s : history) {
    owners.insert(s.owner);
    ranges.emplace(s.range_start, s.range_end);
    records.insert(s.observed);
    max_size = std::max(max_size, inetnum_size(s));
    min_size = std::min(min_size, inetnum_size(s));
    latest_update = std::max(latest_update, s.updated);
  }

  // history is sorted by observed time: the latest record is the tail group
  const std::int64_t latest_observed = history.back().observed;
  const WhoisSnapshot* current = nullptr;
  for (const auto& s : history) {
    if (s.observed != latest_observed) continue;
    if (!current || inetnum_size(s) < inetnum_size(*current)) current = &s;
  }

  out.f9_num_owners = owners.size();
  out.f10_num_inetnums = ranges.size();
  out.f11_max_inetnum_size = max_size;
  out.f12_min_inetnum_size = min_size;
  out.f13_inetnum_size = inetnum_size(*current);
  out.f14_net_type = current->net_type;
  out.f15_years_since_update = std::max(0.0, static_cast<double>(reference - latest_update) / kSecondsPerYear);
  out.f16_num_whois = records.size();
  return out;
}

HostingFeatures extract_hosting_features(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip,
                                         std::int64_t reference) {
  HostingFeatures f;
  const auto counts = resolution_counts(pdns, ip);
  f.f1_num_tld2 = counts.n_tld2;
  f.f2_num_tld3 = counts.n_tld3;
  f.f3_num_domains = counts.n_names;
  f.prefix = prefix_stats(pdns, ip);
  f.whois = whois_history_features(whois, ip, reference);
  return f;
}

const std::vector<std::string>& HostingFeatures::schema() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"f1_num_tld2",        "f2_num_tld3",          "f3_num_domains",
                               "f4_pct_dns_in_24",   "f5_mean_tld3_in_24",   "f6_max_tld3_in_24",
                               "f7_mean_tld2_in_24", "f8_max_tld2_in_24",    "f9_num_owners",
                               "f10_num_inetnums",   "f11_max_inetnum_size", "f12_min_inetnum_size",
                               "f13_inetnum_size"};
    for (int t = 0; t < kNetTypeCount; ++t) v.push_back("f14_" + std::string(net_type_column(NetType(t))));
    v.push_back("f15_years_since_update");
    v.push_back("f16_num_whois");
    return v;
  }();
  return names;
}

std::vector<double> HostingFeatures::to_row() const {
  std::vector<double> row{static_cast<double>(f1_num_tld2),
                          static_cast<double>(f2_num_tld3),
                          static_cast<double>(f3_num_domains),
                          prefix.f4_pct_dns_in_24,
                          prefix.f5_mean_tld3_in_24,
                          static_cast<double>(prefix.f6_max_tld3_in_24),
                          prefix.f7_mean_tld2_in_24,
                          static_cast<double>(prefix.f8_max_tld2_in_24),
                          static_cast<double>(whois.f9_num_owners),
                          static_cast<double>(whois.f10_num_inetnums),
                          static_cast<double>(whois.f11_max_inetnum_size),
                          static_cast<double>(whois.f12_min_inetnum_size),
                          static_cast<double>(whois.f13_inetnum_size)};
  for (int t = 0; t < kNetTypeCount; ++t) row.push_back(whois.f14_net_type == NetType(t) ? 1.0 : 0.0);
  row.push_back(whois.f15_years_since_update);
  row.push_back(static_cast<double>(whois.f16_num_whois));
  return row;
}

} // namespace hostscope
