#pragma once

#include "ingest.hpp"
#include "pipeline.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hostscope {

/// One scanner-feed line: a domain or URL with its positive-detection count.
struct VtEntry {
  std::string domain;
  int positives = 0;
};

std::string format_vt_line(const VtEntry& e);
VtEntry parse_vt_line(std::string_view line);

/// Lowercase host part of a URL ("http://A.b/x" -> "a.b"); plain names pass
/// through lowercased.
std::string feed_host(std::string_view text);

struct MaliciousDomainSet {
  std::set<std::string> apexes;
  int min_positives = 5;
  std::uint64_t below_threshold = 0;
};

MaliciousDomainSet filter_vt_entries(std::span<const VtEntry> entries, const SuffixList& suffixes,
                                     int min_positives = 5);
MaliciousDomainSet filter_vt_feed(const std::filesystem::path& path, const SuffixList& suffixes,
                                  int min_positives = 5, bool strict = false, LoadStats* stats = nullptr);

struct MaliciousResolution {
  std::map<IpV4, std::set<std::string>> by_ip;
  std::vector<std::string> unresolved;  // listed apexes with no A record, sorted
};

MaliciousResolution resolve_malicious(const PdnsStore& pdns, const MaliciousDomainSet& mal);

using VerdictMap = std::unordered_map<IpV4, IpVerdict>;
VerdictMap index_verdicts(std::span<const IpVerdict> verdicts);

struct SplitCounts {
  std::uint64_t hosting = 0;
  std::uint64_t nonhosting = 0;
  std::uint64_t abstain_1 = 0;
  std::uint64_t shared = 0;
  std::uint64_t dedicated = 0;
  std::uint64_t abstain_2 = 0;
};

struct SplitReport {
  std::uint64_t n_ips = 0;
  SplitCounts ips;    // per address
  SplitCounts pairs;  // per malicious apex-address pair
  std::optional<double> pct_hosting, pct_nonhosting, pct_shared, pct_dedicated;
  std::optional<double> pairs_pct_hosting, pairs_pct_nonhosting, pairs_pct_shared, pairs_pct_dedicated;
  bool no_decided_stage1 = false;
  bool no_decided_stage2 = false;
};

/// Throws errc::missing naming the addresses of `ip_to_mal` without a verdict.
SplitReport hosting_split_report(const VerdictMap& verdicts, const std::map<IpV4, std::set<std::string>>& ip_to_mal);

struct DistributionRow {
  IpV4 ip;
  std::uint64_t n_total = 0;      // distinct apexes ever hosted
  std::uint64_t n_malicious = 0;
};

/// Rows for malicious-hosting addresses the pipeline labelled shared,
/// ascending by address.
std::vector<DistributionRow> per_ip_distribution(const PdnsStore& pdns, const VerdictMap& verdicts,
                                                 const std::map<IpV4, std::set<std::string>>& ip_to_mal);

/// Empirical CDF: (value, share of samples <= value) at each distinct value.
std::vector<std::pair<double, double>> ecdf(std::vector<double> values);

inline constexpr const char* kUnknownOrg = "UNKNOWN";

struct ProviderCount {
  std::string org;
  std::uint64_t count = 0;
};

struct ProviderRanking {
  std::vector<ProviderCount> total_domains;
  std::vector<ProviderCount> malicious_shared;
  std::vector<ProviderCount> malicious_dedicated;
};

/// Top-k organizations by distinct apexes over every address in the store,
/// and by malicious apexes on shared / dedicated addresses. Counts are
/// distinct (apex, org) pairs; ties go to the smaller org name.
ProviderRanking provider_ranking(const AsnDb& asn, const PdnsStore& pdns, const VerdictMap& verdicts,
                                 const std::map<IpV4, std::set<std::string>>& ip_to_mal, std::size_t k = 5);

struct AnalysisResult {
  MaliciousDomainSet malicious;
  MaliciousResolution resolution;
  SplitReport split;
  std::vector<DistributionRow> distribution;
  ProviderRanking ranking;
  std::uint64_t shared_pairs_unknown_org = 0;
  std::uint64_t dedicated_pairs_unknown_org = 0;
};

AnalysisResult analyze(const PdnsStore& pdns, const AsnDb& asn, const VerdictMap& verdicts,
                       const MaliciousDomainSet& malicious, std::size_t k = 5);

nlohmann::json analysis_summary_json(const AnalysisResult& r);

/// Writes summary.json, per_ip_shared.csv, the two CDF tables and the three
/// provider tables into `dir`; returns the paths written.
std::vector<std::filesystem::path> write_analysis(const AnalysisResult& r, const std::filesystem::path& dir);

} // namespace hostscope
