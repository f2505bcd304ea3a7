#include "analysis.hpp"

#include "jsonl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include <fmt/format.h>

namespace hostscope {

using nlohmann::json;

std::string format_vt_line(const VtEntry& e) { return json{{"domain", e.domain}, {"positives", e.positives}}.dump(); }

VtEntry parse_vt_line(std::string_view line) {
  const auto j = jsonl::parse_object(line);
  VtEntry e;
  e.domain = jsonl::string_field(j, "domain");
  const auto p = jsonl::int_field(j, "positives");
  if (p < 0) fail(errc::parse, "positives must be non-negative");
  e.positives = static_cast<int>(std::min<std::int64_t>(p, 1 << 30));
  return e;
}

std::string feed_host(std::string_view text) {
  if (const auto scheme = text.find("://"); scheme != std::string_view::npos) text.remove_prefix(scheme + 3);
  text = text.substr(0, text.find_first_of("/?#"));
  if (const auto at = text.rfind('@'); at != std::string_view::npos) text.remove_prefix(at + 1);
  text = text.substr(0, text.find(':'));
  std::string host(text);
  std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
  return host;
}

namespace {

std::optional<std::string> apex_of(const std::string& text, const SuffixList& suffixes) {
  const auto host = feed_host(text);
  if (IpV4::try_parse(host)) fail(errc::parse, fmt::format("'{}' is an address, not a domain", host));
  return DomainName::parse(host, suffixes).tld2();
}

} // namespace

MaliciousDomainSet filter_vt_entries(std::span<const VtEntry> entries, const SuffixList& suffixes, int min_positives) {
  if (min_positives < 1) fail(errc::invalid_argument, "min_positives must be at least 1");
  MaliciousDomainSet out;
  out.min_positives = min_positives;
  for (const auto& e : entries) {
    if (e.positives < min_positives) {
      ++out.below_threshold;
      continue;
    }
    if (auto apex = apex_of(e.domain, suffixes)) out.apexes.insert(std::move(*apex));
  }
  return out;
}

MaliciousDomainSet filter_vt_feed(const std::filesystem::path& path, const SuffixList& suffixes, int min_positives,
                                  bool strict, LoadStats* stats) {
  if (min_positives < 1) fail(errc::invalid_argument, "min_positives must be at least 1");
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  MaliciousDomainSet out;
  out.min_positives = min_positives;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    const auto e = parse_vt_line(line);
    const auto apex = apex_of(e.domain, suffixes);
    if (!apex) fail(errc::parse, fmt::format("'{}' has no registered domain", e.domain));
    ++st.loaded;
    if (e.positives < min_positives)
      ++out.below_threshold;
    else
      out.apexes.insert(*apex);
  });
  return out;
}

MaliciousResolution resolve_malicious(const PdnsStore& pdns, const MaliciousDomainSet& mal) {
  MaliciousResolution out;
  std::unordered_set<std::uint32_t> wanted;
  for (const auto& apex : mal.apexes) {
    if (auto id = pdns.find_apex(apex))
      wanted.insert(*id);
    else
      out.unresolved.push_back(apex);
  }
  std::unordered_set<std::uint32_t> seen;
  for (IpV4 ip : pdns.ips())
    for (auto id : pdns.apex_ids(ip))
      if (wanted.contains(id)) {
        out.by_ip[ip].insert(pdns.apex(id));
        seen.insert(id);
      }
  // apexes known only through non-A names never resolve to an address
  for (auto id : wanted)
    if (!seen.contains(id)) out.unresolved.push_back(pdns.apex(id));
  std::sort(out.unresolved.begin(), out.unresolved.end());
  return out;
}

VerdictMap index_verdicts(std::span<const IpVerdict> verdicts) {
  VerdictMap m;
  for (const auto& v : verdicts) m[v.ip] = v;
  return m;
}

namespace {

void count(SplitCounts& c, const IpVerdict& v, std::uint64_t w) {
  switch (v.stage1) {
    case Stage1Verdict::Hosting: c.hosting += w; break;
    case Stage1Verdict::NonHosting: c.nonhosting += w; break;
    case Stage1Verdict::Abstain: c.abstain_1 += w; break;
  }
  if (!v.stage2) return;
  switch (*v.stage2) {
    case Stage2Verdict::Shared: c.shared += w; break;
    case Stage2Verdict::Dedicated: c.dedicated += w; break;
    case Stage2Verdict::Abstain: c.abstain_2 += w; break;
  }
}

std::optional<double> pct(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return std::nullopt;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const IpVerdict& verdict_for(const VerdictMap& verdicts, IpV4 ip) { return verdicts.at(ip); }

} // namespace

SplitReport hosting_split_report(const VerdictMap& verdicts, const std::map<IpV4, std::set<std::string>>& ip_to_mal) {
  std::vector<std::string> missing;
  for (const auto& [ip, apexes] : ip_to_mal)
    if (!verdicts.contains(ip)) missing.push_back(ip.to_string());
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? " " : "") + missing[i];
    if (missing.size() > 20) list += fmt::format(" (+{} more)", missing.size() - 20);
    fail(errc::missing, fmt::format("{} addresses have no verdict: {}", missing.size(), list));
  }

  SplitReport r;
  r.n_ips = ip_to_mal.size();
  for (const auto& [ip, apexes] : ip_to_mal) {
    const auto& v = verdict_for(verdicts, ip);
    count(r.ips, v, 1);
    count(r.pairs, v, apexes.size());
  }
  const auto d1 = r.ips.hosting + r.ips.nonhosting, d2 = r.ips.shared + r.ips.dedicated;
  r.no_decided_stage1 = d1 == 0;
  r.no_decided_stage2 = d2 == 0;
  r.pct_hosting = pct(r.ips.hosting, d1);
  r.pct_nonhosting = pct(r.ips.nonhosting, d1);
  r.pct_shared = pct(r.ips.shared, d2);
  r.pct_dedicated = pct(r.ips.dedicated, d2);
  const auto p1 = r.pairs.hosting + r.pairs.nonhosting, p2 = r.pairs.shared + r.pairs.dedicated;
  r.pairs_pct_hosting = pct(r.pairs.hosting, p1);
  r.pairs_pct_nonhosting = pct(r.pairs.nonhosting, p1);
  r.pairs_pct_shared = pct(r.pairs.shared, p2);
  r.pairs_pct_dedicated = pct(r.pairs.dedicated, p2);
  return r;
}

std::vector<DistributionRow> per_ip_distribution(const PdnsStore& pdns, const VerdictMap& verdicts,
                                                 const std::map<IpV4, std::set<std::string>>& ip_to_mal) {
  std::vector<DistributionRow> rows;
  for (const auto& [ip, apexes] : ip_to_mal) {
    auto it = verdicts.find(ip);
    if (it == verdicts.end() || it->second.stage2 != Stage2Verdict::Shared) continue;
    rows.push_back({ip, pdns.summary(ip).n_tld2, apexes.size()});
  }
  return rows;
}

std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i + 1 == values.size() || values[i + 1] != values[i])
      out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  return out;
}

namespace {

std::vector<ProviderCount> top_k(const std::map<std::string, std::uint64_t>& counts, std::size_t k) {
  std::vector<ProviderCount> v;
  for (const auto& [org, n] : counts) v.push_back({org, n});
  std::sort(v.begin(), v.end(), [](const ProviderCount& a, const ProviderCount& b) {
    return a.count != b.count ? a.count > b.count : a.org < b.org;
  });
  if (v.size() > k) v.resize(k);
  return v;
}

const std::string& org_of(const AsnDb& asn, IpV4 ip) {
  static const std::string unknown = kUnknownOrg;
  const auto* r = asn.lookup(ip);
  return r ? r->org : unknown;
}

} // namespace

ProviderRanking provider_ranking(const AsnDb& asn, const PdnsStore& pdns, const VerdictMap& verdicts,
                                 const std::map<IpV4, std::set<std::string>>& ip_to_mal, std::size_t k) {
  std::map<std::string, std::unordered_set<std::uint32_t>> total;
  for (IpV4 ip : pdns.ips()) {
    auto& set = total[org_of(asn, ip)];
    for (auto id : pdns.apex_ids(ip)) set.insert(id);
  }
  std::map<std::string, std::set<std::string>> shared, dedicated;
  for (const auto& [ip, apexes] : ip_to_mal) {
    auto it = verdicts.find(ip);
    if (it == verdicts.end() || !it->second.stage2) continue;
    auto* target = *it->second.stage2 == Stage2Verdict::Shared      ? &shared
                   : *it->second.stage2 == Stage2Verdict::Dedicated ? &dedicated
                                                                    : nullptr;
    if (!target) continue;
    (*target)[org_of(asn, ip)].insert(apexes.begin(), apexes.end());
  }
  auto sizes = [](const auto& m) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [org, s] : m) out[org] = s.size();
    return out;
  };
  return {top_k(sizes(total), k), top_k(sizes(shared), k), top_k(sizes(dedicated), k)};
}

AnalysisResult analyze(const PdnsStore& pdns, const AsnDb& asn, const VerdictMap& verdicts,
                       const MaliciousDomainSet& malicious, std::size_t k) {
  AnalysisResult r;
  r.malicious = malicious;
  r.resolution = resolve_malicious(pdns, malicious);
  r.split = hosting_split_report(verdicts, r.resolution.by_ip);
  r.distribution = per_ip_distribution(pdns, verdicts, r.resolution.by_ip);
  r.ranking = provider_ranking(asn, pdns, verdicts, r.resolution.by_ip, k);
  for (const auto& [ip, apexes] : r.resolution.by_ip) {
    const auto& v = verdicts.at(ip);
    if (!v.stage2 || asn.lookup(ip)) continue;
    if (*v.stage2 == Stage2Verdict::Shared) r.shared_pairs_unknown_org += apexes.size();
    if (*v.stage2 == Stage2Verdict::Dedicated) r.dedicated_pairs_unknown_org += apexes.size();
  }
  return r;
}

json analysis_summary_json(const AnalysisResult& r) {
  const auto& s = r.split;
  auto counts = [](const SplitCounts& c) {
    return json{{"hosting", c.hosting},     {"nonhosting", c.nonhosting}, {"abstain_stage1", c.abstain_1},
                {"shared", c.shared},       {"dedicated", c.dedicated},   {"abstain_stage2", c.abstain_2}};
  };
  auto ranking = [](const std::vector<ProviderCount>& v) {
    auto a = json::array();
    for (const auto& p : v) a.push_back({{"org", p.org}, {"count", p.count}});
    return a;
  };
  std::uint64_t total_pairs = 0;
  for (const auto& [ip, apexes] : r.resolution.by_ip) total_pairs += apexes.size();
  const auto& p = s.pairs;
  const std::uint64_t partitioned = p.shared + p.dedicated + p.abstain_2 + p.nonhosting + p.abstain_1;
  json j;
  j["min_positives"] = r.malicious.min_positives;
  j["malicious_apexes"] = r.malicious.apexes.size();
  j["feed_below_threshold"] = r.malicious.below_threshold;
  j["unresolved_apexes"] = r.resolution.unresolved.size();
  j["malicious_ips"] = s.n_ips;
  j["ips"] = counts(s.ips);
  j["pairs"] = counts(s.pairs);
  j["no_decided_stage1"] = s.no_decided_stage1;
  j["no_decided_stage2"] = s.no_decided_stage2;
  j["pct_hosting"] = opt(s.pct_hosting);
  j["pct_nonhosting"] = opt(s.pct_nonhosting);
  j["pct_shared"] = opt(s.pct_shared);
  j["pct_dedicated"] = opt(s.pct_dedicated);
  j["pairs_pct_hosting"] = opt(s.pairs_pct_hosting);
  j["pairs_pct_nonhosting"] = opt(s.pairs_pct_nonhosting);
  j["pairs_pct_shared"] = opt(s.pairs_pct_shared);
  j["pairs_pct_dedicated"] = opt(s.pairs_pct_dedicated);
  j["conservation"] = {{"total_pairs", total_pairs},
                       {"shared", p.shared},
                       {"dedicated", p.dedicated},
                       {"abstain_stage2", p.abstain_2},
                       {"nonhosting", p.nonhosting},
                       {"abstain_stage1", p.abstain_1},
                       {"shared_unknown_org", r.shared_pairs_unknown_org},
                       {"dedicated_unknown_org", r.dedicated_pairs_unknown_org},
                       {"balanced", partitioned == total_pairs}};
  j["providers"] = {{"total_domains", ranking(r.ranking.total_domains)},
                    {"malicious_shared", ranking(r.ranking.malicious_shared)},
                    {"malicious_dedicated", ranking(r.ranking.malicious_dedicated)}};
  return j;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(errc::io, fmt::format("cannot write '{}'", p.string()));
  return out;
}

void write_cdf(const std::filesystem::path& p, const std::vector<std::pair<double, double>>& cdf) {
  auto out = open_out(p);
  out << "value,cdf\n";
  for (const auto& [v, f] : cdf) out << fmt::format("{},{}\n", v, f);
}

void write_ranking(const std::filesystem::path& p, const std::vector<ProviderCount>& v) {
  auto out = open_out(p);
  out << "rank,org,count\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string org = v[i].org;
    if (org.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : org) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      org = quoted + "\"";
    }
    out << fmt::format("{},{},{}\n", i + 1, org, v[i].count);
  }
}

} // namespace

std::vector<std::filesystem::path> write_analysis(const AnalysisResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(errc::io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> paths;

  paths.push_back(dir / "summary.json");
  open_out(paths.back()) << analysis_summary_json(r).dump(2) << '\n';

  paths.push_back(dir / "per_ip_shared.csv");
  {
    auto out = open_out(paths.back());
    out << "ip,n_total_domains,n_malicious,stage2\n";
    for (const auto& row : r.distribution)
      out << fmt::format("{},{},{},shared\n", row.ip.to_string(), row.n_total, row.n_malicious);
  }
  std::vector<double> totals, mals;
  for (const auto& row : r.distribution) {
    totals.push_back(static_cast<double>(row.n_total));
    mals.push_back(static_cast<double>(row.n_malicious));
  }
  paths.push_back(dir / "cdf_total_domains.csv");
  write_cdf(paths.back(), ecdf(totals));
  paths.push_back(dir / "cdf_malicious_domains.csv");
  write_cdf(paths.back(), ecdf(mals));
  paths.push_back(dir / "providers_total_domains.csv");
  write_ranking(paths.back(), r.ranking.total_domains);
  paths.push_back(dir / "providers_malicious_shared.csv");
  write_ranking(paths.back(), r.ranking.malicious_shared);
  paths.push_back(dir / "providers_malicious_dedicated.csv");
  write_ranking(paths.back(), r.ranking.malicious_dedicated);
  return paths;
}

} // namespace hostscope
