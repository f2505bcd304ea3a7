#include "ingest.hpp"

#include "error.hpp"
#include "jsonl.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

namespace hostscope {

using nlohmann::json;
using jsonl::parse_object;
using jsonl::string_field;
using jsonl::int_field;
using jsonl::field;

namespace {

constexpr std::size_t kMaxDiagnostics = 20;

} // namespace

void for_each_line(const std::filesystem::path& path, bool strict, LoadStats& stats,
                   const std::function<void(std::string_view, std::uint64_t)>& fn) {
  std::ifstream in(path);
  if (!in) fail(errc::io, fmt::format("cannot read '{}'", path.string()));
  std::string line;
  std::uint64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++stats.lines;
    try {
      fn(line, number);
    } catch (const error& e) {
      if (strict) throw error(e.code(), fmt::format("{}:{}: {}", path.string(), number, e.what()));
      ++stats.malformed;
      if (stats.diagnostics.size() < kMaxDiagnostics)
        stats.diagnostics.push_back(fmt::format("line {}: {}", number, e.what()));
    }
  }
}

// ---------------------------------------------------------------------------
// PdnsStore

PdnsStore::Builder::Builder(SuffixList suffixes) : suffixes_(std::move(suffixes)) {}

std::uint32_t PdnsStore::Builder::intern(std::unordered_map<std::string, std::uint32_t>& index,
                                         std::vector<std::string>& table, std::string text) {
  auto [it, inserted] = index.try_emplace(std::move(text), static_cast<std::uint32_t>(table.size()));
  if (inserted) table.push_back(it->first);
  return it->second;
}

std::uint32_t PdnsStore::Builder::intern_name(std::string_view text) {
  std::string key(text);
  for (auto& c : key)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (!key.empty() && key.back() == '.') key.pop_back();
  if (auto it = name_index_.find(key); it != name_index_.end()) return it->second;

  const DomainName domain = DomainName::parse(key, suffixes_);
  NameInfo info;
  info.fqdn = domain.text();
  if (auto a = domain.tld2()) info.apex = intern(apex_index_, apexes_, std::move(*a));
  if (auto t = domain.tld3()) info.tld3 = intern(tld3_index_, tld3s_, std::move(*t));
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(std::move(info));
  name_index_.emplace(std::move(key), id);
  return id;
}

void PdnsStore::Builder::add(const PdnsRecord& record) {
  if (record.rrtype != "A") fail(errc::invalid_argument, fmt::format("record type {} is not consumed", record.rrtype));
  if (record.time_first > record.time_last)
    fail(errc::parse, fmt::format("time_first {} after time_last {}", record.time_first, record.time_last));
  if (record.count < 1) fail(errc::parse, "count must be at least 1");
  const auto name = intern_name(record.name);
  raw_.push_back({record.ip, name, record.time_first, record.time_last, record.count});
}

PdnsStore PdnsStore::Builder::build() && {
  std::sort(raw_.begin(), raw_.end(), [](const Raw& a, const Raw& b) {
    return std::tie(a.ip, a.name, a.first, a.last, a.count) < std::tie(b.ip, b.name, b.first, b.last, b.count);
  });

  PdnsStore store;
  store.records_.reserve(raw_.size());
  std::vector<std::uint32_t> scratch_apex, scratch_tld3;
  std::size_t i = 0;
  while (i < raw_.size()) {
    const IpV4 ip = raw_[i].ip;
    Entry entry;
    entry.begin = store.records_.size();
    scratch_apex.clear();
    scratch_tld3.clear();
    while (i < raw_.size() && raw_[i].ip == ip) {
      StoredRecord rec{raw_[i].name, raw_[i].first, raw_[i].last, raw_[i].count};
      ++i;
      while (i < raw_.size() && raw_[i].ip == ip && raw_[i].name == rec.name) {
        rec.time_first = std::min(rec.time_first, raw_[i].first);
        rec.time_last = std::max(rec.time_last, raw_[i].last);
        rec.count += raw_[i].count;
        ++merged_;
        ++i;
      }
      const auto& info = names_[rec.name];
      if (info.apex != kNoId) scratch_apex.push_back(info.apex);
      if (info.tld3 != kNoId) scratch_tld3.push_back(info.tld3);
      store.records_.push_back(rec);
    }
    entry.end = store.records_.size();
    std::sort(scratch_apex.begin(), scratch_apex.end());
    std::sort(scratch_tld3.begin(), scratch_tld3.end());
    entry.summary.n_names = entry.end - entry.begin;
    entry.summary.n_tld2 = std::unique(scratch_apex.begin(), scratch_apex.end()) - scratch_apex.begin();
    entry.summary.n_tld3 = std::unique(scratch_tld3.begin(), scratch_tld3.end()) - scratch_tld3.begin();
    store.by_ip_.emplace(ip, entry);
    store.ips_.push_back(ip);
    store.by_prefix_[Prefix24(ip).base()].push_back(ip);
  }

  store.names_ = std::move(names_);
  store.apexes_ = std::move(apexes_);
  store.tld3s_ = std::move(tld3s_);
  store.apex_lookup_ = std::move(apex_index_);
  raw_.clear();
  return store;
}

std::span<const StoredRecord> PdnsStore::records(IpV4 ip) const {
  auto it = by_ip_.find(ip);
  if (it == by_ip_.end()) return {};
  return std::span(records_).subspan(it->second.begin, it->second.end - it->second.begin);
}

ResolutionSummary PdnsStore::summary(IpV4 ip) const {
  auto it = by_ip_.find(ip);
  return it == by_ip_.end() ? ResolutionSummary{} : it->second.summary;
}

std::optional<std::uint32_t> PdnsStore::find_apex(std::string_view apex) const {
  auto it = apex_lookup_.find(std::string(apex));
  if (it == apex_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const IpV4> PdnsStore::prefix_ips(Prefix24 prefix) const {
  auto it = by_prefix_.find(prefix.base());
  if (it == by_prefix_.end()) return {};
  return it->second;
}

std::vector<std::uint32_t> PdnsStore::apex_ids(IpV4 ip) const {
  std::vector<std::uint32_t> out;
  for (const auto& r : records(ip))
    if (names_[r.name].apex != kNoId) out.push_back(names_[r.name].apex);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> PdnsStore::apexes_on_day(IpV4 ip, std::int64_t day) const {
  std::vector<std::uint32_t> ids;
  for (const auto& r : records(ip)) {
    const auto apex = names_[r.name].apex;
    if (apex != kNoId && day_of(r.time_first) <= day && day <= day_of(r.time_last)) ids.push_back(apex);
  }
  std::vector<std::string> out;
  for (auto id : ids) out.push_back(apexes_[id]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PdnsRecord PdnsStore::to_record(IpV4 ip, const StoredRecord& r) const {
  return PdnsRecord{names_[r.name].fqdn, "A", ip, r.time_first, r.time_last, r.count};
}

std::optional<PdnsRecord> parse_pdns_line(std::string_view line) {
  const json j = parse_object(line);
  PdnsRecord r;
  r.rrtype = string_field(j, "rrtype");
  for (auto& c : r.rrtype)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  if (r.rrtype != "A") return std::nullopt;
  r.name = string_field(j, "name");
  r.ip = IpV4::parse(string_field(j, "ip"));
  r.time_first = int_field(j, "time_first");
  r.time_last = int_field(j, "time_last");
  const auto count = int_field(j, "count");
  if (count < 1) fail(errc::parse, "count must be at least 1");
  r.count = static_cast<std::uint64_t>(count);
  if (r.time_first > r.time_last) fail(errc::parse, "time_first after time_last");
  return r;
}

std::string format_pdns_line(const PdnsRecord& r) {
  json j = {{"name", r.name},
            {"rrtype", r.rrtype},
            {"ip", r.ip.to_string()},
            {"time_first", r.time_first},
            {"time_last", r.time_last},
            {"count", r.count}};
  return j.dump();
}

PdnsStore load_pdns(const std::filesystem::path& path, const SuffixList& suffixes, bool strict, LoadStats* stats) {
  LoadStats local;
  LoadStats& s = stats ? *stats : local;
  PdnsStore::Builder builder(suffixes);
  for_each_line(path, strict, s, [&](std::string_view line, std::uint64_t) {
    auto rec = parse_pdns_line(line);
    if (!rec) {
      ++s.skipped_non_a;
      return;
    }
    builder.add(*rec);
    ++s.loaded;
  });
  s.merged += builder.merged();
  auto store = std::move(builder).build();
  return store;
}

// ---------------------------------------------------------------------------
// WhoisStore

WhoisStore::WhoisStore(std::vector<WhoisSnapshot> snapshots, int horizon_years)
    : snapshots_(std::move(snapshots)), horizon_years_(horizon_years) {
  if (horizon_years < 0) fail(errc::invalid_argument, "horizon must be non-negative");
  for (std::size_t i = 0; i < snapshots_.size(); ++i) {
    const auto& s = snapshots_[i];
    if (s.range_end < s.range_start) fail(errc::data, "WHOIS range end precedes start");
    if (s.queried_ip) {
      attributed_[*s.queried_ip].push_back(i);
    } else {
      by_start_.push_back(i);
    }
  }
  std::sort(by_start_.begin(), by_start_.end(), [&](std::size_t a, std::size_t b) {
    return snapshots_[a].range_start < snapshots_[b].range_start;
  });
  const std::size_t n = by_start_.size();
  if (n == 0) return;
  max_end_.assign(4 * n, 0);
  std::function<void(std::size_t, std::size_t, std::size_t)> build = [&](std::size_t node, std::size_t lo,
                                                                         std::size_t hi) {
    if (hi - lo == 1) {
      max_end_[node] = snapshots_[by_start_[lo]].range_end.value();
      return;
    }
    const std::size_t mid = (lo + hi) / 2;
    build(2 * node, lo, mid);
    build(2 * node + 1, mid, hi);
    max_end_[node] = std::max(max_end_[2 * node], max_end_[2 * node + 1]);
  };
  build(1, 0, n);
}

std::int64_t WhoisStore::horizon_seconds() const {
  return static_cast<std::int64_t>(horizon_years_ * kSecondsPerYear);
}

void WhoisStore::collect_ranges(std::size_t node, std::size_t lo, std::size_t hi, std::size_t last, IpV4 ip,
                                std::vector<std::size_t>& out) const {
  if (lo > last || max_end_[node] < ip.value()) return;
  if (hi - lo == 1) {
    out.push_back(by_start_[lo]);
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  collect_ranges(2 * node, lo, mid, last, ip, out);
  collect_ranges(2 * node + 1, mid, hi, last, ip, out);
}

std::vector<WhoisSnapshot> WhoisStore::history(IpV4 ip, std::int64_t reference) const {
  std::vector<std::size_t> hits;
  if (auto it = attributed_.find(ip); it != attributed_.end()) hits = it->second;
  if (!by_start_.empty()) {
    // last snapshot whose start <= ip
    auto upper = std::upper_bound(by_start_.begin(), by_start_.end(), ip, [&](IpV4 v, std::size_t idx) {
      return v < snapshots_[idx].range_start;
    });
    if (upper != by_start_.begin()) {
      const std::size_t last = static_cast<std::size_t>(upper - by_start_.begin()) - 1;
      collect_ranges(1, 0, by_start_.size(), last, ip, hits);
    }
  }
  const std::int64_t oldest = reference - horizon_seconds();
  std::vector<WhoisSnapshot> out;
  for (auto idx : hits) {
    const auto& s = snapshots_[idx];
    if (s.observed >= oldest && s.observed <= reference) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const WhoisSnapshot& a, const WhoisSnapshot& b) {
    return std::tie(a.observed, a.range_start, a.range_end, a.owner, a.updated, a.net_type) <
           std::tie(b.observed, b.range_start, b.range_end, b.owner, b.updated, b.net_type);
  });
  return out;
}

std::vector<IpV4> WhoisStore::queried_ips() const {
  std::vector<IpV4> out;
  out.reserve(attributed_.size());
  for (const auto& [ip, _] : attributed_) out.push_back(ip);
  std::sort(out.begin(), out.end());
  return out;
}

WhoisSnapshot parse_whois_line(std::string_view line) {
  const json j = parse_object(line);
  WhoisSnapshot s;
  s.range_start = IpV4::parse(string_field(j, "range_start"));
  s.range_end = IpV4::parse(string_field(j, "range_end"));
  if (s.range_end < s.range_start) fail(errc::parse, "range_end precedes range_start");
  s.owner = normalize_org(string_field(j, "owner"));
  s.net_type = parse_net_type(string_field(j, "net_type"));
  s.updated = int_field(j, "updated");
  s.observed = int_field(j, "observed");
  if (auto it = j.find("ip"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) fail(errc::parse, "key 'ip' must be a string");
    s.queried_ip = IpV4::parse(it->get<std::string>());
    if (!s.contains(*s.queried_ip)) fail(errc::parse, "queried ip lies outside the snapshot range");
  }
  return s;
}

std::string format_whois_line(const WhoisSnapshot& s) {
  json j = {{"range_start", s.range_start.to_string()},
            {"range_end", s.range_end.to_string()},
            {"owner", s.owner},
            {"net_type", std::string(net_type_name(s.net_type))},
            {"updated", s.updated},
            {"observed", s.observed}};
  if (s.queried_ip) j["ip"] = s.queried_ip->to_string();
  return j.dump();
}

WhoisStore load_whois(const std::filesystem::path& path, bool strict, int horizon_years, LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::vector<WhoisSnapshot> snapshots;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    snapshots.push_back(parse_whois_line(line));
    ++st.loaded;
  });
  return WhoisStore(std::move(snapshots), horizon_years);
}

// ---------------------------------------------------------------------------
// AsnDb

AsnDb::AsnDb(std::vector<AsnRecord> records) {
  std::sort(records.begin(), records.end(), [](const AsnRecord& a, const AsnRecord& b) {
    return std::tuple(a.cidr.length(), a.cidr.base(), a.asn, a.org) <
           std::tuple(b.cidr.length(), b.cidr.base(), b.asn, b.org);
  });
  for (auto& r : records) {
    auto& bucket = by_length_[r.cidr.length()];
    if (auto it = bucket.find(r.cidr.base().value()); it != bucket.end()) {
      const auto& existing = records_[it->second];
      if (existing.asn != r.asn)
        fail(errc::data, fmt::format("prefix {} maps to both AS{} and AS{}", r.cidr.to_string(), existing.asn, r.asn));
      continue;
    }
    bucket.emplace(r.cidr.base().value(), records_.size());
    records_.push_back(std::move(r));
  }
}

const AsnRecord* AsnDb::lookup(IpV4 ip) const {
  for (int len = 32; len >= 0; --len) {
    const auto& bucket = by_length_[len];
    if (bucket.empty()) continue;
    const std::uint32_t mask = len == 0 ? 0u : ~std::uint32_t{0} << (32 - len);
    if (auto it = bucket.find(ip.value() & mask); it != bucket.end()) return &records_[it->second];
  }
  return nullptr;
}

AsnRecord parse_asn_line(std::string_view line) {
  const json j = parse_object(line);
  AsnRecord r;
  r.cidr = Cidr::parse(string_field(j, "cidr"));
  const auto asn = int_field(j, "asn");
  if (asn < 0 || asn > 0xFFFFFFFFLL) fail(errc::parse, "asn out of range");
  r.asn = static_cast<std::uint32_t>(asn);
  r.org = string_field(j, "org");
  return r;
}

std::string format_asn_line(const AsnRecord& r) {
  return json{{"cidr", r.cidr.to_string()}, {"asn", r.asn}, {"org", r.org}}.dump();
}

AsnDb load_asn(const std::filesystem::path& path, bool strict, LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::vector<AsnRecord> records;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    records.push_back(parse_asn_line(line));
    ++st.loaded;
  });
  return AsnDb(std::move(records));
}

} // namespace hostscope
