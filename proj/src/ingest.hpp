#pragma once

#include "datamodel.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hostscope {

/// Outcome of loading one line-delimited input file.
struct LoadStats {
  std::uint64_t lines = 0;
  std::uint64_t loaded = 0;
  std::uint64_t malformed = 0;
  std::uint64_t skipped_non_a = 0;
  std::uint64_t merged = 0;
  /// First few malformed-line diagnostics ("line N: reason").
  std::vector<std::string> diagnostics;
};

/// Calls fn(line, line_number) for each non-blank line. Exceptions of type
/// hostscope::error thrown by fn are counted as malformed lines unless
/// `strict`, in which case the first one aborts with the line number.
void for_each_line(const std::filesystem::path& path, bool strict, LoadStats& stats,
                   const std::function<void(std::string_view, std::uint64_t)>& fn);

// ---------------------------------------------------------------------------
// Passive DNS

inline constexpr std::uint32_t kNoId = 0xFFFFFFFFu;

/// Interned name with its registered-domain and TLD+3 ids (kNoId if absent).
struct NameInfo {
  std::string fqdn;
  std::uint32_t apex = kNoId;
  std::uint32_t tld3 = kNoId;
};

/// One merged A-record observation as held by the store.
struct StoredRecord {
  std::uint32_t name = 0;
  std::int64_t time_first = 0;
  std::int64_t time_last = 0;
  std::uint64_t count = 0;
};

/// Distinct-count summary of one address's records.
struct ResolutionSummary {
  std::uint64_t n_tld2 = 0;
  std::uint64_t n_tld3 = 0;
  std::uint64_t n_names = 0;
  friend bool operator==(const ResolutionSummary&, const ResolutionSummary&) = default;
};

/// Immutable index of passive-DNS A records keyed by address. Records that
/// share (name, ip) are merged: min first-seen, max last-seen, summed count.
class PdnsStore {
public:
  class Builder {
  public:
    explicit Builder(SuffixList suffixes = {});
    /// Adds an A record; non-A records are rejected with errc::invalid_argument.
    void add(const PdnsRecord& record);
    PdnsStore build() &&;
    std::uint64_t merged() const { return merged_; }

  private:
    struct Raw {
      IpV4 ip;
      std::uint32_t name;
      std::int64_t first;
      std::int64_t last;
      std::uint64_t count;
    };
    std::uint32_t intern_name(std::string_view text);
    std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& index, std::vector<std::string>& table,
                         std::string text);

    SuffixList suffixes_;
    std::unordered_map<std::string, std::uint32_t> name_index_;
    std::unordered_map<std::string, std::uint32_t> apex_index_;
    std::unordered_map<std::string, std::uint32_t> tld3_index_;
    std::vector<NameInfo> names_;
    std::vector<std::string> apexes_;
    std::vector<std::string> tld3s_;
    std::vector<Raw> raw_;
    std::uint64_t merged_ = 0;
  };

  PdnsStore() = default;

  /// Records of one address sorted by name id; empty when unknown.
  std::span<const StoredRecord> records(IpV4 ip) const;
  ResolutionSummary summary(IpV4 ip) const;
  bool has(IpV4 ip) const { return by_ip_.contains(ip); }

  const NameInfo& name(std::uint32_t id) const { return names_[id]; }
  const std::string& apex(std::uint32_t id) const { return apexes_[id]; }
  const std::string& tld3(std::uint32_t id) const { return tld3s_[id]; }
  std::size_t apex_count() const { return apexes_.size(); }
  std::optional<std::uint32_t> find_apex(std::string_view apex) const;

  /// All addresses with at least one record, ascending.
  const std::vector<IpV4>& ips() const { return ips_; }
  /// Addresses inside `prefix` with at least one record, ascending.
  std::span<const IpV4> prefix_ips(Prefix24 prefix) const;

  /// Distinct apex ids hosted on `ip` over the whole store horizon, ascending.
  std::vector<std::uint32_t> apex_ids(IpV4 ip) const;
  /// Distinct apexes whose records cover UTC day `day` on `ip`, sorted.
  std::vector<std::string> apexes_on_day(IpV4 ip, std::int64_t day) const;

  PdnsRecord to_record(IpV4 ip, const StoredRecord& r) const;
  std::size_t record_count() const { return records_.size(); }

private:
  struct Entry {
    std::size_t begin = 0;
    std::size_t end = 0;
    ResolutionSummary summary;
  };

  std::vector<NameInfo> names_;
  std::vector<std::string> apexes_;
  std::vector<std::string> tld3s_;
  std::unordered_map<std::string, std::uint32_t> apex_lookup_;
  std::vector<StoredRecord> records_;
  std::unordered_map<IpV4, Entry> by_ip_;
  std::vector<IpV4> ips_;
  std::map<IpV4, std::vector<IpV4>> by_prefix_;
};

/// Parses one PDNS line. Returns nullopt for well-formed non-A records.
std::optional<PdnsRecord> parse_pdns_line(std::string_view line);
std::string format_pdns_line(const PdnsRecord& r);
PdnsStore load_pdns(const std::filesystem::path& path, const SuffixList& suffixes, bool strict,
                    LoadStats* stats = nullptr);

// ---------------------------------------------------------------------------
// IP WHOIS history

/// Immutable WHOIS snapshot index. Snapshots carrying a queried address are
/// attributed to that address only; the rest to every address they contain.
class WhoisStore {
public:
  WhoisStore() = default;
  explicit WhoisStore(std::vector<WhoisSnapshot> snapshots, int horizon_years = 10);

  /// Snapshots of `ip` observed within [reference - horizon, reference],
  /// ascending by observed time (ties by range, then owner).
  std::vector<WhoisSnapshot> history(IpV4 ip, std::int64_t reference) const;

  int horizon_years() const { return horizon_years_; }
  std::int64_t horizon_seconds() const;
  const std::vector<WhoisSnapshot>& snapshots() const { return snapshots_; }
  /// Addresses that have attributed snapshots, ascending.
  std::vector<IpV4> queried_ips() const;

private:
  void collect_ranges(std::size_t node, std::size_t lo, std::size_t hi, std::size_t last, IpV4 ip,
                      std::vector<std::size_t>& out) const;

  std::vector<WhoisSnapshot> snapshots_;
  int horizon_years_ = 10;
  std::unordered_map<IpV4, std::vector<std::size_t>> attributed_;
  std::vector<std::size_t> by_start_;   // range-scoped snapshots sorted by start
  std::vector<std::uint32_t> max_end_;  // segment tree of range ends over by_start_
};

WhoisSnapshot parse_whois_line(std::string_view line);
std::string format_whois_line(const WhoisSnapshot& s);
WhoisStore load_whois(const std::filesystem::path& path, bool strict, int horizon_years = 10,
                      LoadStats* stats = nullptr);

// ---------------------------------------------------------------------------
// IP to ASN

/// Longest-prefix-match table of ASN records.
class AsnDb {
public:
  AsnDb() = default;
  /// Throws errc::data when the same prefix appears with different ASNs.
  explicit AsnDb(std::vector<AsnRecord> records);

  const AsnRecord* lookup(IpV4 ip) const;
  const std::vector<AsnRecord>& records() const { return records_; }

private:
  std::vector<AsnRecord> records_;  // sorted by (length, base)
  std::array<std::unordered_map<std::uint32_t, std::size_t>, 33> by_length_;
};

AsnRecord parse_asn_line(std::string_view line);
std::string format_asn_line(const AsnRecord& r);
AsnDb load_asn(const std::filesystem::path& path, bool strict, LoadStats* stats = nullptr);

inline std::optional<AsnRecord> lookup_asn(const AsnDb& db, IpV4 ip) {
  if (const auto* r = db.lookup(ip)) return *r;
  return std::nullopt;
}

} // namespace hostscope
