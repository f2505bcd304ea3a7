#pragma once

#include "error.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hostscope {

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

/// UTC day index of an epoch timestamp (floor division, valid for negatives).
inline std::int64_t day_of(std::int64_t epoch) {
  return epoch >= 0 ? epoch / kSecondsPerDay : -((-epoch + kSecondsPerDay - 1) / kSecondsPerDay);
}

/// An IPv4 address held in host byte order.
class IpV4 {
public:
  constexpr IpV4() = default;
  constexpr explicit IpV4(std::uint32_t value) : value_(value) {}
  constexpr IpV4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  /// Parses canonical dotted-quad text. IPv6 text is rejected with
  /// errc::unsupported, anything else malformed with errc::parse.
  static IpV4 parse(std::string_view text);
  static std::optional<IpV4> try_parse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  constexpr std::uint8_t octet(int i) const { return static_cast<std::uint8_t>(value_ >> (24 - 8 * i)); }
  std::string to_string() const;

  friend constexpr auto operator<=>(IpV4, IpV4) = default;

private:
  std::uint32_t value_ = 0;
};

struct IpV4Hash {
  std::size_t operator()(IpV4 ip) const noexcept { return std::hash<std::uint32_t>{}(ip.value()); }
};

/// The /24 block containing an address.
class Prefix24 {
public:
  constexpr explicit Prefix24(IpV4 any) : base_(any.value() & 0xFFFFFF00u) {}
  constexpr IpV4 base() const { return base_; }
  constexpr bool contains(IpV4 ip) const { return (ip.value() & 0xFFFFFF00u) == base_.value(); }
  constexpr IpV4 at(std::uint8_t last) const { return IpV4(base_.value() | last); }
  static constexpr int size() { return 256; }
  friend constexpr auto operator<=>(Prefix24, Prefix24) = default;

private:
  IpV4 base_;
};

/// An IPv4 CIDR prefix; the base is always masked to the prefix length.
class Cidr {
public:
  Cidr() = default;
  Cidr(IpV4 base, int length);
  static Cidr parse(std::string_view text);

  IpV4 base() const { return base_; }
  int length() const { return length_; }
  std::uint32_t mask() const { return length_ == 0 ? 0u : ~std::uint32_t{0} << (32 - length_); }
  bool contains(IpV4 ip) const { return (ip.value() & mask()) == base_.value(); }
  std::string to_string() const;
  friend auto operator<=>(const Cidr&, const Cidr&) = default;

private:
  IpV4 base_;
  int length_ = 0;
};

/// Set of public suffixes ("com", "co.uk"). Lines starting with "//" and
/// blank lines are ignored when loading; wildcard ("*.") and exception ("!")
/// rules are skipped.
class SuffixList {
public:
  SuffixList() = default;
  explicit SuffixList(const std::vector<std::string>& entries);
  static SuffixList load(const std::filesystem::path& path);

  void add(std::string_view suffix);
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Number of trailing labels forming the longest listed suffix, or 1.
  std::size_t suffix_length(const std::vector<std::string>& labels) const;

private:
  std::unordered_set<std::string> entries_;
  std::size_t max_labels_ = 0;
};

/// A lowercase DNS name split into labels, root-last, with the number of
/// trailing labels that make up its public suffix.
class DomainName {
public:
  static DomainName parse(std::string_view text, const SuffixList& suffixes);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t suffix_length() const { return suffix_len_; }
  std::string text() const;

  /// Registered domain: suffix plus one label.
  std::optional<std::string> tld2() const;
  /// One label below the registered domain.
  std::optional<std::string> tld3() const;

  friend bool operator==(const DomainName&, const DomainName&) = default;

private:
  std::string join_last(std::size_t n) const;

  std::vector<std::string> labels_;
  std::size_t suffix_len_ = 1;
};

inline DomainName parse_domain(std::string_view text, const SuffixList& suffixes) {
  return DomainName::parse(text, suffixes);
}
inline std::optional<std::string> tld2_of(const DomainName& d) { return d.tld2(); }
inline std::optional<std::string> tld3_of(const DomainName& d) { return d.tld3(); }

/// Lowercase, punctuation stripped, whitespace collapsed and trimmed.
std::string normalize_org(std::string_view text);

enum class NetType : std::uint8_t {
  DirectAllocation,
  DirectAssignment,
  Reallocated,
  Reassigned,
  Unknown,
};
inline constexpr int kNetTypeCount = 5;

NetType parse_net_type(std::string_view text);
std::string_view net_type_name(NetType t);  // "Direct Allocation", ...
std::string_view net_type_column(NetType t);  // "direct_allocation", ...

struct PdnsRecord {
  std::string name;  // as loaded, lowercase, no trailing dot
  std::string rrtype = "A";
  IpV4 ip;
  std::int64_t time_first = 0;
  std::int64_t time_last = 0;
  std::uint64_t count = 1;
  friend bool operator==(const PdnsRecord&, const PdnsRecord&) = default;
};

struct WhoisSnapshot {
  IpV4 range_start;
  IpV4 range_end;
  std::string owner;  // normalized
  NetType net_type = NetType::Unknown;
  std::int64_t updated = 0;
  std::int64_t observed = 0;
  /// Address the snapshot was retrieved for. When set, the snapshot belongs
  /// only to this address's history; otherwise to every contained address.
  std::optional<IpV4> queried_ip;

  bool contains(IpV4 ip) const { return range_start <= ip && ip <= range_end; }
  friend bool operator==(const WhoisSnapshot&, const WhoisSnapshot&) = default;
};

inline std::uint64_t inetnum_size(const WhoisSnapshot& s) {
  return std::uint64_t{s.range_end.value()} - s.range_start.value() + 1;
}

struct AsnRecord {
  Cidr cidr;
  std::uint32_t asn = 0;
  std::string org;
  friend bool operator==(const AsnRecord&, const AsnRecord&) = default;
};

/// Which classifier a dataset or model belongs to. Each stage has its own
/// two-label space, ordered lexicographically so index 0 wins leaf ties.
enum class Stage : std::uint8_t { Hosting, Dedicated };

enum class HostingLabel : std::uint8_t { Hosting = 0, NonHosting = 1 };
enum class SharingLabel : std::uint8_t { Dedicated = 0, Shared = 1 };

std::string_view stage_name(Stage s);  // "hosting" / "dedicated"
Stage parse_stage(std::string_view text);
const std::array<std::string, 2>& stage_labels(Stage s);
/// Index of `label` in the stage's label space, or nullopt.
std::optional<std::uint8_t> label_index(Stage s, std::string_view label);

} // namespace hostscope

template <>
struct std::hash<hostscope::IpV4> : hostscope::IpV4Hash {};
