#include "datamodel.hpp"

#include "error.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace hostscope {

namespace {

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

} // namespace

std::optional<IpV4> IpV4::try_parse(std::string_view text) {
  std::uint32_t value = 0;
  int parts = 0;
  while (parts < 4) {
    std::size_t len = 0;
    while (len < text.size() && text[len] >= '0' && text[len] <= '9') ++len;
    if (len == 0 || len > 3) return std::nullopt;
    if (len > 1 && text[0] == '0') return std::nullopt;  // canonical form only
    unsigned octet = 0;
    std::from_chars(text.data(), text.data() + len, octet);
    if (octet > 255) return std::nullopt;
    value = (value << 8) | octet;
    text.remove_prefix(len);
    ++parts;
    if (parts < 4) {
      if (text.empty() || text.front() != '.') return std::nullopt;
      text.remove_prefix(1);
    }
  }
  if (!text.empty()) return std::nullopt;
  return IpV4(value);
}

IpV4 IpV4::parse(std::string_view text) {
  if (auto ip = try_parse(text)) return *ip;
  if (text.find(':') != std::string_view::npos)
    fail(errc::unsupported, fmt::format("IPv6 address '{}' is not supported (IPv4 only)", text));
  fail(errc::parse, fmt::format("malformed IPv4 address '{}'", text));
}

std::string IpV4::to_string() const {
  return fmt::format("{}.{}.{}.{}", octet(0), octet(1), octet(2), octet(3));
}

Cidr::Cidr(IpV4 base, int length) : length_(length) {
  if (length < 0 || length > 32) fail(errc::parse, fmt::format("prefix length {} out of range", length));
  base_ = IpV4(base.value() & mask());
}

Cidr Cidr::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) fail(errc::parse, fmt::format("CIDR '{}' lacks a prefix length", text));
  const IpV4 base = IpV4::parse(text.substr(0, slash));
  const auto len_text = text.substr(slash + 1);
  int length = -1;
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
  if (ec != std::errc{} || ptr != len_text.data() + len_text.size() || len_text.empty())
    fail(errc::parse, fmt::format("malformed CIDR '{}'", text));
  return Cidr(base, length);
}

std::string Cidr::to_string() const { return fmt::format("{}/{}", base_.to_string(), length_); }

SuffixList::SuffixList(const std::vector<std::string>& entries) {
  for (const auto& e : entries) add(e);
}

void SuffixList::add(std::string_view suffix) {
  suffix = trim(suffix);
  while (!suffix.empty() && suffix.front() == '.') suffix.remove_prefix(1);
  while (!suffix.empty() && suffix.back() == '.') suffix.remove_suffix(1);
  if (suffix.empty()) return;
  std::string s;
  s.reserve(suffix.size());
  for (char c : suffix) s.push_back(lower(c));
  max_labels_ = std::max<std::size_t>(max_labels_, 1 + std::count(s.begin(), s.end(), '.'));
  entries_.insert(std::move(s));
}

SuffixList SuffixList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, fmt::format("cannot read suffix list '{}'", path.string()));
  SuffixList list;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.starts_with("//") || t.starts_with("!") || t.find('*') != std::string_view::npos)
      continue;
    // PSL lines end at the first whitespace
    t = t.substr(0, t.find_first_of(" \t"));
    list.add(t);
  }
  return list;
}

std::size_t SuffixList::suffix_length(const std::vector<std::string>& labels) const {
  if (entries_.empty()) return 1;
  const std::size_t n = labels.size();
  for (std::size_t k = std::min(n, max_labels_); k >= 1; --k) {
    std::string candidate;
    for (std::size_t i = n - k; i < n; ++i) {
      if (!candidate.empty()) candidate.push_back('.');
      candidate += labels[i];
    }
    if (entries_.contains(candidate)) return k;
  }
  return 1;
}

DomainName DomainName::parse(std::string_view text, const SuffixList& suffixes) {
  text = trim(text);
  if (!text.empty() && text.back() == '.') text.remove_suffix(1);
  if (text.empty()) fail(errc::parse, "empty domain name");
  DomainName d;
  std::size_t start = 0;
  while (true) {
    const auto dot = text.find('.', start);
    const auto raw = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (raw.empty()) fail(errc::parse, fmt::format("empty label in domain '{}'", text));
    if (raw.size() > 63) fail(errc::parse, fmt::format("label '{}' exceeds 63 characters", raw));
    std::string label;
    label.reserve(raw.size());
    for (char c : raw) {
      const char l = lower(c);
      if (!is_label_char(l)) fail(errc::parse, fmt::format("illegal character in label '{}'", raw));
      label.push_back(l);
    }
    d.labels_.push_back(std::move(label));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  d.suffix_len_ = suffixes.suffix_length(d.labels_);
  return d;
}

std::string DomainName::join_last(std::size_t n) const {
  std::string out;
  for (std::size_t i = labels_.size() - n; i < labels_.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels_[i];
  }
  return out;
}

std::string DomainName::text() const { return join_last(labels_.size()); }

std::optional<std::string> DomainName::tld2() const {
  if (labels_.size() < suffix_len_ + 1) return std::nullopt;
  return join_last(suffix_len_ + 1);
}

std::optional<std::string> DomainName::tld3() const {
  if (labels_.size() < suffix_len_ + 2) return std::nullopt;
  return join_last(suffix_len_ + 2);
}

std::string normalize_org(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    const char l = lower(c);
    if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || static_cast<unsigned char>(l) >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(l);
    } else if (l == ' ' || l == '\t' || l == '\n' || l == '\r') {
      pending_space = true;
    }
    // other punctuation is dropped without breaking the word
  }
  return out;
}

NetType parse_net_type(std::string_view text) {
  std::string spaced;
  for (char c : text) spaced.push_back(c == '_' || c == '-' ? ' ' : c);
  const std::string key = normalize_org(spaced);
  if (key == "direct allocation") return NetType::DirectAllocation;
  if (key == "direct assignment") return NetType::DirectAssignment;
  if (key == "reallocated") return NetType::Reallocated;
  if (key == "reassigned") return NetType::Reassigned;
  return NetType::Unknown;
}

std::string_view net_type_name(NetType t) {
  switch (t) {
    case NetType::DirectAllocation: return "Direct Allocation";
    case NetType::DirectAssignment: return "Direct Assignment";
    case NetType::Reallocated: return "Reallocated";
    case NetType::Reassigned: return "Reassigned";
    case NetType::Unknown: break;
  }
  return "Unknown";
}

std::string_view net_type_column(NetType t) {
  switch (t) {
    case NetType::DirectAllocation: return "direct_allocation";
    case NetType::DirectAssignment: return "direct_assignment";
    case NetType::Reallocated: return "reallocated";
    case NetType::Reassigned: return "reassigned";
    case NetType::Unknown: break;
  }
  return "unknown";
}

std::string_view stage_name(Stage s) { return s == Stage::Hosting ? "hosting" : "dedicated"; }

Stage parse_stage(std::string_view text) {
  if (text == "hosting") return Stage::Hosting;
  if (text == "dedicated") return Stage::Dedicated;
  fail(errc::invalid_argument, fmt::format("unknown stage '{}' (expected hosting or dedicated)", text));
}

const std::array<std::string, 2>& stage_labels(Stage s) {
  static const std::array<std::string, 2> hosting{"hosting", "non-hosting"};
  static const std::array<std::string, 2> dedicated{"dedicated", "shared"};
  return s == Stage::Hosting ? hosting : dedicated;
}

std::optional<std::uint8_t> label_index(Stage s, std::string_view label) {
  const auto& labels = stage_labels(s);
  for (std::uint8_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  return std::nullopt;
}

} // namespace hostscope
