#pragma once

#include "ingest.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hostscope {

/// Registrant-level WHOIS of one apex.
struct DomainWhois {
  std::string domain;
  std::optional<std::string> registrant;  // normalized
  bool privacy_protected = false;

  bool usable() const { return !privacy_protected && registrant && !registrant->empty(); }
};

struct RedirectEdge {
  std::string from;
  std::string to;
};

enum class LabelRule : std::uint8_t {
  SingleDomain,
  RegistrantMatch,
  RegistrantMismatch,
  RedirectConvergence,
  ManualAnnotation,
  Undecidable,
};
inline constexpr int kLabelRuleCount = 6;

std::string_view rule_name(LabelRule r);  // snake_case

struct LabelDecision {
  IpV4 ip;
  std::optional<SharingLabel> label;  // absent iff rule == Undecidable
  LabelRule rule = LabelRule::Undecidable;
  std::string diagnostic;
};

inline constexpr int kRedirectHopLimit = 10;

/// Apex-level redirect edges. Self-loops are dropped.
class RedirectGraph {
public:
  RedirectGraph() = default;
  explicit RedirectGraph(std::span<const RedirectEdge> edges);

  /// Where `apex` ends up after following redirects: itself when it has no
  /// outgoing edge. Absent on a cycle, on an apex with several distinct
  /// targets, or after kRedirectHopLimit hops.
  std::optional<std::string> sink(const std::string& apex) const;
  bool empty() const { return next_.empty(); }

private:
  std::unordered_map<std::string, std::vector<std::string>> next_;
};

using DomainWhoisMap = std::unordered_map<std::string, DomainWhois>;
using ManualMap = std::unordered_map<IpV4, SharingLabel>;

/// Rule cascade for one address: single apex, registrant agreement, redirect
/// convergence, manual annotation, else undecidable. Throws errc::data when
/// the address hosts no apex.
LabelDecision label_ip(const PdnsStore& pdns, IpV4 ip, const DomainWhoisMap& whois, const RedirectGraph& redirects,
                       std::optional<SharingLabel> manual);

struct LabelCorpus {
  std::vector<LabelDecision> decisions;  // input order
  std::array<std::uint64_t, kLabelRuleCount> per_rule{};
};

/// Per-address failures become Undecidable decisions carrying a diagnostic.
LabelCorpus label_corpus(const PdnsStore& pdns, std::span<const IpV4> ips, const DomainWhoisMap& whois,
                         const RedirectGraph& redirects, const ManualMap& manual, unsigned jobs = 1);

/// Domain keys are reduced to their apex under `suffixes`.
DomainWhoisMap load_domain_whois(const std::filesystem::path& path, const SuffixList& suffixes, bool strict,
                                 LoadStats* stats = nullptr);
std::vector<RedirectEdge> load_redirects(const std::filesystem::path& path, const SuffixList& suffixes, bool strict,
                                         LoadStats* stats = nullptr);
ManualMap load_manual(const std::filesystem::path& path, bool strict, LoadStats* stats = nullptr);

/// `ip,label,rule`, rows ascending by address, NA for undecided labels.
void write_labels_csv(const std::filesystem::path& path, std::span<const LabelDecision> decisions);

} // namespace hostscope
