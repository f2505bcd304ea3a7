#include "labeler.hpp"

#include "jsonl.hpp"
#include "util.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace hostscope {

std::string_view rule_name(LabelRule r) {
  switch (r) {
    case LabelRule::SingleDomain: return "single_domain";
    case LabelRule::RegistrantMatch: return "registrant_match";
    case LabelRule::RegistrantMismatch: return "registrant_mismatch";
    case LabelRule::RedirectConvergence: return "redirect_convergence";
    case LabelRule::ManualAnnotation: return "manual_annotation";
    case LabelRule::Undecidable: break;
  }
  return "undecidable";
}

RedirectGraph::RedirectGraph(std::span<const RedirectEdge> edges) {
  for (const auto& e : edges) {
    if (e.from == e.to) continue;
    auto& targets = next_[e.from];
    if (std::find(targets.begin(), targets.end(), e.to) == targets.end()) targets.push_back(e.to);
  }
}

std::optional<std::string> RedirectGraph::sink(const std::string& apex) const {
  std::unordered_set<std::string> seen{apex};
  std::string at = apex;
  for (int hop = 0; hop <= kRedirectHopLimit; ++hop) {
    auto it = next_.find(at);
    if (it == next_.end()) return at;
    if (it->second.size() != 1 || hop == kRedirectHopLimit) return std::nullopt;
    at = it->second.front();
    if (!seen.insert(at).second) return std::nullopt;
  }
  return std::nullopt;
}

LabelDecision label_ip(const PdnsStore& pdns, IpV4 ip, const DomainWhoisMap& whois, const RedirectGraph& redirects,
                       std::optional<SharingLabel> manual) {
  const auto ids = pdns.apex_ids(ip);
  if (ids.empty()) fail(errc::data, fmt::format("{} hosts no apex: not a hosting candidate", ip.to_string()));
  LabelDecision d;
  d.ip = ip;
  if (ids.size() == 1) {
    d.label = SharingLabel::Dedicated;
    d.rule = LabelRule::SingleDomain;
    return d;
  }

  std::set<std::string> registrants;
  bool all_usable = true;
  for (auto id : ids) {
    auto it = whois.find(pdns.apex(id));
    if (it == whois.end() || !it->second.usable()) {
      all_usable = false;
      break;
    }
    registrants.insert(*it->second.registrant);
  }
  if (all_usable) {
    d.label = registrants.size() == 1 ? SharingLabel::Dedicated : SharingLabel::Shared;
    d.rule = registrants.size() == 1 ? LabelRule::RegistrantMatch : LabelRule::RegistrantMismatch;
    return d;
  }

  if (!redirects.empty()) {
    std::optional<std::string> common;
    bool converges = true;
    for (auto id : ids) {
      const auto s = redirects.sink(pdns.apex(id));
      if (!s || (common && *common != *s)) {
        converges = false;
        break;
      }
      common = s;
    }
    if (converges) {
      d.label = SharingLabel::Dedicated;
      d.rule = LabelRule::RedirectConvergence;
      return d;
    }
  }

  if (manual) {
    d.label = *manual;
    d.rule = LabelRule::ManualAnnotation;
  }
  return d;
}

LabelCorpus label_corpus(const PdnsStore& pdns, std::span<const IpV4> ips, const DomainWhoisMap& whois,
                         const RedirectGraph& redirects, const ManualMap& manual, unsigned jobs) {
  LabelCorpus out;
  out.decisions.resize(ips.size());
  parallel_for(ips.size(), jobs, [&](std::size_t i) {
    std::optional<SharingLabel> m;
    if (auto it = manual.find(ips[i]); it != manual.end()) m = it->second;
    try {
      out.decisions[i] = label_ip(pdns, ips[i], whois, redirects, m);
    } catch (const error& e) {
      out.decisions[i] = LabelDecision{ips[i], std::nullopt, LabelRule::Undecidable, e.what()};
    }
  });
  for (const auto& d : out.decisions) ++out.per_rule[static_cast<int>(d.rule)];
  return out;
}

namespace {

std::string apex_key(const std::string& text, const SuffixList& suffixes) {
  const auto d = DomainName::parse(text, suffixes);
  auto apex = d.tld2();
  if (!apex) fail(errc::parse, fmt::format("'{}' is a bare public suffix", text));
  return *apex;
}

} // namespace

DomainWhoisMap load_domain_whois(const std::filesystem::path& path, const SuffixList& suffixes, bool strict,
                                 LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  DomainWhoisMap out;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    const auto j = jsonl::parse_object(line);
    DomainWhois w;
    w.domain = apex_key(jsonl::string_field(j, "domain"), suffixes);
    const auto& reg = jsonl::field(j, "registrant");
    if (reg.is_string()) {
      w.registrant = normalize_org(reg.get<std::string>());
    } else if (!reg.is_null()) {
      fail(errc::parse, "key 'registrant' must be a string or null");
    }
    if (auto it = j.find("privacy_protected"); it != j.end()) {
      if (!it->is_boolean()) fail(errc::parse, "key 'privacy_protected' must be a boolean");
      w.privacy_protected = it->get<bool>();
    }
    out[w.domain] = std::move(w);
    ++st.loaded;
  });
  return out;
}

std::vector<RedirectEdge> load_redirects(const std::filesystem::path& path, const SuffixList& suffixes, bool strict,
                                         LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::vector<RedirectEdge> out;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    const auto j = jsonl::parse_object(line);
    out.push_back({apex_key(jsonl::string_field(j, "from"), suffixes), apex_key(jsonl::string_field(j, "to"), suffixes)});
    ++st.loaded;
  });
  return out;
}

ManualMap load_manual(const std::filesystem::path& path, bool strict, LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  ManualMap out;
  for_each_line(path, strict, st, [&](std::string_view line, std::uint64_t) {
    const auto j = jsonl::parse_object(line);
    const auto ip = IpV4::parse(jsonl::string_field(j, "ip"));
    const auto label = jsonl::string_field(j, "label");
    const auto idx = label_index(Stage::Dedicated, label);
    if (!idx) fail(errc::parse, fmt::format("label '{}' is not dedicated or shared", label));
    out[ip] = static_cast<SharingLabel>(*idx);
    ++st.loaded;
  });
  return out;
}

void write_labels_csv(const std::filesystem::path& path, std::span<const LabelDecision> decisions) {
  std::vector<const LabelDecision*> rows;
  for (const auto& d : decisions) rows.push_back(&d);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->ip < b->ip; });
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, fmt::format("cannot write '{}'", path.string()));
  out << "ip,label,rule\n";
  for (const auto* d : rows) {
    const std::string label = d->label ? stage_labels(Stage::Dedicated)[static_cast<int>(*d->label)] : "NA";
    out << d->ip.to_string() << ',' << label << ',' << rule_name(d->rule) << '\n';
  }
  if (!out) fail(errc::io, fmt::format("write to '{}' failed", path.string()));
}

} // namespace hostscope
