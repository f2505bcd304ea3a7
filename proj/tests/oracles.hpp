#pragma once

// Brute-force reference implementations. They work on raw record lists and
// share nothing with the library beyond the plain data types.

#include "datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace oracle {

using hostscope::IpV4;
using hostscope::PdnsRecord;
using hostscope::WhoisSnapshot;

inline std::vector<std::string> split_labels(const std::string& name) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : name) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string join_tail(const std::vector<std::string>& labels, std::size_t n) {
  std::string s;
  for (std::size_t i = labels.size() - n; i < labels.size(); ++i) s += (s.empty() ? "" : ".") + labels[i];
  return s;
}

/// Longest listed suffix; a name whose last label is unlisted has a
/// one-label suffix.
inline std::size_t suffix_len(const std::vector<std::string>& labels, const std::set<std::string>& suffixes) {
  std::size_t best = 1;
  for (std::size_t n = 1; n <= labels.size(); ++n)
    if (suffixes.count(join_tail(labels, n))) best = n;
  return best;
}

inline std::optional<std::string> apex(const std::string& name, const std::set<std::string>& suffixes) {
  const auto labels = split_labels(name);
  const auto s = suffix_len(labels, suffixes);
  if (labels.size() < s + 1) return std::nullopt;
  return join_tail(labels, s + 1);
}

inline std::optional<std::string> tld3(const std::string& name, const std::set<std::string>& suffixes) {
  const auto labels = split_labels(name);
  const auto s = suffix_len(labels, suffixes);
  if (labels.size() < s + 2) return std::nullopt;
  return join_tail(labels, s + 2);
}

struct Counts {
  std::uint64_t tld2 = 0, tld3 = 0, names = 0;
};

inline Counts counts(std::span<const PdnsRecord> records, IpV4 ip, const std::set<std::string>& suffixes) {
  std::set<std::string> a, t, n;
  for (const auto& r : records) {
    if (r.ip != ip) continue;
    n.insert(r.name);
    if (auto x = apex(r.name, suffixes)) a.insert(*x);
    if (auto x = tld3(r.name, suffixes)) t.insert(*x);
  }
  return {a.size(), t.size(), n.size()};
}

/// Records whose address satisfies `keep`; copies, so later scans stay linear
/// in the selection.
template <class Pred>
std::vector<PdnsRecord> select(std::span<const PdnsRecord> records, Pred keep) {
  std::vector<PdnsRecord> out;
  for (const auto& r : records)
    if (keep(r.ip)) out.push_back(r);
  return out;
}

/// f1..f16 with f14 as its category index, plus the 9 g features.
struct HostingRow {
  double f[13] = {};
  int f14 = static_cast<int>(hostscope::NetType::Unknown);
  double f15 = 10.0;
  double f16 = 0;

  std::vector<double> model_row() const {
    std::vector<double> v(f, f + 13);
    for (int t = 0; t < hostscope::kNetTypeCount; ++t) v.push_back(t == f14 ? 1.0 : 0.0);
    v.push_back(f15);
    v.push_back(f16);
    return v;
  }
};

struct WhoisPart {
  std::uint64_t owners = 0, inetnums = 0, max_size = 0, min_size = 0, size = 0, records = 0;
  int net_type = static_cast<int>(hostscope::NetType::Unknown);
  double years = 10.0;
};

inline WhoisPart whois_part(std::span<const WhoisSnapshot> snaps, IpV4 ip, std::int64_t reference,
                            int horizon_years = 10) {
  const auto oldest = reference - static_cast<std::int64_t>(horizon_years * hostscope::kSecondsPerYear);
  std::vector<WhoisSnapshot> hist;
  for (const auto& s : snaps) {
    const bool mine = s.queried_ip ? *s.queried_ip == ip : (s.range_start <= ip && ip <= s.range_end);
    if (mine && s.observed >= oldest && s.observed <= reference) hist.push_back(s);
  }
  WhoisPart w;
  if (hist.empty()) return w;
  std::set<std::string> owners;
  std::set<std::pair<std::uint32_t, std::uint32_t>> ranges;
  std::set<std::int64_t> observed;
  std::uint64_t mx = 0, mn = std::numeric_limits<std::uint64_t>::max();
  std::int64_t latest_obs = std::numeric_limits<std::int64_t>::min();
  std::int64_t latest_upd = std::numeric_limits<std::int64_t>::min();
  auto size = [](const WhoisSnapshot& s) { return std::uint64_t{s.range_end.value()} - s.range_start.value() + 1; };
  for (const auto& s : hist) {
    owners.insert(s.owner);
    ranges.insert({s.range_start.value(), s.range_end.value()});
    observed.insert(s.observed);
    mx = std::max(mx, size(s));
    mn = std::min(mn, size(s));
    latest_obs = std::max(latest_obs, s.observed);
    latest_upd = std::max(latest_upd, s.updated);
  }
  const WhoisSnapshot* cur = nullptr;
  for (const auto& s : hist) {
    if (s.observed != latest_obs) continue;
    auto key = [&](const WhoisSnapshot& x) {
      return std::make_tuple(size(x), x.range_start, x.range_end, x.owner, x.updated, x.net_type);
    };
    if (!cur || key(s) < key(*cur)) cur = &s;
  }
  w.owners = owners.size();
  w.inetnums = ranges.size();
  w.max_size = mx;
  w.min_size = mn;
  w.size = size(*cur);
  w.net_type = static_cast<int>(cur->net_type);
  w.years = std::max(0.0, static_cast<double>(reference - latest_upd) / hostscope::kSecondsPerYear);
  w.records = observed.size();
  return w;
}

inline HostingRow hosting(std::span<const PdnsRecord> records, std::span<const WhoisSnapshot> snaps, IpV4 ip,
                          std::int64_t reference, const std::set<std::string>& suffixes) {
  HostingRow h;
  const std::uint32_t base = ip.value() & 0xFFFFFF00u;
  const auto block = select(records, [&](IpV4 a) { return (a.value() & 0xFFFFFF00u) == base; });
  const auto c = counts(block, ip, suffixes);
  h.f[0] = double(c.tld2);
  h.f[1] = double(c.tld3);
  h.f[2] = double(c.names);

  std::uint64_t with_dns = 0, sum3 = 0, sum2 = 0, max3 = 0, max2 = 0;
  for (std::uint32_t last = 0; last < 256; ++last) {
    const auto m = counts(block, IpV4(base | last), suffixes);
    if (m.names > 0) ++with_dns;
    sum3 += m.tld3;
    sum2 += m.tld2;
    max3 = std::max(max3, m.tld3);
    max2 = std::max(max2, m.tld2);
  }
  h.f[3] = 100.0 * double(with_dns) / 256.0;
  h.f[4] = double(sum3) / 256.0;
  h.f[5] = double(max3);
  h.f[6] = double(sum2) / 256.0;
  h.f[7] = double(max2);

  const auto w = whois_part(snaps, ip, reference);
  h.f[8] = double(w.owners);
  h.f[9] = double(w.inetnums);
  h.f[10] = double(w.max_size);
  h.f[11] = double(w.min_size);
  h.f[12] = double(w.size);
  h.f14 = w.net_type;
  h.f15 = w.years;
  h.f16 = double(w.records);
  return h;
}

inline std::pair<double, double> mean_pstd(const std::vector<double>& xs) {
  if (xs.empty()) return {0, 0};
  double m = 0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / double(xs.size()))};
}

inline std::vector<double> churn(std::span<const PdnsRecord> records, IpV4 ip, std::int64_t reference,
                                 const std::set<std::string>& suffixes, int window_days = 60) {
  // records sharing a name are merged into one [min first, max last] span
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> spans;
  for (const auto& r : records) {
    if (r.ip != ip) continue;
    auto [it, fresh] = spans.try_emplace(r.name, r.time_first, r.time_last);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.time_first);
      it->second.second = std::max(it->second.second, r.time_last);
    }
  }
  const auto last = hostscope::day_of(reference);
  std::vector<std::set<std::string>> days;
  for (auto d = last - window_days + 1; d <= last; ++d) {
    std::set<std::string> active;
    for (const auto& [name, span] : spans) {
      const auto a = apex(name, suffixes);
      if (a && hostscope::day_of(span.first) <= d && d <= hostscope::day_of(span.second)) active.insert(*a);
    }
    days.push_back(active);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i < days.size(); ++i) {
    std::size_t diff = 0;
    for (const auto& a : days[i]) diff += !days[i - 1].count(a);
    for (const auto& a : days[i - 1]) diff += !days[i].count(a);
    out.push_back(double(diff));
  }
  return out;
}

inline std::vector<double> durations(std::span<const PdnsRecord> records, IpV4 ip,
                                     const std::set<std::string>& suffixes) {
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> span;
  for (const auto& r : records) {
    if (r.ip != ip) continue;
    const auto a = apex(r.name, suffixes);
    if (!a) continue;
    auto [it, fresh] = span.try_emplace(*a, r.time_first, r.time_last);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.time_first);
      it->second.second = std::max(it->second.second, r.time_last);
    }
  }
  std::vector<double> out;
  for (const auto& [a, fl] : span) out.push_back(double(fl.second - fl.first) / hostscope::kSecondsPerYear);
  return out;
}

inline std::vector<double> dedicated(std::span<const PdnsRecord> records, std::span<const WhoisSnapshot> snaps,
                                     IpV4 ip, std::int64_t reference, const std::set<std::string>& suffixes) {
  const auto own = select(records, [&](IpV4 a) { return a == ip; });
  const auto c = counts(own, ip, suffixes);
  const auto w = whois_part(snaps, ip, reference);
  const auto [g6, g7] = mean_pstd(churn(own, ip, reference, suffixes));
  const auto [g8, g9] = mean_pstd(durations(own, ip, suffixes));
  return {double(c.tld2), double(c.tld3), double(c.names), double(w.owners), double(w.records), g6, g7, g8, g9};
}

// ---------------------------------------------------------------------------
// learning

inline double gini(double a, double b) {
  const double n = a + b;
  return 1.0 - (a / n) * (a / n) - (b / n) * (b / n);
}

struct SplitResult {
  std::size_t feature = 0;
  double threshold = 0;
  double decrease = 0;
};

/// Every (feature, midpoint) pair scored from scratch.
inline std::optional<SplitResult> best_split(const std::vector<std::vector<double>>& rows,
                                             const std::vector<int>& labels, std::size_t min_leaf = 1) {
  const double n = double(rows.size());
  double p0 = 0;
  for (int l : labels) p0 += (l == 0);
  const double parent = gini(p0, n - p0);
  std::optional<SplitResult> best;
  for (std::size_t f = 0; f < rows[0].size(); ++f) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(r[f]);
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      double t = *it + (*std::next(it) - *it) / 2.0;
      if (!(t < *std::next(it))) t = *it;
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool left = rows[i][f] <= t;
        (left ? (labels[i] == 0 ? l0 : l1) : (labels[i] == 0 ? r0 : r1)) += 1;
      }
      if (l0 + l1 < double(min_leaf) || r0 + r1 < double(min_leaf)) continue;
      const double dec = parent - (l0 + l1) / n * gini(l0, l1) - (r0 + r1) / n * gini(r0, r1);
      if (dec > 1e-12 && (!best || dec > best->decrease + 1e-15)) best = SplitResult{f, t, dec};
    }
  }
  return best;
}

/// Probability that a random positive outscores a random negative, ties
/// counting half.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& positive) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = 0; j < scores.size(); ++j)
      if (positive[i] && !positive[j]) {
        pairs += 1;
        wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

/// (value, share <= value) at every distinct value, quadratic recount.
inline std::vector<std::pair<double, double>> ecdf(const std::vector<double>& xs) {
  std::set<double> distinct(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> out;
  for (double v : distinct) {
    std::size_t le = 0;
    for (double x : xs) le += x <= v;
    out.emplace_back(v, double(le) / double(xs.size()));
  }
  return out;
}

} // namespace oracle
