#include "pipeline.hpp"

#include "feature_table.hpp"
#include "util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace hostscope {

std::string_view verdict_name(Stage1Verdict v) {
  switch (v) {
    case Stage1Verdict::Hosting: return "hosting";
    case Stage1Verdict::NonHosting: return "non-hosting";
    case Stage1Verdict::Abstain: break;
  }
  return "abstain";
}

std::string_view verdict_name(Stage2Verdict v) {
  switch (v) {
    case Stage2Verdict::Dedicated: return "dedicated";
    case Stage2Verdict::Shared: return "shared";
    case Stage2Verdict::Abstain: break;
  }
  return "abstain";
}

Stage1Verdict gate_stage1(double p, double t) {
  if (p >= t) return Stage1Verdict::Hosting;
  if (1.0 - p >= t) return Stage1Verdict::NonHosting;
  return Stage1Verdict::Abstain;
}

Stage2Verdict gate_stage2(double p, double t) {
  if (p >= t) return Stage2Verdict::Shared;
  if (1.0 - p >= t) return Stage2Verdict::Dedicated;
  return Stage2Verdict::Abstain;
}

IpVerdict gate_verdict(IpV4 ip, double p_hosting, std::optional<double> p_shared, const Thresholds& t) {
  IpVerdict v;
  v.ip = ip;
  v.p_hosting = p_hosting;
  v.stage1 = gate_stage1(p_hosting, t.stage1);
  if (v.stage1 == Stage1Verdict::Hosting) {
    if (!p_shared) fail(errc::invalid_argument, "hosting verdict needs a stage-2 probability");
    v.p_shared = p_shared;
    v.stage2 = gate_stage2(*p_shared, t.stage2);
  }
  return v;
}

void check_models(const ForestModel& m1, const ForestModel& m2) {
  if (m1.stage != Stage::Hosting)
    fail(errc::stage, fmt::format("stage-1 model is a {} model", stage_name(m1.stage)));
  if (m2.stage != Stage::Dedicated)
    fail(errc::stage, fmt::format("stage-2 model is a {} model", stage_name(m2.stage)));
  if (m1.schema != feature_schema(Stage::Hosting)) fail(errc::schema, "stage-1 model schema differs from the features");
  if (m2.schema != feature_schema(Stage::Dedicated)) fail(errc::schema, "stage-2 model schema differs from the features");
}

IpVerdict classify_ip(const PdnsStore& pdns, const WhoisStore& whois, const ForestModel& m1, const ForestModel& m2,
                      IpV4 ip, std::int64_t reference, const Thresholds& t) {
  check_models(m1, m2);
  const double p_hosting = m1.predict_proba(feature_row(pdns, whois, ip, reference, Stage::Hosting))[0];
  std::optional<double> p_shared;
  if (gate_stage1(p_hosting, t.stage1) == Stage1Verdict::Hosting)
    p_shared = m2.predict_proba(feature_row(pdns, whois, ip, reference, Stage::Dedicated))[1];
  auto v = gate_verdict(ip, p_hosting, p_shared, t);
  v.has_pdns = pdns.has(ip);
  v.has_whois = !whois.history(ip, reference).empty();
  return v;
}

BatchSummary summarize(std::span<const IpVerdict> verdicts) {
  BatchSummary s;
  s.n = verdicts.size();
  for (const auto& v : verdicts) {
    if (!v.error.empty()) ++s.n_errors;
    switch (v.stage1) {
      case Stage1Verdict::Hosting: ++s.n_hosting; break;
      case Stage1Verdict::NonHosting: ++s.n_nonhosting; break;
      case Stage1Verdict::Abstain: ++s.n_abstain_1; break;
    }
    if (!v.stage2) continue;
    switch (*v.stage2) {
      case Stage2Verdict::Shared: ++s.n_shared; break;
      case Stage2Verdict::Dedicated: ++s.n_dedicated; break;
      case Stage2Verdict::Abstain: ++s.n_abstain_2; break;
    }
  }
  return s;
}

nlohmann::json summary_json(const BatchSummary& s, const Thresholds& t) {
  auto pct = [](std::uint64_t part, std::uint64_t whole) {
    return whole == 0 ? nlohmann::json(nullptr) : nlohmann::json(100.0 * double(part) / double(whole));
  };
  const auto decided1 = s.n_hosting + s.n_nonhosting;
  const auto decided2 = s.n_shared + s.n_dedicated;
  return {{"n", s.n},
          {"thresholds", {{"stage1", t.stage1}, {"stage2", t.stage2}}},
          {"n_hosting", s.n_hosting},
          {"n_nonhosting", s.n_nonhosting},
          {"n_abstain_1", s.n_abstain_1},
          {"n_shared", s.n_shared},
          {"n_dedicated", s.n_dedicated},
          {"n_abstain_2", s.n_abstain_2},
          {"n_errors", s.n_errors},
          {"pct_hosting", pct(s.n_hosting, decided1)},
          {"pct_nonhosting", pct(s.n_nonhosting, decided1)},
          {"pct_shared", pct(s.n_shared, decided2)},
          {"pct_dedicated", pct(s.n_dedicated, decided2)}};
}

BatchResult classify_batch(const PdnsStore& pdns, const WhoisStore& whois, const ForestModel& m1,
                           const ForestModel& m2, std::span<const IpV4> ips, std::int64_t reference,
                           const Thresholds& t, unsigned jobs) {
  check_models(m1, m2);
  BatchResult r;
  r.verdicts.resize(ips.size());
  parallel_for(ips.size(), jobs, [&](std::size_t i) {
    try {
      r.verdicts[i] = classify_ip(pdns, whois, m1, m2, ips[i], reference, t);
    } catch (const error& e) {
      r.verdicts[i].ip = ips[i];
      r.verdicts[i].error = e.what();
    }
  });
  r.summary = summarize(r.verdicts);
  return r;
}

namespace {

std::string na_or(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : "NA"; }

std::optional<double> parse_prob(std::string_view text, std::uint64_t line) {
  if (text == "NA") return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0 || v > 1)
    fail(errc::parse, fmt::format("line {}: bad probability '{}'", line, text));
  return v;
}

} // namespace

void write_verdicts_csv(const std::filesystem::path& path, std::span<const IpVerdict> verdicts) {
  std::vector<const IpVerdict*> rows;
  for (const auto& v : verdicts) rows.push_back(&v);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->ip < b->ip; });
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, fmt::format("cannot write '{}'", path.string()));
  out << "ip,p_hosting,stage1,p_shared,stage2\n";
  for (const auto* v : rows)
    out << fmt::format("{},{},{},{},{}\n", v->ip.to_string(), na_or(v->p_hosting), verdict_name(v->stage1),
                       na_or(v->p_shared), v->stage2 ? verdict_name(*v->stage2) : "NA");
  if (!out) fail(errc::io, fmt::format("write to '{}' failed", path.string()));
}

std::vector<IpVerdict> read_verdicts_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, fmt::format("cannot read verdicts '{}'", path.string()));
  std::string line;
  std::uint64_t no = 0;
  std::vector<IpVerdict> out;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (no == 1) {
      if (line != "ip,p_hosting,stage1,p_shared,stage2")
        fail(errc::schema, fmt::format("'{}' is not a verdicts file", path.string()));
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t c; (c = rest.find(',')) != std::string_view::npos; rest.remove_prefix(c + 1))
      f.push_back(rest.substr(0, c));
    f.push_back(rest);
    if (f.size() != 5) fail(errc::parse, fmt::format("'{}' line {}: expected 5 fields", path.string(), no));
    IpVerdict v;
    v.ip = IpV4::parse(f[0]);
    v.p_hosting = parse_prob(f[1], no);
    if (f[2] == "hosting") v.stage1 = Stage1Verdict::Hosting;
    else if (f[2] == "non-hosting") v.stage1 = Stage1Verdict::NonHosting;
    else if (f[2] == "abstain") v.stage1 = Stage1Verdict::Abstain;
    else fail(errc::parse, fmt::format("'{}' line {}: bad stage1 '{}'", path.string(), no, f[2]));
    v.p_shared = parse_prob(f[3], no);
    if (f[4] == "dedicated") v.stage2 = Stage2Verdict::Dedicated;
    else if (f[4] == "shared") v.stage2 = Stage2Verdict::Shared;
    else if (f[4] == "abstain") v.stage2 = Stage2Verdict::Abstain;
    else if (f[4] != "NA") fail(errc::parse, fmt::format("'{}' line {}: bad stage2 '{}'", path.string(), no, f[4]));
    if (v.stage2.has_value() != (v.stage1 == Stage1Verdict::Hosting))
      fail(errc::parse, fmt::format("'{}' line {}: stage2 must be set exactly for hosting rows", path.string(), no));
    out.push_back(v);
  }
  return out;
}

} // namespace hostscope
