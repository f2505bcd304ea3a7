#pragma once

#include "forest.hpp"
#include "ingest.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hostscope {

enum class Stage1Verdict : std::uint8_t { Hosting, NonHosting, Abstain };
enum class Stage2Verdict : std::uint8_t { Dedicated, Shared, Abstain };

std::string_view verdict_name(Stage1Verdict v);  // hosting / non-hosting / abstain
std::string_view verdict_name(Stage2Verdict v);  // dedicated / shared / abstain

struct Thresholds {
  double stage1 = 0.95;
  double stage2 = 0.95;
};

struct IpVerdict {
  IpV4 ip;
  std::optional<double> p_hosting;  // absent only when feature extraction failed
  Stage1Verdict stage1 = Stage1Verdict::Abstain;
  std::optional<double> p_shared;
  std::optional<Stage2Verdict> stage2;  // present iff stage1 == Hosting
  bool has_pdns = false;
  bool has_whois = false;
  std::string error;
};

/// Hosting when p >= t, NonHosting when 1 - p >= t, otherwise Abstain.
Stage1Verdict gate_stage1(double p_hosting, double threshold);
/// Shared when p >= t, Dedicated when 1 - p >= t, otherwise Abstain.
Stage2Verdict gate_stage2(double p_shared, double threshold);

/// Applies both gates to already computed probabilities. p_shared is only
/// consulted when stage 1 decides Hosting.
IpVerdict gate_verdict(IpV4 ip, double p_hosting, std::optional<double> p_shared, const Thresholds& t);

/// Throws errc::stage when m1 is not a hosting model or m2 not a dedicated
/// one, errc::schema when a model's columns differ from the feature schema.
void check_models(const ForestModel& m1, const ForestModel& m2);

IpVerdict classify_ip(const PdnsStore& pdns, const WhoisStore& whois, const ForestModel& m1, const ForestModel& m2,
                      IpV4 ip, std::int64_t reference, const Thresholds& t = {});

struct BatchSummary {
  std::uint64_t n = 0;
  std::uint64_t n_hosting = 0;
  std::uint64_t n_nonhosting = 0;
  std::uint64_t n_abstain_1 = 0;
  std::uint64_t n_shared = 0;
  std::uint64_t n_dedicated = 0;
  std::uint64_t n_abstain_2 = 0;
  std::uint64_t n_errors = 0;
  friend bool operator==(const BatchSummary&, const BatchSummary&) = default;
};

BatchSummary summarize(std::span<const IpVerdict> verdicts);
/// Counts plus percentages over decided addresses at each stage.
nlohmann::json summary_json(const BatchSummary& s, const Thresholds& t);

struct BatchResult {
  std::vector<IpVerdict> verdicts;  // input order
  BatchSummary summary;
};

BatchResult classify_batch(const PdnsStore& pdns, const WhoisStore& whois, const ForestModel& m1,
                           const ForestModel& m2, std::span<const IpV4> ips, std::int64_t reference,
                           const Thresholds& t = {}, unsigned jobs = 1);

/// `ip,p_hosting,stage1,p_shared,stage2`, NA for absent fields, rows
/// ascending by address.
void write_verdicts_csv(const std::filesystem::path& path, std::span<const IpVerdict> verdicts);
std::vector<IpVerdict> read_verdicts_csv(const std::filesystem::path& path);

} // namespace hostscope
