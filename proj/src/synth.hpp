#pragma once

#include "analysis.hpp"
#include "ingest.hpp"
#include "labeler.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hostscope {

/// 2021-01-15T12:00:00Z
inline constexpr std::int64_t kSynthReference = 1610712000;

/// Class-conditional generation parameters. Counts are drawn as
/// min + negative binomial (gamma-Poisson with shape `count_shape`; 1 is
/// geometric), sizes log-normal, ages gamma.
struct ClassProfile {
  double tld2_mean = 0;
  double tld3_mean = 0;
  double fqdn_mean = 0;
  double count_shape = 1;
  std::uint32_t min_apexes = 0;
  double owners_mean = 1;
  double whois_mean = 1;
  double inetnum_size_mean = 256;
  double update_years_mean = 1;
  double update_shape = 8;
  double churn_mean = 0;
  double churn_std = 0;
  double duration_mean_years = 1;
  double duration_std_years = 1;
  std::array<double, kNetTypeCount> net_type_weights{0, 0, 0, 0, 1};
  /// Hosting marginal only: share of addresses planted as shared.
  double shared_fraction = 0;
};

struct Profiles {
  ClassProfile nonhosting;
  ClassProfile hosting;
  ClassProfile dedicated;
  ClassProfile shared;
};

Profiles default_profiles();

/// Throws errc::config on a negative mean, a bad shape, or net-type weights
/// that do not sum to 1.
void validate_profile(const ClassProfile& p, std::string_view name);

nlohmann::json profiles_to_json(const Profiles& p);
/// Fields missing from `j` keep the values of `base`.
Profiles profiles_from_json(const nlohmann::json& j, Profiles base = default_profiles());

struct GenerateConfig {
  std::uint64_t seed = 0;
  std::uint32_t n_nonhosting = 0;
  std::uint32_t n_hosting = 0;  // drawn from the hosting marginal profile
  std::uint32_t n_dedicated = 0;
  std::uint32_t n_shared = 0;
  Profiles profiles = default_profiles();
  std::int64_t reference = kSynthReference;
  int window_days = 60;
  int horizon_years = 10;
  double privacy_fraction = 0;
  double redirect_fraction = 0;
  /// Plants malicious apexes on every address and emits a VT-style feed.
  bool malicious = false;
  double noise_capture_fraction = 0.3;
  double split_record_fraction = 0.05;
};

nlohmann::json config_json(const GenerateConfig& c);

struct TruthRow {
  IpV4 ip;
  HostingLabel stage1 = HostingLabel::NonHosting;
  std::optional<SharingLabel> stage2;
  std::vector<std::string> owners;     // planted registrants, sorted
  std::vector<std::string> malicious;  // malicious apexes hosted here, sorted
};

/// Receives generated records in a fixed order.
class CorpusSink {
public:
  virtual ~CorpusSink() = default;
  virtual void pdns(const PdnsRecord& r) = 0;
  virtual void whois(const WhoisSnapshot& s) = 0;
  virtual void asn(const AsnRecord& r) = 0;
  virtual void domain_whois(const DomainWhois& w) = 0;
  virtual void redirect(const RedirectEdge& e) = 0;
  virtual void vt(const VtEntry& e) = 0;
  virtual void truth(const TruthRow& t) = 0;
};

/// Suffix list every generated name is valid under.
SuffixList synth_suffixes();
std::vector<std::string> synth_suffix_entries();

/// Deterministic for a given config. Throws errc::config on invalid input.
void generate(const GenerateConfig& config, CorpusSink& sink);

struct SynthCorpus {
  SuffixList suffixes;
  PdnsStore pdns;
  WhoisStore whois;
  AsnDb asn;
  DomainWhoisMap domain_whois;
  std::vector<RedirectEdge> redirects;
  std::vector<VtEntry> vt_feed;
  std::vector<TruthRow> truth;  // ascending by address
};

/// Generates straight into in-memory stores, equal to loading the files
/// written by write_corpus.
SynthCorpus generate_corpus(const GenerateConfig& config);

/// File names inside a corpus directory.
namespace corpus_files {
inline constexpr const char* pdns = "pdns.jsonl";
inline constexpr const char* whois = "whois.jsonl";
inline constexpr const char* asn = "asn.jsonl";
inline constexpr const char* domain_whois = "domain_whois.jsonl";
inline constexpr const char* redirects = "redirects.jsonl";
inline constexpr const char* vt_feed = "vt_feed.jsonl";
inline constexpr const char* truth = "truth.jsonl";
inline constexpr const char* suffixes = "suffixes.txt";
inline constexpr const char* config = "synth_config.json";
}  // namespace corpus_files

/// Writes the corpus files into `out_dir` (created if missing) and returns
/// the paths written.
std::vector<std::filesystem::path> write_corpus(const GenerateConfig& config, const std::filesystem::path& out_dir);

std::string format_truth_line(const TruthRow& t);
std::string format_domain_whois_line(const DomainWhois& w);
std::string format_redirect_line(const RedirectEdge& e);

} // namespace hostscope
