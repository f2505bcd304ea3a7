#include <hostscope/hostscope.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  Failure(hs_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  hs_status status;
};

void check(hs_status s) {
  if (s != HS_OK) throw Failure(s, hs_last_error());
}

[[noreturn]] void usage(const std::string& msg) { throw Failure(HS_ERR_INVALID_ARGUMENT, msg); }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using SuffixPtr = std::unique_ptr<hs_suffix_list, Deleter<hs_suffix_list, hs_suffix_list_free>>;
using PdnsPtr = std::unique_ptr<hs_pdns, Deleter<hs_pdns, hs_pdns_free>>;
using WhoisPtr = std::unique_ptr<hs_whois, Deleter<hs_whois, hs_whois_free>>;
using AsnPtr = std::unique_ptr<hs_asn, Deleter<hs_asn, hs_asn_free>>;
using ModelPtr = std::unique_ptr<hs_model, Deleter<hs_model, hs_model_free>>;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(HS_ERR_IO, "cannot read '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Failure(HS_ERR_INTERNAL, "sha256 unavailable");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

/// Epoch seconds or an ISO-8601 UTC time ("2021-01-15T12:00:00Z").
std::int64_t parse_reference(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  std::tm tm{};
  std::istringstream in(text);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (in.fail()) usage("--reference must be epoch seconds or YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
  std::string rest;
  in >> rest;
  if (!rest.empty() && rest != "Z") usage("--reference must be UTC, got '" + text + "'");
  return static_cast<std::int64_t>(timegm(&tm));
}

hs_stage parse_stage(const std::string& s) {
  if (s == "hosting") return HS_STAGE_HOSTING;
  if (s == "dedicated") return HS_STAGE_DEDICATED;
  usage("--stage must be hosting or dedicated");
}

const char* stage_text(hs_stage s) { return s == HS_STAGE_HOSTING ? "hosting" : "dedicated"; }

const char* opt_path(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

json stats_json(const hs_load_stats& s) {
  return {{"lines", s.lines}, {"loaded", s.loaded}, {"malformed", s.malformed}, {"skipped_non_a", s.skipped_non_a},
          {"merged", s.merged}};
}

/// Records config and input/output digests for one run.
class Manifest {
public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  json& config() { return config_; }
  void input(const std::string& role, const std::string& path) {
    if (!path.empty()) inputs_.push_back({role, path});
  }
  void output(const std::string& role, const fs::path& path) { outputs_.push_back({role, path.string()}); }
  void stats(const std::string& role, const hs_load_stats& s) { stats_[role] = stats_json(s); }

  void write(const fs::path& path) const {
    json j;
    j["tool"] = "hostscope";
    j["version"] = hs_version();
    j["subcommand"] = subcommand_;
    j["config"] = config_;
    auto files = [](const std::vector<std::pair<std::string, std::string>>& v) {
      auto a = json::array();
      for (const auto& [role, p] : v) a.push_back({{"role", role}, {"path", p}, {"sha256", sha256_file(p)}});
      return a;
    };
    j["inputs"] = files(inputs_);
    j["outputs"] = files(outputs_);
    if (!stats_.empty()) j["load_stats"] = stats_;
    std::ofstream out(path, std::ios::binary);
    if (!(out << j.dump(2) << '\n')) throw Failure(HS_ERR_IO, "cannot write '" + path.string() + "'");
  }

private:
  std::string subcommand_;
  json config_ = json::object();
  json stats_ = json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

fs::path manifest_for_file(const std::string& out) { return fs::path(out + ".run_manifest.json"); }

void ensure_parent(const std::string& file) {
  const auto parent = fs::path(file).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void log(const std::string& line) { std::cerr << line << '\n'; }

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string reference;
  std::string suffix_list;
  bool strict = false;
  int horizon_years = 10;
};

SuffixPtr load_suffixes(const Globals& g, Manifest& m) {
  hs_suffix_list* s = nullptr;
  if (g.suffix_list.empty()) {
    check(hs_suffix_list_synth(&s));
  } else {
    check(hs_suffix_list_load(g.suffix_list.c_str(), &s));
    m.input("suffix_list", g.suffix_list);
  }
  return SuffixPtr(s);
}

PdnsPtr load_pdns(const Globals& g, const std::string& path, const hs_suffix_list* sfx, Manifest& m) {
  hs_pdns* p = nullptr;
  hs_load_stats st{};
  check(hs_pdns_load(path.c_str(), sfx, g.strict, &st, &p));
  m.input("pdns", path);
  m.stats("pdns", st);
  if (st.malformed) log("pdns: skipped " + std::to_string(st.malformed) + " malformed lines");
  return PdnsPtr(p);
}

WhoisPtr load_whois(const Globals& g, const std::string& path, Manifest& m) {
  hs_whois* w = nullptr;
  hs_load_stats st{};
  check(hs_whois_load(path.c_str(), g.strict, g.horizon_years, &st, &w));
  m.input("whois", path);
  m.stats("whois", st);
  if (st.malformed) log("whois: skipped " + std::to_string(st.malformed) + " malformed lines");
  return WhoisPtr(w);
}

ModelPtr load_model(const std::string& path, const char* role, Manifest& m) {
  hs_model* model = nullptr;
  check(hs_model_load(path.c_str(), &model));
  m.input(role, path);
  return ModelPtr(model);
}

std::int64_t need_reference(const Globals& g, const char* sub) {
  if (g.reference.empty()) usage(std::string(sub) + " needs --reference");
  return parse_reference(g.reference);
}

json base_config(const Globals& g) {
  return {{"seed", g.seed}, {"jobs", g.jobs}, {"strict", g.strict}, {"suffix_list", g.suffix_list},
          {"horizon_years", g.horizon_years}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hosting-type classification of IP addresses from passive DNS and WHOIS history"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(hs_version()));

  Globals g;
  app.add_option("--seed", g.seed, "Root seed; subcommands derive their own");
  app.add_option("--jobs", g.jobs, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--reference", g.reference, "Reference time: epoch seconds or YYYY-MM-DDTHH:MM:SSZ");
  app.add_option("--suffix-list", g.suffix_list, "Public suffix list (default: built-in list)");
  app.add_flag("--strict", g.strict, "Fail on the first malformed input line");
  app.add_option("--horizon-years", g.horizon_years, "WHOIS history horizon")->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  std::string synth_out, profiles_path;
  std::optional<std::uint32_t> n, n_non, n_host, n_ded, n_shared;
  double privacy = 0, redirects = 0;
  bool malicious = false;
  int window_days = 60;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n", n, "N non-hosting plus N hosting addresses");
  synth->add_option("--n-nonhosting", n_non);
  synth->add_option("--n-hosting", n_host, "Hosting addresses drawn from the mixed hosting profile");
  synth->add_option("--n-dedicated", n_ded);
  synth->add_option("--n-shared", n_shared);
  synth->add_option("--privacy", privacy, "Share of privacy-protected domain registrations")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--redirects", redirects, "Share of dedicated addresses with converging redirects")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_flag("--malicious", malicious, "Plant malicious domains and write a scanner feed");
  synth->add_option("--profiles", profiles_path, "JSON overriding class profiles")->check(CLI::ExistingFile);
  synth->add_option("--window-days", window_days)->check(CLI::PositiveNumber);
  synth->add_flag_callback("--print-profiles", [] {
    char* text = hs_synth_default_profiles();
    if (text) std::cout << text << '\n';
    hs_string_free(text);
    std::exit(0);
  }, "Print the built-in class profiles and exit");

  // features
  auto* features = app.add_subcommand("features", "Extract a feature CSV");
  std::string stage_s, pdns_path, whois_path, ips_path, labels_path, features_out;
  features->add_option("--stage", stage_s)->required()->check(CLI::IsMember({"hosting", "dedicated"}));
  features->add_option("--pdns", pdns_path)->required();
  features->add_option("--whois", whois_path)->required();
  features->add_option("--ips", ips_path, "Address list (default: every address in the inputs)");
  features->add_option("--labels", labels_path, "Truth JSONL or labels CSV adding a label column");
  features->add_option("--out", features_out)->required();

  // label
  auto* label = app.add_subcommand("label", "Label hosting addresses dedicated or shared");
  std::string dwhois_path, redirects_path, manual_path, labels_out;
  label->add_option("--pdns", pdns_path)->required();
  label->add_option("--domain-whois", dwhois_path)->required();
  label->add_option("--redirects", redirects_path);
  label->add_option("--manual", manual_path);
  label->add_option("--ips", ips_path);
  label->add_option("--out", labels_out)->required();

  // train / eval share forest options
  hs_forest_params fp;
  hs_forest_params_default(&fp);
  auto forest_opts = [&fp](CLI::App* sub) {
    sub->add_option("--trees", fp.n_trees)->check(CLI::PositiveNumber);
    sub->add_option("--mtry", fp.mtry, "Features per split (0: sqrt)");
    sub->add_option("--max-depth", fp.max_depth, "0: unbounded");
    sub->add_option("--min-leaf", fp.min_leaf)->check(CLI::PositiveNumber);
  };
  auto* train = app.add_subcommand("train", "Train a random forest on a labelled feature CSV");
  std::string features_in, model_out, report_out;
  train->add_option("--stage", stage_s)->required()->check(CLI::IsMember({"hosting", "dedicated"}));
  train->add_option("--features", features_in)->required()->check(CLI::ExistingFile);
  train->add_option("--out", model_out)->required();
  train->add_option("--report", report_out, "Training report (default: <out>.report.json)");
  forest_opts(train);

  auto* eval = app.add_subcommand("eval", "Cross-validate a random forest");
  unsigned kfold = 5;
  bool flip = false;
  std::string eval_out, roc_out;
  eval->add_option("--stage", stage_s)->required()->check(CLI::IsMember({"hosting", "dedicated"}));
  eval->add_option("--features", features_in)->required()->check(CLI::ExistingFile);
  eval->add_option("--kfold", kfold)->check(CLI::Range(2u, 1000u));
  eval->add_flag("--flip-positive", flip, "Score the second label as positive");
  eval->add_option("--out", eval_out, "Report JSON")->required();
  eval->add_option("--roc", roc_out, "ROC CSV (default: <out>.roc.csv)");
  forest_opts(eval);

  // classify
  auto* classify = app.add_subcommand("classify", "Run the two-stage pipeline");
  std::string m1_path, m2_path, verdicts_out, summary_out;
  double t1 = 0.95, t2 = 0.95;
  classify->add_option("--pdns", pdns_path)->required();
  classify->add_option("--whois", whois_path)->required();
  classify->add_option("--m1", m1_path, "Hosting model")->required();
  classify->add_option("--m2", m2_path, "Dedicated/shared model")->required();
  classify->add_option("--ips", ips_path);
  classify->add_option("--t1", t1, "Stage-1 confidence");
  classify->add_option("--t2", t2, "Stage-2 confidence");
  classify->add_option("--out", verdicts_out, "Verdicts CSV")->required();
  classify->add_option("--summary", summary_out, "Summary JSON (default: <out>.summary.json)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Malicious-domain hosting report");
  std::string asn_path, vt_path, verdicts_in, analyze_out;
  int min_positives = 5;
  unsigned k = 5;
  analyze->add_option("--pdns", pdns_path)->required();
  analyze->add_option("--asn", asn_path)->required();
  analyze->add_option("--vt-feed", vt_path)->required();
  analyze->add_option("--verdicts", verdicts_in)->required();
  analyze->add_option("--min-positives", min_positives)->check(CLI::PositiveNumber);
  analyze->add_option("--k", k, "Ranking depth")->check(CLI::PositiveNumber);
  analyze->add_option("--out", analyze_out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=" << hs_status_name(HS_ERR_INVALID_ARGUMENT) << " msg=" << json(e.what()).dump() << '\n';
    return HS_ERR_INVALID_ARGUMENT;
  }

  try {
    if (*synth) {
      Manifest m("synth");
      hs_synth_config c;
      hs_synth_config_default(&c);
      c.seed = hs_derive_seed(g.seed, "synth");
      if (n) c.n_nonhosting = c.n_hosting = *n;
      if (n_non) c.n_nonhosting = *n_non;
      if (n_host) c.n_hosting = *n_host;
      if (n_ded) c.n_dedicated = *n_ded;
      if (n_shared) c.n_shared = *n_shared;
      if (c.n_nonhosting + c.n_hosting + c.n_dedicated + c.n_shared == 0)
        usage("synth needs --n or a per-class count");
      if (!g.reference.empty()) c.reference = parse_reference(g.reference);
      c.window_days = window_days;
      c.horizon_years = g.horizon_years;
      c.privacy_fraction = privacy;
      c.redirect_fraction = redirects;
      c.malicious = malicious;
      std::string profiles;
      if (!profiles_path.empty()) {
        std::ifstream in(profiles_path, std::ios::binary);
        profiles.assign(std::istreambuf_iterator<char>(in), {});
        c.profiles_json = profiles.c_str();
        m.input("profiles", profiles_path);
      }
      check(hs_synth_generate(&c, synth_out.c_str()));
      m.config() = base_config(g);
      m.config().update({{"out", synth_out}, {"derived_seed", c.seed}, {"n_nonhosting", c.n_nonhosting},
                         {"n_hosting", c.n_hosting}, {"n_dedicated", c.n_dedicated}, {"n_shared", c.n_shared},
                         {"reference", c.reference}, {"window_days", c.window_days}, {"privacy", privacy},
                         {"redirects", redirects}, {"malicious", malicious}});
      for (const char* f : {"pdns.jsonl", "whois.jsonl", "asn.jsonl", "domain_whois.jsonl", "redirects.jsonl",
                            "vt_feed.jsonl", "truth.jsonl", "suffixes.txt", "synth_config.json"})
        m.output(f, fs::path(synth_out) / f);
      m.write(fs::path(synth_out) / "run_manifest.json");
      log("synth: wrote corpus to " + synth_out);
    } else if (*features) {
      Manifest m("features");
      const auto reference = need_reference(g, "features");
      auto sfx = load_suffixes(g, m);
      auto pdns = load_pdns(g, pdns_path, sfx.get(), m);
      auto whois = load_whois(g, whois_path, m);
      m.input("ips", ips_path);
      m.input("labels", labels_path);
      ensure_parent(features_out);
      std::uint64_t rows = 0;
      check(hs_features_write_csv(pdns.get(), whois.get(), opt_path(ips_path), opt_path(labels_path), reference,
                                  parse_stage(stage_s), g.jobs, features_out.c_str(), &rows));
      m.config() = base_config(g);
      m.config().update({{"stage", stage_s}, {"reference", reference}, {"out", features_out}});
      m.output("features", features_out);
      m.write(manifest_for_file(features_out));
      log("features: " + std::to_string(rows) + " rows -> " + features_out);
    } else if (*label) {
      Manifest m("label");
      auto sfx = load_suffixes(g, m);
      auto pdns = load_pdns(g, pdns_path, sfx.get(), m);
      m.input("domain_whois", dwhois_path);
      m.input("redirects", redirects_path);
      m.input("manual", manual_path);
      m.input("ips", ips_path);
      ensure_parent(labels_out);
      hs_label_summary s{};
      check(hs_label(pdns.get(), sfx.get(), opt_path(ips_path), dwhois_path.c_str(), opt_path(redirects_path),
                     opt_path(manual_path), g.strict, g.jobs, labels_out.c_str(), &s));
      m.config() = base_config(g);
      m.config()["out"] = labels_out;
      m.output("labels", labels_out);
      m.write(manifest_for_file(labels_out));
      log("label: " + std::to_string(s.n) + " addresses, " + std::to_string(s.dedicated) + " dedicated, " +
          std::to_string(s.shared) + " shared, " + std::to_string(s.undecidable) + " undecidable");
    } else if (*train) {
      Manifest m("train");
      hs_stage declared = parse_stage(stage_s), actual{};
      check(hs_features_stage(features_in.c_str(), &actual));
      if (actual != declared)
        throw Failure(HS_ERR_STAGE, std::string("feature file is for stage ") + stage_text(actual) + ", not " +
                                        stage_s);
      fp.seed = hs_derive_seed(g.seed, "train");
      fp.jobs = g.jobs;
      hs_model* raw = nullptr;
      check(hs_model_train(features_in.c_str(), &fp, &raw));
      ModelPtr model(raw);
      ensure_parent(model_out);
      check(hs_model_save(model.get(), model_out.c_str()));
      if (report_out.empty()) report_out = model_out + ".report.json";
      check(hs_model_write_report(model.get(), report_out.c_str()));
      m.input("features", features_in);
      m.config() = base_config(g);
      m.config().update({{"stage", stage_s}, {"n_trees", fp.n_trees}, {"mtry", fp.mtry}, {"max_depth", fp.max_depth},
                         {"min_leaf", fp.min_leaf}, {"derived_seed", fp.seed}, {"out", model_out}});
      m.output("model", model_out);
      m.output("report", report_out);
      m.write(manifest_for_file(model_out));
      log("train: " + std::string(stage_s) + " model -> " + model_out);
    } else if (*eval) {
      Manifest m("eval");
      hs_stage declared = parse_stage(stage_s), actual{};
      check(hs_features_stage(features_in.c_str(), &actual));
      if (actual != declared)
        throw Failure(HS_ERR_STAGE, std::string("feature file is for stage ") + stage_text(actual) + ", not " +
                                        stage_s);
      fp.seed = hs_derive_seed(g.seed, "eval");
      fp.jobs = g.jobs;
      if (roc_out.empty()) roc_out = eval_out + ".roc.csv";
      ensure_parent(eval_out);
      hs_eval_summary s{};
      check(hs_eval_kfold(features_in.c_str(), kfold, &fp, flip, eval_out.c_str(), roc_out.c_str(), &s));
      m.input("features", features_in);
      m.config() = base_config(g);
      m.config().update({{"stage", stage_s}, {"kfold", kfold}, {"flip_positive", flip}, {"n_trees", fp.n_trees},
                         {"mtry", fp.mtry}, {"max_depth", fp.max_depth}, {"min_leaf", fp.min_leaf},
                         {"derived_seed", fp.seed}, {"out", eval_out}});
      m.output("report", eval_out);
      m.output("roc", roc_out);
      m.write(manifest_for_file(eval_out));
      std::ostringstream line;
      line << std::fixed << std::setprecision(2) << "eval: precision=" << s.precision << " recall=" << s.recall
           << " fpr=" << s.fpr << " auc=" << std::setprecision(4) << s.auc;
      log(line.str());
    } else if (*classify) {
      Manifest m("classify");
      const auto reference = need_reference(g, "classify");
      auto sfx = load_suffixes(g, m);
      auto pdns = load_pdns(g, pdns_path, sfx.get(), m);
      auto whois = load_whois(g, whois_path, m);
      auto m1 = load_model(m1_path, "m1", m);
      auto m2 = load_model(m2_path, "m2", m);
      m.input("ips", ips_path);
      if (summary_out.empty()) summary_out = verdicts_out + ".summary.json";
      ensure_parent(verdicts_out);
      hs_classify_summary s{};
      check(hs_classify(pdns.get(), whois.get(), m1.get(), m2.get(), opt_path(ips_path), reference, t1, t2, g.jobs,
                        verdicts_out.c_str(), summary_out.c_str(), &s));
      m.config() = base_config(g);
      m.config().update({{"reference", reference}, {"t1", t1}, {"t2", t2}, {"out", verdicts_out}});
      m.output("verdicts", verdicts_out);
      m.output("summary", summary_out);
      m.write(manifest_for_file(verdicts_out));
      log("classify: " + std::to_string(s.n) + " addresses, " + std::to_string(s.hosting) + " hosting (" +
          std::to_string(s.shared) + " shared, " + std::to_string(s.dedicated) + " dedicated, " +
          std::to_string(s.abstain_2) + " abstain), " + std::to_string(s.nonhosting) + " non-hosting, " +
          std::to_string(s.abstain_1) + " abstain");
    } else if (*analyze) {
      Manifest m("analyze");
      auto sfx = load_suffixes(g, m);
      auto pdns = load_pdns(g, pdns_path, sfx.get(), m);
      hs_asn* raw = nullptr;
      hs_load_stats st{};
      check(hs_asn_load(asn_path.c_str(), g.strict, &st, &raw));
      AsnPtr asn(raw);
      m.input("asn", asn_path);
      m.stats("asn", st);
      m.input("vt_feed", vt_path);
      m.input("verdicts", verdicts_in);
      hs_analysis_summary s{};
      check(hs_analyze(pdns.get(), asn.get(), sfx.get(), vt_path.c_str(), verdicts_in.c_str(), min_positives, k,
                       g.strict, analyze_out.c_str(), &s));
      m.config() = base_config(g);
      m.config().update({{"min_positives", min_positives}, {"k", k}, {"out", analyze_out}});
      for (const char* f : {"summary.json", "per_ip_shared.csv", "cdf_total_domains.csv", "cdf_malicious_domains.csv",
                            "providers_total_domains.csv", "providers_malicious_shared.csv",
                            "providers_malicious_dedicated.csv"})
        m.output(f, fs::path(analyze_out) / f);
      m.write(fs::path(analyze_out) / "run_manifest.json");
      std::ostringstream line;
      auto pct = [](double v) {
        std::ostringstream o;
        if (std::isnan(v)) o << "n/a";
        else o << std::fixed << std::setprecision(1) << v << '%';
        return o.str();
      };
      line << "analyze: " << s.malicious_apexes << " malicious apexes on " << s.malicious_ips << " addresses; hosting "
           << pct(s.pct_hosting) << ", shared " << pct(s.pct_shared);
      log(line.str());
    }
  } catch (const Failure& e) {
    std::cerr << "error: code=" << hs_status_name(e.status) << " msg=" << json(e.what()).dump() << '\n';
    return e.status;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: code=" << hs_status_name(HS_ERR_IO) << " msg=" << json(e.what()).dump() << '\n';
    return HS_ERR_IO;
  } catch (const std::exception& e) {
    std::cerr << "error: code=" << hs_status_name(HS_ERR_INTERNAL) << " msg=" << json(e.what()).dump() << '\n';
    return HS_ERR_INTERNAL;
  }
  return 0;
}
