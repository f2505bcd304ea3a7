#include <hostscope/hostscope.h>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("hostscope_capi_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const char* name) const { return (dir / name).string(); }
};

} // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(hs_status_name(HS_ERR_STAGE)) == "HS_ERR_STAGE");
  CHECK(std::string(hs_version()).size() > 0);
  hs_model* m = nullptr;
  CHECK(hs_model_load("/nonexistent/model.json", &m) == HS_ERR_IO);
  CHECK(m == nullptr);
  CHECK(std::string(hs_last_error()).find("/nonexistent/model.json") != std::string::npos);
  CHECK(hs_model_load(nullptr, &m) == HS_ERR_INVALID_ARGUMENT);
  CHECK(hs_derive_seed(42, "train") == hs_derive_seed(42, "train"));
  CHECK(hs_derive_seed(42, "train") != hs_derive_seed(42, "eval"));
}

TEST_CASE("end to end through the C interface") {
  Scratch s;
  hs_synth_config cfg;
  hs_synth_config_default(&cfg);
  cfg.seed = 17;
  cfg.n_nonhosting = 60;
  cfg.n_hosting = 60;
  cfg.n_dedicated = 40;
  cfg.n_shared = 40;
  cfg.malicious = 1;
  const std::string corpus = s / "corpus";
  REQUIRE(hs_synth_generate(&cfg, corpus.c_str()) == HS_OK);

  hs_suffix_list* sfx = nullptr;
  REQUIRE(hs_suffix_list_load((corpus + "/suffixes.txt").c_str(), &sfx) == HS_OK);
  hs_pdns* pdns = nullptr;
  hs_load_stats stats{};
  REQUIRE(hs_pdns_load((corpus + "/pdns.jsonl").c_str(), sfx, 1, &stats, &pdns) == HS_OK);
  CHECK(stats.loaded > 0);
  CHECK(hs_pdns_ip_count(pdns) > 0);
  hs_whois* whois = nullptr;
  REQUIRE(hs_whois_load((corpus + "/whois.jsonl").c_str(), 1, 10, nullptr, &whois) == HS_OK);

  const std::string truth = corpus + "/truth.jsonl";
  const std::string f1 = s / "f1.csv", f2 = s / "f2.csv";
  uint64_t rows = 0;
  REQUIRE(hs_features_write_csv(pdns, whois, nullptr, truth.c_str(), cfg.reference, HS_STAGE_HOSTING, 2, f1.c_str(),
                                &rows) == HS_OK);
  CHECK(rows >= 200);
  REQUIRE(hs_features_write_csv(pdns, whois, nullptr, truth.c_str(), cfg.reference, HS_STAGE_DEDICATED, 2,
                                f2.c_str(), nullptr) == HS_OK);
  hs_stage st;
  REQUIRE(hs_features_stage(f2.c_str(), &st) == HS_OK);
  CHECK(st == HS_STAGE_DEDICATED);

  hs_label_summary ls{};
  REQUIRE(hs_label(pdns, sfx, nullptr, (corpus + "/domain_whois.jsonl").c_str(), nullptr, nullptr, 0, 2,
                   (s / "labels.csv").c_str(), &ls) == HS_OK);
  CHECK(ls.n == ls.dedicated + ls.shared + ls.undecidable);

  hs_forest_params fp;
  hs_forest_params_default(&fp);
  fp.n_trees = 30;
  fp.seed = 5;
  hs_model *m1 = nullptr, *m2 = nullptr;
  REQUIRE(hs_model_train(f1.c_str(), &fp, &m1) == HS_OK);
  REQUIRE(hs_model_train(f2.c_str(), &fp, &m2) == HS_OK);
  CHECK(hs_model_stage(m1) == HS_STAGE_HOSTING);
  CHECK(hs_model_feature_count(m1) == 20);
  CHECK(hs_model_feature_count(m2) == 9);
  CHECK(hs_model_feature_name(m1, 99) == nullptr);
  double imp = 0;
  CHECK(hs_model_importance(m1, 0, &imp) == HS_OK);

  const std::string m1_path = s / "m1.json";
  REQUIRE(hs_model_save(m1, m1_path.c_str()) == HS_OK);
  hs_model* m1b = nullptr;
  REQUIRE(hs_model_load(m1_path.c_str(), &m1b) == HS_OK);
  double row[20] = {0};
  double pa[2], pb[2];
  REQUIRE(hs_model_predict_proba(m1, row, 20, pa) == HS_OK);
  REQUIRE(hs_model_predict_proba(m1b, row, 20, pb) == HS_OK);
  CHECK(pa[0] == pb[0]);
  CHECK(hs_model_predict_proba(m1, row, 19, pa) == HS_ERR_SCHEMA);

  hs_eval_summary es{};
  REQUIRE(hs_eval_kfold(f1.c_str(), 5, &fp, 0, (s / "eval.json").c_str(), nullptr, &es) == HS_OK);
  CHECK(es.tp + es.fn + es.fp + es.tn >= 200);
  CHECK(es.auc > 0.9);

  hs_verdict v{};
  CHECK(hs_classify_ip(pdns, whois, m2, m1, "1.2.3.4", cfg.reference, 0.95, 0.95, &v) == HS_ERR_STAGE);
  CHECK(hs_classify_ip(pdns, whois, m1, m2, "1.2.3.4", cfg.reference, 0.4, 0.95, &v) == HS_ERR_INVALID_ARGUMENT);
  CHECK(hs_classify_ip(pdns, whois, m1, m2, "::1", cfg.reference, 0.95, 0.95, &v) == HS_ERR_UNSUPPORTED);
  REQUIRE(hs_classify_ip(pdns, whois, m1, m2, "1.2.3.4", cfg.reference, 0.95, 0.95, &v) == HS_OK);
  if (v.stage1 != HS_HOSTING) CHECK(v.stage2 == HS_NONE);
  if (v.stage1 != HS_HOSTING) CHECK(std::isnan(v.p_shared));

  const std::string verdicts = s / "verdicts.csv";
  hs_classify_summary cs{};
  REQUIRE(hs_classify(pdns, whois, m1, m2, nullptr, cfg.reference, 0.95, 0.95, 2, verdicts.c_str(),
                      (s / "summary.json").c_str(), &cs) == HS_OK);
  CHECK(cs.n == cs.hosting + cs.nonhosting + cs.abstain_1 + cs.errors);
  CHECK(cs.hosting == cs.shared + cs.dedicated + cs.abstain_2);

  hs_asn* asn = nullptr;
  REQUIRE(hs_asn_load((corpus + "/asn.jsonl").c_str(), 1, nullptr, &asn) == HS_OK);
  hs_analysis_summary as{};
  REQUIRE(hs_analyze(pdns, asn, sfx, (corpus + "/vt_feed.jsonl").c_str(), verdicts.c_str(), 5, 5, 0,
                     (s / "analysis").c_str(), &as) == HS_OK);
  CHECK(as.malicious_apexes > 0);
  CHECK(fs::exists(s.dir / "analysis" / "summary.json"));
  CHECK(hs_analyze(pdns, asn, sfx, (corpus + "/vt_feed.jsonl").c_str(), verdicts.c_str(), 0, 5, 0,
                   (s / "analysis").c_str(), &as) == HS_ERR_INVALID_ARGUMENT);

  char* prof = hs_synth_default_profiles();
  REQUIRE(prof != nullptr);
  CHECK(std::string(prof).find("\"shared\"") != std::string::npos);
  hs_string_free(prof);

  hs_asn_free(asn);
  hs_model_free(m1b);
  hs_model_free(m1);
  hs_model_free(m2);
  hs_whois_free(whois);
  hs_pdns_free(pdns);
  hs_suffix_list_free(sfx);
}
