#include "hostscope/hostscope.h"

#include "analysis.hpp"
#include "evaluation.hpp"
#include "feature_table.hpp"
#include "labeler.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"
#include "synth.hpp"
#include "util.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <fmt/format.h>

struct hs_suffix_list {
  hostscope::SuffixList list;
};
struct hs_pdns {
  hostscope::PdnsStore store;
};
struct hs_whois {
  hostscope::WhoisStore store;
};
struct hs_asn {
  hostscope::AsnDb db;
};
struct hs_model {
  hostscope::ForestModel model;
};

namespace {

using namespace hostscope;

thread_local std::string last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
hs_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return HS_OK;
  } catch (const hostscope::error& e) {
    last_error = e.what();
    return static_cast<hs_status>(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return HS_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return HS_ERR_INTERNAL;
  }
}

template <class T>
const T& need(const T* p, const char* what) {
  if (!p) fail(errc::invalid_argument, std::string(what) + " is null");
  return *p;
}

const char* need_path(const char* p, const char* what) {
  if (!p || !*p) fail(errc::invalid_argument, std::string(what) + " is empty");
  return p;
}

void copy_stats(const LoadStats& s, hs_load_stats* out) {
  if (out) *out = {s.lines, s.loaded, s.malformed, s.skipped_non_a, s.merged};
}

ForestParams to_params(const hs_forest_params* p) {
  ForestParams out;
  if (!p) return out;
  out.n_trees = p->n_trees;
  out.mtry = p->mtry;
  out.max_depth = p->max_depth;
  out.min_leaf = p->min_leaf;
  out.seed = p->seed;
  out.jobs = p->jobs;
  return out;
}

std::vector<IpV4> addresses(const PdnsStore& pdns, const WhoisStore* whois, const char* ip_list_path) {
  if (ip_list_path) return read_ip_list(ip_list_path);
  std::set<IpV4> all(pdns.ips().begin(), pdns.ips().end());
  if (whois)
    for (IpV4 ip : whois->queried_ips()) all.insert(ip);
  return {all.begin(), all.end()};
}

Thresholds thresholds(double t1, double t2) {
  for (double t : {t1, t2})
    if (!(t > 0.5 && t <= 1.0)) fail(errc::invalid_argument, "thresholds must lie in (0.5, 1]");
  return {t1, t2};
}

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

} // namespace

extern "C" {

const char* hs_version(void) { return "1.0.0"; }

const char* hs_status_name(hs_status status) {
  switch (status) {
    case HS_OK: return "HS_OK";
    case HS_ERR_INVALID_ARGUMENT: return "HS_ERR_INVALID_ARGUMENT";
    case HS_ERR_IO: return "HS_ERR_IO";
    case HS_ERR_PARSE: return "HS_ERR_PARSE";
    case HS_ERR_UNSUPPORTED: return "HS_ERR_UNSUPPORTED";
    case HS_ERR_VERSION: return "HS_ERR_VERSION";
    case HS_ERR_SCHEMA: return "HS_ERR_SCHEMA";
    case HS_ERR_CORRUPT: return "HS_ERR_CORRUPT";
    case HS_ERR_STAGE: return "HS_ERR_STAGE";
    case HS_ERR_DATA: return "HS_ERR_DATA";
    case HS_ERR_CONFIG: return "HS_ERR_CONFIG";
    case HS_ERR_MISSING: return "HS_ERR_MISSING";
    case HS_ERR_INTERNAL: return "HS_ERR_INTERNAL";
  }
  return "HS_ERR_UNKNOWN";
}

const char* hs_last_error(void) { return last_error.c_str(); }

uint64_t hs_derive_seed(uint64_t seed, const char* name) { return derive_seed(seed, std::string_view(name ? name : "")); }

hs_status hs_suffix_list_load(const char* path, hs_suffix_list** out) {
  return guard([&] {
    need(out, "out");
    *out = new hs_suffix_list{SuffixList::load(need_path(path, "path"))};
  });
}

hs_status hs_suffix_list_synth(hs_suffix_list** out) {
  return guard([&] {
    need(out, "out");
    *out = new hs_suffix_list{synth_suffixes()};
  });
}

void hs_suffix_list_free(hs_suffix_list* list) { delete list; }

hs_status hs_pdns_load(const char* path, const hs_suffix_list* suffixes, int strict, hs_load_stats* stats,
                       hs_pdns** out) {
  return guard([&] {
    need(out, "out");
    LoadStats st;
    auto store = load_pdns(need_path(path, "path"), need(suffixes, "suffixes").list, strict != 0, &st);
    copy_stats(st, stats);
    *out = new hs_pdns{std::move(store)};
  });
}

size_t hs_pdns_ip_count(const hs_pdns* pdns) { return pdns ? pdns->store.ips().size() : 0; }
void hs_pdns_free(hs_pdns* pdns) { delete pdns; }

hs_status hs_whois_load(const char* path, int strict, int horizon_years, hs_load_stats* stats, hs_whois** out) {
  return guard([&] {
    need(out, "out");
    if (horizon_years <= 0) fail(errc::invalid_argument, "horizon_years must be positive");
    LoadStats st;
    auto store = load_whois(need_path(path, "path"), strict != 0, horizon_years, &st);
    copy_stats(st, stats);
    *out = new hs_whois{std::move(store)};
  });
}

void hs_whois_free(hs_whois* whois) { delete whois; }

hs_status hs_asn_load(const char* path, int strict, hs_load_stats* stats, hs_asn** out) {
  return guard([&] {
    need(out, "out");
    LoadStats st;
    auto db = load_asn(need_path(path, "path"), strict != 0, &st);
    copy_stats(st, stats);
    *out = new hs_asn{std::move(db)};
  });
}

void hs_asn_free(hs_asn* asn) { delete asn; }

hs_status hs_features_write_csv(const hs_pdns* pdns, const hs_whois* whois, const char* ip_list_path,
                                const char* labels_path, int64_t reference, hs_stage stage, unsigned jobs,
                                const char* out_csv, uint64_t* n_rows) {
  return guard([&] {
    const auto& p = need(pdns, "pdns").store;
    const auto& w = need(whois, "whois").store;
    if (stage != HS_STAGE_HOSTING && stage != HS_STAGE_DEDICATED) fail(errc::invalid_argument, "unknown stage");
    const auto st = static_cast<Stage>(stage);
    const auto ips = addresses(p, &w, ip_list_path);
    auto table = build_feature_table(p, w, ips, reference, st, jobs);
    if (labels_path) {
      const auto labels = load_label_map(labels_path, st);
      for (std::size_t i = 0; i < table.ips.size(); ++i)
        if (auto it = labels.find(table.ips[i]); it != labels.end()) table.labels[i] = it->second;
    }
    write_feature_csv(need_path(out_csv, "out_csv"), table);
    if (n_rows) *n_rows = table.ips.size();
  });
}

hs_status hs_features_stage(const char* features_csv, hs_stage* out) {
  return guard([&] {
    need(out, "out");
    *out = static_cast<hs_stage>(read_feature_csv(need_path(features_csv, "features_csv")).stage);
  });
}

hs_status hs_label(const hs_pdns* pdns, const hs_suffix_list* suffixes, const char* ip_list_path,
                   const char* domain_whois_path, const char* redirects_path, const char* manual_path, int strict,
                   unsigned jobs, const char* out_csv, hs_label_summary* summary) {
  return guard([&] {
    const auto& p = need(pdns, "pdns").store;
    const auto& sfx = need(suffixes, "suffixes").list;
    const auto ips = addresses(p, nullptr, ip_list_path);
    const auto whois = load_domain_whois(need_path(domain_whois_path, "domain_whois_path"), sfx, strict != 0);
    const auto edges = redirects_path ? load_redirects(redirects_path, sfx, strict != 0) : std::vector<RedirectEdge>{};
    const auto manual = manual_path ? load_manual(manual_path, strict != 0) : ManualMap{};
    const auto corpus = label_corpus(p, ips, whois, RedirectGraph(edges), manual, jobs);
    write_labels_csv(need_path(out_csv, "out_csv"), corpus.decisions);
    if (summary) {
      *summary = {};
      summary->n = corpus.decisions.size();
      for (const auto& d : corpus.decisions) {
        if (!d.label)
          ++summary->undecidable;
        else if (*d.label == SharingLabel::Dedicated)
          ++summary->dedicated;
        else
          ++summary->shared;
      }
      for (int r = 0; r < kLabelRuleCount; ++r) summary->per_rule[r] = corpus.per_rule[r];
    }
  });
}

void hs_forest_params_default(hs_forest_params* params) {
  if (!params) return;
  const ForestParams d;
  *params = {d.n_trees, d.mtry, d.max_depth, d.min_leaf, d.seed, d.jobs};
}

hs_status hs_model_train(const char* features_csv, const hs_forest_params* params, hs_model** out) {
  return guard([&] {
    need(out, "out");
    const auto table = read_feature_csv(need_path(features_csv, "features_csv"));
    if (!table.has_labels()) fail(errc::data, "feature file has no labelled rows");
    *out = new hs_model{train_forest(table.to_dataset(), to_params(params))};
  });
}

hs_status hs_model_save(const hs_model* model, const char* path) {
  return guard([&] { save_model(need(model, "model").model, need_path(path, "path")); });
}

hs_status hs_model_load(const char* path, hs_model** out) {
  return guard([&] {
    need(out, "out");
    *out = new hs_model{load_model(need_path(path, "path"))};
  });
}

void hs_model_free(hs_model* model) { delete model; }

hs_stage hs_model_stage(const hs_model* model) {
  return model ? static_cast<hs_stage>(model->model.stage) : HS_STAGE_HOSTING;
}

size_t hs_model_feature_count(const hs_model* model) { return model ? model->model.schema.size() : 0; }

const char* hs_model_feature_name(const hs_model* model, size_t i) {
  if (!model || i >= model->model.schema.size()) return nullptr;
  return model->model.schema[i].c_str();
}

hs_status hs_model_importance(const hs_model* model, size_t i, double* out) {
  return guard([&] {
    const auto& m = need(model, "model").model;
    need(out, "out");
    if (i >= m.importances.size()) fail(errc::invalid_argument, "feature index out of range");
    *out = m.importances[i];
  });
}

hs_status hs_model_predict_proba(const hs_model* model, const double* row, size_t n, double proba[2]) {
  return guard([&] {
    const auto& m = need(model, "model").model;
    need(row, "row");
    need(proba, "proba");
    if (n != m.schema.size())
      fail(errc::schema, fmt::format("row has {} values, model expects {}", n, m.schema.size()));
    const auto p = m.predict_proba(std::span(row, n));
    proba[0] = p[0];
    proba[1] = p[1];
  });
}

hs_status hs_model_write_report(const hs_model* model, const char* path) {
  return guard([&] {
    const auto j = model_report_json(need(model, "model").model);
    std::ofstream out(need_path(path, "path"), std::ios::binary);
    if (!(out << j.dump(2) << '\n')) fail(errc::io, std::string("cannot write '") + path + "'");
  });
}

hs_status hs_eval_kfold(const char* features_csv, unsigned k, const hs_forest_params* params, int flip_positive,
                        const char* report_json_path, const char* roc_csv, hs_eval_summary* summary) {
  return guard([&] {
    const auto table = read_feature_csv(need_path(features_csv, "features_csv"));
    const auto r = kfold_eval(table.to_dataset(), k, to_params(params), flip_positive != 0);
    if (report_json_path) {
      std::ofstream out(report_json_path, std::ios::binary);
      if (!(out << report_json(r).dump(2) << '\n'))
        fail(errc::io, std::string("cannot write '") + report_json_path + "'");
    }
    if (roc_csv) write_roc_csv(roc_csv, r.pooled.roc);
    if (summary) {
      const auto& c = r.pooled.confusion;
      const auto& m = r.pooled.metrics;
      *summary = {c.tp, c.fp, c.fn, c.tn, or_nan(m.precision), or_nan(m.recall), or_nan(m.fpr), r.pooled.auc};
    }
  });
}

hs_status hs_classify_ip(const hs_pdns* pdns, const hs_whois* whois, const hs_model* m1, const hs_model* m2,
                         const char* ip, int64_t reference, double t1, double t2, hs_verdict* out) {
  return guard([&] {
    const auto& a = need(m1, "m1").model;
    const auto& b = need(m2, "m2").model;
    need(out, "out");
    check_models(a, b);
    const auto v = classify_ip(need(pdns, "pdns").store, need(whois, "whois").store, a, b,
                               IpV4::parse(need_path(ip, "ip")), reference, thresholds(t1, t2));
    if (!v.error.empty()) fail(errc::data, v.error);
    out->p_hosting = or_nan(v.p_hosting);
    out->stage1 = static_cast<int>(v.stage1);
    out->p_shared = or_nan(v.p_shared);
    out->stage2 = v.stage2 ? static_cast<int>(*v.stage2) : HS_NONE;
  });
}

hs_status hs_classify(const hs_pdns* pdns, const hs_whois* whois, const hs_model* m1, const hs_model* m2,
                      const char* ip_list_path, int64_t reference, double t1, double t2, unsigned jobs,
                      const char* verdicts_csv, const char* summary_json_path, hs_classify_summary* summary) {
  return guard([&] {
    const auto& p = need(pdns, "pdns").store;
    const auto& w = need(whois, "whois").store;
    const auto t = thresholds(t1, t2);
    const auto ips = addresses(p, &w, ip_list_path);
    const auto r = classify_batch(p, w, need(m1, "m1").model, need(m2, "m2").model, ips, reference, t, jobs);
    write_verdicts_csv(need_path(verdicts_csv, "verdicts_csv"), r.verdicts);
    if (summary_json_path) {
      std::ofstream out(summary_json_path, std::ios::binary);
      if (!(out << summary_json(r.summary, t).dump(2) << '\n'))
        fail(errc::io, std::string("cannot write '") + summary_json_path + "'");
    }
    if (summary) {
      const auto& s = r.summary;
      *summary = {s.n, s.n_hosting, s.n_nonhosting, s.n_abstain_1, s.n_shared, s.n_dedicated, s.n_abstain_2,
                  s.n_errors};
    }
  });
}

void hs_synth_config_default(hs_synth_config* config) {
  if (!config) return;
  const GenerateConfig d;
  *config = {d.seed,      d.n_nonhosting,        d.n_hosting,         d.n_dedicated,
             d.n_shared,  d.reference,           d.window_days,       d.horizon_years,
             d.privacy_fraction, d.redirect_fraction, d.malicious ? 1 : 0, nullptr};
}

char* hs_synth_default_profiles(void) {
  char* out = nullptr;
  guard([&] {
    const auto text = profiles_to_json(default_profiles()).dump(2);
    out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
  });
  return out;
}

void hs_string_free(char* s) { delete[] s; }

hs_status hs_synth_generate(const hs_synth_config* config, const char* out_dir) {
  return guard([&] {
    const auto& c = need(config, "config");
    GenerateConfig g;
    g.seed = c.seed;
    g.n_nonhosting = c.n_nonhosting;
    g.n_hosting = c.n_hosting;
    g.n_dedicated = c.n_dedicated;
    g.n_shared = c.n_shared;
    g.reference = c.reference;
    g.window_days = c.window_days;
    g.horizon_years = c.horizon_years;
    g.privacy_fraction = c.privacy_fraction;
    g.redirect_fraction = c.redirect_fraction;
    g.malicious = c.malicious != 0;
    if (c.profiles_json) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(c.profiles_json);
      } catch (const nlohmann::json::parse_error& e) {
        fail(errc::config, std::string("profiles: ") + e.what());
      }
      g.profiles = profiles_from_json(j);
    }
    write_corpus(g, need_path(out_dir, "out_dir"));
  });
}

hs_status hs_analyze(const hs_pdns* pdns, const hs_asn* asn, const hs_suffix_list* suffixes, const char* vt_feed_path,
                     const char* verdicts_csv, int min_positives, unsigned k, int strict, const char* out_dir,
                     hs_analysis_summary* summary) {
  return guard([&] {
    const auto& p = need(pdns, "pdns").store;
    const auto mal =
        filter_vt_feed(need_path(vt_feed_path, "vt_feed_path"), need(suffixes, "suffixes").list, min_positives,
                       strict != 0);
    const auto verdicts = index_verdicts(read_verdicts_csv(need_path(verdicts_csv, "verdicts_csv")));
    if (k == 0) fail(errc::invalid_argument, "k must be positive");
    const auto r = analyze(p, need(asn, "asn").db, verdicts, mal, k);
    write_analysis(r, need_path(out_dir, "out_dir"));
    if (summary)
      *summary = {r.malicious.apexes.size(), r.resolution.unresolved.size(), r.split.n_ips,
                  or_nan(r.split.pct_hosting), or_nan(r.split.pct_shared)};
  });
}

} // extern "C"
