#ifndef HOSTSCOPE_HOSTSCOPE_H
#define HOSTSCOPE_HOSTSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HS_BUILDING_LIBRARY)
#    define HS_API __declspec(dllexport)
#  else
#    define HS_API __declspec(dllimport)
#  endif
#else
#  define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_ERR_INVALID_ARGUMENT = 1,
  HS_ERR_IO = 2,
  HS_ERR_PARSE = 3,
  HS_ERR_UNSUPPORTED = 4,
  HS_ERR_VERSION = 5,
  HS_ERR_SCHEMA = 6,
  HS_ERR_CORRUPT = 7,
  HS_ERR_STAGE = 8,
  HS_ERR_DATA = 9,
  HS_ERR_CONFIG = 10,
  HS_ERR_MISSING = 11,
  HS_ERR_INTERNAL = 99
} hs_status;

typedef enum hs_stage { HS_STAGE_HOSTING = 0, HS_STAGE_DEDICATED = 1 } hs_stage;

/* stage-1 verdicts */
enum { HS_HOSTING = 0, HS_NONHOSTING = 1, HS_ABSTAIN = 2 };
/* stage-2 verdicts; HS_NONE when stage 1 did not decide hosting */
enum { HS_DEDICATED = 0, HS_SHARED = 1, HS_NONE = -1 };

typedef struct hs_suffix_list hs_suffix_list;
typedef struct hs_pdns hs_pdns;
typedef struct hs_whois hs_whois;
typedef struct hs_asn hs_asn;
typedef struct hs_model hs_model;

typedef struct hs_load_stats {
  uint64_t lines;
  uint64_t loaded;
  uint64_t malformed;
  uint64_t skipped_non_a;
  uint64_t merged;
} hs_load_stats;

HS_API const char* hs_version(void);
HS_API const char* hs_status_name(hs_status status);
/* Message of the last failed call on this thread; "" after a success. */
HS_API const char* hs_last_error(void);
HS_API uint64_t hs_derive_seed(uint64_t seed, const char* name);

/* ---- inputs ---- */

HS_API hs_status hs_suffix_list_load(const char* path, hs_suffix_list** out);
/* The suffixes every synthetic corpus is generated under. */
HS_API hs_status hs_suffix_list_synth(hs_suffix_list** out);
HS_API void hs_suffix_list_free(hs_suffix_list* list);

/* With `strict` the first malformed line fails the load; otherwise it is
   counted in `stats` (which may be NULL). */
HS_API hs_status hs_pdns_load(const char* path, const hs_suffix_list* suffixes, int strict, hs_load_stats* stats,
                              hs_pdns** out);
HS_API size_t hs_pdns_ip_count(const hs_pdns* pdns);
HS_API void hs_pdns_free(hs_pdns* pdns);

HS_API hs_status hs_whois_load(const char* path, int strict, int horizon_years, hs_load_stats* stats,
                               hs_whois** out);
HS_API void hs_whois_free(hs_whois* whois);

HS_API hs_status hs_asn_load(const char* path, int strict, hs_load_stats* stats, hs_asn** out);
HS_API void hs_asn_free(hs_asn* asn);

/* ---- features ---- */

/* Writes a feature CSV for the addresses in `ip_list_path`, or for every
   address with PDNS or WHOIS data when it is NULL. `labels_path` (truth
   JSONL or labels CSV, may be NULL) adds a label column. */
HS_API hs_status hs_features_write_csv(const hs_pdns* pdns, const hs_whois* whois, const char* ip_list_path,
                                       const char* labels_path, int64_t reference, hs_stage stage, unsigned jobs,
                                       const char* out_csv, uint64_t* n_rows);

/* Stage of a feature CSV, read from its header. */
HS_API hs_status hs_features_stage(const char* features_csv, hs_stage* out);

/* ---- labeling ---- */

typedef struct hs_label_summary {
  uint64_t n;
  uint64_t dedicated;
  uint64_t shared;
  uint64_t undecidable;
  uint64_t per_rule[6]; /* single_domain, registrant_match, registrant_mismatch,
                           redirect_convergence, manual_annotation, undecidable */
} hs_label_summary;

/* `redirects_path` and `manual_path` may be NULL; `ip_list_path` as above. */
HS_API hs_status hs_label(const hs_pdns* pdns, const hs_suffix_list* suffixes, const char* ip_list_path,
                          const char* domain_whois_path, const char* redirects_path, const char* manual_path,
                          int strict, unsigned jobs, const char* out_csv, hs_label_summary* summary);

/* ---- models ---- */

typedef struct hs_forest_params {
  uint32_t n_trees;
  uint32_t mtry; /* 0: floor(sqrt(features)) */
  uint32_t max_depth; /* 0: unbounded */
  uint32_t min_leaf;
  uint64_t seed;
  unsigned jobs;
} hs_forest_params;

HS_API void hs_forest_params_default(hs_forest_params* params);

/* Trains on the labelled rows of a feature CSV; the stage follows the header. */
HS_API hs_status hs_model_train(const char* features_csv, const hs_forest_params* params, hs_model** out);
HS_API hs_status hs_model_save(const hs_model* model, const char* path);
HS_API hs_status hs_model_load(const char* path, hs_model** out);
HS_API void hs_model_free(hs_model* model);
HS_API hs_stage hs_model_stage(const hs_model* model);
HS_API size_t hs_model_feature_count(const hs_model* model);
/* NULL when `i` is out of range. */
HS_API const char* hs_model_feature_name(const hs_model* model, size_t i);
HS_API hs_status hs_model_importance(const hs_model* model, size_t i, double* out);
/* proba[0], proba[1] follow the stage's label order
   (hosting, non-hosting) or (dedicated, shared). */
HS_API hs_status hs_model_predict_proba(const hs_model* model, const double* row, size_t n, double proba[2]);
/* Training summary as JSON. */
HS_API hs_status hs_model_write_report(const hs_model* model, const char* path);

typedef struct hs_eval_summary {
  uint64_t tp, fp, fn, tn;
  double precision; /* percent; NaN when undefined */
  double recall;
  double fpr;
  double auc;
} hs_eval_summary;

/* Stratified k-fold evaluation of a labelled feature CSV. The positive class
   is label index 0 unless `flip_positive`. Either output path may be NULL. */
HS_API hs_status hs_eval_kfold(const char* features_csv, unsigned k, const hs_forest_params* params,
                               int flip_positive, const char* report_json, const char* roc_csv,
                               hs_eval_summary* summary);

/* ---- pipeline ---- */

typedef struct hs_verdict {
  double p_hosting; /* NaN when features could not be computed */
  int stage1;       /* HS_HOSTING, HS_NONHOSTING, HS_ABSTAIN */
  double p_shared;  /* NaN unless stage1 == HS_HOSTING */
  int stage2;       /* HS_DEDICATED, HS_SHARED, HS_ABSTAIN, HS_NONE */
} hs_verdict;

HS_API hs_status hs_classify_ip(const hs_pdns* pdns, const hs_whois* whois, const hs_model* m1, const hs_model* m2,
                                const char* ip, int64_t reference, double t1, double t2, hs_verdict* out);

typedef struct hs_classify_summary {
  uint64_t n, hosting, nonhosting, abstain_1, shared, dedicated, abstain_2, errors;
} hs_classify_summary;

/* `summary_json` may be NULL. */
HS_API hs_status hs_classify(const hs_pdns* pdns, const hs_whois* whois, const hs_model* m1, const hs_model* m2,
                             const char* ip_list_path, int64_t reference, double t1, double t2, unsigned jobs,
                             const char* verdicts_csv, const char* summary_json, hs_classify_summary* summary);

/* ---- synthetic corpora ---- */

typedef struct hs_synth_config {
  uint64_t seed;
  uint32_t n_nonhosting;
  uint32_t n_hosting; /* hosting marginal: mixed dedicated and shared */
  uint32_t n_dedicated;
  uint32_t n_shared;
  int64_t reference;
  int window_days;
  int horizon_years;
  double privacy_fraction;
  double redirect_fraction;
  int malicious;
  /* JSON object overriding class profiles; NULL keeps the defaults. */
  const char* profiles_json;
} hs_synth_config;

HS_API void hs_synth_config_default(hs_synth_config* config);
/* JSON of the built-in class profiles; the caller frees it with hs_string_free. */
HS_API char* hs_synth_default_profiles(void);
HS_API void hs_string_free(char* s);
HS_API hs_status hs_synth_generate(const hs_synth_config* config, const char* out_dir);

/* ---- malicious-domain analysis ---- */

typedef struct hs_analysis_summary {
  uint64_t malicious_apexes;
  uint64_t unresolved_apexes;
  uint64_t malicious_ips;
  double pct_hosting; /* over decided addresses; NaN when none */
  double pct_shared;
} hs_analysis_summary;

HS_API hs_status hs_analyze(const hs_pdns* pdns, const hs_asn* asn, const hs_suffix_list* suffixes,
                            const char* vt_feed_path, const char* verdicts_csv, int min_positives, unsigned k,
                            int strict, const char* out_dir, hs_analysis_summary* summary);

#ifdef __cplusplus
}
#endif

#endif
