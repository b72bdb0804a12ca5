#ifndef ONTOSTREAM_CAPI_H
#define ONTOSTREAM_CAPI_H

/* C interface to the ontostream library: opaque handles, integer status
 * codes, and serialized (JSON/CSV/text) results. Every string an ost_
 * function hands back through a char** out-parameter is heap-allocated and
 * must be released with ost_string_free. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ost_status {
  OST_OK = 0,
  OST_ERR_INVALID = 1,    /* bad argument, option, or window */
  OST_ERR_PARSE = 2,      /* malformed document or fact text */
  OST_ERR_DATA = 3,       /* inconsistent/unobserved data, digest mismatch,
                             too few samples */
  OST_ERR_INFEASIBLE = 4, /* scenario constraints cannot be met */
  OST_ERR_IO = 5,         /* file could not be read or written */
  OST_ERR_INTERNAL = 6
} ost_status;

typedef enum ost_format {
  OST_FORMAT_JSON = 0,
  OST_FORMAT_CSV = 1,
  OST_FORMAT_TEXT = 2
} ost_format;

typedef enum ost_weighting {
  OST_WEIGHT_UNIFORM = 0,
  OST_WEIGHT_CONSISTENT = 1,
  OST_WEIGHT_INCONSISTENT = 2
} ost_weighting;

typedef enum ost_loss { OST_LOSS_LOGISTIC = 0, OST_LOSS_HINGE = 1 } ost_loss;

/* A loaded ontology stream plus its lazily built reasoning caches. Handles
 * are single-threaded: share nothing across threads without locking. */
typedef struct ost_stream ost_stream;
/* A trained linear classifier bound to a fact catalogue digest. */
typedef struct ost_model ost_model;

/* Message describing the calling thread's most recent failure ("" if none).
 * Owned by the library; valid until the thread's next ost_* call. */
const char* ost_last_error(void);
const char* ost_version(void);
void ost_string_free(char* text);

typedef struct ost_drift_options {
  double epsilon;       /* estimate-change threshold, default 1/3 */
  double sigma_min;     /* significance cutoff, default 0.5 */
  int use_change_guard; /* skip provably driftless updates, default 1 */
} ost_drift_options;
void ost_drift_options_init(ost_drift_options* opt);

typedef struct ost_scenario_options {
  int roads;               /* default 2 */
  int horizon_snapshots;   /* default 200 */
  double drift_fraction;   /* share of updates that drift, default 0.5 */
  double drift_severity;   /* target significance per drift, default 0.3 */
  uint64_t seed;           /* default 1 */
  int classes;             /* delay regimes / labels, default 5 */
} ost_scenario_options;
void ost_scenario_options_init(ost_scenario_options* opt);

typedef struct ost_train_options {
  int reference; /* snapshot the model is anchored at; -1 = last, default -1 */
  int delta;     /* forecast horizon, default 1 */
  double kappa;  /* share of the budget reserved for drift onsets, default 0.5 */
  int budget;    /* max training snapshots, default 8 */
  int weighting; /* ost_weighting, default uniform */
  int loss;      /* ost_loss, default logistic */
  double learning_rate; /* default 0.1 */
  int epochs;           /* default 40 */
  double l2;            /* ridge strength, default 1e-3 */
  uint64_t seed;        /* shuffle seed, default 1 */
  ost_drift_options drift;
} ost_train_options;
void ost_train_options_init(ost_train_options* opt);

typedef struct ost_eval_options {
  const char* methods;  /* comma-separated method names, NULL/"" = all four */
  double train_fraction; /* chronological split, default 0.8 */
  int delta;             /* default 1 */
  int classes;           /* default 5 */
  const char* class_prefix; /* label class k reads <prefix><k>, default "Condition" */
  const char* entities;     /* comma-separated, NULL/"" = labeled roots of snapshot 0 */
  int weighting;            /* ost_weighting for the drift-aware method */
  double kappa;             /* default 0.5 */
  int budget;               /* default 12 */
  ost_drift_options drift;
  double learning_rate; /* default 0.1 */
  int epochs;           /* default 40 */
  double l2;            /* default 1e-3 */
  uint64_t seed;        /* default 1 */
  int sliding_window;   /* majority-vote window, default 5 */
} ost_eval_options;
void ost_eval_options_init(ost_eval_options* opt);

/* --- streams ------------------------------------------------------------ */

/* Loads a stream document; ontology_path (optional, may be NULL) supplies a
 * separate background document merged in front of it. */
ost_status ost_stream_open(const char* stream_path, const char* ontology_path,
                           ost_stream** out);
/* Same, from in-memory document text. */
ost_status ost_stream_parse(const char* stream_text, const char* ontology_text,
                            ost_stream** out);
/* Builds a synthetic road-traffic benchmark stream. report_json (optional)
 * receives the generation summary: drift times, realized fraction, minimum
 * significance, incidents per drift, calibration attempts. */
ost_status ost_stream_generate(const ost_scenario_options* opt, ost_stream** out,
                               char** report_json);
void ost_stream_free(ost_stream* s);
int ost_stream_size(const ost_stream* s);
/* Canonical document text for the whole stream (background + snapshots). */
ost_status ost_stream_document(const ost_stream* s, char** text_out);
ost_status ost_stream_save(const ost_stream* s, const char* path);

/* Consistency-and-entailment report. snapshot >= 0 targets one snapshot;
 * snapshot == -1 summarizes the whole stream. JSON or text. */
ost_status ost_stream_reason(ost_stream* s, int snapshot, ost_format format, char** out);

/* New / obsolete / invariant entailments between the windows
 * [before_from, before_to] and [after_from, after_to]. JSON or text. */
ost_status ost_stream_changes(ost_stream* s, int before_from, int before_to, int after_from,
                              int after_to, ost_format format, char** out);

/* Scans adjacent snapshot pairs for significant sudden prediction changes.
 * JSON, CSV, or text. */
ost_status ost_stream_drift(ost_stream* s, const ost_drift_options* opt, ost_format format,
                            char** out);

/* Entailment vector and pairwise-agreement vector of one snapshot, against
 * the stream-wide fact catalogue (exclude_fact, optional, is dropped from the
 * catalogue the way a prediction target would be). JSON only. */
ost_status ost_stream_embed(ost_stream* s, int snapshot, const char* exclude_fact,
                            char** json_out);

/* Trains a drift-aware linear classifier for target_fact ("C(a)" or
 * "r(a,b)"). */
ost_status ost_stream_train(ost_stream* s, const char* target_fact,
                            const ost_train_options* opt, ost_model** out);

/* Chronological forecasting benchmark over the configured methods. JSON,
 * CSV, or text. */
ost_status ost_stream_evaluate(ost_stream* s, const ost_eval_options* opt, ost_format format,
                               char** out);

/* --- models ------------------------------------------------------------- */

ost_status ost_model_parse(const char* json_text, ost_model** out);
ost_status ost_model_open(const char* path, ost_model** out);
ost_status ost_model_json(const ost_model* m, char** json_out);
ost_status ost_model_save(const ost_model* m, const char* path);
/* Applies the model at a snapshot. Fails with OST_ERR_DATA when the stream's
 * fact catalogue no longer matches the digest the model was trained against.
 * label_out receives 0/1; decision_out (optional) the raw decision value. */
ost_status ost_model_predict(const ost_model* m, ost_stream* s, int snapshot, int* label_out,
                             double* decision_out);
void ost_model_free(ost_model* m);

#ifdef __cplusplus
}
#endif

#endif /* ONTOSTREAM_CAPI_H */
