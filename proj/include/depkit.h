/* depkit — statistical dependency parsing toolkit, C interface.
 *
 * All objects are opaque handles owned by the library; free them with the
 * matching *_free call. Functions returning a pointer return NULL on
 * failure; functions returning int return DK_OK (0) or an error code. In
 * either case dk_last_error() describes the most recent failure on the
 * calling thread.
 */

#ifndef DEPKIT_H
#define DEPKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DK_OK 0
#define DK_EUSAGE 1    /* bad arguments or configuration */
#define DK_EDATA 2     /* malformed or inconsistent input data */
#define DK_EINTERNAL 3 /* internal consistency check failed */

typedef struct dk_corpus dk_corpus;
typedef struct dk_model dk_model;
typedef struct dk_report dk_report;

const char* dk_version(void);
const char* dk_last_error(void);

/* ---- corpora ---- */

/* strict=1 validates annotated structures; use 0 for parser outputs,
 * which may be ill-formed. */
dk_corpus* dk_corpus_read(const char* path, int strict);
int dk_corpus_write(const dk_corpus* c, const char* path);
void dk_corpus_free(dk_corpus* c);
int dk_corpus_sections(const dk_corpus* c);
int dk_corpus_sentences(const dk_corpus* c);

/* First-section attenuation of training data. Word forms appearing in
 * `protect` (usually the test input) are left alone; protect may be NULL. */
dk_corpus* dk_corpus_attenuate(const dk_corpus* train, const dk_corpus* protect);

/* ---- models ---- */

/* model_name: A, B1, B2, B3, C, C_nolex, C_dist, D, X or BASELINE.
 * use_distance augments the link reductions of models A and D.
 * skip_threshold 0 disables the large-count backoff shortcut (8 restores
 * the shortcut); protect_vocab may be NULL. */
dk_model* dk_model_train(const dk_corpus* train, const char* model_name, int use_distance,
                         uint64_t skip_threshold);
dk_model* dk_model_load(const char* path);
int dk_model_save(const dk_model* m, const char* path);
void dk_model_free(dk_model* m);
const char* dk_model_name(const dk_model* m);

/* Reinterpret a model's tables under another model id (e.g. score with C
 * or X the tables trained for B3). */
dk_model* dk_model_as(const dk_model* m, const char* model_name, int use_distance);

/* "family=count" pairs describing the trained factor tables; the string
 * is owned by the model. */
const char* dk_model_summary(dk_model* m);

/* Log score of one annotated sentence (section index, sentence index)
 * under the model. */
int dk_model_score(const dk_model* m, const dk_corpus* gold, int section, int sentence,
                   double* log_score);

/* ---- parsing ---- */

typedef struct dk_parse_stats {
  long sentences;
  long pruned_sentences;   /* beam dropped something */
  long oracle_checked;     /* sentences small enough for --oracle-check */
  long oracle_mismatches;  /* chart vs brute force disagreements */
} dk_parse_stats;

/* beam_width 0 = exact search. true_tags, when non-NULL, restricts each
 * word's candidate tags to those matching the supplied tag's shortened
 * form. oracle_check_max > 0 re-parses sentences up to that length by
 * brute force and counts disagreements. workers > 1 parses sentences in
 * parallel; output order is input order either way. */
dk_corpus* dk_parse(const dk_model* m, const dk_corpus* input, int beam_width,
                    const dk_corpus* true_tags, int oracle_check_max, int workers,
                    dk_parse_stats* stats);

/* ---- evaluation ---- */

/* model may be NULL; with a model the report also covers unknown words
 * and search error. */
dk_report* dk_evaluate(const dk_corpus* gold, const dk_corpus* system, const dk_model* model);
const char* dk_report_text(const dk_report* r);
/* numeric value from the report's #kv block; DK_EDATA if missing */
int dk_report_value(const dk_report* r, const char* key, double* value);
void dk_report_free(dk_report* r);

typedef struct dk_significance {
  double mu;       /* attachment error-rate difference, B minus A */
  double p_value;  /* two-sided Monte Carlo estimate */
  long iterations;
  uint64_t seed;
} dk_significance;

int dk_compare(const dk_corpus* gold, const dk_corpus* system_a, const dk_corpus* system_b,
               long iterations, uint64_t seed, dk_significance* out);

/* ---- synthesis ---- */

dk_corpus* dk_synthesize(const dk_model* m, long sentences, int length_cap, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* DEPKIT_H */
