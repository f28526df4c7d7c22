#pragma once

#include <optional>

#include "decoder.hpp"

// Attachment/tagging metrics, per-class breakdowns, error histograms,
// contagion, search error, and the Monte Carlo significance test.

namespace depkit {

struct WordResult {
  bool correct_tag = false;
  bool correct_parent = false;
  bool is_punct = false;
  bool unknown = false;
  int8_t own_tiny = -1;     // TinyClass of the gold tag
  int8_t parent_tiny = -1;  // TinyClass of the gold parent's tag; -1 for EOS
};

struct SentenceResult {
  std::vector<WordResult> words;
  bool search_error = false;
  bool search_error_known = false;  // set when a model was supplied
};

struct ClassScore {
  long words = 0;
  long tag_correct = 0;
  long attach_correct = 0;
};

struct EvalReport {
  long sentences = 0;
  long words_nonpunct = 0;
  long tag_correct = 0;
  long attach_correct = 0;
  ClassScore by_class[kNumTinyClasses];         // by own gold tag
  ClassScore by_parent_class[kNumTinyClasses];  // by gold parent's tag
  long unknown_words = 0;
  long unknown_tag_correct = 0;
  long unknown_attach_correct = 0;
  double hist_pct[5] = {0, 0, 0, 0, 0};  // sentences with 0, <=1, ..., <=4 errors
  double p_ge1_pct = 0;
  std::optional<double> p_ge2_given_1_pct;  // omitted when no sentence errs
  std::optional<double> contagion_ratio;
  std::optional<double> search_error_pct;

  double tag_pct() const { return words_nonpunct ? 100.0 * tag_correct / words_nonpunct : 0; }
  double attach_pct() const { return words_nonpunct ? 100.0 * attach_correct / words_nonpunct : 0; }
};

// Flattens corpora into aligned sentence lists and scores each word.
// Surfaces must match; gold needs full annotation. When a model is given,
// unknown-word flags and per-sentence search errors are filled in.
std::vector<SentenceResult> score_sentences(const Corpus& gold, const Corpus& system,
                                            const TrainedModel* m = nullptr);

EvalReport aggregate(const std::vector<SentenceResult>& results);

// Aligned plain-text tables plus a machine-readable #kv block.
std::string render_report(const EvalReport& r);

struct SignificanceResult {
  double mu = 0;  // attachment error-rate difference, system B minus A
  long iterations = 0;
  double p_value = 1;
  uint64_t seed = 0;
};

// Random red/blue recoloring passes over aligned per-sentence error
// counts: how often does the recolored difference reach the observed one?
// Deterministic for a fixed seed, with one generator per pass so passes
// may run in parallel.
SignificanceResult monte_carlo_compare(const std::vector<long>& errors_a,
                                       const std::vector<long>& errors_b, long total_words,
                                       long iterations, uint64_t seed);

// Per-sentence misattachment counts (non-punctuation), for the
// significance test.
std::vector<long> attachment_errors(const std::vector<SentenceResult>& results);
long scored_words(const std::vector<SentenceResult>& results);

// Marks whole sections as test data by repeatedly sampling a sentence at
// random until at least min_test_sentences are marked.
std::pair<Corpus, Corpus> split_test_sections(const Corpus& c, int min_test_sentences,
                                              uint64_t seed);

}  // namespace depkit
