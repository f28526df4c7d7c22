#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "factors.hpp"

// Probability models over dependency structures: training (event
// extraction), structure scoring, and the deterministic baseline.

namespace depkit {

enum class ModelKind {
  kA,        // bigram link affinities; yes/no decision per word pair
  kB1,       // selectional preferences with supercategorization
  kB2,       // B1 plus parent-direction in the frame
  kB3,       // no supercategorization frame at all
  kC,        // recursive generation of actual children
  kCNoLex,   // C with child words mediated by tags only
  kCDist,    // C plus a desired-distance factor per child
  kD,        // selection among available words, links scored only when taken
  kX,        // trigram tagger; no links
  kBaseline,
};

const char* model_name(ModelKind k);
std::optional<ModelKind> model_from_name(std::string_view name);

struct ModelFlags {
  bool use_distance = false;  // distance-augmented link reductions (A, D)
};

inline bool model_has_trigram(ModelKind k) {
  return k == ModelKind::kA || k == ModelKind::kB1 || k == ModelKind::kB2 ||
         k == ModelKind::kB3 || k == ModelKind::kD || k == ModelKind::kX;
}
inline bool model_has_children(ModelKind k) {
  return k == ModelKind::kB1 || k == ModelKind::kB2 || k == ModelKind::kB3 ||
         k == ModelKind::kC || k == ModelKind::kCNoLex || k == ModelKind::kCDist;
}
inline bool model_has_parent(ModelKind k) { return k == ModelKind::kB1 || k == ModelKind::kB2; }
inline bool model_has_links(ModelKind k) { return k == ModelKind::kA || k == ModelKind::kD; }

struct BaselineStats {
  std::map<WordId, TagId> modal_tag;               // by form, ignoring case
  std::map<uint64_t, TagId> modal_tag_cap;         // by form*4 + cap
  std::map<TagId, int> modal_offset;               // signed parent offset by tag
  TagId global_modal_tag = kTagFirst;
};

// Immutable after training; safe to share across concurrent readers.
class TrainedModel {
 public:
  ModelKind kind = ModelKind::kC;
  ModelFlags flags;
  SmoothingConfig smoothing;
  TagSet tagset;
  Vocab vocab;                                   // forms the model trained on
  std::unordered_set<std::string> known_forms;   // pre-attenuation lexicon
  std::map<WordId, std::vector<TagId>> tag_dict; // tags seen per form
  BaselineStats baseline;
  std::shared_ptr<const CountTable> table;

  FactorConfig factor_config() const {
    return {&tagset, kind != ModelKind::kCNoLex,
            flags.use_distance && (kind == ModelKind::kA || kind == ModelKind::kD)};
  }
  bool child_distance() const { return kind == ModelKind::kCDist; }
  SibSig sib_of(TagId t) const { return {tagset.short_id(t), tagset.tiny_id(t)}; }
  bool is_known_form(const std::string& canonical) const { return known_forms.count(canonical) > 0; }
};

// Event extraction and scoring walk the same generative trace, so the
// multiset of events observed in training equals the multiset read back
// when scoring the same structure.
TrainedModel train(ModelKind kind, ModelFlags flags, const Corpus& corpus,
                   const SmoothingConfig& cfg,
                   const std::unordered_set<std::string>* original_vocab = nullptr);

// Same tables under a different model id. Factor families the new id
// needs but the old id never trained stay empty (estimates smooth).
TrainedModel reinterpret_model(const TrainedModel& m, ModelKind kind, ModelFlags flags);

// Position-indexed id view of a structure (index 0 unused).
struct Prepared {
  int n = 0;
  std::vector<WordId> words;
  std::vector<TagId> tags;
  std::vector<CapClass> caps;
  std::vector<int> parents;
};

Prepared prepare(const TrainedModel& m, const DependencyStructure& d);

// Replaces forms outside the model vocabulary with their attenuation
// symbols, as the parser sees them.
DependencyStructure attenuate_for_model(const TrainedModel& m, const DependencyStructure& d);

struct TraceEntry {
  Family family;
  std::string detail;
  double logp = 0;
  std::vector<Atom> reductions;  // level-0 reduction id per subquery
};
using FactorTrace = std::vector<TraceEntry>;

using BundleCache = std::unordered_map<Key, double, KeyHash>;

// Log score of a well-formed structure under the model's factor product.
// The baseline has no probabilistic score and returns 0.
double score_structure(const TrainedModel& m, const DependencyStructure& d,
                       BundleCache* cache = nullptr);
double score_structure(const TrainedModel& m, const Prepared& p, BundleCache* cache = nullptr);
double score_structure_traced(const TrainedModel& m, const DependencyStructure& d,
                              FactorTrace& trace);

// Incremental bundle scores, shared with the chart decoder.
double score_trigram(const TrainedModel& m, TW prev2, TW prev, TW next, BundleCache* cache);
double score_child(const TrainedModel& m, TW parent, SibSig sib, Dir dir,
                   const std::optional<TW>& child, BundleCache* cache);
double score_child_dist(const TrainedModel& m, TW child, TagId parent_tag, DistBucket b,
                        BundleCache* cache);
double score_parent(const TrainedModel& m, TW child, const std::optional<TW>& parent,
                    std::optional<Dir> parent_dir, BundleCache* cache);
double score_link(const TrainedModel& m, const std::optional<TW>& candidate, TW head, SibSig sib,
                  bool yes, DistBucket b, BundleCache* cache);

// Per-family event totals, for training summaries.
std::vector<std::pair<std::string, uint64_t>> event_summary(const TrainedModel& m);

// Most-common-tag, most-common-offset parse. The output may be ill-formed
// but can still be scored on tags and attachment.
std::pair<std::vector<TagId>, std::vector<int>> baseline_parse(const TrainedModel& m,
                                                               const Sentence& s);

void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace depkit
