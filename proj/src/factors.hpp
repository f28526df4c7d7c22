#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "counts.hpp"

// Builders for the backoff reduction lists of every factor family. Both
// training and scoring funnel through these, so the events a model trains
// on are by construction the events it reads back when scoring.

namespace depkit {

using WordId = uint32_t;

inline constexpr WordId kWordUnseen = 0;  // any form outside the vocabulary
inline constexpr WordId kWordBos = 1;
inline constexpr WordId kWordEos = 2;
inline constexpr WordId kWordBokids = 3;
inline constexpr WordId kWordEokids = 4;
inline constexpr WordId kWordFirst = 5;

inline constexpr Atom kAtomNo = 0;
inline constexpr Atom kAtomYes = 1;

// Word forms interned per model. Lookups never mutate; unknown forms map
// to kWordUnseen, which matches no trained event.
class Vocab {
 public:
  WordId intern(const std::string& form);
  WordId find(const std::string& form) const;
  const std::string& name(WordId w) const;
  int size() const { return static_cast<int>(forms_.size()); }
  const std::vector<std::string>& forms() const { return forms_; }

 private:
  std::vector<std::string> forms_;  // index i holds id kWordFirst + i
  std::unordered_map<std::string, WordId> index_;
};

// A tagged word reduced to ids, as the factor tuples see it.
struct TW {
  WordId w = kWordUnseen;
  TagId t = kTagBos;
  CapClass c = CapClass::kDown;

  bool special() const { return t < kTagFirst; }
};

inline TW tw_bos() { return {kWordBos, kTagBos, CapClass::kDown}; }
inline TW tw_eos() { return {kWordEos, kTagEos, CapClass::kDown}; }

// Shortened + tiny tag of the next-closest child; BOKIDS maps to its own
// reserved ids on both axes.
struct SibSig {
  uint16_t shrt = kTagBokids;
  uint16_t tiny = kTagBokids;
};

inline SibSig sib_bokids() { return {}; }

// Model-dependent choices that affect reduction lists.
struct FactorConfig {
  const TagSet* tagset = nullptr;
  bool lexical_child_words = true;  // false for the non-lexical C variant
  bool link_distance = false;       // distance-augmented link reductions
};

// Each builder appends 1..4 queries to `out` and returns how many.
int trigram_queries(const FactorConfig& fc, TW prev2, TW prev, TW next, Query out[3]);
int child_queries(const FactorConfig& fc, TW parent, SibSig sib, Dir dir,
                  const std::optional<TW>& child, Query out[3]);
int dist_queries(const FactorConfig& fc, TW child, TagId parent_tag, DistBucket b, Query out[1]);
int parent_queries(const FactorConfig& fc, TW child, const std::optional<TW>& parent,
                   std::optional<Dir> parent_dir, Query out[4]);
int link_queries(const FactorConfig& fc, const std::optional<TW>& candidate, TW head, SibSig sib,
                 bool yes, DistBucket b, Query out[1]);

// Bundle families, used for traces and training summaries.
enum class Family { kTrigram, kChild, kDist, kParent, kLink };
const char* family_name(Family f);

}  // namespace depkit
