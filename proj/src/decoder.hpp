#pragma once

#include <functional>
#include <optional>

#include "model.hpp"

// Exact maximization of model score over taggings and projective
// structures: a span chart for the decomposable models and a brute-force
// enumerator that doubles as the oracle and as model A's decoder.

namespace depkit {

// Two scores within this margin count as a tie; ties break by the fixed
// total order (parents lexicographically, then tag indices).
inline constexpr double kScoreTieEps = 1e-9;

inline constexpr int kEnumerationCap = 12;

struct SearchSettings {
  int beam = 0;                     // 0 = exact
  int bf_max_n = 8;                 // brute-force sentence-length bound
  uint64_t bf_max_taggings = 1u << 20;
};

struct TagLattice {
  std::vector<std::vector<TagId>> cands;  // per position 1..n at [i]; sorted
};

struct DecodeInput {
  int n = 0;
  std::vector<WordId> words;       // [1..n]; unknown forms already attenuated
  std::vector<CapClass> caps;
  std::vector<std::string> forms;  // canonical post-attenuation forms
  TagLattice lattice;
};

// Candidate tags come from the trained tag dictionary (attenuated lookup
// for unknowns). Supplied true tags restrict candidates to those sharing
// the supplied tag's shortened form; an empty intersection falls back to
// the supplied tag alone.
DecodeInput make_decode_input(const TrainedModel& m, const Sentence& s,
                              const std::optional<std::vector<TagId>>& true_tags);

struct ParseOutput {
  std::vector<TagId> tags;     // length n
  std::vector<int> parents;    // length n
  double log_score = 0;
  bool pruned = false;
  uint64_t ops = 0;            // chart combination attempts
};

// Yields every parent vector over 1..n+1 with exactly one EOS child,
// acyclic and non-crossing, each exactly once, in a fixed order.
void enumerate_projective(int n, const std::function<void(std::span<const int>)>& fn);
std::vector<std::vector<int>> enumerate_projective(int n);

// Independent count of projective structures via the span recursion;
// lives here for the CLI's self-checks (tests recompute it on their own).
uint64_t count_projective(int n);

// Argmax over the full tagging x structure space. Bounded by
// settings.bf_max_n and bf_max_taggings.
ParseOutput brute_force_parse(const TrainedModel& m, const DecodeInput& in,
                              const SearchSettings& settings = {});

// Span dynamic program; exact mode matches brute force score and
// tie-break structure. Model A does not decompose over spans and is
// rejected here.
ParseOutput dp_parse(const TrainedModel& m, const DecodeInput& in,
                     const SearchSettings& settings = {});

// True iff the model prefers gold to the decoder's output. Both
// structures are mapped through the model's attenuation before scoring.
bool detect_search_error(const TrainedModel& m, const DependencyStructure& gold,
                         const DependencyStructure& output);

// Fixed total order used for tie-breaking; true when (pa, ta) precedes.
bool struct_less(std::span<const int> pa, std::span<const TagId> ta,
                 std::span<const int> pb, std::span<const TagId> tb);

}  // namespace depkit
