#pragma once

#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <optional>
#include <unordered_map>

#include "corpus.hpp"

// Count tables and the recursive backed-off conditional estimator.
//
// A conditional estimate is described by an ordered list of backoff
// levels, each level holding 1-3 reduced condition tuples (disjuncts).
// Tuples embed the reduction id as their first element, so distinct
// factors never collide even when their reduced values coincide.

namespace depkit {

using Atom = uint32_t;

// Reduction identities for every factor family. The numbering is part of
// the model file format.
enum ReductionId : Atom {
  kTriTag1 = 1, kTriTag2, kTriTag3,
  kTriWord1,
  kTriCap1, kTriCap2,
  kChildTag1, kChildTag2a, kChildTag2b, kChildTag3,
  kChildWord1, kChildWord2, kChildWord3,
  kChildCap1, kChildCap2,
  kParTag1, kParTag2,
  kParWord1,
  kParCap1, kParCap2,
  kParDir1, kParDir2,
  kLink1, kLink2a, kLink2b, kLink2c, kLink3, kLink4,
  kLinkD1, kLinkD2a, kLinkD2b, kLinkD2c, kLinkD3a, kLinkD3b, kLinkD4, kLinkD5,
  kDist1, kDist2,
  kReductionIdEnd,
};

const char* reduction_name(ReductionId id);
std::optional<ReductionId> reduction_from_name(std::string_view name);

// Small fixed-capacity tuple used for table keys and cache keys.
struct Key {
  static constexpr int kCap = 10;
  Atom v[kCap];
  uint8_t n = 0;

  void push(Atom a) { v[n++] = a; }
  bool operator==(const Key& o) const {
    return n == o.n && std::memcmp(v, o.v, n * sizeof(Atom)) == 0;
  }
};

struct KeyHash {
  size_t operator()(const Key& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < k.n; ++i) {
      h ^= k.v[i];
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct SmoothingConfig {
  double base_add_num = 0.005;
  double base_add_den = 0.5;
  double backoff_weight = 3.0;
  uint64_t skip_threshold = 0;  // 0 disables the large-count shortcut

  bool skip_enabled() const { return skip_threshold > 0; }
};

// One backoff level: up to three disjunct condition keys (reduction id
// embedded as the first atom of each key).
struct Level {
  uint8_t ndisjuncts = 0;
  Key cond[3];

  Key& add(ReductionId id) {
    Key& k = cond[ndisjuncts++];
    k.n = 0;
    k.push(id);
    return k;
  }
};

// Queries are reused across calls; reset() leaves stale storage in place
// and only rewinds the level count.

// A full estimate query: outcome atom plus levels from least to most
// severe. The last level must be non-disjunctive.
struct Query {
  static constexpr int kMaxLevels = 5;
  uint8_t nlevels = 0;
  Level levels[kMaxLevels];
  Atom outcome = 0;

  Level& add_level() {
    Level& l = levels[nlevels++];
    l.ndisjuncts = 0;
    return l;
  }
  void reset(Atom out) {
    nlevels = 0;
    outcome = out;
  }
};

// Event and condition counts. Training is single-writer; estimate is safe
// for concurrent readers once training stops.
class CountTable {
 public:
  // Increments the event and condition count at every level and disjunct.
  void observe(const Query& q);

  // Backed-off estimate in (0, 1] (0 reachable only via the skip
  // shortcut with a zero numerator).
  double estimate(const Query& q, const SmoothingConfig& cfg) const;

  uint64_t condition_count(const Key& cond) const;
  uint64_t event_count(const Key& cond, Atom outcome) const;

  size_t size() const { return events_.size(); }
  bool operator==(const CountTable& o) const {
    return conds_ == o.conds_ && events_ == o.events_;
  }

  void dump(std::ostream& out) const;
  void load(std::istream& in, int& lineno);

  // Events whose condition key starts with the given reduction id; used
  // by the sampler to enumerate observed outcomes.
  template <typename Fn>
  void for_each_event(Fn&& fn) const {
    for (const auto& [k, c] : events_) fn(k, c);
  }

  uint64_t total_for_reduction(ReductionId id) const;

 private:
  std::unordered_map<Key, uint64_t, KeyHash> conds_;
  std::unordered_map<Key, uint64_t, KeyHash> events_;
};

}  // namespace depkit
