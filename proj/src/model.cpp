#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace depkit {

const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::kA: return "A";
    case ModelKind::kB1: return "B1";
    case ModelKind::kB2: return "B2";
    case ModelKind::kB3: return "B3";
    case ModelKind::kC: return "C";
    case ModelKind::kCNoLex: return "C_nolex";
    case ModelKind::kCDist: return "C_dist";
    case ModelKind::kD: return "D";
    case ModelKind::kX: return "X";
    case ModelKind::kBaseline: return "BASELINE";
  }
  return "?";
}

std::optional<ModelKind> model_from_name(std::string_view name) {
  static const ModelKind all[] = {ModelKind::kA, ModelKind::kB1, ModelKind::kB2, ModelKind::kB3,
                                  ModelKind::kC, ModelKind::kCNoLex, ModelKind::kCDist,
                                  ModelKind::kD, ModelKind::kX, ModelKind::kBaseline};
  for (ModelKind k : all)
    if (name == model_name(k)) return k;
  return std::nullopt;
}

Prepared prepare(const TrainedModel& m, const DependencyStructure& d) {
  Prepared p;
  p.n = d.size();
  p.words.assign(p.n + 1, kWordUnseen);
  p.tags.assign(p.n + 1, kTagBos);
  p.caps.assign(p.n + 1, CapClass::kDown);
  p.parents.assign(p.n + 1, 0);
  for (int i = 1; i <= p.n; ++i) {
    p.words[i] = m.vocab.find(d.words[i - 1].form);
    p.tags[i] = d.words[i - 1].tag;
    p.caps[i] = d.words[i - 1].cap;
    p.parents[i] = d.parents[i - 1];
  }
  return p;
}

DependencyStructure attenuate_for_model(const TrainedModel& m, const DependencyStructure& d) {
  DependencyStructure out = d;
  for (auto& w : out.words)
    if (m.vocab.find(w.form) == kWordUnseen) w.form = attenuate_token(w.form);
  return out;
}

// --- generative walk ----------------------------------------------------------

namespace {

// Drives a sink through every factor bundle of the model's generative
// trace on a prepared structure, in a fixed order.
template <typename Sink>
void walk(const TrainedModel& m, const Prepared& p, Sink& sink) {
  const ModelKind kind = m.kind;
  const int n = p.n;
  auto at = [&](int i) -> TW {
    if (i == n + 1) return tw_eos();
    return TW{p.words[i], p.tags[i], p.caps[i]};
  };

  if (model_has_trigram(kind)) {
    TW prev2 = tw_bos(), prev = tw_bos();
    for (int i = 1; i <= n + 1; ++i) {
      TW next = at(i);
      sink.trigram(prev2, prev, next);
      prev2 = prev;
      prev = next;
    }
  }

  if (kind == ModelKind::kX || kind == ModelKind::kBaseline) return;

  // children of k nearest-first on one side, without materializing lists
  auto each_child = [&](int k, Dir dir, auto&& fn) {
    if (dir == Dir::kLeft) {
      for (int i = k - 1; i >= 1; --i)
        if (p.parents[i] == k) fn(i);
    } else {
      for (int i = k + 1; i <= n; ++i)
        if (p.parents[i] == k) fn(i);
    }
  };

  if (model_has_children(kind)) {
    const bool with_dist = m.child_distance();
    for (int k = 1; k <= n + 1; ++k) {
      TW par = at(k);
      for (Dir dir : {Dir::kLeft, Dir::kRight}) {
        SibSig sib = sib_bokids();
        each_child(k, dir, [&](int c) {
          TW ch = at(c);
          sink.child(par, sib, dir, ch);
          if (with_dist) sink.child_dist(ch, par.t, dist_bucket(c, k));
          sib = m.sib_of(ch.t);
        });
        sink.child(par, sib, dir, std::nullopt);
      }
    }
  }

  if (model_has_parent(kind)) {
    for (int i = 1; i <= n; ++i) {
      int pp = p.parents[i];
      std::optional<TW> par;
      if (pp != n + 1) par = at(pp);
      std::optional<Dir> pdir;
      if (kind == ModelKind::kB2) pdir = pp > i ? Dir::kRight : Dir::kLeft;
      sink.parent(at(i), par, pdir);
    }
  }

  if (kind == ModelKind::kA) {
    const bool ud = m.flags.use_distance;
    for (int k = 1; k <= n + 1; ++k) {
      TW head = at(k);
      SibSig sib = sib_bokids();
      for (int i = k - 1; i >= 1; --i) {
        bool yes = p.parents[i] == k;
        sink.link(at(i), head, sib, yes, ud ? dist_bucket(i, k) : DistBucket::kNone);
        if (yes) sib = m.sib_of(p.tags[i]);
      }
      sib = sib_bokids();
      for (int i = k + 1; i <= n + 1; ++i) {
        bool yes = i <= n && p.parents[i] == k;
        sink.link(at(i), head, sib, yes, ud ? dist_bucket(i, k) : DistBucket::kNone);
        if (yes) sib = m.sib_of(p.tags[i]);
      }
    }
  }

  if (kind == ModelKind::kD) {
    const bool ud = m.flags.use_distance;
    for (int k = 1; k <= n + 1; ++k) {
      TW head = at(k);
      for (Dir dir : {Dir::kLeft, Dir::kRight}) {
        SibSig sib = sib_bokids();
        each_child(k, dir, [&](int c) {
          sink.link(at(c), head, sib, true, ud ? dist_bucket(c, k) : DistBucket::kNone);
          sib = m.sib_of(p.tags[c]);
        });
        sink.link(std::nullopt, head, sib, true, DistBucket::kNone);
      }
    }
  }
}

struct TrainSink {
  const TrainedModel& m;
  CountTable& table;
  FactorConfig fc;

  explicit TrainSink(const TrainedModel& model, CountTable& t)
      : m(model), table(t), fc(model.factor_config()) {}

  void observe_all(Query* qs, int nq) {
    for (int i = 0; i < nq; ++i) table.observe(qs[i]);
  }
  void trigram(TW prev2, TW prev, TW next) {
    Query qs[3];
    observe_all(qs, trigram_queries(fc, prev2, prev, next, qs));
  }
  void child(TW parent, SibSig sib, Dir dir, const std::optional<TW>& ch) {
    Query qs[3];
    observe_all(qs, child_queries(fc, parent, sib, dir, ch, qs));
  }
  void child_dist(TW ch, TagId parent_tag, DistBucket b) {
    Query qs[1];
    observe_all(qs, dist_queries(fc, ch, parent_tag, b, qs));
  }
  void parent(TW ch, const std::optional<TW>& par, std::optional<Dir> pdir) {
    Query qs[4];
    observe_all(qs, parent_queries(fc, ch, par, pdir, qs));
  }
  void link(const std::optional<TW>& cand, TW head, SibSig sib, bool yes, DistBucket b) {
    Query qs[1];
    observe_all(qs, link_queries(fc, cand, head, sib, yes, b, qs));
  }
};

double estimate_sum(const TrainedModel& m, const FactorConfig& fc, Query* qs, int nq) {
  double lp = 0;
  (void)fc;
  for (int i = 0; i < nq; ++i) lp += std::log(m.table->estimate(qs[i], m.smoothing));
  return lp;
}

}  // namespace

// --- incremental bundle scores -------------------------------------------------

namespace {

// The cache is consulted before any query construction; misses pay for
// building the reduction lists once per distinct bundle.
struct CacheSlot {
  BundleCache* cache = nullptr;
  BundleCache::iterator it;
  bool hit = false;

  double* lookup(BundleCache* c, const Key& ck) {
    cache = c;
    if (!cache) return nullptr;
    auto [slot, inserted] = cache->try_emplace(ck, 0.0);
    it = slot;
    hit = !inserted;
    return hit ? &slot->second : nullptr;
  }
  double store(double v) {
    if (cache) it->second = v;
    return v;
  }
};

}  // namespace

double score_trigram(const TrainedModel& m, TW prev2, TW prev, TW next, BundleCache* cache) {
  Key ck;
  ck.push(1), ck.push(prev2.t), ck.push(prev.t), ck.push(next.w), ck.push(next.t);
  ck.push(static_cast<Atom>(next.c));
  CacheSlot slot;
  if (double* v = slot.lookup(cache, ck)) return *v;
  Query qs[3];
  int nq = trigram_queries(m.factor_config(), prev2, prev, next, qs);
  return slot.store(estimate_sum(m, m.factor_config(), qs, nq));
}

double score_child(const TrainedModel& m, TW parent, SibSig sib, Dir dir,
                   const std::optional<TW>& child, BundleCache* cache) {
  Key ck;
  ck.push(2), ck.push(parent.w), ck.push(parent.t), ck.push(sib.shrt);
  ck.push(static_cast<Atom>(dir));
  if (child) {
    ck.push(child->w), ck.push(child->t), ck.push(static_cast<Atom>(child->c));
  } else {
    ck.push(kWordEokids), ck.push(kTagEokids), ck.push(0);
  }
  CacheSlot slot;
  if (double* v = slot.lookup(cache, ck)) return *v;
  Query qs[3];
  int nq = child_queries(m.factor_config(), parent, sib, dir, child, qs);
  return slot.store(estimate_sum(m, m.factor_config(), qs, nq));
}

double score_child_dist(const TrainedModel& m, TW child, TagId parent_tag, DistBucket b,
                        BundleCache* cache) {
  Key ck;
  ck.push(3), ck.push(child.w), ck.push(child.t), ck.push(parent_tag);
  ck.push(static_cast<Atom>(b));
  CacheSlot slot;
  if (double* v = slot.lookup(cache, ck)) return *v;
  Query qs[1];
  int nq = dist_queries(m.factor_config(), child, parent_tag, b, qs);
  return slot.store(estimate_sum(m, m.factor_config(), qs, nq));
}

double score_parent(const TrainedModel& m, TW child, const std::optional<TW>& parent,
                    std::optional<Dir> parent_dir, BundleCache* cache) {
  Key ck;
  ck.push(4), ck.push(child.w), ck.push(child.t);
  if (parent) {
    ck.push(parent->w), ck.push(parent->t), ck.push(static_cast<Atom>(parent->c));
  } else {
    ck.push(kWordEos), ck.push(kTagEos), ck.push(0);
  }
  ck.push(parent_dir ? static_cast<Atom>(*parent_dir) : 2u);
  CacheSlot slot;
  if (double* v = slot.lookup(cache, ck)) return *v;
  Query qs[4];
  int nq = parent_queries(m.factor_config(), child, parent, parent_dir, qs);
  return slot.store(estimate_sum(m, m.factor_config(), qs, nq));
}

double score_link(const TrainedModel& m, const std::optional<TW>& candidate, TW head, SibSig sib,
                  bool yes, DistBucket b, BundleCache* cache) {
  Key ck;
  ck.push(5);
  if (candidate) ck.push(candidate->w), ck.push(candidate->t);
  else ck.push(kWordEokids), ck.push(kTagEokids);
  ck.push(head.w), ck.push(head.t), ck.push(sib.shrt), ck.push(sib.tiny);
  ck.push(static_cast<Atom>(b)), ck.push(yes ? kAtomYes : kAtomNo);
  CacheSlot slot;
  if (double* v = slot.lookup(cache, ck)) return *v;
  Query qs[1];
  int nq = link_queries(m.factor_config(), candidate, head, sib, yes, b, qs);
  return slot.store(estimate_sum(m, m.factor_config(), qs, nq));
}

// --- scoring -------------------------------------------------------------------

namespace {

struct ScoreSink {
  const TrainedModel& m;
  BundleCache* cache;
  double total = 0;

  void trigram(TW a, TW b, TW c) { total += score_trigram(m, a, b, c, cache); }
  void child(TW p, SibSig s, Dir d, const std::optional<TW>& c) {
    total += score_child(m, p, s, d, c, cache);
  }
  void child_dist(TW c, TagId pt, DistBucket b) { total += score_child_dist(m, c, pt, b, cache); }
  void parent(TW c, const std::optional<TW>& p, std::optional<Dir> d) {
    total += score_parent(m, c, p, d, cache);
  }
  void link(const std::optional<TW>& c, TW h, SibSig s, bool yes, DistBucket b) {
    total += score_link(m, c, h, s, yes, b, cache);
  }
};

struct TraceSink {
  const TrainedModel& m;
  FactorTrace& trace;
  FactorConfig fc;

  TraceSink(const TrainedModel& model, FactorTrace& t)
      : m(model), trace(t), fc(model.factor_config()) {}

  std::string word_tag(TW w) const {
    return m.vocab.name(w.w) + "/" + m.tagset.name(w.t);
  }

  void add(Family fam, std::string detail, Query* qs, int nq) {
    TraceEntry e;
    e.family = fam;
    e.detail = std::move(detail);
    for (int i = 0; i < nq; ++i) {
      e.logp += std::log(m.table->estimate(qs[i], m.smoothing));
      e.reductions.push_back(qs[i].levels[0].cond[0].v[0]);
    }
    trace.push_back(std::move(e));
  }

  void trigram(TW a, TW b, TW c) {
    Query qs[3];
    int nq = trigram_queries(fc, a, b, c, qs);
    add(Family::kTrigram, word_tag(c) + " | " + word_tag(b) + ", " + word_tag(a), qs, nq);
  }
  void child(TW p, SibSig s, Dir d, const std::optional<TW>& c) {
    Query qs[3];
    int nq = child_queries(fc, p, s, d, c, qs);
    std::string out = c ? word_tag(*c) : "EOKIDS";
    add(Family::kChild,
        out + " | head=" + word_tag(p) + (d == Dir::kLeft ? " L" : " R"), qs, nq);
  }
  void child_dist(TW c, TagId pt, DistBucket b) {
    Query qs[1];
    int nq = dist_queries(fc, c, pt, b, qs);
    add(Family::kDist,
        std::string("dist=") + dist_name(b) + " | " + word_tag(c) + ", " + m.tagset.name(pt),
        qs, nq);
  }
  void parent(TW c, const std::optional<TW>& p, std::optional<Dir> d) {
    Query qs[4];
    int nq = parent_queries(fc, c, p, d, qs);
    std::string out = p ? word_tag(*p) : "EOS";
    add(Family::kParent, out + " | child=" + word_tag(c), qs, nq);
  }
  void link(const std::optional<TW>& c, TW h, SibSig s, bool yes, DistBucket b) {
    Query qs[1];
    int nq = link_queries(fc, c, h, s, yes, b, qs);
    std::string cand = c ? word_tag(*c) : "EOKIDS";
    add(Family::kLink,
        std::string(yes ? "yes" : "no") + " | cand=" + cand + " head=" + word_tag(h), qs, nq);
  }
};

void check_scoreable(const TrainedModel& m, const DependencyStructure& d) {
  (void)m;
  Validity v = validate_structure(d);
  if (!v.ok) throw Error(ErrorKind::kData, "cannot score ill-formed structure: " + v.reason);
}

}  // namespace

double score_structure(const TrainedModel& m, const Prepared& p, BundleCache* cache) {
  ScoreSink sink{m, cache};
  walk(m, p, sink);
  return sink.total;
}

double score_structure(const TrainedModel& m, const DependencyStructure& d, BundleCache* cache) {
  check_scoreable(m, d);
  Prepared p = prepare(m, d);
  return score_structure(m, p, cache);
}

double score_structure_traced(const TrainedModel& m, const DependencyStructure& d,
                              FactorTrace& trace) {
  check_scoreable(m, d);
  Prepared p = prepare(m, d);
  TraceSink sink(m, trace);
  walk(m, p, sink);
  double total = 0;
  for (const auto& e : trace) total += e.logp;
  return total;
}

// --- training ------------------------------------------------------------------

namespace {

template <typename K>
K modal_of(const std::map<K, uint64_t>& counts) {
  K best{};
  uint64_t best_count = 0;
  for (const auto& [k, c] : counts)
    if (c > best_count) best = k, best_count = c;
  return best;
}

}  // namespace

TrainedModel train(ModelKind kind, ModelFlags flags, const Corpus& corpus,
                   const SmoothingConfig& cfg,
                   const std::unordered_set<std::string>* original_vocab) {
  TrainedModel m;
  m.kind = kind;
  m.flags = flags;
  m.smoothing = cfg;
  m.tagset = corpus.tagset;

  std::vector<DependencyStructure> structures;
  for (const auto& sec : corpus.sections) {
    for (size_t si = 0; si < sec.sentences.size(); ++si) {
      const Sentence& s = sec.sentences[si];
      if (!s.gold_tags || !s.gold_parents)
        throw Error(ErrorKind::kData, "section " + sec.id + ", sentence " +
                                          std::to_string(si + 1) +
                                          ": training requires gold tags and parents");
      DependencyStructure d = gold_structure(s);
      Validity v = validate_structure(d);
      if (!v.ok)
        throw Error(ErrorKind::kData,
                    "section " + sec.id + ", sentence " + std::to_string(si + 1) + ": " + v.reason);
      structures.push_back(std::move(d));
    }
  }
  if (structures.empty()) throw Error(ErrorKind::kData, "training corpus has no sentences");

  // lexicon, tag dictionary, baseline statistics
  std::map<WordId, std::map<TagId, uint64_t>> form_tags;
  std::map<uint64_t, std::map<TagId, uint64_t>> formcap_tags;
  std::map<TagId, std::map<int, uint64_t>> tag_offsets;
  std::map<TagId, uint64_t> tag_totals;
  std::map<WordId, std::set<TagId>> dict;

  for (const auto& d : structures) {
    int n = d.size();
    for (int i = 1; i <= n; ++i) {
      const TaggedWord& w = d.words[i - 1];
      WordId wid = m.vocab.intern(w.form);
      dict[wid].insert(w.tag);
      form_tags[wid][w.tag]++;
      formcap_tags[wid * 4ull + static_cast<uint64_t>(w.cap)][w.tag]++;
      tag_offsets[w.tag][d.parents[i - 1] - i]++;
      tag_totals[w.tag]++;
    }
  }
  for (auto& [wid, tags] : dict)
    m.tag_dict[wid] = std::vector<TagId>(tags.begin(), tags.end());
  for (const auto& [wid, counts] : form_tags) m.baseline.modal_tag[wid] = modal_of(counts);
  for (const auto& [key, counts] : formcap_tags) m.baseline.modal_tag_cap[key] = modal_of(counts);
  for (const auto& [tag, counts] : tag_offsets) m.baseline.modal_offset[tag] = modal_of(counts);
  m.baseline.global_modal_tag = modal_of(tag_totals);

  if (original_vocab) m.known_forms = *original_vocab;
  else m.known_forms = corpus_vocabulary(corpus);

  auto table = std::make_shared<CountTable>();
  TrainSink sink(m, *table);
  for (const auto& d : structures) {
    Prepared p = prepare(m, d);
    walk(m, p, sink);
  }
  m.table = std::move(table);
  return m;
}

TrainedModel reinterpret_model(const TrainedModel& m, ModelKind kind, ModelFlags flags) {
  TrainedModel out = m;
  out.kind = kind;
  out.flags = flags;
  return out;
}

std::vector<std::pair<std::string, uint64_t>> event_summary(const TrainedModel& m) {
  std::vector<std::pair<std::string, uint64_t>> out;
  auto add = [&](const char* name, uint64_t v) {
    if (v) out.emplace_back(name, v);
  };
  add("trigram", m.table->total_for_reduction(kTriTag1));
  add("child", m.table->total_for_reduction(kChildTag1));
  add("distance", m.table->total_for_reduction(kDist1));
  add("parent", m.table->total_for_reduction(kParTag1));
  add("link", m.table->total_for_reduction(kLink1) + m.table->total_for_reduction(kLinkD1));
  return out;
}

// --- baseline ------------------------------------------------------------------

std::pair<std::vector<TagId>, std::vector<int>> baseline_parse(const TrainedModel& m,
                                                               const Sentence& s) {
  int n = s.size();
  auto caps = cap_classes(s.surfaces);
  std::vector<TagId> tags(n);
  std::vector<int> parents(n);

  for (int i = 0; i < n; ++i) {
    std::string form = canonical_form(s.surfaces[i]);
    WordId wid = m.vocab.find(form);
    auto it = m.baseline.modal_tag.find(wid);
    if (wid != kWordUnseen && it != m.baseline.modal_tag.end()) {
      tags[i] = it->second;
    } else {
      WordId sym = m.vocab.find(attenuate_token(form));
      auto cit = m.baseline.modal_tag_cap.find(sym * 4ull + static_cast<uint64_t>(caps[i]));
      if (sym != kWordUnseen && cit != m.baseline.modal_tag_cap.end()) {
        tags[i] = cit->second;
      } else {
        auto fit = m.baseline.modal_tag.find(sym);
        tags[i] = (sym != kWordUnseen && fit != m.baseline.modal_tag.end())
                      ? fit->second
                      : m.baseline.global_modal_tag;
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    auto oit = m.baseline.modal_offset.find(tags[i - 1]);
    int off = oit == m.baseline.modal_offset.end() ? 1 : oit->second;
    int t = i + off;
    if (t < 1) t = 1;
    if (t > n + 1) t = n + 1;
    if (t == i) t = off > 0 ? i + 1 : i - 1;
    if (t < 1) t = i + 1;
    parents[i - 1] = t;
  }
  return {std::move(tags), std::move(parents)};
}

// --- serialization ----------------------------------------------------------------

void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kData, "cannot write model file '" + path + "'");
  out << "depkit-model v1\n";
  out << "kind " << model_name(m.kind) << "\n";
  out << "distance " << (m.flags.use_distance ? 1 : 0) << "\n";
  out << std::setprecision(17);
  out << "smoothing " << m.smoothing.base_add_num << ' ' << m.smoothing.base_add_den << ' '
      << m.smoothing.backoff_weight << ' ' << m.smoothing.skip_threshold << "\n";

  out << "tagset " << m.tagset.size() << "\n";
  for (int i = 0; i < m.tagset.size(); ++i) {
    TagId t = m.tagset.tag_at(i);
    out << m.tagset.name(t) << ' ' << m.tagset.short_name(t) << ' ' << tiny_name(m.tagset.tiny(t))
        << "\n";
  }
  out << "vocab " << m.vocab.size() << "\n";
  for (const auto& f : m.vocab.forms()) out << f << "\n";

  std::vector<std::string> known(m.known_forms.begin(), m.known_forms.end());
  std::sort(known.begin(), known.end());
  out << "known " << known.size() << "\n";
  for (const auto& f : known) out << f << "\n";

  out << "tagdict " << m.tag_dict.size() << "\n";
  for (const auto& [wid, tags] : m.tag_dict) {
    out << wid << ' ' << tags.size();
    for (TagId t : tags) out << ' ' << t;
    out << "\n";
  }
  out << "modal " << m.baseline.modal_tag.size() << "\n";
  for (const auto& [wid, t] : m.baseline.modal_tag) out << wid << ' ' << t << "\n";
  out << "modalcap " << m.baseline.modal_tag_cap.size() << "\n";
  for (const auto& [key, t] : m.baseline.modal_tag_cap) out << key << ' ' << t << "\n";
  out << "offsets " << m.baseline.modal_offset.size() << "\n";
  for (const auto& [tag, off] : m.baseline.modal_offset) out << tag << ' ' << off << "\n";
  out << "global " << m.baseline.global_modal_tag << "\n";
  out << "counts\n";
  m.table->dump(out);
  out << "end\n";
  if (!out) throw Error(ErrorKind::kData, "error writing model file '" + path + "'");
}

namespace {

[[noreturn]] void model_error(const std::string& path, int lineno, const std::string& msg) {
  throw Error(ErrorKind::kData, path + " line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kData, "cannot open model file '" + path + "'");
  TrainedModel m;
  int lineno = 0;
  std::string line, word;

  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) model_error(path, lineno, "unexpected end of file");
    ++lineno;
    return line;
  };
  auto expect_count = [&](const char* tag) -> size_t {
    std::istringstream ss(next_line());
    std::string t;
    size_t n = 0;
    if (!(ss >> t >> n) || t != tag) model_error(path, lineno, std::string("expected '") + tag + " <n>'");
    return n;
  };

  if (next_line() != "depkit-model v1") model_error(path, lineno, "not a depkit model file");
  {
    std::istringstream ss(next_line());
    std::string name;
    if (!(ss >> word >> name) || word != "kind") model_error(path, lineno, "expected kind");
    auto k = model_from_name(name);
    if (!k) model_error(path, lineno, "unknown model '" + name + "'");
    m.kind = *k;
  }
  {
    std::istringstream ss(next_line());
    int d = 0;
    if (!(ss >> word >> d) || word != "distance") model_error(path, lineno, "expected distance");
    m.flags.use_distance = d != 0;
  }
  {
    std::istringstream ss(next_line());
    if (!(ss >> word >> m.smoothing.base_add_num >> m.smoothing.base_add_den >>
          m.smoothing.backoff_weight >> m.smoothing.skip_threshold) ||
        word != "smoothing")
      model_error(path, lineno, "expected smoothing");
  }
  size_t ntags = expect_count("tagset");
  for (size_t i = 0; i < ntags; ++i) {
    std::istringstream ss(next_line());
    std::string tag, shrt, tiny;
    if (!(ss >> tag >> shrt >> tiny)) model_error(path, lineno, "bad tagset line");
    auto tc = tiny_from_name(tiny);
    if (!tc) model_error(path, lineno, "unknown tiny class '" + tiny + "'");
    m.tagset.add(tag, shrt, *tc);
  }
  size_t nvocab = expect_count("vocab");
  for (size_t i = 0; i < nvocab; ++i) m.vocab.intern(next_line());
  size_t nknown = expect_count("known");
  for (size_t i = 0; i < nknown; ++i) m.known_forms.insert(next_line());
  size_t ndict = expect_count("tagdict");
  for (size_t i = 0; i < ndict; ++i) {
    std::istringstream ss(next_line());
    WordId wid = 0;
    size_t k = 0;
    if (!(ss >> wid >> k)) model_error(path, lineno, "bad tagdict line");
    std::vector<TagId> tags(k);
    for (auto& t : tags)
      if (!(ss >> t)) model_error(path, lineno, "truncated tagdict line");
    m.tag_dict[wid] = std::move(tags);
  }
  size_t nmodal = expect_count("modal");
  for (size_t i = 0; i < nmodal; ++i) {
    std::istringstream ss(next_line());
    WordId wid = 0;
    TagId t = 0;
    if (!(ss >> wid >> t)) model_error(path, lineno, "bad modal line");
    m.baseline.modal_tag[wid] = t;
  }
  size_t nmodalcap = expect_count("modalcap");
  for (size_t i = 0; i < nmodalcap; ++i) {
    std::istringstream ss(next_line());
    uint64_t key = 0;
    TagId t = 0;
    if (!(ss >> key >> t)) model_error(path, lineno, "bad modalcap line");
    m.baseline.modal_tag_cap[key] = t;
  }
  size_t noffsets = expect_count("offsets");
  for (size_t i = 0; i < noffsets; ++i) {
    std::istringstream ss(next_line());
    TagId t = 0;
    int off = 0;
    if (!(ss >> t >> off)) model_error(path, lineno, "bad offsets line");
    m.baseline.modal_offset[t] = off;
  }
  {
    std::istringstream ss(next_line());
    if (!(ss >> word >> m.baseline.global_modal_tag) || word != "global")
      model_error(path, lineno, "expected global");
  }
  if (next_line() != "counts") model_error(path, lineno, "expected counts");
  auto table = std::make_shared<CountTable>();
  try {
    table->load(in, lineno);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  m.table = std::move(table);
  if (next_line() != "end") model_error(path, lineno, "expected end");
  return m;
}

}  // namespace depkit
