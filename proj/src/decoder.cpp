#include "decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

namespace depkit {

// --- lattice -----------------------------------------------------------------

DecodeInput make_decode_input(const TrainedModel& m, const Sentence& s,
                              const std::optional<std::vector<TagId>>& true_tags) {
  int n = s.size();
  if (n < 1) throw Error(ErrorKind::kData, "empty sentence");
  if (true_tags && static_cast<int>(true_tags->size()) != n)
    throw Error(ErrorKind::kData, "true-tags length mismatch");

  DecodeInput in;
  in.n = n;
  in.words.assign(n + 1, kWordUnseen);
  in.caps.assign(n + 1, CapClass::kDown);
  in.forms.assign(n + 1, "");
  in.lattice.cands.assign(n + 1, {});

  auto caps = cap_classes(s.surfaces);

  // tags seen on any attenuation symbol, as the fallback candidate set
  std::set<TagId> morph_tags;
  for (const auto& [wid, tags] : m.tag_dict)
    if (is_attenuation_symbol(m.vocab.name(wid))) morph_tags.insert(tags.begin(), tags.end());

  for (int i = 1; i <= n; ++i) {
    std::string form = canonical_form(s.surfaces[i - 1]);
    WordId wid = m.vocab.find(form);
    if (wid == kWordUnseen || !m.tag_dict.count(wid)) {
      form = attenuate_token(form);
      wid = m.vocab.find(form);
    }
    in.forms[i] = form;
    in.words[i] = wid;
    in.caps[i] = caps[i - 1];

    std::vector<TagId> cands;
    auto dit = m.tag_dict.find(wid);
    if (wid != kWordUnseen && dit != m.tag_dict.end()) {
      cands = dit->second;
    } else if (!morph_tags.empty()) {
      cands.assign(morph_tags.begin(), morph_tags.end());
    } else {
      for (int t = 0; t < m.tagset.size(); ++t) cands.push_back(m.tagset.tag_at(t));
    }
    if (true_tags) {
      TagId want = (*true_tags)[i - 1];
      std::vector<TagId> kept;
      for (TagId t : cands)
        if (m.tagset.short_id(t) == m.tagset.short_id(want)) kept.push_back(t);
      if (kept.empty()) kept.push_back(want);
      cands = std::move(kept);
    }
    in.lattice.cands[i] = std::move(cands);
  }
  return in;
}

// --- projective enumeration -----------------------------------------------------

namespace {

using Cont = std::function<void()>;

struct Enumerator {
  std::vector<int> parents;  // [1..n]
  const std::function<void(std::span<const int>)>& emit;
  int n;

  Enumerator(int n_, const std::function<void(std::span<const int>)>& fn)
      : parents(n_ + 1, 0), emit(fn), n(n_) {}

  // assign parents over [lo..hi] as consecutive subtree blocks, each
  // block's root attached to `anchor`
  void blocks(int lo, int hi, int anchor, const Cont& k) {
    if (lo > hi) {
      k();
      return;
    }
    for (int b = lo; b <= hi; ++b) {
      for (int q = lo; q <= b; ++q) {
        parents[q] = anchor;
        tree(lo, b, q, [this, b, hi, anchor, &k] { blocks(b + 1, hi, anchor, k); });
      }
    }
  }

  // assign parents within [lo..hi] given its root q (parents[q] preset)
  void tree(int lo, int hi, int q, const Cont& k) {
    blocks(lo, q - 1, q, [this, q, hi, &k] { blocks(q + 1, hi, q, k); });
  }

  void run() {
    for (int r = 1; r <= n; ++r) {
      parents[r] = n + 1;
      tree(1, n, r, [this] { emit(std::span<const int>(parents.data() + 1, static_cast<size_t>(n))); });
    }
  }
};

}  // namespace

void enumerate_projective(int n, const std::function<void(std::span<const int>)>& fn) {
  if (n < 1) throw Error(ErrorKind::kUsage, "enumerate_projective needs n >= 1");
  if (n > kEnumerationCap)
    throw Error(ErrorKind::kData,
                "sentence length " + std::to_string(n) + " exceeds enumeration cap");
  Enumerator e(n, fn);
  e.run();
}

std::vector<std::vector<int>> enumerate_projective(int n) {
  std::vector<std::vector<int>> out;
  enumerate_projective(n, [&](std::span<const int> p) { out.emplace_back(p.begin(), p.end()); });
  return out;
}

uint64_t count_projective(int n) {
  // S(m): trees over an m-word window; L(a): ways to split a words into
  // attached subtree blocks
  std::vector<uint64_t> s(n + 1, 0), l(n + 1, 0);
  l[0] = 1;
  for (int m = 1; m <= n; ++m) {
    uint64_t total = 0;
    for (int r = 1; r <= m; ++r) total += l[r - 1] * l[m - r];
    s[m] = total;
    uint64_t la = 0;
    for (int p = 1; p <= m; ++p) la += s[p] * l[m - p];
    l[m] = la;
  }
  return s[n];
}

// --- tie-break order --------------------------------------------------------------

namespace {

// -1, 0 (tie), +1; two impossible (-inf) scores tie so the structure
// order decides deterministically
int score_compare(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && a < 0 && b < 0) return 0;
  if (a > b + kScoreTieEps) return 1;
  if (a < b - kScoreTieEps) return -1;
  return 0;
}

}  // namespace

bool struct_less(std::span<const int> pa, std::span<const TagId> ta,
                 std::span<const int> pb, std::span<const TagId> tb) {
  for (size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  }
  for (size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] != tb[i]) return ta[i] < tb[i];
  }
  return false;
}

// --- brute force -------------------------------------------------------------------

ParseOutput brute_force_parse(const TrainedModel& m, const DecodeInput& in,
                              const SearchSettings& settings) {
  int n = in.n;
  if (n > settings.bf_max_n)
    throw Error(ErrorKind::kData, "sentence too long for brute force (n=" + std::to_string(n) + ")");
  uint64_t taggings = 1;
  for (int i = 1; i <= n; ++i) {
    taggings *= in.lattice.cands[i].size();
    if (taggings > settings.bf_max_taggings)
      throw Error(ErrorKind::kData, "tagging space exceeds brute-force bound");
  }

  auto structures = enumerate_projective(n);

  Prepared p;
  p.n = n;
  p.words = in.words;
  p.caps = in.caps;
  p.tags.assign(n + 1, kTagBos);
  p.parents.assign(n + 1, 0);

  BundleCache cache;
  bool have = false;
  double best_score = 0;
  std::vector<TagId> best_tags;
  std::vector<int> best_parents;

  std::vector<size_t> odo(n + 1, 0);
  for (;;) {
    for (int i = 1; i <= n; ++i) p.tags[i] = in.lattice.cands[i][odo[i]];
    for (const auto& sv : structures) {
      for (int i = 1; i <= n; ++i) p.parents[i] = sv[i - 1];
      double sc = score_structure(m, p, &cache);
      bool take = false;
      int cmp = have ? score_compare(sc, best_score) : 1;
      if (cmp > 0) {
        take = true;
      } else if (cmp == 0) {
        take = struct_less(std::span<const int>(sv),
                           std::span<const TagId>(p.tags.data() + 1, static_cast<size_t>(n)),
                           std::span<const int>(best_parents),
                           std::span<const TagId>(best_tags));
      }
      if (take) {
        have = true;
        best_score = sc;
        best_parents = sv;
        best_tags.assign(p.tags.begin() + 1, p.tags.end());
      }
    }
    int i = n;
    for (; i >= 1; --i) {
      if (++odo[i] < in.lattice.cands[i].size()) break;
      odo[i] = 0;
    }
    if (i < 1) break;
  }

  ParseOutput out;
  out.tags = std::move(best_tags);
  out.parents = std::move(best_parents);
  out.log_score = best_score;
  return out;
}

// --- span chart --------------------------------------------------------------------

namespace {

struct Sig {
  uint16_t tag_i, tag_j;        // endpoint tags
  uint16_t adj_i, adj_j;        // tags adjacent inside the span (0 if unused)
  uint16_t sib_i_s, sib_i_t;    // outermost child of i facing in: short, tiny
  uint16_t sib_j_s, sib_j_t;
  uint8_t flags;                // bit0: i's parent inside; bit1: j's parent inside

  bool operator==(const Sig&) const = default;
};

struct SigHash {
  size_t operator()(const Sig& s) const {
    uint64_t h = 1469598103934665603ull;
    const unsigned char* b = reinterpret_cast<const unsigned char*>(&s);
    for (size_t i = 0; i < sizeof(Sig); ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct Item {
  double score = 0;
  std::vector<uint16_t> parents;  // [0..n+1], 0 = undecided
  std::vector<TagId> tags;        // [0..n+1]; meaningful inside the span
};

// tie-break between items of one signature: the decided position sets
// coincide, so elementwise comparison realizes the total order
bool item_less(const Item& a, const Item& b) {
  if (a.parents != b.parents)
    return std::lexicographical_compare(a.parents.begin() + 1, a.parents.end(),
                                        b.parents.begin() + 1, b.parents.end());
  return std::lexicographical_compare(a.tags.begin() + 1, a.tags.end(), b.tags.begin() + 1,
                                      b.tags.end());
}

bool item_better(const Item& cand, const Item& incumbent) {
  int cmp = score_compare(cand.score, incumbent.score);
  if (cmp != 0) return cmp > 0;
  return item_less(cand, incumbent);
}

using Cell = std::unordered_map<Sig, Item, SigHash>;

struct Chart {
  const TrainedModel& m;
  const DecodeInput& in;
  int n;
  bool tri, childfam, linkfam, parfam, cdist, link_dist;
  BundleCache cache;
  uint64_t ops = 0;
  bool pruned = false;
  std::vector<Cell> cells;  // index i * (n + 2) + j

  Chart(const TrainedModel& model, const DecodeInput& input)
      : m(model), in(input), n(input.n) {
    ModelKind k = m.kind;
    tri = model_has_trigram(k);
    childfam = model_has_children(k);
    linkfam = k == ModelKind::kD;
    parfam = model_has_parent(k);
    cdist = m.child_distance();
    link_dist = m.factor_config().link_distance;
    cells.assign(static_cast<size_t>(n + 2) * (n + 2), {});
  }

  Cell& cell(int i, int j) { return cells[static_cast<size_t>(i) * (n + 2) + j]; }

  TW tw(int pos, TagId t) const {
    if (pos == n + 1) return tw_eos();
    if (pos == 0) return tw_bos();
    return TW{in.words[pos], t, in.caps[pos]};
  }

  static SibSig sib(const Sig& s, bool left_endpoint) {
    return left_endpoint ? SibSig{s.sib_i_s, s.sib_i_t} : SibSig{s.sib_j_s, s.sib_j_t};
  }

  void upsert(Cell& c, const Sig& sig, Item&& item) {
    auto it = c.find(sig);
    if (it == c.end()) c.emplace(sig, std::move(item));
    else if (item_better(item, it->second)) it->second = std::move(item);
  }

  double stop_score(TW head, SibSig s, Dir dir) {
    double sc = 0;
    if (childfam) sc += score_child(m, head, s, dir, std::nullopt, &cache);
    if (linkfam) sc += score_link(m, std::nullopt, head, s, true, DistBucket::kNone, &cache);
    return sc;
  }

  double link_score(int child_pos, TagId child_tag, int parent_pos, TagId parent_tag, SibSig s) {
    TW c = tw(child_pos, child_tag);
    TW h = tw(parent_pos, parent_tag);
    Dir dir = child_pos > parent_pos ? Dir::kRight : Dir::kLeft;  // child side of the head
    double sc = 0;
    if (childfam) {
      sc += score_child(m, h, s, dir, c, &cache);
      if (cdist) sc += score_child_dist(m, c, h.t, dist_bucket(child_pos, parent_pos), &cache);
    }
    if (linkfam)
      sc += score_link(m, c, h, s, true,
                       link_dist ? dist_bucket(child_pos, parent_pos) : DistBucket::kNone, &cache);
    if (parfam) {
      std::optional<TW> par;
      if (parent_pos != n + 1) par = h;
      std::optional<Dir> pdir;
      if (m.kind == ModelKind::kB2) pdir = parent_pos > child_pos ? Dir::kRight : Dir::kLeft;
      sc += score_parent(m, c, par, pdir, &cache);
    }
    return sc;
  }

  void seed(int p) {
    Cell& c = cell(p, p + 1);
    const std::vector<TagId> eos{kTagEos};
    const auto& left = in.lattice.cands[p];
    const auto& right = p + 1 <= n ? in.lattice.cands[p + 1] : eos;
    for (TagId ti : left) {
      for (TagId tj : right) {
        double sc = 0;
        if (tri && p == 1) {
          sc += score_trigram(m, tw_bos(), tw_bos(), tw(1, ti), &cache);
          sc += score_trigram(m, tw_bos(), tw(1, ti), tw(2, tj), &cache);
        }
        Sig sig{};
        sig.tag_i = ti;
        sig.tag_j = tj;
        sig.adj_i = tri ? tj : 0;
        sig.adj_j = tri ? ti : 0;
        sig.sib_i_s = sig.sib_i_t = kTagBokids;
        sig.sib_j_s = sig.sib_j_t = kTagBokids;
        sig.flags = 0;
        Item item;
        item.score = sc;
        item.parents.assign(n + 2, 0);
        item.tags.assign(n + 2, 0);
        item.tags[p] = ti;
        item.tags[p + 1] = tj;
        upsert(c, sig, std::move(item));
      }
    }
  }

  // add, where permitted, a link between the endpoints of [i, j]
  void apply_links(int i, int j) {
    if (m.kind == ModelKind::kX) return;
    Cell& c = cell(i, j);
    std::vector<std::pair<Sig, const Item*>> snapshot;
    snapshot.reserve(c.size());
    for (const auto& [sig, item] : c) snapshot.emplace_back(sig, &item);

    std::vector<std::pair<Sig, Item>> fresh;
    for (const auto& [sig, item] : snapshot) {
      if (sig.flags != 0) continue;  // linked endpoints would cycle
      ++ops;
      if (j != n + 1) {  // i takes j as a right child
        Sig ns = sig;
        ns.flags = 2;
        ns.sib_i_s = m.tagset.short_id(sig.tag_j);
        ns.sib_i_t = m.tagset.tiny_id(sig.tag_j);
        Item ni = *item;
        ni.score += link_score(j, sig.tag_j, i, sig.tag_i, sib(sig, true));
        ni.parents[j] = static_cast<uint16_t>(i);
        fresh.emplace_back(ns, std::move(ni));
      }
      // j takes i as a left child; EOS takes exactly one child
      if (j != n + 1 || sig.sib_j_s == kTagBokids) {
        Sig ns = sig;
        ns.flags = 1;
        ns.sib_j_s = m.tagset.short_id(sig.tag_i);
        ns.sib_j_t = m.tagset.tiny_id(sig.tag_i);
        Item ni = *item;
        ni.score += link_score(i, sig.tag_i, j, sig.tag_j, sib(sig, false));
        ni.parents[i] = static_cast<uint16_t>(j);
        fresh.emplace_back(ns, std::move(ni));
      }
    }
    for (auto& [sig, item] : fresh) upsert(c, sig, std::move(item));
  }

  void combine(int i, int k, int j) {
    Cell& left = cell(i, k);
    Cell& right = cell(k, j);
    if (left.empty() || right.empty()) return;
    Cell& out = cell(i, j);
    for (const auto& [ls, li] : left) {
      for (const auto& [rs, ri] : right) {
        ++ops;
        if (ls.tag_j != rs.tag_i) continue;
        // the sealed junction word needs its parent on exactly one side
        int kflags = ((ls.flags >> 1) & 1) + (rs.flags & 1);
        if (kflags != 1) continue;
        TagId tk = ls.tag_j;
        TW twk = tw(k, tk);
        double sc = li.score + ri.score;
        if (tri)
          sc += score_trigram(m, tw(k - 1, ls.adj_j), twk, tw(k + 1, rs.adj_i), &cache);
        sc += stop_score(twk, SibSig{ls.sib_j_s, ls.sib_j_t}, Dir::kLeft);
        sc += stop_score(twk, SibSig{rs.sib_i_s, rs.sib_i_t}, Dir::kRight);

        Sig ns{};
        ns.tag_i = ls.tag_i;
        ns.tag_j = rs.tag_j;
        ns.adj_i = ls.adj_i;
        ns.adj_j = rs.adj_j;
        ns.sib_i_s = ls.sib_i_s;
        ns.sib_i_t = ls.sib_i_t;
        ns.sib_j_s = rs.sib_j_s;
        ns.sib_j_t = rs.sib_j_t;
        ns.flags = static_cast<uint8_t>((ls.flags & 1) | (rs.flags & 2));

        Item ni;
        ni.score = sc;
        ni.parents = li.parents;
        for (int p = k; p <= j; ++p)
          if (ri.parents[p]) ni.parents[p] = ri.parents[p];
        ni.tags = li.tags;
        for (int p = k; p <= j; ++p)
          if (ri.tags[p]) ni.tags[p] = ri.tags[p];
        upsert(out, ns, std::move(ni));
      }
    }
  }

  // keep the top `width` items per endpoint-flags group; items with
  // different flags continue differently and never compete
  void prune(int i, int j, int width) {
    Cell& c = cell(i, j);
    if (width <= 0 || static_cast<int>(c.size()) <= width) return;
    std::vector<std::pair<Sig, Item>> groups[3];
    for (auto& [sig, item] : c) groups[sig.flags == 2 ? 2 : sig.flags].emplace_back(sig, std::move(item));
    c.clear();
    for (auto& group : groups) {
      if (static_cast<int>(group.size()) > width) {
        std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
          if (a.second.score != b.second.score) return a.second.score > b.second.score;
          return item_less(a.second, b.second);
        });
        group.resize(width);
        pruned = true;
      }
      for (auto& [sig, item] : group) c.emplace(sig, std::move(item));
    }
  }

  std::optional<ParseOutput> finish() {
    const bool structural = m.kind != ModelKind::kX;
    Cell& top = cell(1, n + 1);
    const Sig* best_sig = nullptr;
    const Item* best = nullptr;
    double best_score = 0;
    for (const auto& [sig, item] : top) {
      if (structural) {
        if (sig.flags != 1) continue;               // word 1 parented, EOS not
        if (sig.sib_j_s == kTagBokids) continue;    // EOS must have taken its child
      }
      double sc = item.score;
      TW tw1 = tw(1, sig.tag_i);
      sc += stop_score(tw1, sib_bokids(), Dir::kLeft);
      sc += stop_score(tw1, SibSig{sig.sib_i_s, sig.sib_i_t}, Dir::kRight);
      sc += stop_score(tw_eos(), SibSig{sig.sib_j_s, sig.sib_j_t}, Dir::kLeft);
      sc += stop_score(tw_eos(), sib_bokids(), Dir::kRight);
      bool take = false;
      int cmp = best ? score_compare(sc, best_score) : 1;
      if (cmp > 0) {
        take = true;
      } else if (cmp == 0) {
        take = item_less(item, *best);
      }
      if (take) {
        best_sig = &sig;
        best = &item;
        best_score = sc;
      }
    }
    if (!best) return std::nullopt;
    ParseOutput out;
    out.log_score = best_score;
    out.tags.assign(best->tags.begin() + 1, best->tags.begin() + 1 + n);
    out.parents.resize(n);
    for (int i = 1; i <= n; ++i) out.parents[i - 1] = best->parents[i];
    (void)best_sig;
    return out;
  }

  std::optional<ParseOutput> run(int beam) {
    for (int p = 1; p <= n; ++p) {
      seed(p);
      apply_links(p, p + 1);
      prune(p, p + 1, beam);
    }
    for (int w = 2; w <= n; ++w) {
      for (int i = 1; i + w <= n + 1; ++i) {
        int j = i + w;
        for (int k = i + 1; k < j; ++k) combine(i, k, j);
        apply_links(i, j);
        prune(i, j, beam);
      }
    }
    return finish();
  }
};

// Pure trigram Viterbi over the lattice; parents come out as the chain
// into EOS, the tie-break minimum among structures (which model X scores
// identically).
ParseOutput viterbi_tags(const TrainedModel& m, const DecodeInput& in) {
  int n = in.n;
  struct State {
    double score;
    std::vector<TagId> tags;  // decided prefix
  };
  using StateKey = uint32_t;  // prev2 * 65536 + prev
  std::unordered_map<StateKey, State> states;
  states[kTagBos * 65536u + kTagBos] = {0.0, {}};
  BundleCache cache;

  auto tw_at = [&](int pos, TagId t) -> TW {
    if (pos <= 0) return tw_bos();
    if (pos == n + 1) return tw_eos();
    return TW{in.words[pos], t, in.caps[pos]};
  };

  for (int pos = 1; pos <= n + 1; ++pos) {
    std::unordered_map<StateKey, State> next;
    const std::vector<TagId> eos{kTagEos};
    const auto& cands = pos <= n ? in.lattice.cands[pos] : eos;
    for (const auto& [key, st] : states) {
      TagId prev2 = static_cast<TagId>(key >> 16), prev = static_cast<TagId>(key & 0xffff);
      for (TagId t : cands) {
        double sc = st.score +
                    score_trigram(m, tw_at(pos - 2, prev2), tw_at(pos - 1, prev), tw_at(pos, t),
                                  &cache);
        StateKey nk = static_cast<uint32_t>(prev) * 65536u + t;
        auto it = next.find(nk);
        bool take = false;
        int cmp = it == next.end() ? 1 : score_compare(sc, it->second.score);
        if (cmp > 0) {
          take = true;
        } else if (cmp == 0) {
          take = std::lexicographical_compare(st.tags.begin(), st.tags.end(),
                                              it->second.tags.begin(), it->second.tags.end());
        }
        if (take) {
          State ns{sc, st.tags};
          ns.tags.push_back(t);
          next[nk] = std::move(ns);
        }
      }
    }
    states = std::move(next);
  }

  const State* best = nullptr;
  for (const auto& [key, st] : states) {
    int cmp = best ? score_compare(st.score, best->score) : 1;
    if (cmp > 0) {
      best = &st;
    } else if (cmp == 0 &&
               std::lexicographical_compare(st.tags.begin(), st.tags.end(), best->tags.begin(),
                                            best->tags.end())) {
      best = &st;
    }
  }
  ParseOutput out;
  out.tags.assign(best->tags.begin(), best->tags.begin() + n);  // last entry is EOS
  out.parents.resize(n);
  for (int i = 1; i <= n; ++i) out.parents[i - 1] = i + 1;
  out.log_score = best->score;
  return out;
}

}  // namespace

ParseOutput dp_parse(const TrainedModel& m, const DecodeInput& in, const SearchSettings& settings) {
  if (m.kind == ModelKind::kA || m.kind == ModelKind::kBaseline)
    throw Error(ErrorKind::kUsage,
                std::string("model ") + model_name(m.kind) + " has no span decoder");
  for (int i = 1; i <= in.n; ++i)
    if (in.lattice.cands[i].empty())
      throw Error(ErrorKind::kInternal, "empty lattice position " + std::to_string(i));

  if (m.kind == ModelKind::kX) return viterbi_tags(m, in);

  int beam = settings.beam;
  for (;;) {
    Chart chart(m, in);
    auto out = chart.run(beam);
    if (out) {
      out->pruned = chart.pruned;
      out->ops = chart.ops;
      if (beam != settings.beam) out->pruned = true;
      return *out;
    }
    // beam too narrow to complete any structure; widen and retry
    if (beam == 0)
      throw Error(ErrorKind::kInternal, "chart completed without a full parse");
    beam = beam * 4;
    if (beam > (in.n + 2) * 64) beam = 0;
  }
}

bool detect_search_error(const TrainedModel& m, const DependencyStructure& gold,
                         const DependencyStructure& output) {
  if (gold.size() != output.size())
    throw Error(ErrorKind::kData, "search-error check on mismatched sentences");
  double gs = score_structure(m, attenuate_for_model(m, gold));
  double os = score_structure(m, attenuate_for_model(m, output));
  return gs > os + kScoreTieEps;
}

}  // namespace depkit
