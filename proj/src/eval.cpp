#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace depkit {

namespace {

std::vector<const Sentence*> flatten(const Corpus& c) {
  std::vector<const Sentence*> out;
  for (const auto& sec : c.sections)
    for (const auto& s : sec.sentences) out.push_back(&s);
  return out;
}

}  // namespace

std::vector<SentenceResult> score_sentences(const Corpus& gold, const Corpus& system,
                                            const TrainedModel* m) {
  if (!(gold.tagset == system.tagset))
    throw Error(ErrorKind::kData, "gold and system corpora use different tag sets");
  auto gs = flatten(gold);
  auto ss = flatten(system);
  if (gs.size() != ss.size())
    throw Error(ErrorKind::kData, "gold and system corpora have different sentence counts");

  std::vector<SentenceResult> results;
  results.reserve(gs.size());
  for (size_t si = 0; si < gs.size(); ++si) {
    const Sentence& g = *gs[si];
    const Sentence& s = *ss[si];
    if (g.size() != s.size() || g.surfaces != s.surfaces)
      throw Error(ErrorKind::kData, "sentence " + std::to_string(si + 1) + " is misaligned");
    if (!g.gold_tags || !g.gold_parents)
      throw Error(ErrorKind::kData, "gold sentence " + std::to_string(si + 1) + " lacks annotation");
    if (!s.gold_tags || !s.gold_parents)
      throw Error(ErrorKind::kData,
                  "system sentence " + std::to_string(si + 1) + " lacks predictions");

    const TagSet& ts = gold.tagset;
    int n = g.size();
    SentenceResult r;
    r.words.resize(n);
    for (int i = 0; i < n; ++i) {
      WordResult& w = r.words[i];
      TagId gt = (*g.gold_tags)[i];
      w.correct_tag = (*s.gold_tags)[i] == gt;
      w.correct_parent = (*s.gold_parents)[i] == (*g.gold_parents)[i];
      w.own_tiny = static_cast<int8_t>(ts.tiny(gt));
      w.is_punct = ts.tiny(gt) == TinyClass::kPunctuation;
      int gp = (*g.gold_parents)[i];
      w.parent_tiny = gp == n + 1 ? -1 : static_cast<int8_t>(ts.tiny((*g.gold_tags)[gp - 1]));
      if (m) w.unknown = !m->is_known_form(canonical_form(g.surfaces[i]));
    }
    if (m) {
      r.search_error_known = true;
      DependencyStructure sys_struct;
      sys_struct.parents = *s.gold_parents;
      auto caps = cap_classes(s.surfaces);
      for (int i = 0; i < n; ++i)
        sys_struct.words.push_back({canonical_form(s.surfaces[i]), (*s.gold_tags)[i], caps[i]});
      if (validate_structure(sys_struct).ok)
        r.search_error = detect_search_error(*m, gold_structure(g), sys_struct);
    }
    results.push_back(std::move(r));
  }
  return results;
}

EvalReport aggregate(const std::vector<SentenceResult>& results) {
  if (results.empty()) throw Error(ErrorKind::kData, "nothing to aggregate");
  EvalReport r;
  r.sentences = static_cast<long>(results.size());

  long err_hist[5] = {0, 0, 0, 0, 0};
  long ge1 = 0, ge2 = 0;
  long se_known = 0, se = 0;
  for (const auto& sr : results) {
    long errs = 0;
    for (const auto& w : sr.words) {
      if (w.is_punct) continue;
      ++r.words_nonpunct;
      r.tag_correct += w.correct_tag;
      r.attach_correct += w.correct_parent;
      if (!w.correct_parent) ++errs;
      ClassScore& cs = r.by_class[w.own_tiny];
      ++cs.words;
      cs.tag_correct += w.correct_tag;
      cs.attach_correct += w.correct_parent;
      if (w.parent_tiny >= 0) {
        ClassScore& ps = r.by_parent_class[w.parent_tiny];
        ++ps.words;
        ps.tag_correct += w.correct_tag;
        ps.attach_correct += w.correct_parent;
      }
      if (w.unknown) {
        ++r.unknown_words;
        r.unknown_tag_correct += w.correct_tag;
        r.unknown_attach_correct += w.correct_parent;
      }
    }
    for (int k = 0; k < 5; ++k)
      if (errs <= k) ++err_hist[k];
    if (errs >= 1) ++ge1;
    if (errs >= 2) ++ge2;
    if (sr.search_error_known) {
      ++se_known;
      se += sr.search_error;
    }
  }
  for (int k = 0; k < 5; ++k) r.hist_pct[k] = 100.0 * err_hist[k] / r.sentences;
  r.p_ge1_pct = 100.0 * ge1 / r.sentences;
  if (ge1 > 0) {
    r.p_ge2_given_1_pct = 100.0 * ge2 / ge1;
    r.contagion_ratio = *r.p_ge2_given_1_pct / r.p_ge1_pct;
  }
  if (se_known > 0) r.search_error_pct = 100.0 * se / se_known;
  return r;
}

namespace {

std::string pct(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << v;
  return ss.str();
}

std::string pair_pct(const ClassScore& c) {
  if (c.words == 0) return "-";
  return pct(100.0 * c.tag_correct / c.words) + "/" + pct(100.0 * c.attach_correct / c.words);
}

void kv(std::ostringstream& out, const std::string& key, double v) {
  out << "#kv " << key << ' ' << std::setprecision(10) << v << '\n';
}

}  // namespace

std::string render_report(const EvalReport& r) {
  static const char* kClassHead[6] = {"N", "V", "NMod", "Adv", "Prep", "Wh"};
  std::ostringstream out;
  auto col = [&](const std::string& s, int w = 12) {
    out << std::setw(w) << s;
  };

  out << "tag / attach scores (non-punctuation), by class of the word's own tag\n";
  col("", 16);
  col("Non-punc");
  for (const char* h : kClassHead) col(h);
  col("Unknown");
  out << '\n';
  col("words", 16);
  col(std::to_string(r.words_nonpunct));
  for (int c = 0; c < 6; ++c) col(std::to_string(r.by_class[c].words));
  col(std::to_string(r.unknown_words));
  out << '\n';
  col("tag/attach", 16);
  col(pct(r.tag_pct()) + "/" + pct(r.attach_pct()));
  for (int c = 0; c < 6; ++c) col(pair_pct(r.by_class[c]));
  if (r.unknown_words)
    col(pct(100.0 * r.unknown_tag_correct / r.unknown_words) + "/" +
        pct(100.0 * r.unknown_attach_correct / r.unknown_words));
  else
    col("-");
  out << "\n\n";

  out << "attach score by class of the word's true parent\n";
  col("", 16);
  for (const char* h : kClassHead) col(h);
  out << '\n';
  col("attach", 16);
  for (int c = 0; c < 6; ++c) {
    const ClassScore& cs = r.by_parent_class[c];
    col(cs.words ? pct(100.0 * cs.attach_correct / cs.words) : "-");
  }
  out << "\n\n";

  out << "sentences with few attachment errors (%), punctuation not counted\n";
  col("", 16);
  col("0"), col("<=1"), col("<=2"), col("<=3"), col("<=4");
  out << '\n';
  col("sentences", 16);
  for (double h : r.hist_pct) col(pct(h));
  out << "\n\n";

  out << "contagion: P(>=1 err) = " << pct(r.p_ge1_pct) << "%";
  if (r.p_ge2_given_1_pct)
    out << "   P(>=2 | >=1) = " << pct(*r.p_ge2_given_1_pct)
        << "%   ratio = " << std::fixed << std::setprecision(2) << *r.contagion_ratio;
  out << '\n';
  if (r.search_error_pct) out << "search error: " << pct(*r.search_error_pct) << "%\n";
  out << '\n';

  kv(out, "sentences", static_cast<double>(r.sentences));
  kv(out, "words_nonpunct", static_cast<double>(r.words_nonpunct));
  kv(out, "tag_pct", r.tag_pct());
  kv(out, "attach_pct", r.attach_pct());
  kv(out, "unknown_words", static_cast<double>(r.unknown_words));
  if (r.unknown_words) {
    kv(out, "unknown_tag_pct", 100.0 * r.unknown_tag_correct / r.unknown_words);
    kv(out, "unknown_attach_pct", 100.0 * r.unknown_attach_correct / r.unknown_words);
  }
  for (int c = 0; c < 6; ++c) {
    const ClassScore& cs = r.by_class[c];
    if (!cs.words) continue;
    kv(out, std::string("class_") + kClassHead[c] + "_tag_pct", 100.0 * cs.tag_correct / cs.words);
    kv(out, std::string("class_") + kClassHead[c] + "_attach_pct",
       100.0 * cs.attach_correct / cs.words);
  }
  for (int c = 0; c < 6; ++c) {
    const ClassScore& cs = r.by_parent_class[c];
    if (!cs.words) continue;
    kv(out, std::string("parent_") + kClassHead[c] + "_attach_pct",
       100.0 * cs.attach_correct / cs.words);
  }
  for (int k = 0; k < 5; ++k) kv(out, "hist_le" + std::to_string(k), r.hist_pct[k]);
  kv(out, "contagion_p1", r.p_ge1_pct);
  if (r.p_ge2_given_1_pct) {
    kv(out, "contagion_p2_given_1", *r.p_ge2_given_1_pct);
    kv(out, "contagion_ratio", *r.contagion_ratio);
  }
  if (r.search_error_pct) kv(out, "search_error_pct", *r.search_error_pct);
  return out.str();
}

std::vector<long> attachment_errors(const std::vector<SentenceResult>& results) {
  std::vector<long> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    long e = 0;
    for (const auto& w : r.words) e += !w.is_punct && !w.correct_parent;
    out.push_back(e);
  }
  return out;
}

long scored_words(const std::vector<SentenceResult>& results) {
  long n = 0;
  for (const auto& r : results)
    for (const auto& w : r.words) n += !w.is_punct;
  return n;
}

SignificanceResult monte_carlo_compare(const std::vector<long>& errors_a,
                                       const std::vector<long>& errors_b, long total_words,
                                       long iterations, uint64_t seed) {
  if (errors_a.empty() || errors_a.size() != errors_b.size())
    throw Error(ErrorKind::kData, "significance test needs aligned, non-empty error counts");
  if (iterations < 1) throw Error(ErrorKind::kUsage, "iterations must be >= 1");
  if (total_words <= 0) throw Error(ErrorKind::kData, "no scored words");

  long observed = 0;
  for (size_t i = 0; i < errors_a.size(); ++i) observed += errors_b[i] - errors_a[i];
  long mag = std::labs(observed);
  long sign = observed < 0 ? -1 : 1;

  // count recolorings whose difference reaches the observed one, in its
  // direction; the recoloring null is symmetric, so swapping the systems
  // reproduces the same p exactly
  long at_least = 0;
  for (long pass = 0; pass < iterations; ++pass) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<uint64_t>(pass + 1)));
    long d = 0;
    for (size_t i = 0; i < errors_a.size(); ++i) {
      long delta = errors_b[i] - errors_a[i];
      d += (rng() & 1) ? -delta : delta;
    }
    if (sign * d >= mag) ++at_least;
  }

  SignificanceResult r;
  r.mu = static_cast<double>(observed) / static_cast<double>(total_words);
  r.iterations = iterations;
  r.p_value = static_cast<double>(at_least + 1) / static_cast<double>(iterations + 1);
  r.seed = seed;
  return r;
}

std::pair<Corpus, Corpus> split_test_sections(const Corpus& c, int min_test_sentences,
                                              uint64_t seed) {
  std::vector<int> section_of;  // per flattened sentence
  for (int si = 0; si < static_cast<int>(c.sections.size()); ++si)
    for (size_t k = 0; k < c.sections[si].sentences.size(); ++k) section_of.push_back(si);
  if (section_of.empty()) throw Error(ErrorKind::kData, "empty corpus");

  std::mt19937_64 rng(seed);
  std::vector<bool> test_section(c.sections.size(), false);
  int marked = 0;
  while (marked < min_test_sentences && marked < static_cast<int>(section_of.size())) {
    int pick = section_of[rng() % section_of.size()];
    if (test_section[pick]) continue;
    test_section[pick] = true;
    marked += static_cast<int>(c.sections[pick].sentences.size());
  }

  Corpus train, test;
  train.tagset = c.tagset;
  test.tagset = c.tagset;
  for (size_t si = 0; si < c.sections.size(); ++si)
    (test_section[si] ? test : train).sections.push_back(c.sections[si]);
  return {std::move(train), std::move(test)};
}

}  // namespace depkit
