#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "testutil.hpp"

using namespace depkit;
using namespace testutil;

namespace {

// every well-formed parent vector over 1..n+1, by exhaustive filtering
std::set<std::vector<int>> filtered_structures(int n) {
  std::set<std::vector<int>> out;
  std::vector<int> v(n, 1);
  for (;;) {
    if (validate_structure(std::span<const int>(v)).ok) out.insert(v);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++v[i] <= n + 1) break;
      v[i] = 1;
    }
    if (i < 0) break;
  }
  return out;
}

Corpus garden_corpus() {
  std::string text =
      "#TAGSET\n"
      "DT\tD\tNounModifier\n"
      "NN\tN\tNoun\n"
      "VBD\tV\tVerb\n"
      "#END\n"
      "#SECTION s\n";
  for (int i = 0; i < 6; ++i)
    text += "1\tthe\tDT\t2\n2\tsaw\tNN\t3\n3\tcut\tVBD\t0\n\n";
  for (int i = 0; i < 3; ++i)
    text += "1\tthe\tDT\t2\n2\tman\tNN\t3\n3\tsaw\tVBD\t5\n4\tthe\tDT\t5\n5\tdog\tNN\t0\n\n";
  text += "1\tthe\tDT\t2\n2\tdog\tNN\t3\n3\tcut\tVBD\t5\n4\tthe\tDT\t5\n5\tman\tNN\t0\n\n";
  return corpus_from_text(text);
}

}  // namespace

TEST_CASE("projective enumeration counts") {
  CHECK(enumerate_projective(1).size() == 1);
  auto two = enumerate_projective(2);
  REQUIRE(two.size() == 2);
  CHECK(std::set<std::vector<int>>(two.begin(), two.end()) ==
        std::set<std::vector<int>>{{2, 3}, {3, 1}});
  CHECK(enumerate_projective(3).size() == projective_count_oracle(3));
  for (int n = 1; n <= 7; ++n)
    CHECK(enumerate_projective(n).size() == projective_count_oracle(n));
  CHECK_THROWS_AS(enumerate_projective(0), Error);
  CHECK_THROWS_AS(enumerate_projective(kEnumerationCap + 1), Error);
}

TEST_CASE("enumeration equals the validate_structure filter") {
  for (int n = 1; n <= 6; ++n) {
    auto enumerated = enumerate_projective(n);
    std::set<std::vector<int>> uniq(enumerated.begin(), enumerated.end());
    CHECK(uniq.size() == enumerated.size());  // each exactly once
    CHECK(uniq == filtered_structures(n));
    for (const auto& v : enumerated) CHECK(validate_structure(std::span<const int>(v)).ok);
  }
}

TEST_CASE("count recursion matches the independent oracle") {
  for (int n = 1; n <= 10; ++n) CHECK(count_projective(n) == projective_count_oracle(n));
}

TEST_CASE("lattice construction") {
  Corpus c = garden_corpus();
  TrainedModel m = train(ModelKind::kC, {}, c, {});
  Sentence s;
  s.surfaces = {"the", "saw", "unheardof", "xq"};
  DecodeInput in = make_decode_input(m, s, std::nullopt);
  // known forms list their seen tags, sorted
  CHECK(in.lattice.cands[1] == std::vector<TagId>{m.tagset.require("DT")});
  CHECK(in.lattice.cands[2] ==
        std::vector<TagId>{m.tagset.require("NN"), m.tagset.require("VBD")});
  // unknown words go through attenuation; unseen symbols fall back to
  // tags seen on any attenuation symbol, or all tags when none were
  CHECK(in.words[3] == kWordUnseen);
  CHECK(in.lattice.cands[3].size() == 3);
  CHECK(in.forms[3] == "MORPH-OF");
  CHECK(in.forms[4] == "MORPH-SHORT");

  SUBCASE("true tags restrict by shortened form") {
    std::vector<TagId> tt = {m.tagset.require("DT"), m.tagset.require("NN"),
                             m.tagset.require("VBD"), m.tagset.require("NN")};
    DecodeInput tin = make_decode_input(m, s, tt);
    CHECK(tin.lattice.cands[2] == std::vector<TagId>{m.tagset.require("NN")});
    // nothing matching VBD's short among candidates for an unknown -> falls
    // back to the supplied tag alone
    CHECK(tin.lattice.cands[3] == std::vector<TagId>{m.tagset.require("VBD")});
  }
}

TEST_CASE("brute force on a single word") {
  Corpus c = garden_corpus();
  TrainedModel m = train(ModelKind::kC, {}, c, {});
  Sentence s;
  s.surfaces = {"dog"};
  DecodeInput in = make_decode_input(m, s, std::nullopt);
  ParseOutput out = brute_force_parse(m, in);
  CHECK(out.parents == std::vector<int>{2});
  CHECK(out.tags == std::vector<TagId>{m.tagset.require("NN")});
}

TEST_CASE("brute force respects its bounds") {
  Corpus c = garden_corpus();
  TrainedModel m = train(ModelKind::kC, {}, c, {});
  Sentence s;
  for (int i = 0; i < 9; ++i) s.surfaces.push_back("dog");
  DecodeInput in = make_decode_input(m, s, std::nullopt);
  SearchSettings settings;
  settings.bf_max_n = 8;
  CHECK_THROWS_AS(brute_force_parse(m, in, settings), Error);
}

TEST_CASE("exact chart equals brute force across models") {
  TagSet ts = tiny_tagset();
  RandomCorpusConfig cfg;
  cfg.sentences = 25;
  cfg.seed = 1234;
  Corpus c = random_corpus(ts, cfg);
  std::mt19937_64 rng(4321);
  for (ModelKind kind : {ModelKind::kX, ModelKind::kB1, ModelKind::kB2, ModelKind::kB3,
                         ModelKind::kC, ModelKind::kCNoLex, ModelKind::kCDist, ModelKind::kD}) {
    TrainedModel m = train(kind, ModelFlags{kind == ModelKind::kD}, c, {});
    for (int k = 0; k < 12; ++k) {
      int n = 1 + static_cast<int>(rng() % 6);
      Sentence s = random_sentence(cfg, n, rng);
      DecodeInput in = make_decode_input(m, s, std::nullopt);
      ParseOutput bf = brute_force_parse(m, in);
      ParseOutput dp = dp_parse(m, in);
      CHECK(std::abs(bf.log_score - dp.log_score) <= kScoreTieEps);
      CHECK(bf.parents == dp.parents);
      CHECK(bf.tags == dp.tags);
      CHECK(validate_structure(std::span<const int>(dp.parents)).ok);
    }
  }
}

TEST_CASE("model A has no span decoder; baseline neither") {
  TagSet ts = tiny_tagset();
  Corpus c = random_corpus(ts, {});
  TrainedModel a = train(ModelKind::kA, {}, c, {});
  Sentence s;
  s.surfaces = {"dog", "saw"};
  DecodeInput in = make_decode_input(a, s, std::nullopt);
  CHECK_THROWS_AS(dp_parse(a, in), Error);
  CHECK_NOTHROW(brute_force_parse(a, in));
}

TEST_CASE("model X tags match exhaustive search over tag sequences") {
  TagSet ts = tiny_tagset();
  RandomCorpusConfig cfg;
  cfg.sentences = 20;
  cfg.seed = 100;
  Corpus c = random_corpus(ts, cfg);
  TrainedModel m = train(ModelKind::kX, {}, c, {});
  std::mt19937_64 rng(17);
  std::vector<int> chain;

  for (int k = 0; k < 30; ++k) {
    int n = 1 + static_cast<int>(rng() % 6);
    Sentence s = random_sentence(cfg, n, rng);
    DecodeInput in = make_decode_input(m, s, std::nullopt);
    ParseOutput dp = dp_parse(m, in);

    // independent exhaustive search: every tag assignment, scored on the
    // fixed chain structure (model X ignores links)
    chain.resize(n);
    for (int i = 1; i <= n; ++i) chain[i - 1] = i + 1;
    DependencyStructure d;
    d.parents = chain;
    for (int i = 1; i <= n; ++i) d.words.push_back({in.forms[i], 0, in.caps[i]});
    std::vector<size_t> odo(n, 0);
    double best = 0;
    std::vector<TagId> best_tags;
    bool have = false;
    for (;;) {
      for (int i = 0; i < n; ++i) d.words[i].tag = in.lattice.cands[i + 1][odo[i]];
      double sc = score_structure(m, d);
      std::vector<TagId> tags;
      for (const auto& w : d.words) tags.push_back(w.tag);
      if (!have || sc > best + kScoreTieEps ||
          (sc > best - kScoreTieEps && tags < best_tags)) {
        have = true;
        best = sc;
        best_tags = tags;
      }
      int i = n - 1;
      for (; i >= 0; --i) {
        if (++odo[i] < in.lattice.cands[i + 1].size()) break;
        odo[i] = 0;
      }
      if (i < 0) break;
    }
    CHECK(dp.tags == best_tags);
    CHECK(dp.log_score == doctest::Approx(best).epsilon(1e-12));
    CHECK(dp.parents == chain);
  }
}

TEST_CASE("context picks the right reading of an ambiguous word") {
  Corpus c = garden_corpus();
  TrainedModel m = train(ModelKind::kB3, {}, c, {});
  Sentence s;
  s.surfaces = {"the", "saw", "cut"};
  DecodeInput in = make_decode_input(m, s, std::nullopt);
  ParseOutput out = brute_force_parse(m, in);
  CHECK(out.tags == std::vector<TagId>{m.tagset.require("DT"), m.tagset.require("NN"),
                                       m.tagset.require("VBD")});
  CHECK(out.parents == std::vector<int>{2, 3, 4});

  Sentence v;
  v.surfaces = {"the", "man", "saw", "the", "dog"};
  DecodeInput vin = make_decode_input(m, v, std::nullopt);
  ParseOutput vout = brute_force_parse(m, vin);
  CHECK(vout.tags[2] == m.tagset.require("VBD"));
}

TEST_CASE("beam(1) suffers search error on a garden path; true tags recover") {
  Corpus c = garden_corpus();
  Sentence t;
  t.surfaces = {"the", "man", "saw", "the", "saw"};
  for (ModelKind kind : {ModelKind::kC, ModelKind::kB3, ModelKind::kD}) {
    TrainedModel m = train(kind, {}, c, {});
    DecodeInput in = make_decode_input(m, t, std::nullopt);
    SearchSettings beam1;
    beam1.beam = 1;
    ParseOutput exact = dp_parse(m, in);
    ParseOutput narrow = dp_parse(m, in, beam1);
    CHECK(exact.log_score > narrow.log_score + kScoreTieEps);
    CHECK(narrow.pruned);

    // the model preferred the exact structure: that is a search error
    DependencyStructure best, found;
    for (int i = 1; i <= t.size(); ++i) {
      best.words.push_back({in.forms[i], exact.tags[i - 1], in.caps[i]});
      found.words.push_back({in.forms[i], narrow.tags[i - 1], in.caps[i]});
    }
    best.parents = exact.parents;
    found.parents = narrow.parents;
    CHECK(detect_search_error(m, best, found));
    CHECK_FALSE(detect_search_error(m, best, best));
    CHECK_FALSE(detect_search_error(m, found, best));  // exact output dominates

    // supplying the coarse tags removes the error entirely
    std::vector<TagId> tt = {m.tagset.require("DT"), m.tagset.require("NN"),
                             m.tagset.require("VBD"), m.tagset.require("DT"),
                             m.tagset.require("NN")};
    DecodeInput tin = make_decode_input(m, t, tt);
    ParseOutput tnarrow = dp_parse(m, tin, beam1);
    ParseOutput texact = dp_parse(m, tin);
    CHECK(texact.log_score <= tnarrow.log_score + kScoreTieEps);
  }
}

TEST_CASE("exact decoding never triggers search error") {
  TagSet ts = tiny_tagset();
  RandomCorpusConfig cfg;
  cfg.sentences = 20;
  cfg.seed = 31;
  Corpus c = random_corpus(ts, cfg);
  TrainedModel m = train(ModelKind::kCDist, {}, c, {});
  std::mt19937_64 rng(77);
  for (int k = 0; k < 20; ++k) {
    int n = 1 + static_cast<int>(rng() % 5);
    Sentence s = random_sentence(cfg, n, rng);
    DecodeInput in = make_decode_input(m, s, std::nullopt);
    ParseOutput out = dp_parse(m, in);
    DependencyStructure found;
    for (int i = 1; i <= n; ++i) found.words.push_back({in.forms[i], out.tags[i - 1], in.caps[i]});
    found.parents = out.parents;
    // any well-formed "gold" must score <= the exact output
    auto all = enumerate_projective(n);
    for (size_t g = 0; g < all.size(); g += 1 + all.size() / 7) {
      DependencyStructure gold = found;
      gold.parents = all[g];
      CHECK_FALSE(detect_search_error(m, gold, found));
    }
  }
}

TEST_CASE("chart work grows cubically") {
  // single-tag chains keep the signature space fixed while n grows
  std::string text =
      "#TAGSET\nNN\tN\tNoun\nVBZ\tV\tVerb\n#END\n"
      "#SECTION s\n";
  for (int len : {4, 5, 6}) {
    for (int i = 1; i <= len; ++i)
      text += std::to_string(i) + "\tw" + std::to_string(i % 3) + "\tNN\t" +
              std::to_string(i == len ? 0 : i + 1) + "\n";
    text += "\n";
  }
  Corpus c = corpus_from_text(text);
  TrainedModel m = train(ModelKind::kC, {}, c, {});

  auto ops_for = [&](int n) {
    Sentence s;
    for (int i = 0; i < n; ++i) s.surfaces.push_back("w" + std::to_string(i % 3));
    DecodeInput in = make_decode_input(m, s, std::nullopt);
    ParseOutput out = dp_parse(m, in);
    return static_cast<double>(out.ops);
  };
  double o10 = ops_for(10), o20 = ops_for(20), o40 = ops_for(40);
  double r1 = o20 / o10, r2 = o40 / o20;
  // doubling n should cost about 2^3, give or take lower-order terms
  CHECK(r1 > 4.0);
  CHECK(r1 < 14.0);
  CHECK(r2 > 4.0);
  CHECK(r2 < 14.0);
  CHECK(r2 / r1 > 0.5);
  CHECK(r2 / r1 < 2.0);
}

TEST_CASE("struct_less is a strict total order on distinct structures") {
  auto structures = enumerate_projective(4);
  std::vector<TagId> tags = {4, 4, 4, 4};
  for (size_t a = 0; a < structures.size(); ++a)
    for (size_t b = 0; b < structures.size(); ++b) {
      bool ab = struct_less(std::span<const int>(structures[a]), std::span<const TagId>(tags),
                            std::span<const int>(structures[b]), std::span<const TagId>(tags));
      bool ba = struct_less(std::span<const int>(structures[b]), std::span<const TagId>(tags),
                            std::span<const int>(structures[a]), std::span<const TagId>(tags));
      if (a == b) {
        CHECK_FALSE(ab);
        CHECK_FALSE(ba);
      } else {
        CHECK(ab != ba);
      }
    }
}
