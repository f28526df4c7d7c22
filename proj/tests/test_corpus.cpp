#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "testutil.hpp"

using namespace depkit;
using namespace testutil;

TEST_CASE("cap classes") {
  CHECK(cap_class("dog", false) == CapClass::kDown);
  CHECK(cap_class("NEC", false) == CapClass::kUp);
  CHECK(cap_class("The", true) == CapClass::kInit);
  CHECK(cap_class("iPod", false) == CapClass::kCap);

  // no letters at all is DOWN; a single capital is never UP
  CHECK(cap_class("1987", false) == CapClass::kDown);
  CHECK(cap_class("--", true) == CapClass::kDown);
  CHECK(cap_class("A", false) == CapClass::kCap);
  CHECK(cap_class("A", true) == CapClass::kInit);
  CHECK(cap_class("The", false) == CapClass::kCap);
  CHECK(cap_class("U.S.", false) == CapClass::kUp);
}

TEST_CASE("cap cases are exhaustive and exclusive") {
  std::mt19937_64 rng(7);
  const char chars[] = "abcXYZ019.-";
  for (int k = 0; k < 2000; ++k) {
    std::string form;
    int len = 1 + rng() % 6;
    for (int i = 0; i < len; ++i) form += chars[rng() % (sizeof(chars) - 1)];
    CapClass c = cap_class(form, rng() % 2 == 0);
    CHECK(static_cast<int>(c) >= 0);
    CHECK(static_cast<int>(c) <= 3);
  }
}

TEST_CASE("distance buckets") {
  CHECK(dist_bucket(5, 6) == DistBucket::k1);
  CHECK(dist_bucket(3, 9) == DistBucket::k3to6);
  CHECK(dist_bucket(1, 20) == DistBucket::k7up);
  CHECK(dist_bucket(4, 2) == DistBucket::k2);
  CHECK(dist_bucket(9, 3) == DistBucket::k3to6);
  CHECK(dist_bucket(8, 1) == DistBucket::k7up);
  CHECK_THROWS_AS(dist_bucket(4, 4), Error);
}

TEST_CASE("attenuation symbols") {
  CHECK(attenuate_token("1987") == "MORPH-NUM");
  CHECK(attenuate_token("recapitalization") == "MORPH-ON");
  CHECK(attenuate_token("cat") == "MORPH-SHORT");
  CHECK(attenuate_token("merger") == "MORPH-ER");
  CHECK(attenuate_token("x381") == "MORPH-NUM");
  CHECK(attenuate_token("fiver") == "MORPH-SHORT");  // 5 chars
  CHECK(attenuate_token("sixers") == "MORPH-RS");    // 6 chars

  // idempotent on its own outputs
  for (const char* sym : {"MORPH-NUM", "MORPH-ON", "MORPH-SHORT", "MORPH-ER"})
    CHECK(attenuate_token(sym) == sym);
}

TEST_CASE("attenuation is deterministic") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    std::string form;
    int len = 1 + rng() % 10;
    for (int i = 0; i < len; ++i) form += static_cast<char>('a' + rng() % 26);
    CHECK(attenuate_token(form) == attenuate_token(form));
    CHECK(attenuate_token(attenuate_token(form)) == attenuate_token(form));
  }
}

TEST_CASE("validate_structure") {
  auto valid = [](std::vector<int> p) { return validate_structure(std::span<const int>(p)); };
  CHECK(valid({2, 3}).ok);
  auto crossing = valid({3, 4, 1});
  CHECK_FALSE(crossing.ok);
  CHECK(crossing.reason.find("crossing") != std::string::npos);
  auto multi = valid({3, 3});
  CHECK_FALSE(multi.ok);
  CHECK(multi.reason.find("multi-root") != std::string::npos);
  auto cycle = valid({2, 1, 4});
  CHECK_FALSE(cycle.ok);
  CHECK(cycle.reason.find("cycle") != std::string::npos);
  CHECK_FALSE(valid({1, 3}).ok);  // self-parent
  CHECK_FALSE(valid({5, 3}).ok);  // out of range
  CHECK(valid({2}).ok);           // single word into EOS
  CHECK(valid({4, 1, 4}).ok == false);  // two EOS children
}

TEST_CASE("children lists partition and order") {
  std::vector<int> parents = {3, 3, 6, 3, 3, 7};  // n=6, head at 6
  REQUIRE(validate_structure(std::span<const int>(parents)).ok);
  ChildLists kids{std::span<const int>(parents)};
  CHECK(kids.left[3] == std::vector<int>{2, 1});   // nearest first
  CHECK(kids.right[3] == std::vector<int>{4, 5});
  CHECK(kids.left[7] == std::vector<int>{6});
  // the two sides partition the child set of each head
  std::vector<int> seen(8, 0);
  for (int k = 1; k <= 7; ++k) {
    for (int c : kids.left[k]) {
      CHECK(parents[c - 1] == k);
      seen[c]++;
    }
    for (int c : kids.right[k]) {
      CHECK(parents[c - 1] == k);
      seen[c]++;
    }
  }
  for (int i = 1; i <= 6; ++i) CHECK(seen[i] == 1);
}

static const char* kTinyCorpus =
    "#TAGSET\n"
    "NN\tN\tNoun\n"
    "VBZ\tV\tVerb\n"
    "#END\n"
    "#SECTION s1\n"
    "1\tdog\tNN\t2\n"
    "2\tbarks\tVBZ\t0\n"
    "\n";

TEST_CASE("read a single sentence") {
  Corpus c = corpus_from_text(kTinyCorpus);
  REQUIRE(c.sections.size() == 1);
  REQUIRE(c.sections[0].sentences.size() == 1);
  const Sentence& s = c.sections[0].sentences[0];
  CHECK(s.size() == 2);
  REQUIRE(s.gold_parents.has_value());
  CHECK((*s.gold_parents) == std::vector<int>{2, 3});  // 0 encodes EOS = n+1
  CHECK((*s.gold_tags)[0] == c.tagset.require("NN"));
}

TEST_CASE("reader rejects bad input with line numbers") {
  auto read_text = [](const std::string& text) {
    std::istringstream in(text);
    return read_corpus(in);
  };
  // parent out of range
  std::string bad = kTinyCorpus;
  bad.replace(bad.find("VBZ\t0"), 5, "VBZ\t5");
  CHECK_THROWS_WITH_AS(read_text(bad), doctest::Contains("parent out of range"), Error);

  // unknown tag
  std::string unk = kTinyCorpus;
  unk.replace(unk.find("\tNN\t2"), 5, "\tXX\t2");
  CHECK_THROWS_WITH_AS(read_text(unk), doctest::Contains("unknown tag"), Error);

  // duplicate section ids
  std::string dup = std::string(kTinyCorpus) + "#SECTION s1\n1\tdog\tNN\t0\n\n";
  CHECK_THROWS_WITH_AS(read_text(dup), doctest::Contains("duplicate section"), Error);

  // bad token index
  std::string idx = kTinyCorpus;
  idx.replace(idx.find("2\tbarks"), 1, "3");
  CHECK_THROWS_WITH_AS(read_text(idx), doctest::Contains("index"), Error);

  // reserved tag name
  CHECK_THROWS_AS(read_text("#TAGSET\nBOS\tB\tNoun\n#END\n#SECTION a\n1\tx\tBOS\t0\n\n"), Error);

  // ill-formed gold structure in strict mode
  std::string cross =
      "#TAGSET\nNN\tN\tNoun\n#END\n#SECTION s\n"
      "1\ta\tNN\t3\n2\tb\tNN\t0\n3\tc\tNN\t1\n\n";
  CHECK_THROWS_AS(read_text(cross), Error);
  std::istringstream lenient(cross);
  CHECK_NOTHROW(read_corpus(lenient, false));
}

TEST_CASE("round trip is identity after normalization") {
  Corpus c = corpus_from_text(kTinyCorpus);
  std::string text = corpus_to_text(c);
  Corpus c2 = corpus_from_text(text);
  CHECK(corpus_to_text(c2) == text);

  // generated corpora round trip byte-identically too
  Corpus r = random_corpus(tiny_tagset(), {});
  std::string rt = corpus_to_text(r);
  CHECK(corpus_to_text(corpus_from_text(rt)) == rt);
}

TEST_CASE("untagged and unparsed input") {
  Corpus c = corpus_from_text(
      "#TAGSET\nNN\tN\tNoun\n#END\n#SECTION s\n"
      "1\tdog\t_\t_\n2\tbarks\t_\t_\n\n");
  const Sentence& s = c.sections[0].sentences[0];
  CHECK_FALSE(s.gold_tags.has_value());
  CHECK_FALSE(s.gold_parents.has_value());
  // writes back with placeholders
  CHECK(corpus_to_text(c).find("dog\t_\t_") != std::string::npos);
}

TEST_CASE("first-section attenuation") {
  Corpus c = corpus_from_text(
      "#TAGSET\nNN\tN\tNoun\n#END\n"
      "#SECTION s3\n1\tmerger\tNN\t0\n\n1\tmerger\tNN\t0\n\n"
      "#SECTION s4\n1\tmerger\tNN\t0\n\n");
  SUBCASE("replaced throughout its first section only") {
    Corpus a = attenuate_training_corpus(c, {});
    CHECK(a.sections[0].sentences[0].surfaces[0] == "morph-er");  // DOWN rendering
    CHECK(a.sections[0].sentences[1].surfaces[0] == "morph-er");
    CHECK(a.sections[1].sentences[0].surfaces[0] == "merger");
  }
  SUBCASE("protected vocabulary is never replaced") {
    Corpus a = attenuate_training_corpus(c, {"merger"});
    CHECK(a.sections[0].sentences[0].surfaces[0] == "merger");
    CHECK(a.sections[1].sentences[0].surfaces[0] == "merger");
  }
  SUBCASE("one-section corpus attenuates every type everywhere") {
    Corpus one = corpus_from_text(
        "#TAGSET\nNN\tN\tNoun\n#END\n"
        "#SECTION s\n1\talpha\tNN\t0\n\n1\tbetas\tNN\t0\n\n");
    Corpus a = attenuate_training_corpus(one, {});
    for (const auto& s : a.sections[0].sentences)
      CHECK(is_attenuation_symbol(canonical_form(s.surfaces[0])));
  }
}

TEST_CASE("attenuated surfaces keep the cap class and round trip") {
  Corpus c = corpus_from_text(
      "#TAGSET\nNN\tN\tNoun\n#END\n"
      "#SECTION s\n1\tMergers\tNN\t0\n\n1\tNASDAQ\tNN\t0\n\n");
  Corpus a = attenuate_training_corpus(c, {});
  CHECK(a.sections[0].sentences[0].surfaces[0] == "Morph-rs");  // INIT pattern
  CHECK(a.sections[0].sentences[1].surfaces[0] == "MORPH-AQ");  // UP pattern

  std::string text = corpus_to_text(a);
  Corpus back = corpus_from_text(text);
  auto s0 = gold_structure(back.sections[0].sentences[0]);
  CHECK(s0.words[0].form == "MORPH-RS");
  CHECK(s0.words[0].cap == CapClass::kInit);
  auto s1 = gold_structure(back.sections[0].sentences[1]);
  CHECK(s1.words[0].form == "MORPH-AQ");
  CHECK(s1.words[0].cap == CapClass::kUp);
}

TEST_CASE("gold structure caps and forms") {
  TagSet ts = small_tagset();
  Sentence s = make_sentence({"The", "dog", "SAW", "iPod"}, {"DT", "NN", "VBD", "NN"},
                             {2, 3, 0, 3}, ts);
  auto d = gold_structure(s);
  CHECK(d.words[0].form == "the");
  CHECK(d.words[0].cap == CapClass::kInit);
  CHECK(d.words[1].cap == CapClass::kDown);
  CHECK(d.words[2].cap == CapClass::kUp);
  CHECK(d.words[3].cap == CapClass::kCap);
}

TEST_CASE("tagset accessors") {
  TagSet ts = small_tagset();
  TagId vbz = ts.require("VBZ"), vbd = ts.require("VBD");
  CHECK(ts.short_id(vbz) == ts.short_id(vbd));
  CHECK(ts.tiny(vbz) == TinyClass::kVerb);
  CHECK(ts.short_id(kTagBos) == kTagBos);
  CHECK(ts.tiny_id(kTagEokids) == kTagEokids);
  CHECK(ts.name(kTagEos) == "EOS");
  CHECK_FALSE(ts.find("ZZZ").has_value());
  CHECK_THROWS_AS(ts.require("ZZZ"), Error);
  TagSet dup;
  dup.add("NN", "N", TinyClass::kNoun);
  CHECK_THROWS_AS(dup.add("NN", "N", TinyClass::kNoun), Error);
  CHECK_THROWS_AS(dup.add("MORPH-XY", "M", TinyClass::kNoun), Error);
}
