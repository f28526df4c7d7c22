#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "testutil.hpp"

using namespace depkit;
using namespace testutil;

namespace {

using Disjunct = std::pair<ReductionId, std::vector<Atom>>;

Query mk_query(Atom outcome, const std::vector<std::vector<Disjunct>>& levels) {
  Query q;
  q.outcome = outcome;
  for (const auto& level : levels) {
    Level& l = q.add_level();
    for (const auto& [id, atoms] : level) {
      Key& k = l.add(id);
      for (Atom a : atoms) k.push(a);
    }
  }
  return q;
}

}  // namespace

TEST_CASE("zero-count base cases are exactly 0.01") {
  CountTable t;
  SmoothingConfig cfg;
  Query one = mk_query(7, {{{kTriTag3, {1}}}});
  CHECK(t.estimate(one, cfg) == 0.01);

  Query two = mk_query(7, {{{kTriTag2, {1}}}, {{kTriTag3, {1}}}});
  CHECK(t.estimate(two, cfg) == 0.01);
}

TEST_CASE("single reduction follows the count formula") {
  CountTable t;
  SmoothingConfig cfg;
  Query q = mk_query(7, {{{kTriTag3, {1}}}});
  for (int i = 0; i < 2; ++i) t.observe(q);
  Query other = mk_query(8, {{{kTriTag3, {1}}}});
  for (int i = 0; i < 8; ++i) t.observe(other);
  // count(outcome & cond) = 2, count(cond) = 10
  CHECK(t.estimate(q, cfg) == doctest::Approx(2.005 / 10.5).epsilon(1e-15));
}

TEST_CASE("backed-off level folds in the coarser estimate with weight 3") {
  CountTable t;
  SmoothingConfig cfg;
  Query fine = mk_query(7, {{{kTriTag2, {1}}}, {{kTriTag3, {9}}}});
  Query coarse_only = mk_query(7, {{{kTriTag3, {9}}}});
  for (int i = 0; i < 5; ++i) t.observe(coarse_only);
  double p = t.estimate(coarse_only, cfg);
  CHECK(p == doctest::Approx((5 + 0.005) / (5 + 0.5)).epsilon(1e-15));
  CHECK(t.estimate(fine, cfg) == doctest::Approx(3 * p / 3).epsilon(1e-15));
}

TEST_CASE("disjuncts add numerators and denominators") {
  CountTable t;
  SmoothingConfig cfg;
  // disjunct A: (num 1, den 2); disjunct B: (num 3, den 4)
  Query da = mk_query(7, {{{kChildTag2a, {1}}}});
  Query db = mk_query(7, {{{kChildTag2b, {2}}}});
  Query da_other = mk_query(8, {{{kChildTag2a, {1}}}});
  Query db_other = mk_query(8, {{{kChildTag2b, {2}}}});
  t.observe(da);
  t.observe(da_other);
  for (int i = 0; i < 3; ++i) t.observe(db);
  t.observe(db_other);

  Query dis = mk_query(7, {{{kChildTag2a, {1}}, {kChildTag2b, {2}}}});
  CHECK(t.estimate(dis, cfg) == doctest::Approx((1 + 3 + 0.005) / (2 + 4 + 0.5)).epsilon(1e-15));
}

TEST_CASE("crafted disjunctive cases match the closed form") {
  SmoothingConfig cfg;
  std::mt19937_64 rng(11);
  for (int icase = 0; icase < 10; ++icase) {
    CountTable t;
    // level 0: two disjuncts; level 1: single; counts drawn small
    uint64_t n1 = rng() % 4, d1 = n1 + rng() % 4;
    uint64_t n2 = rng() % 4, d2 = n2 + rng() % 4;
    uint64_t n3 = rng() % 4, d3 = n3 + rng() % 4;
    auto fill = [&](ReductionId id, Atom cond, uint64_t num, uint64_t den) {
      Query ev = mk_query(7, {{{id, {cond}}}});
      Query other = mk_query(8, {{{id, {cond}}}});
      for (uint64_t i = 0; i < num; ++i) t.observe(ev);
      for (uint64_t i = 0; i < den - num; ++i) t.observe(other);
    };
    fill(kLink2a, 1, n1, d1);
    fill(kLink2b, 2, n2, d2);
    fill(kLink3, 3, n3, d3);
    Query q = mk_query(7, {{{kLink2a, {1}}, {kLink2b, {2}}}, {{kLink3, {3}}}});
    double expect = closed_form_estimate({{n1 + n2, d1 + d2}, {n3, d3}}, cfg);
    CHECK(t.estimate(q, cfg) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("skip threshold bypasses the recursion at large counts") {
  CountTable t;
  Query top = mk_query(7, {{{kTriTag2, {1}}}, {{kTriTag3, {1}}}});
  // condition seen 8 times, outcome 3 of them; make the backed-off level
  // wildly different so a leak through the recursion would show
  Query hit = mk_query(7, {{{kTriTag2, {1}}}});
  Query miss = mk_query(8, {{{kTriTag2, {1}}}});
  Query deep = mk_query(7, {{{kTriTag3, {1}}}});
  for (int i = 0; i < 3; ++i) t.observe(hit);
  for (int i = 0; i < 5; ++i) t.observe(miss);
  for (int i = 0; i < 1000; ++i) t.observe(deep);

  SmoothingConfig on;
  on.skip_threshold = 8;
  CHECK(t.estimate(top, on) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));

  SmoothingConfig off;
  double p_deep = t.estimate(deep, off);
  CHECK(t.estimate(top, off) == doctest::Approx((3 + 3 * p_deep) / (8 + 3)).epsilon(1e-12));
  CHECK(t.estimate(top, off) != doctest::Approx(3.0 / 8.0).epsilon(1e-6));

  // below the threshold the shortcut stays off
  SmoothingConfig on9;
  on9.skip_threshold = 9;
  CHECK(t.estimate(top, on9) == doctest::Approx((3 + 3 * p_deep) / (8 + 3)).epsilon(1e-12));
}

TEST_CASE("skip shortcut can return zero; default config cannot") {
  CountTable t;
  Query miss = mk_query(8, {{{kTriTag2, {1}}}});
  for (int i = 0; i < 10; ++i) t.observe(miss);
  Query q = mk_query(7, {{{kTriTag2, {1}}}, {{kTriTag3, {1}}}});
  SmoothingConfig on;
  on.skip_threshold = 8;
  CHECK(t.estimate(q, on) == 0.0);
  SmoothingConfig off;
  CHECK(t.estimate(q, off) > 0.0);
}

TEST_CASE("estimates stay in (0,1] and grow with observations") {
  std::mt19937_64 rng(23);
  SmoothingConfig cfg;
  for (int round = 0; round < 200; ++round) {
    CountTable t;
    Query q = mk_query(1 + rng() % 3,
                       {{{kLink1, {static_cast<Atom>(rng() % 3)}}},
                        {{kLink2a, {static_cast<Atom>(rng() % 2)}},
                         {kLink2b, {static_cast<Atom>(rng() % 2)}}},
                        {{kLink4, {0}}}});
    // random noise observations
    for (int k = 0; k < static_cast<int>(rng() % 30); ++k) {
      Query noise = mk_query(1 + rng() % 3,
                             {{{kLink1, {static_cast<Atom>(rng() % 3)}}},
                              {{kLink2a, {static_cast<Atom>(rng() % 2)}},
                               {kLink2b, {static_cast<Atom>(rng() % 2)}}},
                              {{kLink4, {0}}}});
      t.observe(noise);
    }
    double before = t.estimate(q, cfg);
    CHECK(before > 0.0);
    CHECK(before <= 1.0);
    t.observe(q);
    double after = t.estimate(q, cfg);
    CHECK(after >= before);  // monotone when the shortcut is off
    CHECK(after <= 1.0);
  }
}

TEST_CASE("recursion equals the direct closed form on random chains") {
  std::mt19937_64 rng(5);
  SmoothingConfig cfg;
  for (int round = 0; round < 100; ++round) {
    CountTable t;
    int nlevels = 1 + rng() % 4;
    std::vector<ReductionId> ids = {kTriTag1, kTriTag2, kTriTag3, kTriWord1};
    std::vector<LevelCounts> expected(nlevels);
    Query q;
    q.outcome = 7;
    for (int l = 0; l < nlevels; ++l) {
      Key& k = q.add_level().add(ids[l]);
      k.push(static_cast<Atom>(l));
      uint64_t num = rng() % 5;
      uint64_t extra = rng() % 5;
      expected[l] = {num, num + extra};
      Query ev = mk_query(7, {{{ids[l], {static_cast<Atom>(l)}}}});
      Query other = mk_query(9, {{{ids[l], {static_cast<Atom>(l)}}}});
      for (uint64_t i = 0; i < num; ++i) t.observe(ev);
      for (uint64_t i = 0; i < extra; ++i) t.observe(other);
    }
    CHECK(t.estimate(q, cfg) ==
          doctest::Approx(closed_form_estimate(expected, cfg)).epsilon(1e-14));
  }
}

TEST_CASE("observe updates every level and disjunct") {
  CountTable t;
  Query q = mk_query(7, {{{kChildTag1, {1, 2}}},
                         {{kChildTag2a, {1}}, {kChildTag2b, {2}}},
                         {{kChildTag3, {3}}}});
  t.observe(q);
  Key l0;
  l0.push(kChildTag1), l0.push(1), l0.push(2);
  Key l1a;
  l1a.push(kChildTag2a), l1a.push(1);
  Key l1b;
  l1b.push(kChildTag2b), l1b.push(2);
  Key l2;
  l2.push(kChildTag3), l2.push(3);
  for (const Key& k : {l0, l1a, l1b, l2}) {
    CHECK(t.condition_count(k) == 1);
    CHECK(t.event_count(k, 7) == 1);
  }
  // same condition, different outcome: condition count 2, events 1 each
  Query q2 = q;
  q2.outcome = 8;
  t.observe(q2);
  CHECK(t.condition_count(l0) == 2);
  CHECK(t.event_count(l0, 7) == 1);
  CHECK(t.event_count(l0, 8) == 1);
}

TEST_CASE("distinct reductions with identical tuples never collide") {
  CountTable t;
  Query a = mk_query(7, {{{kTriTag2, {1}}}});
  t.observe(a);
  Key same_tuple_other_id;
  same_tuple_other_id.push(kTriWord1), same_tuple_other_id.push(1);
  CHECK(t.condition_count(same_tuple_other_id) == 0);
}

TEST_CASE("count table dump/load round trip is exact") {
  std::mt19937_64 rng(17);
  CountTable t;
  for (int k = 0; k < 300; ++k) {
    Query q = mk_query(rng() % 5,
                       {{{kChildTag1, {static_cast<Atom>(rng() % 4), static_cast<Atom>(rng() % 4)}}},
                        {{kChildTag3, {static_cast<Atom>(rng() % 3)}}}});
    t.observe(q);
  }
  std::ostringstream out;
  t.dump(out);
  std::istringstream in(out.str());
  CountTable t2;
  int lineno = 0;
  t2.load(in, lineno);
  CHECK(t == t2);
  std::ostringstream out2;
  t2.dump(out2);
  CHECK(out.str() == out2.str());
}
