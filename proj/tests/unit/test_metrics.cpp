// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ssa/errors.hpp"
#include "ssa/metrics.hpp"
#include "support/oracles.hpp"

using namespace ssa;

namespace {

Words w(const std::string& s) { return normalize_text(s); }

Words random_words(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  Words out(len(rng));
  for (auto& x : out) x = std::string(1, static_cast<char>('a' + sym(rng)));
  return out;
}

}  // namespace

TEST_CASE("normalizer lowercases and strips punctuation") {
  CHECK(normalize_text("Hello, World!  it's") == Words{"hello", "world", "its"});
  CHECK(normalize_text(" -- ").empty());
}

TEST_CASE("edit_ops examples") {
  CHECK(edit_ops(w("a b c"), w("a b c")) == ErrorCounts{0, 0, 0, 3});
  CHECK(edit_ops(w("a b c"), w("a x c")) == ErrorCounts{1, 0, 0, 3});
  CHECK(edit_ops(w("a b"), Words{}) == ErrorCounts{0, 2, 0, 2});
  CHECK(edit_ops(Words{}, w("a")) == ErrorCounts{0, 0, 1, 0});
  // Two substitutions and a deletion/insertion pair cost the same here.
  CHECK(edit_ops(w("a b"), w("b a")) == ErrorCounts{2, 0, 0, 2});
}

TEST_CASE("edit_ops total matches recursive edit distance") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Words a = random_words(rng, 7, 3);
    const Words b = random_words(rng, 7, 3);
    const ErrorCounts c = edit_ops(a, b);
    CHECK(c.errors() == ssa::testing::edit_distance(a, b));
    CHECK(c.ref_words == a.size());
    // Hypothesis length identity: hyp = ref - D + I.
    CHECK(b.size() + c.deletions == a.size() + c.insertions);
  }
}

TEST_CASE("error rate is undefined without reference words") {
  CHECK_THROWS_AS(ErrorCounts{}.rate(), UndefinedRateError);
  CHECK_THROWS_AS(cpwer(std::vector<SpeakerWords>{{"s1", {}}}, {w("a")}), UndefinedRateError);
  CHECK_THROWS_AS(cpwer(std::vector<SpeakerWords>{}, {}), UndefinedRateError);
}

TEST_CASE("cpwer examples") {
  const auto swapped = cpwer({{"s1", w("a b")}, {"s2", w("c")}}, {w("c"), w("a b")});
  CHECK(swapped.rate == 0.0);
  CHECK(swapped.assignment == std::vector<std::pair<long, long>>{{0, 1}, {1, 0}});

  const auto del = cpwer({{"s1", w("a b c d")}}, {w("a b c")});
  CHECK(del.rate == 0.25);
  CHECK(del.counts.deletions == 1);

  const auto pad = cpwer({{"s1", w("a")}}, {w("a"), w("b")});
  CHECK(pad.rate == 1.0);
  CHECK(pad.counts.insertions == 1);
  CHECK(pad.assignment == std::vector<std::pair<long, long>>{{0, 0}, {-1, 1}});
}

TEST_CASE("cpwer equals exhaustive permutation search") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    std::uniform_int_distribution<std::size_t> k(1, 5);
    const std::size_t nr = k(rng), nh = k(rng);
    std::vector<SpeakerWords> refs;
    std::vector<Words> rw;
    for (std::size_t r = 0; r < nr; ++r) {
      Words x = random_words(rng, 6, 4);
      if (r == 0 && x.empty()) x.push_back("a");
      refs.push_back({"s" + std::to_string(r), x});
      rw.push_back(x);
    }
    std::vector<Words> hyps;
    for (std::size_t h = 0; h < nh; ++h) hyps.push_back(random_words(rng, 6, 4));
    const auto res = cpwer(refs, hyps);
    CHECK(res.counts.errors() == ssa::testing::cpwer_errors_enumerate(rw, hyps));
  }
}

TEST_CASE("cpwer invariances") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    std::vector<SpeakerWords> refs;
    std::vector<Words> as_list;
    for (int r = 0; r < 3; ++r) {
      Words x = random_words(rng, 5, 4);
      x.push_back("z");
      refs.push_back({"s" + std::to_string(r), x});
      as_list.push_back(x);
    }
    std::vector<Words> hyps;
    for (int h = 0; h < 3; ++h) hyps.push_back(random_words(rng, 6, 4));
    const double base = cpwer(refs, hyps).rate;

    CHECK(cpwer(refs, as_list).rate == 0.0);
    std::vector<Words> shuffled = hyps;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(cpwer(refs, shuffled).rate == base);
    std::vector<SpeakerWords> relabeled = refs;
    for (auto& r : relabeled) r.speaker = "x" + r.speaker;
    std::reverse(relabeled.begin(), relabeled.end());
    CHECK(cpwer(relabeled, hyps).rate == base);

    std::vector<Words> more = hyps;
    std::uniform_int_distribution<std::size_t> which(0, 2);
    Words& target = more[which(rng)];
    std::uniform_int_distribution<std::size_t> pos(0, target.size());
    target.insert(target.begin() + static_cast<std::ptrdiff_t>(pos(rng)), "q");
    CHECK(cpwer(refs, more).rate >= base);
  }
}

TEST_CASE("hungarian assignment matches enumeration up to 8 rows") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    std::uniform_int_distribution<std::size_t> n(1, 8);
    const std::size_t size = n(rng);
    std::uniform_int_distribution<int> c(0, 9);
    std::vector<std::vector<double>> cost(size, std::vector<double>(size));
    for (auto& row : cost)
      for (double& x : row) x = c(rng);
    const auto a = hungarian_assignment(cost);
    double total = 0.0;
    std::vector<bool> used(size, false);
    for (std::size_t r = 0; r < size; ++r) {
      CHECK_FALSE(used[a[r]]);
      used[a[r]] = true;
      total += cost[r][a[r]];
    }
    CHECK(total == ssa::testing::min_assignment_enumerate(cost));
    const auto e = exhaustive_assignment(cost);
    double etotal = 0.0;
    for (std::size_t r = 0; r < size; ++r) etotal += cost[r][e[r]];
    CHECK(etotal == total);
  }
}

TEST_CASE("der examples") {
  const SegmentSet ref{{"spk1", 0.0, 10.0}};
  CHECK(der(ref, ref, 0.0, false).rate == 0.0);

  const SegmentSet hyp{{"spkA", 0.0, 9.0}};
  const auto plain = der(ref, hyp, 0.0, false);
  CHECK(plain.miss == doctest::Approx(1.0));
  CHECK(std::abs(plain.rate - 0.1) < 1e-12);

  const auto collar = der(ref, hyp, 0.25, false);
  CHECK(std::abs(collar.miss - 0.75) < 1e-12);
  CHECK(std::abs(collar.scored_ref - 9.5) < 1e-12);
  CHECK(std::abs(collar.rate * 100.0 - 7.8947368421) < 1e-6);
  CHECK(collar.mapping == std::vector<std::pair<std::string, std::string>>{{"spk1", "spkA"}});
}

TEST_CASE("der edges, confusion and overlap") {
  const SegmentSet ref{{"A", 1.0, 3.0}};
  const SegmentSet hyp{{"X", 0.0, 3.0}};
  CHECK(der(ref, hyp, 0.0, false).false_alarm == doctest::Approx(1.0));
  CHECK(der(ref, hyp, 0.0, true).rate == 0.0);

  const auto conf = der({{"A", 0.0, 10.0}}, {{"B", 0.0, 5.0}, {"C", 5.0, 10.0}}, 0.0, false);
  CHECK(conf.confusion == doctest::Approx(5.0));
  CHECK(conf.rate == doctest::Approx(0.5));

  const auto ov = der({{"A", 0.0, 4.0}, {"B", 2.0, 6.0}}, {{"X", 0.0, 6.0}}, 0.0, false);
  CHECK(ov.scored_ref == doctest::Approx(8.0));
  CHECK(ov.miss == doctest::Approx(2.0));
  CHECK(ov.confusion == doctest::Approx(2.0));
  CHECK(ov.rate == doctest::Approx(0.5));

  CHECK_THROWS_AS(der({}, hyp, 0.0, false), UndefinedRateError);
  CHECK_THROWS_AS(der({{"A", 0.0, 0.2}}, {}, 0.25, false), UndefinedRateError);
  CHECK_THROWS_AS(der({{"A", 2.0, 1.0}}, {}, 0.0, false), ContractError);
}

TEST_CASE("der is invariant to segment order and splitting") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> t(0.0, 20.0);
  std::uniform_int_distribution<int> spk(0, 2);
  for (int i = 0; i < 200; ++i) {
    SegmentSet ref, hyp;
    for (int s = 0; s < 5; ++s) {
      double a = t(rng), b = t(rng);
      if (a > b) std::swap(a, b);
      ref.push_back({"r" + std::to_string(spk(rng)), a, b + 0.1});
      double c = t(rng), d = t(rng);
      if (c > d) std::swap(c, d);
      hyp.push_back({"h" + std::to_string(spk(rng)), c, d + 0.1});
    }
    for (double collar : {0.0, 0.25}) {
      for (bool edges : {false, true}) {
        double base;
        try {
          base = der(ref, hyp, collar, edges).rate;
        } catch (const UndefinedRateError&) {
          continue;
        }
        SegmentSet shuffled = hyp;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        SegmentSet rshuf = ref;
        std::shuffle(rshuf.begin(), rshuf.end(), rng);
        CHECK(std::abs(der(rshuf, shuffled, collar, edges).rate - base) < 1e-12);

        SegmentSet split_ref;
        for (const auto& s : ref) {
          const double m = 0.5 * (s.onset + s.offset);
          split_ref.push_back({s.speaker, s.onset, m});
          split_ref.push_back({s.speaker, m, s.offset});
        }
        SegmentSet split_hyp;
        for (const auto& s : hyp) {
          const double m = s.onset + 0.3 * (s.offset - s.onset);
          split_hyp.push_back({s.speaker, s.onset, m});
          split_hyp.push_back({s.speaker, m, s.offset});
        }
        CHECK(std::abs(der(split_ref, split_hyp, collar, edges).rate - base) < 1e-9);
      }
    }
  }
}
