#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "invar/enumerate.hpp"
#include "invar/oracle.hpp"

using namespace invar;

namespace {

std::uint64_t multichoose(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) r = r * (n + i) / (i + 1);
  return r;
}

std::set<SignedPerm> rep_set(const Census& census) {
  std::set<SignedPerm> reps;
  for (const auto& e : census.entries) reps.insert(e.rep);
  return reps;
}

}  // namespace

TEST_CASE("matching rank and unrank are inverse bijections", "[enumerate]") {
  for (int n : {2, 4, 6, 8}) {
    std::uint64_t total = detail::matching_count(n);
    std::set<std::uint64_t> keys;
    for (std::uint64_t r = 0; r < total; ++r) {
      detail::Matching m = detail::matching_unrank(n, r);
      for (int i = 0; i < n; ++i) {
        REQUIRE(m.partner[i] != i);
        REQUIRE(m.partner[m.partner[i]] == i);
      }
      REQUIRE(detail::matching_rank(m) == r);
      keys.insert(detail::matching_key(m));
    }
    REQUIRE(keys.size() == total);
  }
  REQUIRE(detail::matching_count(8) == 105);
  REQUIRE(detail::matching_count(16) == 2027025);

  detail::Matching first = detail::matching_unrank(8, 0);
  for (int i = 0; i < 8; i += 2) REQUIRE(first.partner[i] == i + 1);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> slots(16);
    for (int i = 0; i < 16; ++i) slots[i] = i;
    shuffle_vector(slots, rng);
    detail::Matching m;
    m.n = 16;
    for (int i = 0; i < 16; i += 2) {
      m.partner[slots[i]] = static_cast<std::uint8_t>(slots[i + 1]);
      m.partner[slots[i + 1]] = static_cast<std::uint8_t>(slots[i]);
    }
    std::uint64_t r = detail::matching_rank(m);
    REQUIRE(r < detail::matching_count(16));
    REQUIRE(detail::matching_unrank(16, r) == m);
  }
}

TEST_CASE("matchings transform consistently with configurations", "[enumerate]") {
  Shape shape(InvKind::I, 2);
  std::mt19937_64 rng(11);
  auto s_gens = shape.slot_generators();
  for (int trial = 0; trial < 100; ++trial) {
    SignedPerm g = random_signed_perm(rng, shape.n_slots());
    detail::Matching m = detail::matching_of_config(shape, g);
    SignedPerm s = random_word(rng, s_gens, shape.n_slots());
    REQUIRE(detail::apply_to_matching(s, m) ==
            detail::matching_of_config(shape, compose(s, g)));
  }
}

TEST_CASE("exhaustive census of single-factor shapes", "[enumerate]") {
  Census inv1 = exhaustive_census(Shape(InvKind::I, 1));
  REQUIRE(inv1.total_matchings == 3);
  REQUIRE(inv1.entries.size() == 1);
  REQUIRE(inv1.entries[0].matchings == 2);
  REQUIRE_FALSE(inv1.entries[0].reducible);
  REQUIRE(inv1.zero_matchings == 1);
  REQUIRE(inv1.entries[0].rep ==
          SignedPerm::from_images(std::vector<int>{0, 2, 1, 3}, 1));

  Census dual1 = exhaustive_census(Shape(InvKind::D, 1));
  REQUIRE(dual1.total_matchings == 105);
  REQUIRE(dual1.entries.size() == 1);
  REQUIRE(dual1.entries[0].matchings == 24);
  REQUIRE(dual1.zero_matchings == 81);
  REQUIRE_FALSE(dual1.entries[0].reducible);
}

TEST_CASE("irreducible class counts at low degree", "[enumerate]") {
  Census inv2 = exhaustive_census(Shape(InvKind::I, 2));
  Census inv3 = exhaustive_census(Shape(InvKind::I, 3));
  Census dual2 = exhaustive_census(Shape(InvKind::D, 2));

  REQUIRE(inv2.irreducible_count() == 3);
  REQUIRE(inv3.irreducible_count() == 9);
  REQUIRE(dual2.irreducible_count() == 4);

  // Reducible classes are in bijection with multisets of lower-degree
  // irreducible classes, so the totals follow from the irreducible counts.
  std::uint64_t i1 = 1, i2 = inv2.irreducible_count();
  REQUIRE(inv2.entries.size() == i2 + multichoose(i1, 2));
  REQUIRE(inv3.entries.size() ==
          inv3.irreducible_count() + i2 * i1 + multichoose(i1, 3));
  REQUIRE(dual2.entries.size() == dual2.irreducible_count() + 1 * i1);
  REQUIRE(inv2.entries.size() == 4);
  REQUIRE(inv3.entries.size() == 13);
  REQUIRE(dual2.entries.size() == 5);

  for (const auto& census : {inv2, inv3, dual2}) {
    std::uint64_t covered = census.zero_matchings;
    for (const auto& e : census.entries) {
      covered += e.matchings;
      REQUIRE(e.rep.sign() == 1);
    }
    REQUIRE(covered == census.total_matchings);
  }
}

TEST_CASE("randomized census reproduces exhaustive classes", "[enumerate]") {
  RandomCensusOptions opt;
  opt.seed = 0xabcd;
  opt.min_window = 20000;
  for (Shape shape : {Shape(InvKind::I, 2), Shape(InvKind::I, 3),
                      Shape(InvKind::D, 2)}) {
    Census exact = exhaustive_census(shape);
    Census sampled = random_census(shape, opt);
    REQUIRE(rep_set(sampled) == rep_set(exact));
    for (const auto& e : sampled.entries) REQUIRE(e.matchings == 0);

    Census again = random_census(shape, opt);
    REQUIRE(again.samples == sampled.samples);
    REQUIRE(rep_set(again) == rep_set(sampled));
  }
}

TEST_CASE("reducibility flags agree between sweeps", "[enumerate]") {
  Shape shape(InvKind::I, 3);
  Census exact = exhaustive_census(shape);
  RandomCensusOptions opt;
  opt.seed = 99;
  opt.min_window = 20000;
  Census sampled = random_census(shape, opt);
  REQUIRE(sampled.entries.size() == exact.entries.size());
  for (std::size_t i = 0; i < exact.entries.size(); ++i) {
    REQUIRE(sampled.entries[i].rep == exact.entries[i].rep);
    REQUIRE(sampled.entries[i].reducible == exact.entries[i].reducible);
  }
}

TEST_CASE("composed product classes match exhaustive reducible classes", "[enumerate]") {
  CanonicalizerCache cache;
  RandomCensusOptions ropt;
  ropt.seed = 5;
  ropt.min_window = 20000;
  auto exact = census_table(3, 2, ropt, cache, 16);
  auto sampled = census_table(3, 2, ropt, cache, 0);
  REQUIRE(exact.size() == 5);
  REQUIRE(sampled.size() == 5);
  for (const auto& [shape, census] : exact) {
    const Census& other = sampled.at(shape);
    REQUIRE(other.entries.size() == census.entries.size());
    for (std::size_t i = 0; i < census.entries.size(); ++i) {
      REQUIRE(other.entries[i].rep == census.entries[i].rep);
      REQUIRE(other.entries[i].reducible == census.entries[i].reducible);
    }
  }

  const Census& inv3 = exact.at(Shape(InvKind::I, 3));
  auto composed = detail::composed_product_entries(inv3.shape, exact, cache);
  REQUIRE(composed.size() == 4);
}

TEST_CASE("component split factorizes values", "[enumerate][oracle]") {
  CanonicalizerCache cache;

  Census inv2 = exhaustive_census(Shape(InvKind::I, 2));
  for (const auto& e : inv2.entries) {
    if (!e.reducible) continue;
    SplitResult split = split_and_canonicalize(inv2.shape, e.rep, cache);
    REQUIRE_FALSE(split.zero);
    REQUIRE(split.parts.size() == 2);
    for (const auto& [part_shape, part_rep] : split.parts) {
      REQUIRE(part_shape == Shape(InvKind::I, 1));
      REQUIRE(part_rep == SignedPerm::from_images(std::vector<int>{0, 2, 1, 3}, 1));
    }
  }

  std::mt19937_64 rng(0x5eed);
  for (Shape shape : {Shape(InvKind::I, 3), Shape(InvKind::D, 2)}) {
    std::vector<CurvatureSample> samples{CurvatureSample::random(rng, 1),
                                         CurvatureSample::random(rng, -1)};
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
      SignedPerm g = random_signed_perm(rng, shape.n_slots(), true);
      SplitResult split = split_and_canonicalize(shape, g, cache);
      for (const auto& s : samples) {
        Rational whole = evaluate_term(config_term(shape, g), s);
        if (split.zero) {
          REQUIRE(whole == 0);
          continue;
        }
        Rational product = split.sign;
        for (const auto& [part_shape, part_rep] : split.parts)
          product *= evaluate_term(config_term(part_shape, part_rep), s);
        REQUIRE(whole == product);
        ++checked;
      }
    }
    REQUIRE(checked > 0);
  }
}
