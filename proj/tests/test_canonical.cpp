#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <vector>

#include <invar/canonical.hpp>
#include <invar/perm_group.hpp>
#include <invar/permutation.hpp>
#include <invar/random.hpp>
#include <invar/shape.hpp>

using namespace invar;

namespace {

SignedPerm perm(std::vector<int> images, int sign = +1) {
  return SignedPerm::from_images(images, sign);
}

}  // namespace

TEST_CASE("single curvature factor, full contraction", "[canonical]") {
  Shape shape(InvKind::I, 1);
  DoubleCosetCanonicalizer canon(shape);

  // Contracting slots 1,2 and 3,4 of one curvature factor hits both
  // antisymmetric pairs: the monomial vanishes identically.
  CHECK(!canon.canonicalize(perm({0, 1, 2, 3})).has_value());

  // The double trace over slots (1,3) and (2,4) is the scalar curvature
  // square's building block; its configuration is already canonical.
  auto rep = canon.canonicalize(perm({0, 2, 1, 3}));
  REQUIRE(rep.has_value());
  CHECK(*rep == perm({0, 2, 1, 3}, +1));

  // Swapping the two contravariant slots flips the sign only.
  auto swapped = canon.canonicalize(perm({1, 2, 0, 3}));
  REQUIRE(swapped.has_value());
  CHECK(*swapped == perm({0, 2, 1, 3}, -1));
}

TEST_CASE("all degree-1 configurations fall into one class", "[canonical]") {
  Shape shape(InvKind::I, 1);
  DoubleCosetCanonicalizer canon(shape);

  std::vector<int> images = {0, 1, 2, 3};
  int zero = 0, nonzero = 0;
  do {
    auto rep = canon.canonicalize(SignedPerm::from_images(images));
    if (!rep) {
      ++zero;
    } else {
      ++nonzero;
      CHECK(rep->same_images(perm({0, 2, 1, 3})));
    }
  } while (std::next_permutation(images.begin(), images.end()));
  // 3 slot matchings x 8 labelings each; the matching {12}{34} vanishes.
  CHECK(zero == 8);
  CHECK(nonzero == 16);
}

TEST_CASE("agrees with exhaustive double-coset minimum at degree 2", "[canonical]") {
  Shape shape(InvKind::I, 2);
  auto s = PermGroup::from_generators(shape.slot_generators(), shape.n_slots());
  auto d = PermGroup::from_generators(shape.dummy_generators(), shape.n_slots());
  REQUIRE(s.order() == 128);
  REQUIRE(d.order() == 384);

  DoubleCosetCanonicalizer canon(s, d);
  std::mt19937_64 rng(20260814);
  for (int trial = 0; trial < 200; ++trial) {
    SignedPerm g = random_signed_perm(rng, shape.n_slots(), true);
    auto fast = canon.canonicalize(g);
    auto slow = brute_force_double_coset_rep(g, s, d);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) CHECK(*fast == *slow);
  }
}

TEST_CASE("agrees with exhaustive double-coset minimum on dual shapes", "[canonical]") {
  Shape shape(InvKind::D, 1);
  auto s = PermGroup::from_generators(shape.slot_generators(), shape.n_slots());
  auto d = PermGroup::from_generators(shape.dummy_generators(), shape.n_slots());
  REQUIRE(s.order() == 24 * 8);
  REQUIRE(d.order() == 384);

  DoubleCosetCanonicalizer canon(s, d);

  // Any contraction between two slots of the antisymmetric factor vanishes.
  CHECK(!canon.canonicalize(perm({0, 1, 2, 3, 4, 5, 6, 7})).has_value());
  // Fully linking the two factors survives (one class at this degree).
  auto linked = canon.canonicalize(perm({4, 0, 5, 1, 6, 2, 7, 3}));
  CHECK(linked.has_value());

  std::mt19937_64 rng(977);
  for (int trial = 0; trial < 100; ++trial) {
    SignedPerm g = random_signed_perm(rng, shape.n_slots(), true);
    auto fast = canon.canonicalize(g);
    auto slow = brute_force_double_coset_rep(g, s, d);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) CHECK(*fast == *slow);
  }
}

TEST_CASE("idempotent, coset invariant, odd under negation", "[canonical]") {
  std::mt19937_64 rng(42);
  std::vector<Shape> shapes = {Shape(InvKind::I, 1), Shape(InvKind::I, 2), Shape(InvKind::I, 3),
                               Shape(InvKind::D, 1), Shape(InvKind::D, 2)};
  for (const Shape& shape : shapes) {
    int n = shape.n_slots();
    auto s_gens = shape.slot_generators();
    auto d_gens = shape.dummy_generators();
    DoubleCosetCanonicalizer canon(shape);
    for (int trial = 0; trial < 40; ++trial) {
      SignedPerm g = random_signed_perm(rng, n);
      auto rep = canon.canonicalize(g);

      SignedPerm moved = compose(random_word(rng, s_gens, n), compose(g, random_word(rng, d_gens, n)));
      auto rep2 = canon.canonicalize(moved);
      REQUIRE(rep.has_value() == rep2.has_value());
      if (rep) {
        CHECK(*rep == *rep2);
        auto again = canon.canonicalize(*rep);
        REQUIRE(again.has_value());
        CHECK(*again == *rep);
        auto negated = canon.canonicalize(g.negated());
        REQUIRE(negated.has_value());
        CHECK(*negated == rep->negated());
      } else {
        CHECK(!canon.canonicalize(g.negated()).has_value());
      }
    }
  }
}

TEST_CASE("trivial symmetry groups leave configurations untouched", "[canonical]") {
  int n = 5;
  DoubleCosetCanonicalizer canon(std::vector<SignedPerm>{}, std::vector<SignedPerm>{}, n);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    SignedPerm g = random_signed_perm(rng, n, true);
    auto rep = canon.canonicalize(g);
    REQUIRE(rep.has_value());
    CHECK(*rep == g);
  }
}
