#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <string>

#include <invar/canonical.hpp>
#include <invar/conversions.hpp>
#include <invar/oracle.hpp>
#include <invar/random.hpp>
#include <invar/shape.hpp>

using namespace invar;

TEST_CASE("random curvature tensor has exactly the right symmetries", "[oracle]") {
  std::mt19937_64 rng(11);
  for (int sigma : {1, -1}) {
    CurvatureSample s = CurvatureSample::random(rng, sigma);
    bool nonzero = false;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            if (s.rie(a, b, c, d) != 0) nonzero = true;
            REQUIRE(s.rie(a, b, c, d) == -s.rie(b, a, c, d));
            REQUIRE(s.rie(a, b, c, d) == -s.rie(a, b, d, c));
            REQUIRE(s.rie(a, b, c, d) == s.rie(c, d, a, b));
            REQUIRE(s.rie(a, b, c, d) + s.rie(a, c, d, b) + s.rie(a, d, b, c) == 0);
          }
    CHECK(nonzero);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        REQUIRE(s.ricci[a * 4 + b] == s.ricci[b * 4 + a]);
        Rational weyl_trace = 0;
        for (int c = 0; c < 4; ++c) weyl_trace += s.frame[c] * s.weyl[s.idx4(c, a, c, b)];
        REQUIRE(weyl_trace == 0);
      }
  }
}

TEST_CASE("epsilon orientation follows the frame", "[oracle]") {
  std::mt19937_64 rng(12);
  for (int sigma : {1, -1}) {
    CurvatureSample s = CurvatureSample::random(rng, sigma);
    TensorExpr eps = parse_tensor_expr("epsilon[a,b,c,d]");
    std::map<std::string, int> tuple = {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}};
    CHECK(evaluate_component(eps, s, tuple) == sigma);
    TensorExpr full = parse_tensor_expr("epsilon[a,b,c,d] * epsilon[-a,-b,-c,-d]");
    CHECK(evaluate(full, s) == 24 * sigma);
  }
}

TEST_CASE("greedy contraction matches the naive sum", "[oracle]") {
  std::mt19937_64 rng(13);
  std::vector<Shape> shapes = {Shape(InvKind::I, 1), Shape(InvKind::I, 2), Shape(InvKind::D, 1),
                               Shape(InvKind::I, 3), Shape(InvKind::D, 2)};
  for (int sigma : {1, -1}) {
    CurvatureSample s = CurvatureSample::random(rng, sigma);
    for (const Shape& shape : shapes)
      for (int trial = 0; trial < 6; ++trial) {
        TensorTerm t = config_term(shape, random_signed_perm(rng, shape.n_slots()));
        REQUIRE(evaluate_term(t, s) == evaluate_term_naive(t, s));
      }
  }
}

TEST_CASE("canonicalization preserves the value of a configuration", "[oracle]") {
  std::mt19937_64 rng(14);
  std::vector<Shape> shapes = {Shape(InvKind::I, 1), Shape(InvKind::I, 2), Shape(InvKind::D, 1),
                               Shape(InvKind::I, 3), Shape(InvKind::D, 2)};
  CurvatureSample lor = CurvatureSample::random(rng, -1);
  CurvatureSample euc = CurvatureSample::random(rng, 1);
  for (const Shape& shape : shapes) {
    DoubleCosetCanonicalizer canon(shape);
    for (int trial = 0; trial < 12; ++trial) {
      SignedPerm g = random_signed_perm(rng, shape.n_slots());
      auto rep = canon.canonicalize(g);
      TensorTerm before = config_term(shape, g);
      for (const CurvatureSample& s : {std::cref(lor), std::cref(euc)}) {
        Rational v = evaluate_term(before, s);
        if (!rep) {
          REQUIRE(v == 0);
        } else {
          REQUIRE(v == evaluate_term(config_term(shape, *rep), s));
        }
      }
    }
  }
}

TEST_CASE("structure rewrites preserve values", "[oracle]") {
  std::mt19937_64 rng(15);
  struct Case {
    const char* src;
    TensorExpr (*rewrite)(TensorExpr);
  };
  const Case cases[] = {
      {"g[a,b] * R[-a,-b]", contract_metric},
      {"g[a,b] * g[c,d] * R[-a,-c,-b,-d]", contract_metric},
      {"R[c,a,-c,b] * R[-a,-b]", riemann_to_ricci},
      {"R[a,b,-b,-a] * R[]", riemann_to_ricci},
      {"R[a,-a] * R[]", ricci_to_riemann},
      {"R[a,b] * R[-a,-b]", ricci_to_riemann},
      {"C[a,b,c,d] * C[-a,-b,-c,-d]", weyl_to_riemann},
      {"C[a,b,c,d] * R[-a,-b,-c,-d]", weyl_to_riemann},
      {"R[a,b,c,d] * R[-a,-b,-c,-d]", riemann_to_weyl},
      {"epsilon[a,b,c,d] * R[-c,-d,-e,-f] * epsilon[-a,-b,m,n] * R[e,f,-m,-n]",
       expand_connected_epsilon_pairs},
      {"epsilon[a,b,c,d] * epsilon[-a,-b,-c,-d] * R[]", expand_connected_epsilon_pairs},
      {"epsilon[a,b,c,d] * R[-a,-b,-e,-f] * R[-c,-d,e,f]", tidy},
  };
  for (int sigma : {1, -1}) {
    CurvatureSample s = CurvatureSample::random(rng, sigma);
    for (const Case& c : cases) {
      TensorExpr e = parse_tensor_expr(c.src);
      INFO(c.src);
      CHECK(evaluate(e, s) == evaluate(c.rewrite(e), s));
    }
  }
}

TEST_CASE("componentwise identities hold on random tuples", "[oracle]") {
  std::mt19937_64 rng(16);
  TensorExpr bianchi = parse_tensor_expr("R[a,b,c,d] + R[a,c,d,b] + R[a,d,b,c]");
  TensorExpr pair_sym = parse_tensor_expr("R[a,b,c,d] - R[c,d,a,b]");
  for (int sigma : {1, -1}) {
    CurvatureSample s = CurvatureSample::random(rng, sigma);
    for (int trial = 0; trial < 20; ++trial) {
      std::map<std::string, int> tuple;
      for (const char* l : {"a", "b", "c", "d"})
        tuple[l] = static_cast<int>(random_below(rng, 4));
      CHECK(evaluate_component(bianchi, s, tuple) == 0);
      CHECK(evaluate_component(pair_sym, s, tuple) == 0);
    }
  }
}

TEST_CASE("certification accepts identities and rejects non-identities", "[oracle]") {
  CHECK(certify_zero(parse_tensor_expr("epsilon[a,b,c,d] * epsilon[-a,-b,-c,-d] - 24 * sig")).ok);
  CHECK(certify_zero(parse_tensor_expr("R[a,-a] - R[]")).ok);
  CertifyResult bad = certify_zero(parse_tensor_expr("R[] * R[] - R[a,-a] * R[b,-b] + R[]"));
  CHECK(!bad.ok);
  CHECK(bad.value != 0);
}
