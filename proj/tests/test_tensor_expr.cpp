#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <invar/conversions.hpp>
#include <invar/tensor_expr.hpp>

using namespace invar;

namespace {

TensorExpr norm(TensorExpr e) {
  normalize_terms(e);
  return e;
}

bool equivalent(const std::string& a, const std::string& b) {
  return norm(parse_tensor_expr(a)) == norm(parse_tensor_expr(b));
}

}  // namespace

TEST_CASE("parse and render round trip", "[tensor_expr]") {
  for (const std::string src : {
           "R[a,b,-a,-b]",
           "3/2 * R[-a,-b,-c,-d] * R[a,b,c,d]",
           "R[] * R[]",
           "-R[a,-a] + 2 * g[a,b] * R[-a,-b]",
           "sig * R[] * R[] * R[]",
           "epsilon[a,b,c,d] * R[-a,-b,-e,-f] * R[-c,-d,e,f]",
           "1/6 * R[]",
       }) {
    TensorExpr e = parse_tensor_expr(src);
    TensorExpr back = parse_tensor_expr(to_string(e));
    CHECK(norm(back) == norm(e));
  }
}

TEST_CASE("weyl alias and scalar recognition", "[tensor_expr]") {
  TensorExpr w = parse_tensor_expr("W[a,b,c,d]");
  REQUIRE(w.terms.size() == 1);
  CHECK(w.terms[0].factors[0].name == "C");
  CHECK(norm(w) == norm(parse_tensor_expr("C[a,b,c,d]")));
  CHECK(!is_scalar(w));
  CHECK(is_scalar(parse_tensor_expr("C[a,b,c,d] * C[-a,-b,-c,-d]")));
}

TEST_CASE("parenthesized subexpressions distribute", "[tensor_expr]") {
  CHECK(equivalent("(R[] + 2 * R[a,-a]) * R[]", "R[] * R[] + 2 * R[a,-a] * R[]"));
  CHECK(equivalent("3 * (R[] - (R[] - 1/3 * R[]))", "R[]"));
}

TEST_CASE("rational arithmetic on coefficients is exact", "[tensor_expr]") {
  TensorExpr e = norm(parse_tensor_expr("1/3 * R[] + 1/6 * R[]"));
  REQUIRE(e.terms.size() == 1);
  CHECK(e.terms[0].coeff == Rational(1, 2));
  CHECK(norm(parse_tensor_expr("1/3 * R[] - 2/6 * R[]")).terms.empty());
  CHECK(to_string(norm(parse_tensor_expr("2/4 * R[]"))) == "1/2 * R[]");
}

TEST_CASE("parse errors carry positions", "[tensor_expr]") {
  CHECK_THROWS_AS(parse_tensor_expr("R[a,b"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("Q[a,b]"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("R[a,b,c]"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("sig[a]"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("R[a,b,-a,-b] +"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("R[a,b,-a,-b] R[]"), TensorParseError);
  CHECK_THROWS_AS(parse_tensor_expr("1/0 * R[]"), std::exception);

  try {
    parse_tensor_expr("R[a,) ]");
    FAIL("expected parse error");
  } catch (const TensorParseError& err) {
    CHECK(err.offset() == 4);
  }
}

TEST_CASE("validation rejects malformed index structure", "[tensor_expr]") {
  CHECK_THROWS_AS(parse_tensor_expr("R[a,a,b,c]"), TensorParseError);  // same variance twice
  CHECK_THROWS_AS(parse_tensor_expr("g[a,-b] * g[a,-c] * g[a,-d]"),
                  TensorParseError);                                   // three free occurrences
  CHECK_THROWS_AS(parse_tensor_expr("g[a,-b] + g[a,-c]"), TensorParseError);  // free sets differ
  CHECK_NOTHROW(parse_tensor_expr("g[a,-b] + g[a,-b]"));
  // A dummy already closed inside one factor is local to it; the product
  // reads as two independent traces.
  TensorExpr p = parse_tensor_expr("R[a,-a] * g[a,-a]");
  REQUIRE(p.terms.size() == 1);
  CHECK(dummy_labels(p.terms[0]).size() == 2);
}

TEST_CASE("products rename colliding dummies", "[tensor_expr]") {
  TensorExpr p = parse_tensor_expr("R[a,-a]") * parse_tensor_expr("R[a,-a]");
  REQUIRE(p.terms.size() == 1);
  CHECK_NOTHROW(validate(p));
  CHECK(dummy_labels(p.terms[0]).size() == 2);
  // A free label shared between the sides becomes a contraction.
  TensorExpr q = parse_tensor_expr("R[a,b]") * parse_tensor_expr("R[-a,-b]");
  CHECK(is_scalar(q));
}

TEST_CASE("metric contraction", "[tensor_expr]") {
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,-a]"))) == norm(parse_tensor_expr("4")));
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,b] * g[-a,-b]"))) ==
        norm(parse_tensor_expr("4")));
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,b] * g[-b,c] * g[-c,-a]"))) ==
        norm(parse_tensor_expr("4")));
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,b] * R[-a,-b]"))) ==
        norm(parse_tensor_expr("R[b,-b]")));
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,b] * g[c,d] * R[-a,-c,-b,-d]"))) ==
        norm(parse_tensor_expr("R[b,d,-b,-d]")));
  // Metrics with two free slots are kept.
  CHECK(norm(contract_metric(parse_tensor_expr("g[a,b] * R[]"))) ==
        norm(parse_tensor_expr("g[a,b] * R[]")));
}

TEST_CASE("ricci to riemann introduces fresh traces", "[tensor_expr]") {
  TensorExpr e = ricci_to_riemann(parse_tensor_expr("R[-b,-d] + R[] * g[-b,-d]"));
  CHECK_NOTHROW(validate(e));
  for (const auto& t : e.terms)
    for (const auto& f : t.factors)
      if (f.name == "R") CHECK(f.rank() == 4);
}

TEST_CASE("riemann traces collapse to ricci form", "[tensor_expr]") {
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[c,a,-c,b]"))) ==
        norm(parse_tensor_expr("R[a,b]")));
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[a,c,b,-c]"))) ==
        norm(parse_tensor_expr("R[a,b]")));
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[c,a,b,-c]"))) ==
        norm(parse_tensor_expr("-R[a,b]")));
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[a,c,-c,b]"))) ==
        norm(parse_tensor_expr("-R[a,b]")));
  CHECK(riemann_to_ricci(parse_tensor_expr("R[c,-c,a,b]")).terms.empty());
  CHECK(riemann_to_ricci(parse_tensor_expr("R[a,b,c,-c]")).terms.empty());
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[a,b,-a,-b]"))) == norm(parse_tensor_expr("R[]")));
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[a,b,-b,-a]"))) ==
        norm(parse_tensor_expr("-R[]")));
  CHECK(norm(riemann_to_ricci(parse_tensor_expr("R[a,-a]"))) == norm(parse_tensor_expr("R[]")));
}

TEST_CASE("weyl tensor is traceless", "[tensor_expr]") {
  for (const std::string src : {"g[a,c] * C[-a,-b,-c,-d]", "g[b,d] * C[-a,-b,-c,-d]",
                                "C[a,b,-a,-b]", "C[a,-b,-a,-d]"}) {
    TensorExpr e = tidy(riemann_to_ricci(tidy(weyl_to_riemann(parse_tensor_expr(src)))));
    INFO(src << " -> " << to_string(e));
    CHECK(e.terms.empty());
  }
}

TEST_CASE("weyl decomposition round trips", "[tensor_expr]") {
  // Each composition is the identity when the input is free of the tensor
  // the inner rewrite produces.
  for (const std::string src : {"R[a,b,c,d]", "R[a,-b,c,-d]", "R[a,b,-a,-c] * R[c,-b]"}) {
    TensorExpr e = parse_tensor_expr(src);
    CHECK(tidy(weyl_to_riemann(riemann_to_weyl(e))) == tidy(e));
  }
  for (const std::string src : {"C[-a,-b,-c,-d]", "C[a,b,c,d] * C[-a,-b,-c,-d]"}) {
    TensorExpr e = parse_tensor_expr(src);
    CHECK(tidy(riemann_to_weyl(weyl_to_riemann(e))) == tidy(e));
  }
}

TEST_CASE("double epsilon contraction", "[tensor_expr]") {
  TensorExpr full =
      tidy(expand_connected_epsilon_pairs(parse_tensor_expr("epsilon[a,b,c,d] * epsilon[-a,-b,-c,-d]")));
  REQUIRE(full.terms.size() == 1);
  CHECK(full.terms[0].coeff == 24);
  CHECK(full.terms[0].sigma_pow == 1);
  CHECK(full.terms[0].factors.empty());

  // Same value with the variance of both factors reversed slotwise.
  TensorExpr swapped =
      tidy(expand_connected_epsilon_pairs(parse_tensor_expr("epsilon[-a,-b,-c,-d] * epsilon[a,b,c,d]")));
  CHECK(swapped == full);

  TensorExpr two_free =
      tidy(expand_connected_epsilon_pairs(parse_tensor_expr("epsilon[a,b,c,d] * epsilon[-e,-f,-c,-d]")));
  TensorExpr expected =
      tidy(parse_tensor_expr("2 * sig * g[a,-e] * g[b,-f] - 2 * sig * g[a,-f] * g[b,-e]"));
  CHECK(two_free == expected);
}

TEST_CASE("epsilon pairs in separate components stay put", "[tensor_expr]") {
  TensorExpr e = parse_tensor_expr(
      "epsilon[a,b,c,d] * R[-a,-b,-c,-d] * epsilon[e,f,h,k] * R[-e,-f,-h,-k]");
  TensorExpr kept = expand_connected_epsilon_pairs(e);
  int epsilons = 0;
  REQUIRE(kept.terms.size() == 1);
  for (const auto& f : kept.terms[0].factors)
    if (f.name == "epsilon") ++epsilons;
  CHECK(epsilons == 2);

  // Once the two epsilons sit in one connected block they expand.
  TensorExpr linked = parse_tensor_expr(
      "epsilon[a,b,c,d] * R[-c,-d,-e,-f] * epsilon[-a,-b,m,n] * R[e,f,-m,-n]");
  TensorExpr expanded = expand_connected_epsilon_pairs(linked);
  CHECK(!expanded.terms.empty());
  for (const auto& t : expanded.terms)
    for (const auto& f : t.factors) CHECK(f.name != "epsilon");
}
