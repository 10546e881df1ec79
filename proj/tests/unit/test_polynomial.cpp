#include <doctest.h>

#include <random>

#include "provkg/errors.hpp"
#include "provkg/oracle.hpp"
#include "provkg/polynomial.hpp"
#include "provkg/workload.hpp"

using namespace provkg;

namespace {

Polynomial P(const char* text) { return Polynomial::parse(text); }
Polynomial sym(std::uint64_t id) { return Polynomial(EdgeId(id)); }

Polynomial random_poly(std::mt19937_64& rng) {
  Polynomial p;
  std::size_t terms = bounded(rng, 4);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<EdgeId> edges;
    std::size_t deg = bounded(rng, 4);
    for (std::size_t k = 0; k < deg; ++k) edges.push_back(EdgeId(1 + bounded(rng, 6)));
    p += Polynomial(Monomial::from_edges(edges), 1 + bounded(rng, 3));
  }
  return p;
}

}  // namespace

TEST_CASE("text form") {
  CHECK(Polynomial().to_string() == "0");
  CHECK(Polynomial::one().to_string() == "1");
  CHECK(P("e3*e1").to_string() == "e1*e3");
  CHECK(P("e2*e2").to_string() == "e2^2");
  CHECK(P("e1 + e1").to_string() == "2*e1");
  for (const char* text : {"0", "1", "e1*e2^2 + 2*e3", "e2*e3*e6*e8*e17 + e2*e3*e5*e14*e17", "3*e4^3 + e1 + 1"}) {
    CAPTURE(text);
    CHECK(P(text).to_string() == text);
  }
  CHECK_THROWS_AS(P("e1 +"), ParseError);
  CHECK_THROWS_AS(P("x1"), ParseError);
  CHECK_THROWS_AS(P("e1^0"), ParseError);
}

TEST_CASE("running example arithmetic") {
  Polynomial d1 = sym(2) * sym(3) * sym(6) * sym(8) * sym(17);
  Polynomial d2 = sym(2) * sym(3) * sym(5) * sym(14) * sym(17);
  Polynomial table1 = poly_add(d1, d2);
  CHECK(table1.to_string() == "e2*e3*e6*e8*e17 + e2*e3*e5*e14*e17");
  CHECK(poly_add(table1, Polynomial::zero()) == table1);

  CHECK(poly_mul(sym(1), sym(3)).to_string() == "e1*e3");
  CHECK(poly_mul(table1, Polynomial::one()) == table1);
  CHECK(poly_mul(sym(5) + sym(6), sym(2)) == P("e2*e5 + e2*e6"));

  CHECK(evaluate_under_deletion(table1, EdgeId(14)));
  CHECK_FALSE(evaluate_under_deletion(table1, EdgeId(2)));
  CHECK_FALSE(evaluate_under_deletion(Polynomial::zero(), EdgeId(1)));
  CHECK(prune_monomials(table1, EdgeId(14)).to_string() == "e2*e3*e6*e8*e17");
  CHECK(prune_monomials(table1, EdgeId(2)).is_zero());
  CHECK(prune_monomials(table1, EdgeId(99)) == table1);
}

TEST_CASE("exponents, subtraction and multiplicity division") {
  Polynomial p = P("e7*e9*e10*e18^2");
  CHECK(p.terms()[0].monomial.exponent_of(EdgeId(18)) == 2);
  CHECK(p.terms()[0].monomial.degree() == 5);
  CHECK(P("2*e1*e18^2 + e3").divided_by_multiplicity(EdgeId(18)) == P("e1*e18^2 + e3"));
  CHECK_THROWS_AS(P("e18^2").divided_by_multiplicity(EdgeId(18)), std::logic_error);
  CHECK(P("2*e1 + e2").minus(P("e1")) == P("e1 + e2"));
  CHECK_THROWS_AS(P("e1").minus(P("e2")), std::logic_error);
  CHECK(P("e1*e2 + 2*e1^2*e2").edges() == std::vector<EdgeId>{EdgeId(1), EdgeId(2)});
  CHECK(P("3*e1^2*e2").collapsed() == P("e1*e2"));
  CHECK(P("e1*e2^2 + e2*e1").why_provenance() == std::set<std::set<EdgeId>>{{EdgeId(1), EdgeId(2)}});
}

TEST_CASE("monomial order is graded reverse lexicographic, descending") {
  // higher degree first
  CHECK(P("e1 + e1*e2").to_string() == "e1*e2 + e1");
  // same degree: the monomial with the smaller last differing symbol power comes first
  CHECK(P("e1*e3 + e2*e2").to_string() == "e2^2 + e1*e3");
  CHECK(canonical_compare(Monomial::from_edges({EdgeId(2), EdgeId(2)}),
                          Monomial::from_edges({EdgeId(1), EdgeId(3)})) < 0);
  CHECK(canonical_compare(Monomial(EdgeId(4)), Monomial(EdgeId(4))) == 0);
}

TEST_CASE("laws against expanded multisets") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Polynomial a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    auto ea = oracle::expand(a), eb = oracle::expand(b), ec = oracle::expand(c);
    CHECK(oracle::expand(a + b) == oracle::add(ea, eb));
    CHECK(oracle::expand(a * b) == oracle::mul(ea, eb));
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(Polynomial::parse(a.to_string()) == a);
  }
}
