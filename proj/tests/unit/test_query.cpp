#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "provkg/errors.hpp"
#include "provkg/query.hpp"
#include "provkg/workload.hpp"
#include "support.hpp"

using namespace provkg;

TEST_CASE("parse the running example") {
  QueryGraph q = testing::running_query();
  CHECK(q.size() == 5);
  REQUIRE(q.projection.size() == 2);
  CHECK(q.variables[q.projection[0]] == "prof");
  CHECK(q.variables[q.projection[1]] == "collab");
  CHECK(q.constants[q.patterns[0].predicate.id] == "hadAdvisor");
  CHECK(q.patterns[3].object.is_constant());
  CHECK(q.constants[q.patterns[3].object.id] == "PhD");
  CHECK(q.connected());
  CHECK(parse_query(pretty_print(q)).patterns == q.patterns);
}

TEST_CASE("parse edge cases") {
  QueryGraph one = parse_query("SELECT ?x WHERE { ?x p o . }");
  CHECK(one.size() == 1);
  CHECK(one.projection.size() == 1);

  QueryGraph star = parse_query("select * where { ?a <http://x/p> ?b . ?b q \"lit\" }");
  CHECK(star.size() == 2);
  CHECK(star.projection.size() == 2);
  CHECK(parse_query("SELECT DISTINCT ?a WHERE { ?a p ?b }").distinct);

  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x p ?y . FILTER(?y > 3) }"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x p ?y } LIMIT 3"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x p ?y . ?z q ?w }"), DisconnectedQueryError);
  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x p ?y"), ParseError);
  CHECK_THROWS_AS(parse_query("SELECT ?nope WHERE { ?x p ?y }"), ParseError);
  CHECK_THROWS_AS(parse_query("WHERE { ?x p ?y }"), ParseError);
  // constants do not connect components
  CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x p c . ?y q c }"), DisconnectedQueryError);
}

TEST_CASE("canonical forms") {
  auto a = canonicalize(parse_query("SELECT * WHERE { ?a p ?b . ?b q c }"));
  auto b = canonicalize(parse_query("SELECT * WHERE { ?y q c . ?x p ?y }"));
  CHECK(a == b);
  auto c = canonicalize(parse_query("SELECT * WHERE { ?a p ?b . ?a q c }"));
  CHECK_FALSE(a == c);

  QueryGraph q = testing::running_query();
  CHECK(canonicalize(q).text == canonicalize(q).text);
  // the canonical text reads back to the same form
  CHECK(canonicalize(parse_query(canonicalize(q).text)) == canonicalize(q));
}

TEST_CASE("canonical form ignores pattern order and variable names") {
  std::mt19937_64 rng(5);
  const char* preds[] = {"p", "q"};
  for (int trial = 0; trial < 200; ++trial) {
    // a random connected 4-pattern query over up to 4 variables
    std::vector<std::array<std::string, 3>> pats;
    for (int i = 0; i < 4; ++i) {
      std::string s = "?v" + std::to_string(i == 0 ? 0 : bounded(rng, i + 1) % (i + 1));
      std::string o = "?v" + std::to_string(i + 1);
      if (bounded(rng, 2)) std::swap(s, o);
      pats.push_back({s, preds[bounded(rng, 2)], o});
    }
    QueryGraph q1 = make_query(pats, {});
    auto shuffled = pats;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[bounded(rng, i)]);
    std::map<std::string, std::string> rename;
    for (int v = 0; v <= 4; ++v) rename["?v" + std::to_string(v)] = "?w" + std::to_string((v * 3 + 2) % 5);
    for (auto& p : shuffled) {
      p[0] = rename[p[0]];
      p[2] = rename[p[2]];
    }
    QueryGraph q2 = make_query(shuffled, {});
    CHECK(canonicalize_patterns(q1, {0, 1, 2, 3}).text == canonicalize_patterns(q2, {0, 1, 2, 3}).text);
  }
}

TEST_CASE("canonical form separates non-isomorphic queries") {
  // same multiset of predicates, different shape: chain vs star
  auto chain = canonicalize(parse_query("SELECT * WHERE { ?a p ?b . ?b p ?c . ?c p ?d }"));
  auto star = canonicalize(parse_query("SELECT * WHERE { ?a p ?b . ?a p ?c . ?a p ?d }"));
  auto in_star = canonicalize(parse_query("SELECT * WHERE { ?b p ?a . ?c p ?a . ?d p ?a }"));
  CHECK_FALSE(chain == star);
  CHECK_FALSE(star == in_star);
}

TEST_CASE("classification") {
  QueryGraph q = testing::running_query();
  auto c = classify_query(q);
  CHECK(c.multimap);
  REQUIRE(c.shared_groups.size() == 1);
  CHECK(c.shared_groups[0] == std::vector<std::size_t>{1, 4});
  CHECK(c.trigger.has_value());

  CHECK_FALSE(classify_query(parse_query("SELECT * WHERE { ?a p ?b . ?b q ?c . ?c r ?d }")).multimap);

  // the non-MultiMap example: two P4/P5 paths ending in different constants
  const char* fig = R"(SELECT * WHERE {
    ?x1 P1 ?x3 . ?x3 P2 ?x4 . ?x4 P3 ?x5 . ?x5 P4 ?x6 . ?x1 P4 ?x2 .
    ?x2 P5 C1 . ?x6 P5 C2 . })";
  QueryGraph f = parse_query(fig);
  PredicateMetadata meta;
  CHECK(classify_query(f).multimap);
  meta.flags["P5"].one_to_one = true;
  CHECK_FALSE(classify_query(f, meta).multimap);

  // a repeated asymmetric predicate along a cycle cannot fold onto one edge
  QueryGraph loop = parse_query("SELECT * WHERE { ?a in ?b . ?b in ?a . ?a q ?c }");
  CHECK(classify_query(loop).multimap);
  PredicateMetadata asym;
  asym.flags["in"].asymmetric = true;
  CHECK_FALSE(classify_query(loop, asym).multimap);

  // different constants in the same position never share an edge
  CHECK_FALSE(classify_query(parse_query("SELECT * WHERE { ?a p X . ?a p Y }")).multimap);
  CHECK(classify_query(parse_query("SELECT * WHERE { ?a p X . ?b p ?c . ?a q ?b }")).multimap);
}
