#include <doctest.h>

#include "provkg/errors.hpp"
#include "provkg/subquery.hpp"
#include "support.hpp"

using namespace provkg;

// Ordinals of the running example:
// 0 ?stud hadAdvisor ?prof, 1 ?prof worksIn ?org2, 2 ?collab coAuthor ?stud,
// 3 ?collab hasDegree PhD, 4 ?collab worksIn ?org1
TEST_CASE("running example subqueries") {
  QueryGraph q = testing::running_query();
  auto sqs = generate_subqueries(q);
  REQUIRE(sqs.size() == 5);

  CHECK(sqs[0].type == SubqueryType::II);
  CHECK(sqs[0].sq1 == std::vector<std::size_t>{2, 3, 4});
  CHECK(sqs[0].sq2 == std::vector<std::size_t>{1});
  CHECK(sqs[0].subject_side == Side::Sq1);
  CHECK(sqs[0].object_side == Side::Sq2);

  CHECK(sqs[1].type == SubqueryType::I);
  CHECK(sqs[1].subject_side == Side::Sq1);
  CHECK(sqs[1].object_side == Side::Free);

  // removing coAuthor leaves two components of two patterns each
  CHECK(sqs[2].type == SubqueryType::III);
  CHECK(sqs[2].sq1.size() == 2);
  CHECK(sqs[2].sq2.size() == 2);
  CHECK(sqs[2].sq1 == std::vector<std::size_t>{3, 4});
  CHECK(sqs[2].sq2 == std::vector<std::size_t>{0, 1});

  CHECK(sqs[3].type == SubqueryType::I);
  CHECK(sqs[4].type == SubqueryType::I);
  CHECK(sqs[4].object_side == Side::Free);

  for (const auto& s : sqs) {
    CHECK(s.sq1.size() + s.sq2.size() == q.size() - 1);
  }
}

TEST_CASE("cycles give Type IV") {
  QueryGraph tri = parse_query("SELECT * WHERE { ?a p ?b . ?b q ?c . ?c r ?a }");
  for (const auto& s : generate_subqueries(tri)) {
    CHECK(s.type == SubqueryType::IV);
    CHECK(s.sq1.size() == 2);
    CHECK(s.sq2.empty());
    CHECK(s.subject_side == Side::Sq1);
    CHECK(s.object_side == Side::Sq1);
  }
  CHECK_THROWS_AS(generate_subqueries(parse_query("SELECT ?x WHERE { ?x p o }")), Error);
}

TEST_CASE("two single-pattern components") {
  // removing the middle of a 3-chain leaves two single patterns; both sides
  // are materialized, as for Type III
  QueryGraph chain = parse_query("SELECT * WHERE { ?a p ?b . ?b q ?c . ?c r ?d }");
  auto sqs = generate_subqueries(chain);
  CHECK(sqs[0].type == SubqueryType::I);
  CHECK(sqs[1].type == SubqueryType::III);
  CHECK(sqs[1].sq1 == std::vector<std::size_t>{0});
  CHECK(sqs[1].sq2 == std::vector<std::size_t>{2});
  CHECK(sqs[2].type == SubqueryType::I);
}

TEST_CASE("connection point bounds") {
  CHECK(expected_connection_point_bound(SubqueryType::III, 3, 5) == 8);
  CHECK(expected_connection_point_bound(SubqueryType::IV, 4, 0) == 8);
  CHECK(expected_connection_point_bound(SubqueryType::I, 0, 0) == 0);
  CHECK(expected_connection_point_bound(SubqueryType::I, 6, 0) == 6);
  CHECK(expected_connection_point_bound(SubqueryType::II, 6, 0) == 6);
}

TEST_CASE("debug record") {
  QueryGraph q = testing::running_query();
  auto sqs = generate_subqueries(q);
  std::string j = subquery_json(q, sqs[2], 7);
  CHECK(j.find("\"III\"") != std::string::npos);
  CHECK(j.find("7") != std::string::npos);
}
