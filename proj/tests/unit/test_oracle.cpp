#include <doctest.h>

#include "provkg/oracle.hpp"
#include "support.hpp"

using namespace provkg;

TEST_CASE("oracle reproduces the running example") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  auto ans = oracle::evaluate(testing::running_query(), g);
  REQUIRE(ans.size() == 1);
  CHECK(oracle::render(ans.begin()->second) == "e2*e3*e5*e14*e17 + e2*e3*e6*e8*e17");
}

TEST_CASE("short verification run passes") {
  oracle::VerifyConfig cfg;
  cfg.trials = 6;
  cfg.updates = 120;
  cfg.seed = 77;
  auto report = oracle::run_verify(cfg);
  CHECK(report.ok());
  CHECK(report.equivalence.checks > 6 * 120);
  CHECK(report.lemmas.checks > 0);
  CHECK_FALSE(report.failing_seed.has_value());
}

TEST_CASE("unpruned deletions are caught and replayable") {
  oracle::VerifyConfig cfg;
  cfg.trials = 10;
  cfg.updates = 200;
  cfg.fault_skip_prune = true;
  auto report = oracle::run_verify(cfg);
  CHECK_FALSE(report.ok());
  REQUIRE(report.failing_seed.has_value());
  REQUIRE(report.failing_step.has_value());

  oracle::VerifyConfig replay = cfg;
  replay.replay_seed = report.failing_seed;
  replay.updates = *report.failing_step;
  CHECK_FALSE(oracle::run_verify(replay).ok());
  replay.fault_skip_prune = false;
  CHECK(oracle::run_verify(replay).ok());
}

TEST_CASE("semiring suite") {
  auto r = oracle::run_semiring_suite(700, 5);
  CHECK(r.ok());
  CHECK(r.checks >= 700);
}
