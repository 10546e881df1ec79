#include <doctest.h>

#include <set>
#include <sstream>

#include "provkg/errors.hpp"
#include "provkg/synthetic.hpp"
#include "provkg/workload.hpp"
#include "support.hpp"

using namespace provkg;

TEST_CASE("update lines") {
  Update ins = parse_update_line("+ Ooi coAuthor Gehrke");
  CHECK(ins.kind == Update::Kind::Insert);
  CHECK(ins.subject == "Ooi");
  CHECK(ins.to_line() == "+ Ooi coAuthor Gehrke");
  Update del = parse_update_line("- e14");
  CHECK(del.kind == Update::Kind::Delete);
  REQUIRE(del.edge);
  CHECK(del.edge->value() == 14);
  Update by_triple = parse_update_line("- <http://a> <http://p> \"lit\"");
  CHECK(by_triple.object == "\"lit\"");
  CHECK(parse_update_line(by_triple.to_line()).subject == "http://a");

  for (const char* bad : {"* a b c", "+ a b", "- e", "+ a b c d"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_update_line(bad, 4), ParseError);
  }
  std::istringstream in("# comment\n\n+ a p b\n- e1\n");
  CHECK(read_workload(in).size() == 2);
}

TEST_CASE("presets") {
  const auto& p = workload_presets();
  REQUIRE(p.size() == 5);
  CHECK(p[0].delete_ratio == doctest::Approx(0.9));
  CHECK(p[2].delete_ratio == doctest::Approx(0.5));
  CHECK(p[4].delete_ratio == doctest::Approx(0.1));
}

TEST_CASE("generated workloads") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  std::vector<QueryGraph> qs{testing::running_query()};
  WorkloadConfig cfg{200, 0.5, 9};
  auto w = generate_workload(g, qs, cfg);
  REQUIRE(w.size() == 200);
  std::size_t deletes = 0;
  std::set<std::string> query_preds{"hadAdvisor", "worksIn", "coAuthor", "hasDegree"};

  // replay against a shadow copy: inserts are new unconnected pairs, deletes hit live edges
  KnowledgeGraph shadow = g;
  for (const auto& u : w) {
    CHECK(query_preds.contains(u.predicate));
    if (u.kind == Update::Kind::Delete) {
      ++deletes;
      auto id = find_edge(shadow, u.subject, u.predicate, u.object);
      REQUIRE(id);
      shadow.delete_edge(*id);
    } else {
      auto s = shadow.find_node(u.subject), o = shadow.find_node(u.object);
      REQUIRE((s && o));
      CHECK(shadow.lookup({s, std::nullopt, o}).empty());
      CHECK(shadow.lookup({o, std::nullopt, s}).empty());
      shadow.insert_edge(u.subject, u.predicate, u.object);
    }
  }
  CHECK(deletes == 100);

  std::ostringstream a, b;
  write_workload(a, w);
  write_workload(b, generate_workload(g, qs, cfg));
  CHECK(a.str() == b.str());
  CHECK(generate_workload(g, qs, {0, 0.5, 1}).empty());

  KnowledgeGraph empty;
  CHECK_THROWS_AS(generate_workload(empty, {}, cfg), Error);
}

TEST_CASE("example updates through both modes") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  std::vector<QueryGraph> qs{testing::running_query()};
  std::vector<Update> w{parse_update_line("+ Ooi coAuthor Gehrke"), parse_update_line("- e14")};

  Engine engine;
  engine.graph() = g;
  engine.register_query(qs[0]);
  BenchReport inc = apply_incremental(engine, w);
  CHECK(inc.rows_added == 1);
  CHECK(inc.rows_pruned == 1);
  CHECK(inc.rows_removed == 0);
  CHECK(inc.skipped == 0);
  for (const auto& t : inc.timings) CHECK(t.response + t.maintenance <= t.total);

  NaiveRunner naive(g, qs);
  BenchReport nv = naive.apply(w);
  CHECK(nv.rows_added == 1);
  CHECK(nv.rows_pruned == 1);
  std::vector<std::vector<BindingRow>> ans{engine.answers(0)};
  CHECK(canonical_answer_dump(engine.graph(), qs, ans) == naive.dump_answers_jsonl());

  BenchReport none = apply_incremental(engine, {});
  CHECK(none.updates == 0);
  CHECK(none.total_seconds == 0.0);
  CHECK(none.rows_added == 0);

  BenchReport skip = apply_incremental(engine, {parse_update_line("- nobody knows nothing")});
  CHECK(skip.skipped == 1);
  CHECK(skip.warnings.size() == 1);
}

TEST_CASE("synthetic generator") {
  SyntheticConfig cfg;
  cfg.edges = 3000;
  cfg.nodes = 600;
  cfg.predicates = 8;
  cfg.queries = 12;
  KnowledgeGraph g;
  generate_synthetic_graph(cfg, g);
  CHECK(g.edge_count() == 3000);
  std::set<std::tuple<NodeId, PredicateId, NodeId>> triples;
  for (const auto& [id, e] : g.edges()) {
    CHECK(e.subject != e.object);
    CHECK(triples.insert({e.subject, e.predicate, e.object}).second);
  }
  auto qs = generate_synthetic_queries(cfg, g);
  REQUIRE(qs.size() == 12);
  std::set<std::string> forms;
  for (const auto& q : qs) {
    CHECK(q.size() >= cfg.min_patterns);
    CHECK(q.size() <= cfg.max_patterns);
    CHECK(forms.insert(canonicalize(q).text).second);
    CHECK_FALSE(evaluate_bgp(q, g).empty());
  }
  KnowledgeGraph again;
  generate_synthetic_graph(cfg, again);
  CHECK(again.edges() == g.edges());
}
