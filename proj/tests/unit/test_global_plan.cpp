#include <doctest.h>

#include <random>
#include <set>

#include "provkg/global_plan.hpp"
#include "provkg/planner.hpp"
#include "provkg/stats.hpp"
#include "provkg/workload.hpp"
#include "support.hpp"

using namespace provkg;

namespace {

GlobalPlan::MergeResult add_query(GlobalPlan& plan, const QueryGraph& q, KnowledgeGraph& g) {
  std::vector<std::size_t> all(q.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  StatsCatalog stats = compute_statistics(g);
  LocalPlan local = select_best_plan(build_and_or_tree(q, all), q, stats, g);
  return plan.merge(q, local, g);
}

oracle::Answers table_answers(const Table& t) {
  oracle::Answers out;
  t.for_each([&](const Row& r, const Polynomial& p) { out[r] = oracle::expand(p); });
  return out;
}

// Node tables against a from-scratch oracle evaluation of their key text.
std::string audit_nodes(const GlobalPlan& plan, const KnowledgeGraph& g) {
  for (std::size_t id = 0; id < plan.size(); ++id) {
    const auto& n = plan.node(id);
    std::string head;
    for (std::size_t c = 0; c < n.arity; ++c) head += " ?v" + std::to_string(c);
    QueryGraph q = parse_query("SELECT" + head + " WHERE { " + n.key + " }");
    std::string diff = oracle::compare(g, oracle::evaluate(q, g), table_answers(n.table));
    if (!diff.empty()) return n.key + ": " + diff;
  }
  return "";
}

}  // namespace

TEST_CASE("shared expression is stored once") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  GlobalPlan plan;
  CHECK_FALSE(plan.coverage().has_value());

  QueryGraph a = parse_query("SELECT * WHERE { ?s hadAdvisor ?p . ?p worksIn ?o }");
  auto ra = add_query(plan, a, g);
  // into an empty plan: one node per local node
  CHECK(plan.size() == 3);
  CHECK(plan.local_node_total() == 3);
  CHECK(ra.created.size() == 3);

  QueryGraph b = parse_query(
      "SELECT * WHERE { ?x hadAdvisor ?y . ?y worksIn ?z . ?x hasDegree PhD }");
  auto rb = add_query(plan, b, g);
  CHECK(plan.size() < plan.local_node_total());
  auto shared = plan.find(canonicalize_patterns(a, {0, 1}).text);
  REQUIRE(shared.has_value());
  const auto& node = plan.node(*shared);
  CHECK(node.pattern_count == 2);
  // the second plan either reuses the pair as its child or not at all, but
  // the key is never stored twice
  std::set<std::string> keys;
  for (std::size_t i = 0; i < plan.size(); ++i) CHECK(keys.insert(plan.node(i).key).second);
  CHECK(rb.root != ra.root);
  CHECK(audit_nodes(plan, g) == "");
}

TEST_CASE("two parents over one shared pair") {
  KnowledgeGraph g;
  // P1 and P2 are rare so every plan starts from their join
  g.insert_edge("a", "P1", "b");
  g.insert_edge("b", "P2", "c");
  for (int i = 0; i < 10; ++i) {
    g.insert_edge("c", "P3", "d" + std::to_string(i));
    g.insert_edge("c", "P4", "f" + std::to_string(i));
  }
  GlobalPlan plan;
  add_query(plan, parse_query("SELECT * WHERE { ?a P1 ?b . ?b P2 ?c . ?c P3 ?d }"), g);
  add_query(plan, parse_query("SELECT * WHERE { ?x P1 ?y . ?y P2 ?z . ?z P4 ?w }"), g);
  auto pair = plan.find(canonicalize_patterns(parse_query("SELECT * WHERE { ?a P1 ?b . ?b P2 ?c }"), {0, 1}).text);
  REQUIRE(pair.has_value());
  CHECK(plan.node(*pair).parents.size() == 2);
  CHECK(plan.size() == 7);
  CHECK(plan.local_node_total() == 10);
  CHECK(plan.coverage().has_value());
}

TEST_CASE("leaf materialization") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  GlobalPlan plan;
  add_query(plan, parse_query("SELECT * WHERE { ?s hadAdvisor ?p . ?p worksIn ?o }"), g);
  auto leaf = plan.find(canonicalize_patterns(parse_query("SELECT * WHERE { ?s hadAdvisor ?p }"), {0}).text);
  REQUIRE(leaf.has_value());
  std::set<std::string> polys;
  plan.node(*leaf).table.for_each([&](const Row&, const Polynomial& p) { polys.insert(p.to_string()); });
  CHECK(polys == std::set<std::string>{"e1", "e8", "e9", "e13", "e14"});

  // a predicate with no edges materializes to nothing
  add_query(plan, parse_query("SELECT * WHERE { ?s missing ?p . ?p worksIn ?o }"), g);
  auto none = plan.find(canonicalize_patterns(parse_query("SELECT * WHERE { ?s missing ?p }"), {0}).text);
  REQUIRE(none.has_value());
  CHECK(plan.node(*none).table.empty());
}

TEST_CASE("deltas touch only nodes with the predicate") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  GlobalPlan plan;
  add_query(plan, parse_query("SELECT * WHERE { ?a hasDegree PhD . ?a worksIn ?b . ?a coAuthor ?c }"), g);
  EdgeId id = g.insert_edge("Sarawagi", "worksIn", "IITB");
  auto delta = plan.delta_insert(*g.edge(id));
  CHECK_FALSE(delta.empty());
  PredicateId works = testing::pred(g, "worksIn");
  for (const auto& [node, rows] : delta) {
    const auto& preds = plan.node(node).predicates;
    CHECK(std::find(preds.begin(), preds.end(), works) != preds.end());
  }
  CHECK(audit_nodes(plan, g) == "");

  EdgeId other = g.insert_edge("x", "unrelated", "y");
  CHECK(plan.delta_insert(*g.edge(other)).empty());

  // an edge in no polynomial
  auto gone = g.delete_edge(other);
  auto dd = plan.delta_delete(*gone);
  CHECK(dd.pruned.empty());
  CHECK(dd.removed.empty());
}

TEST_CASE("deleting e14 removes one derivation at the root") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  GlobalPlan plan;
  QueryGraph q = testing::running_query();
  auto root = add_query(plan, q, g).root;
  // root rows bind every variable, so the two derivations are separate rows
  auto find_poly = [&]() {
    std::set<std::string> out;
    plan.node(root).table.for_each([&](const Row&, const Polynomial& p) {
      if (p.mentions(EdgeId(2)) && p.mentions(EdgeId(17))) out.insert(p.to_string());
    });
    return out;
  };
  CHECK(find_poly() == std::set<std::string>{"e2*e3*e6*e8*e17", "e2*e3*e5*e14*e17"});
  auto gone = g.delete_edge(EdgeId(14));
  auto dd = plan.delta_delete(*gone);
  CHECK(dd.removed.contains(root));
  CHECK(find_poly() == std::set<std::string>{"e2*e3*e6*e8*e17"});
  CHECK(audit_nodes(plan, g) == "");
}

TEST_CASE("deltas keep every table equal to re-materialization") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 15; ++trial) {
    KnowledgeGraph g;
    oracle::random_graph(rng, 60 + bounded(rng, 80), g);
    GlobalPlan plan;
    for (int k = 0; k < 3; ++k) add_query(plan, oracle::random_query(rng, g, 2 + bounded(rng, 3)), g);
    const std::size_t nodes = std::max<std::size_t>(6, g.edge_count() / 4);
    for (int step = 0; step < 40; ++step) {
      if (bounded(rng, 2) == 0 && g.edge_count() > 0) {
        auto it = g.edges().begin();
        std::advance(it, static_cast<std::ptrdiff_t>(bounded(rng, g.edge_count())));
        auto gone = g.delete_edge(it->first);
        plan.delta_delete(*gone);
      } else {
        EdgeId id = g.insert_edge("n" + std::to_string(bounded(rng, nodes)),
                                  g.predicate_name(PredicateId(static_cast<std::uint32_t>(bounded(rng, g.predicate_count())))),
                                  "n" + std::to_string(bounded(rng, nodes)));
        plan.delta_insert(*g.edge(id));
      }
      std::string diff = audit_nodes(plan, g);
      CAPTURE(step);
      REQUIRE(diff == "");
    }
  }
}
