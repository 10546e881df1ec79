#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "provkg/planner.hpp"
#include "provkg/stats.hpp"
#include "provkg/workload.hpp"
#include "support.hpp"

using namespace provkg;

namespace {

void random_graph(std::mt19937_64& rng, KnowledgeGraph& g, std::size_t edges, std::size_t nodes,
                  std::size_t preds) {
  for (std::size_t i = 0; i < edges; ++i) {
    g.insert_edge("n" + std::to_string(bounded(rng, nodes)), "p" + std::to_string(bounded(rng, preds)),
                  "n" + std::to_string(bounded(rng, nodes)));
  }
}

// Connected pattern subsets by search over shared variables, written
// independently of QueryGraph::connected.
bool connected_subset(const QueryGraph& q, const std::vector<std::size_t>& subset) {
  std::set<std::size_t> seen{subset.front()};
  std::vector<std::size_t> stack{subset.front()};
  while (!stack.empty()) {
    std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b : subset) {
      if (seen.contains(b)) continue;
      const auto& x = q.patterns[a];
      const auto& y = q.patterns[b];
      bool share = false;
      for (const Term& s : {x.subject, x.object}) {
        for (const Term& t : {y.subject, y.object}) share |= s.is_variable() && s == t;
      }
      if (share) {
        seen.insert(b);
        stack.push_back(b);
      }
    }
  }
  return seen.size() == subset.size();
}

}  // namespace

TEST_CASE("characteristic sets on the fixture") {
  KnowledgeGraph g;
  testing::load_fig1(g);
  StatsCatalog stats = compute_statistics(g);
  const auto& sara = stats.characteristic_set(testing::node(g, "Sarawagi"));
  for (const char* p : {"coAuthor", "hasDegree", "hadAdvisor"}) {
    CHECK(std::find(sara.begin(), sara.end(), testing::pred(g, p)) != sara.end());
  }
  // PhD has no outgoing edges
  CHECK(stats.characteristic_set(testing::node(g, "PhD")).empty());
  CHECK(stats.total_edges() == 17);

  QueryGraph one = parse_query("SELECT * WHERE { ?x hadAdvisor ?y }");
  // the fixture carries five hadAdvisor edges (e9 included)
  CHECK(estimate_cardinality(one, {0}, stats, g) == doctest::Approx(5.0));
}

TEST_CASE("empty catalog") {
  KnowledgeGraph g;
  StatsCatalog stats = compute_statistics(g);
  CHECK(stats.empty());
  CHECK(stats.total_edges() == 0);
  QueryGraph q = parse_query("SELECT * WHERE { ?x p ?y . ?y q ?z }");
  CHECK(estimate_cardinality(q, {0, 1}, stats, g) == 0.0);
  CHECK(estimate_cardinality(q, {0}, stats, g) == 0.0);
}

TEST_CASE("pair counts match brute-force grouping") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    KnowledgeGraph g;
    random_graph(rng, g, 100, 30, 4);
    StatsCatalog stats = compute_statistics(g);

    std::map<NodeId, std::set<PredicateId>> cs;
    std::set<std::tuple<NodeId, PredicateId, NodeId>> pairs;
    for (const auto& [id, e] : g.edges()) {
      cs[e.subject].insert(e.predicate);
      pairs.insert({e.subject, e.predicate, e.object});
    }
    for (const auto& [n, set] : cs) {
      const auto& got = stats.characteristic_set(n);
      CHECK(std::vector<PredicateId>(set.begin(), set.end()) == got);
    }
    // (S_c(s), S_c(o), p) -> count
    std::map<std::tuple<std::vector<PredicateId>, std::vector<PredicateId>, PredicateId>, std::uint64_t> expected;
    std::map<PredicateId, std::uint64_t> per_predicate;
    for (const auto& [s, p, o] : pairs) {
      auto set_of = [&](NodeId v) {
        auto it = cs.find(v);
        return it == cs.end() ? std::vector<PredicateId>{} : std::vector<PredicateId>(it->second.begin(), it->second.end());
      };
      ++expected[{set_of(s), set_of(o), p}];
      ++per_predicate[p];
    }
    for (const auto& [key, count] : expected) {
      const auto& [ss, os, p] = key;
      std::uint64_t got = 0;
      for (const auto& pc : stats.pairs(p)) {
        if (stats.class_set(pc.subject_class) == ss && stats.class_set(pc.object_class) == os) got += pc.count;
      }
      CHECK(got == count);
    }
    for (const auto& [p, count] : per_predicate) {
      std::uint64_t sum = 0;
      for (const auto& pc : stats.pairs(p)) sum += pc.count;
      CHECK(sum == count);
    }
  }
}

TEST_CASE("two-star chain estimate equals the characteristic-pair count") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    KnowledgeGraph g;
    random_graph(rng, g, 120, 25, 3);
    StatsCatalog stats = compute_statistics(g);
    // star {p0} on ?a linked by p1 to star {p2} on ?b
    QueryGraph q = parse_query("SELECT * WHERE { ?a p0 ?x . ?a p1 ?b . ?b p2 ?y }");
    auto p0 = g.find_predicate("p0"), p1 = g.find_predicate("p1"), p2 = g.find_predicate("p2");
    REQUIRE((p0 && p1 && p2));
    std::map<NodeId, std::set<PredicateId>> cs;
    std::set<std::pair<NodeId, NodeId>> links;
    for (const auto& [id, e] : g.edges()) {
      cs[e.subject].insert(e.predicate);
      if (e.predicate == *p1) links.insert({e.subject, e.object});
    }
    // distinct p1 pairs whose subject set holds {p0, p1} and object set holds {p2}
    std::uint64_t expected = 0;
    for (const auto& [s, o] : links) {
      bool left = cs[s].contains(*p0) && cs[s].contains(*p1);
      bool right = cs.contains(o) && cs[o].contains(*p2);
      if (left && right) ++expected;
    }
    CHECK(estimate_cardinality(q, {0, 1, 2}, stats, g) == doctest::Approx(static_cast<double>(expected)));
  }
}

TEST_CASE("AND-OR tree of a 3-chain") {
  QueryGraph q = parse_query("SELECT * WHERE { ?a hasDegree ?b . ?b worksIn ?c . ?c coAuthor ?d }");
  AndOrTree t = build_and_or_tree(q, {0, 1, 2});
  CHECK_FALSE(t.truncated);
  CHECK(t.ors.size() == 6);
  const auto& root = t.ors[t.root];
  CHECK(root.patterns == std::vector<std::size_t>{0, 1, 2});
  REQUIRE(root.derivations.size() == 2);
  std::set<std::vector<std::size_t>> inner;
  for (std::size_t a : root.derivations) {
    const auto& and_node = t.ands[a];
    CHECK(and_node.result == t.root);
    const auto& l = t.ors[and_node.left].patterns;
    const auto& r = t.ors[and_node.right].patterns;
    inner.insert(l.size() == 2 ? l : r);
  }
  CHECK(inner == std::set<std::vector<std::size_t>>{{0, 1}, {1, 2}});
  CHECK(t.find({0, 2}) == nullptr);
  // strict alternation: every AND node reads OR nodes and feeds an OR node
  for (std::size_t i = 0; i < t.ands.size(); ++i) {
    CHECK(t.ands[i].result < t.ors.size());
    CHECK(std::count(t.ors[t.ands[i].left].uses.begin(), t.ors[t.ands[i].left].uses.end(), i) == 1);
  }

  AndOrTree single = build_and_or_tree(q, {1});
  CHECK(single.ors.size() == 1);
  CHECK(single.ands.empty());
}

TEST_CASE("AND-OR tree nodes are the connected subsets") {
  const char* texts[] = {
      "SELECT * WHERE { ?x a ?b . ?x b ?c . ?x c ?d . ?e d ?x }",
      "SELECT * WHERE { ?a p ?b . ?b p ?c . ?c q ?d . ?b r ?e . ?e s ?f }",
      "SELECT * WHERE { ?a p ?b . ?b q ?c . ?c r ?a . ?a s ?d }",
  };
  for (const char* text : texts) {
    CAPTURE(text);
    QueryGraph q = parse_query(text);
    std::vector<std::size_t> all(q.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    AndOrTree t = build_and_or_tree(q, all);
    std::size_t expected = 0;
    for (std::size_t mask = 1; mask < (1u << q.size()); ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (mask & (1u << i)) subset.push_back(i);
      }
      bool conn = connected_subset(q, subset);
      expected += conn;
      CHECK((t.find(subset) != nullptr) == conn);
    }
    CHECK(t.ors.size() == expected);
    for (const auto& or_node : t.ors) CHECK(connected_subset(q, or_node.patterns));
  }
  // a 4-pattern star: all 15 subsets share the center
  QueryGraph star = parse_query("SELECT * WHERE { ?x a ?b . ?x b ?c . ?x c ?d . ?e d ?x }");
  CHECK(build_and_or_tree(star, {0, 1, 2, 3}).ors.size() == 15);
}

TEST_CASE("greedy plan replays against the estimates") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    KnowledgeGraph g;
    random_graph(rng, g, 150, 30, 4);
    StatsCatalog stats = compute_statistics(g);
    QueryGraph q = parse_query("SELECT * WHERE { ?a p0 ?b . ?b p1 ?c . ?c p2 ?d . ?d p3 ?e }");
    AndOrTree tree = build_and_or_tree(q, {0, 1, 2, 3});
    LocalPlan plan = select_best_plan(tree, q, stats, g);
    CHECK(plan.steps.back().patterns == std::vector<std::size_t>{0, 1, 2, 3});

    // replay: cheapest leaf, then at every level the cheapest one-pattern extension
    auto key = [&](const std::vector<std::size_t>& expr) {
      return std::make_pair(estimate_cardinality(q, expr, stats, g), canonicalize_patterns(q, expr).text);
    };
    std::vector<std::size_t> cur;
    std::pair<double, std::string> best{std::numeric_limits<double>::infinity(), ""};
    for (std::size_t p = 0; p < 4; ++p) {
      auto k = key({p});
      if (k < best) {
        best = k;
        cur = {p};
      }
    }
    std::vector<std::vector<std::size_t>> chain{cur};
    while (cur.size() < 4) {
      std::vector<std::size_t> next;
      std::pair<double, std::string> lb{std::numeric_limits<double>::infinity(), ""};
      for (std::size_t p = 0; p < 4; ++p) {
        if (std::find(cur.begin(), cur.end(), p) != cur.end()) continue;
        auto e = cur;
        e.push_back(p);
        std::sort(e.begin(), e.end());
        if (!connected_subset(q, e)) continue;
        auto k = key(e);
        if (k < lb) {
          lb = k;
          next = e;
        }
      }
      cur = next;
      chain.push_back(cur);
    }
    std::vector<std::vector<std::size_t>> got;
    for (const auto& s : plan.steps) {
      if (!s.leaf() || plan.steps.size() == 1) got.push_back(s.patterns);
    }
    chain.erase(chain.begin());
    CHECK(got == chain);
  }
}

TEST_CASE("cheaper left pair wins") {
  KnowledgeGraph g;
  // P1 is rare, so P1 join P2 is estimated below P2 join P3
  g.insert_edge("a0", "P1", "b0");
  for (int i = 0; i < 20; ++i) {
    g.insert_edge("b" + std::to_string(i % 5), "P2", "c" + std::to_string(i));
    g.insert_edge("c" + std::to_string(i), "P3", "d" + std::to_string(i));
  }
  StatsCatalog stats = compute_statistics(g);
  QueryGraph q = parse_query("SELECT * WHERE { ?a P1 ?b . ?b P2 ?c . ?c P3 ?d }");
  CHECK(estimate_cardinality(q, {0, 1}, stats, g) < estimate_cardinality(q, {1, 2}, stats, g));
  LocalPlan plan = select_best_plan(build_and_or_tree(q, {0, 1, 2}), q, stats, g);
  const auto& root = plan.steps[plan.root()];
  const auto& l = plan.steps[root.left].patterns;
  const auto& r = plan.steps[root.right].patterns;
  CHECK(((l == std::vector<std::size_t>{0, 1} && r == std::vector<std::size_t>{2}) ||
         (r == std::vector<std::size_t>{0, 1} && l == std::vector<std::size_t>{2})));
}

TEST_CASE("plan selection is deterministic") {
  KnowledgeGraph g;
  StatsCatalog stats = compute_statistics(g);
  QueryGraph q = parse_query("SELECT * WHERE { ?a p ?b . ?b p ?c . ?c p ?d }");
  AndOrTree t = build_and_or_tree(q, {0, 1, 2});
  LocalPlan a = select_best_plan(t, q, stats, g);
  LocalPlan b = select_best_plan(t, q, stats, g);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].patterns == b.steps[i].patterns);

  LocalPlan leaf = select_best_plan(build_and_or_tree(q, {1}), q, stats, g);
  CHECK(leaf.steps.size() == 1);
  CHECK(leaf.steps[0].leaf());
}
