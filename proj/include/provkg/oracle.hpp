#pragma once

// Reference implementations used by the verification suites. Nothing here
// shares code with the engine's evaluator, plan or polynomial arithmetic.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "provkg/engine.hpp"
#include "provkg/graph.hpp"
#include "provkg/polynomial.hpp"
#include "provkg/query.hpp"

namespace provkg::oracle {

/// Polynomial as monomial (sorted edge multiset) -> coefficient.
using Poly = std::map<std::vector<EdgeId>, std::uint64_t>;

Poly expand(const Polynomial& p);
Poly add(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
std::string render(const Poly& p);

/// Projected row -> polynomial.
using Answers = std::map<Row, Poly>;

/// Plain edge list with its own hash maps, rebuilt from the raw edge set.
class EdgeSet {
 public:
  explicit EdgeSet(const KnowledgeGraph& g);

  struct RawEdge {
    EdgeId id;
    NodeId s;
    PredicateId p;
    NodeId o;
  };
  const std::vector<RawEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& by_predicate(PredicateId p) const;
  const std::vector<std::size_t>& by_subject(PredicateId p, NodeId s) const;
  const std::vector<std::size_t>& by_object(PredicateId p, NodeId o) const;
  bool has_triple(NodeId s, PredicateId p, NodeId o) const;
  const std::vector<NodeId>& nodes() const { return nodes_; }

 private:
  std::vector<RawEdge> edges_;
  std::vector<NodeId> nodes_;
  std::map<std::uint32_t, std::vector<std::size_t>> by_p_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> by_ps_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> by_po_;
  std::vector<std::size_t> none_;
};

/// A triple that is not (yet) in the graph, standing in for an insertion.
struct Phantom {
  NodeId s;
  PredicateId p;
  NodeId o;
};

/// One assignment of every pattern to an existing edge or to the phantom.
/// `edges[i]` is invalid when pattern i takes the phantom.
struct Assignment {
  std::vector<NodeId> bindings;  // by query variable id
  std::vector<EdgeId> edges;
  std::vector<std::size_t> phantom_patterns;
};

/// Calls `fn` for every assignment (stops early when it returns false).
/// With no phantom, enumerates plain matches.
void enumerate(const QueryGraph& q, const KnowledgeGraph& g, const EdgeSet& edges,
               const std::optional<Phantom>& phantom,
               const std::function<bool(const Assignment&)>& fn);

/// From-scratch evaluation by nested loops over the raw edge list.
Answers evaluate(const QueryGraph& q, const KnowledgeGraph& g);
Answers evaluate(const QueryGraph& q, const KnowledgeGraph& g, const EdgeSet& edges);

Answers engine_answers(const Engine& engine, std::size_t query);
/// Empty when equal; otherwise a description of the first difference.
std::string compare(const KnowledgeGraph& g, const Answers& expected, const Answers& actual);

// Random instances ---------------------------------------------------------

struct InstanceConfig {
  std::size_t min_edges = 20;
  std::size_t max_edges = 300;
  std::size_t min_queries = 1;
  std::size_t max_queries = 5;
  std::size_t min_patterns = 2;
  std::size_t max_patterns = 5;
};

/// Nodes n0.., predicates p0..; a few self-loops and repeated triples.
void random_graph(std::mt19937_64& rng, std::size_t edges, KnowledgeGraph& g);

/// Random walk over the graph turned into a connected query; hubs of the walk
/// become variables, some leaves stay constants, occasionally two walk nodes
/// are fused into one variable to close a cycle.
QueryGraph random_query(std::mt19937_64& rng, const KnowledgeGraph& g, std::size_t patterns);

// Suites ------------------------------------------------------------------

struct SuiteResult {
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;  // first few failures, with seeds
  std::map<std::string, std::size_t> counters;
  double seconds = 0.0;

  bool ok() const { return failures == 0; }
  void fail(std::string message);
};

struct VerifyConfig {
  std::size_t trials = 100;
  std::size_t updates = 500;
  std::uint64_t seed = 1;
  InstanceConfig instance;
  bool lemmas = true;
  bool fault_skip_prune = false;
  /// Stop a trial at its first mismatch.
  bool stop_on_failure = true;
  /// Run a single trial with exactly this seed (as printed by a failure).
  std::optional<std::uint64_t> replay_seed;
};

struct VerifyReport {
  SuiteResult equivalence;
  SuiteResult lemmas;
  SuiteResult audit;
  std::optional<std::uint64_t> failing_seed;
  std::optional<std::size_t> failing_step;

  bool ok() const { return equivalence.ok() && lemmas.ok() && audit.ok(); }
  std::string to_json() const;
};

/// Randomized trials: random graph and queries, registration, a stream of
/// mixed updates, after each one the engine's answers are compared with
/// evaluate(); lemma checks run at the start, middle and end of each trial and
/// the index audit at the end.
VerifyReport run_verify(const VerifyConfig& cfg);

/// Lemma checks for every registered multi-pattern query against `samples`
/// phantom triples. Leaves the engine in an equivalent state.
void check_lemmas(Engine& engine, std::mt19937_64& rng, std::size_t samples, SuiteResult& out);

/// Randomized algebraic law checks on Polynomial against Poly.
SuiteResult run_semiring_suite(std::size_t checks, std::uint64_t seed);

}  // namespace provkg::oracle
