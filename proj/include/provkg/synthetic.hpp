#pragma once

#include <cstdint>
#include <vector>

#include "provkg/graph.hpp"
#include "provkg/query.hpp"

namespace provkg {

struct SyntheticConfig {
  std::size_t edges = 100000;
  std::size_t nodes = 20000;
  std::size_t predicates = 20;
  std::size_t queries = 50;
  std::size_t min_patterns = 2;
  std::size_t max_patterns = 4;
  /// Chance that a leaf of a query walk is kept as a constant.
  double constant_leaf = 0.3;
  /// Skew exponent for subject, object and predicate draws (1 = uniform).
  double skew = 1.3;
  std::uint64_t seed = 42;
};

/// Distinct triples over nodes v0.. and predicates r0.., no self-loops.
void generate_synthetic_graph(const SyntheticConfig& cfg, KnowledgeGraph& g);

/// Random-walk queries over the graph, pairwise distinct up to renaming.
/// Every query has at least one match when generated.
std::vector<QueryGraph> generate_synthetic_queries(const SyntheticConfig& cfg, const KnowledgeGraph& g);

}  // namespace provkg
