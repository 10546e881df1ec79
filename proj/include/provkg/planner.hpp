#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "provkg/graph.hpp"
#include "provkg/query.hpp"
#include "provkg/stats.hpp"

namespace provkg {

/// Alternating OR (expression) / AND (binary derivation) levels over the
/// connected pattern subsets of one subquery component.
struct AndOrTree {
  struct OrNode {
    std::vector<std::size_t> patterns;  // sorted ordinals
    std::vector<std::size_t> derivations;  // AND node ids
    std::vector<std::size_t> uses;         // AND node ids that take this node as input
  };
  struct AndNode {
    std::size_t result;  // OR node id
    std::size_t left;    // OR node ids
    std::size_t right;
  };

  std::vector<OrNode> ors;
  std::vector<AndNode> ands;
  std::size_t root = 0;
  /// Set when the component exceeds kAndOrTreeCap; only leaves and the root
  /// are present then and plan selection grows left-deep directly.
  bool truncated = false;

  const OrNode* find(const std::vector<std::size_t>& patterns) const;
};

inline constexpr std::size_t kAndOrTreeCap = 9;

AndOrTree build_and_or_tree(const QueryGraph& q, const std::vector<std::size_t>& component);

/// Memo of cardinality estimates keyed by canonical expression text.
class EstimateCache {
 public:
  double estimate(const QueryGraph& q, const std::vector<std::size_t>& expr,
                  const StatsCatalog& stats, const KnowledgeGraph& g);
  std::size_t size() const { return memo_.size(); }

 private:
  std::unordered_map<std::string, double> memo_;
};

/// Binary join tree; steps are listed children first, the root last.
struct LocalPlan {
  struct Step {
    std::vector<std::size_t> patterns;
    int left = -1;  // step indices; -1 on leaves
    int right = -1;
    double estimate = 0.0;
    bool leaf() const { return left < 0; }
  };
  std::vector<Step> steps;

  std::size_t root() const { return steps.size() - 1; }
  /// Nodes of the tree, leaves included.
  std::size_t node_count() const { return steps.size(); }
};

/// Greedy bottom-up choice: start from the cheapest leaf and at each level
/// keep the cheapest parent expression. Ties go to the smaller canonical text.
LocalPlan select_best_plan(const AndOrTree& tree, const QueryGraph& q, const StatsCatalog& stats,
                           const KnowledgeGraph& g, EstimateCache* cache = nullptr);

}  // namespace provkg
