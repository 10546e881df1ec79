#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "provkg/eval.hpp"
#include "provkg/graph.hpp"
#include "provkg/planner.hpp"
#include "provkg/query.hpp"
#include "provkg/table.hpp"

namespace provkg {

/// Shared DAG of intermediate join expressions. Each node is keyed by the
/// canonical text of its pattern set, owns one derivation and a materialized
/// table whose columns are the canonical variables of that text.
class GlobalPlan {
 public:
  struct Node {
    std::size_t id = 0;
    std::string key;
    std::size_t pattern_count = 1;
    std::size_t arity = 0;
    std::optional<ResolvedPattern> leaf;
    int left = -1;
    int right = -1;
    std::vector<std::uint32_t> left_cols;   // left child column -> this column
    std::vector<std::uint32_t> right_cols;  // right child column -> this column
    std::vector<std::uint32_t> left_join;   // shared columns, as left child columns
    std::vector<std::uint32_t> right_join;  // same columns, as right child columns
    std::size_t left_index = 0;   // index on left_join in the left child's table
    std::size_t right_index = 0;  // index on right_join in the right child's table
    std::vector<PredicateId> predicates;  // sorted, distinct, whole subtree
    double estimate = 0.0;
    std::vector<std::size_t> parents;
    std::size_t root_refs = 0;
    Table table;

    bool is_leaf() const { return left < 0; }
  };

  struct MergeResult {
    std::size_t root = 0;
    /// Query variable -> column of the root node.
    std::map<std::uint32_t, std::uint32_t> var_map;
    /// Nodes added by this merge, children before parents.
    std::vector<std::size_t> created;
  };

  /// Inserts the local plan top-down; an expression already present is linked
  /// and its subtree not explored. New nodes are materialized.
  MergeResult merge(const QueryGraph& q, const LocalPlan& local, KnowledgeGraph& g);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  Node& node(std::size_t id) { return nodes_.at(id); }
  std::optional<std::size_t> find(const std::string& key) const;
  std::size_t root_count() const;

  /// Sum of node counts of all local plans merged so far.
  std::size_t local_node_total() const { return local_node_total_; }
  std::size_t non_leaf_count() const;
  std::size_t distinct_leaf_predicates() const;
  /// Non-leaf nodes per distinct leaf predicate; nullopt when there are none.
  std::optional<double> coverage() const;

  /// Nodes whose subtree contains predicate p, children before parents.
  const std::vector<std::size_t>& nodes_with(PredicateId p) const;

  /// Fills every node's table from scratch.
  void materialize_all(const KnowledgeGraph& g);
  void materialize(std::size_t id, const KnowledgeGraph& g);

  /// Rows added per node by inserting edge e (already in the store).
  using InsertDelta = std::unordered_map<std::size_t, std::vector<std::pair<Row, Polynomial>>>;
  InsertDelta delta_insert(const Edge& e);

  /// Rows touched per node by deleting edge e (already removed from the
  /// store): pruned in place or erased when nothing survives.
  struct DeleteDelta {
    std::unordered_map<std::size_t, std::vector<Row>> pruned;
    std::unordered_map<std::size_t, std::vector<Row>> removed;
  };
  DeleteDelta delta_delete(const Edge& e);

  /// JSON list of nodes in topological order.
  std::string dump_json(const KnowledgeGraph& g) const;

 private:
  Row combine(const Node& n, const Row& l, const Row& r) const;
  Row left_key(const Node& n, const Row& l) const;
  Row right_key(const Node& n, const Row& r) const;
  bool compatible(const Node& n, const Row& l, const Row& r) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> by_key_;
  std::unordered_map<PredicateId, std::vector<std::size_t>> by_predicate_;
  std::size_t local_node_total_ = 0;
};

}  // namespace provkg
