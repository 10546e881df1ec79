#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "provkg/graph.hpp"
#include "provkg/query.hpp"

namespace provkg {

/// Characteristic-set and characteristic-pair statistics of a graph.
class StatsCatalog {
 public:
  using ClassId = std::uint32_t;
  using PredicateSet = std::vector<PredicateId>;  // sorted, distinct

  struct PairCount {
    ClassId subject_class;
    ClassId object_class;
    std::uint64_t count;
  };

  /// Characteristic set of a node (empty if it has no outgoing edges).
  const PredicateSet& characteristic_set(NodeId v) const;
  ClassId class_of(NodeId v) const;
  const PredicateSet& class_set(ClassId c) const { return classes_.at(c); }
  std::size_t class_count() const { return classes_.size(); }
  /// Number of nodes whose characteristic set is exactly class c.
  std::uint64_t class_size(ClassId c) const { return class_sizes_.at(c); }

  /// Distinct (s, o) pairs with a p-edge, grouped by (S_c(s), S_c(o)).
  const std::vector<PairCount>& pairs(PredicateId p) const;
  std::uint64_t pair_count(ClassId s, ClassId o, PredicateId p) const;

  std::uint64_t predicate_edges(PredicateId p) const;
  std::uint64_t total_edges() const { return total_edges_; }
  bool empty() const { return total_edges_ == 0; }

  /// Subjects whose characteristic set contains every predicate in `star`.
  std::uint64_t star_count(const PredicateSet& star) const;
  /// Sum of pair counts over classes that contain the two star sets, for
  /// predicate p linking them.
  std::uint64_t chain_pair_count(const PredicateSet& from, const PredicateSet& to,
                                 PredicateId p) const;

 private:
  friend StatsCatalog compute_statistics(const KnowledgeGraph& g);

  std::vector<PredicateSet> classes_;
  std::vector<std::uint64_t> class_sizes_;
  std::map<PredicateSet, ClassId> class_index_;
  std::unordered_map<NodeId, ClassId> node_class_;
  ClassId empty_class_ = 0;
  std::unordered_map<PredicateId, std::vector<PairCount>> pairs_;
  std::unordered_map<PredicateId, std::uint64_t> predicate_edges_;
  std::uint64_t total_edges_ = 0;
};

StatsCatalog compute_statistics(const KnowledgeGraph& g);

/// Estimated result size of the pattern subset `expr` of q (which must be
/// connected). Predicates are resolved by name against the graph.
double estimate_cardinality(const QueryGraph& q, const std::vector<std::size_t>& expr,
                            const StatsCatalog& stats, const KnowledgeGraph& g);

}  // namespace provkg
