#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "provkg/graph.hpp"
#include "provkg/polynomial.hpp"
#include "provkg/query.hpp"
#include "provkg/table.hpp"

namespace provkg {

/// Pattern position bound to a column of a row or to a graph node.
struct PlanTerm {
  bool variable = false;
  std::uint32_t col = 0;
  NodeId node;

  friend bool operator==(const PlanTerm&, const PlanTerm&) = default;
};

/// Triple pattern with constants resolved against a graph and variables
/// mapped to row columns.
struct ResolvedPattern {
  PlanTerm subject;
  PredicateId predicate;
  PlanTerm object;

  bool self_loop() const { return subject.variable && object.variable && subject.col == object.col; }
  /// True if the edge fits the constants and the self-loop constraint.
  bool accepts(const Edge& e) const;
  /// Writes the edge's endpoints into the pattern's columns of `row`.
  void bind(const Edge& e, Row& row) const;
  /// Access pattern given the columns already bound in `row`.
  EdgePattern access(const Row& row, const std::vector<bool>& bound) const;
};

/// Resolves the patterns of `subset`. Variable v goes to column var_map[v]
/// (or v itself when var_map is null). Unknown constants and predicates are
/// interned into `g`.
std::vector<ResolvedPattern> resolve_interning(const QueryGraph& q,
                                               const std::vector<std::size_t>& subset,
                                               const std::map<std::uint32_t, std::uint32_t>* var_map,
                                               KnowledgeGraph& g);

/// As above but read-only: nullopt if some constant or predicate is unknown
/// to the graph (the patterns then cannot match anything).
std::optional<std::vector<ResolvedPattern>> resolve_lookup(
    const QueryGraph& q, const std::vector<std::size_t>& subset,
    const std::map<std::uint32_t, std::uint32_t>* var_map, const KnowledgeGraph& g);

/// One answer: projected bindings plus how-provenance.
struct BindingRow {
  Row bindings;
  Polynomial provenance;

  friend bool operator==(const BindingRow&, const BindingRow&) = default;
};

/// All full bindings of the patterns (rows of `arity` columns) with their
/// polynomials, found by index-driven backtracking.
Table evaluate_patterns(const std::vector<ResolvedPattern>& patterns, std::size_t arity,
                        const KnowledgeGraph& g);

/// Evaluates the whole query; rows agreeing on the projection are merged by
/// polynomial addition. Sorted by bindings.
std::vector<BindingRow> evaluate_bgp(const QueryGraph& q, const KnowledgeGraph& g);

}  // namespace provkg
