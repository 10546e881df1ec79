#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "provkg/query.hpp"

namespace provkg {

enum class SubqueryType { I, II, III, IV };

const char* to_string(SubqueryType t);

/// Which part of a subquery an endpoint of the removed pattern attaches to.
enum class Side { Free, Sq1, Sq2 };

/// The query minus one pattern, split into its connected components.
///
/// Layout: Types I and IV keep the whole remainder in sq1. Type II puts the
/// larger component in sq1 and the single pattern in sq2. Type III puts the
/// component holding the removed pattern's subject in sq1.
struct Subquery {
  std::size_t removed = 0;
  SubqueryType type = SubqueryType::I;
  std::vector<std::size_t> sq1;
  std::vector<std::size_t> sq2;
  Side subject_side = Side::Free;
  Side object_side = Side::Free;

  std::size_t k() const { return sq1.size(); }
};

/// One subquery per pattern, in ordinal order. Throws Error when the query
/// has fewer than two patterns.
std::vector<Subquery> generate_subqueries(const QueryGraph& q);

/// Upper bound on the connection points one subquery annotates, given the
/// result counts of its components.
std::size_t expected_connection_point_bound(SubqueryType type, std::size_t a1, std::size_t a2);

/// Debug record: parent id, removed ordinal, type and the component patterns.
std::string subquery_json(const QueryGraph& q, const Subquery& sq, std::size_t parent_id);

}  // namespace provkg
