#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "provkg/ids.hpp"
#include "provkg/polynomial.hpp"

namespace provkg {

/// Materialized relation: distinct rows, each carrying its polynomial, with
/// optional hash indexes on column lists for join probes.
class Table {
 public:
  explicit Table(std::size_t arity = 0) : arity_(arity) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return slot_of_.size(); }
  bool empty() const { return slot_of_.empty(); }

  const Polynomial* find(const Row& row) const;

  /// Adds `delta` to the row's polynomial, creating the row if needed.
  void add(const Row& row, const Polynomial& delta);
  /// Replaces the row's polynomial; a zero polynomial erases the row.
  void assign(const Row& row, Polynomial poly);
  void erase(const Row& row);
  void clear();

  /// Returns the id of an index on `cols`, creating it on first request.
  std::size_t ensure_index(const std::vector<std::uint32_t>& cols);
  const std::vector<std::uint32_t>& index_columns(std::size_t index) const {
    return indexes_[index].cols;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint32_t s = 0; s < rows_.size(); ++s) {
      if (live_[s]) fn(rows_[s], polys_[s]);
    }
  }

  /// Visits rows whose indexed columns equal `key`.
  template <typename Fn>
  void probe(std::size_t index, const Row& key, Fn&& fn) const {
    const auto& idx = indexes_[index];
    auto it = idx.buckets.find(key);
    if (it == idx.buckets.end()) return;
    for (std::uint32_t s : it->second) fn(rows_[s], polys_[s]);
  }

  /// Rows sorted, for deterministic comparisons and dumps.
  std::vector<std::pair<Row, Polynomial>> sorted_rows() const;

 private:
  struct Index {
    std::vector<std::uint32_t> cols;
    std::unordered_map<Row, std::vector<std::uint32_t>, RowHash> buckets;
  };

  Row key_of(const Index& idx, const Row& row) const;
  void index_slot(std::uint32_t slot);
  void unindex_slot(std::uint32_t slot);

  std::size_t arity_;
  std::vector<Row> rows_;
  std::vector<Polynomial> polys_;
  std::vector<bool> live_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<Row, std::uint32_t, RowHash> slot_of_;
  std::vector<Index> indexes_;
};

}  // namespace provkg
