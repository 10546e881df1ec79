#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "provkg/ids.hpp"

namespace provkg {

/// Bidirectional string <-> dense id table.
template <typename Id>
class Dictionary {
 public:
  Id intern(std::string_view text) {
    auto it = index_.find(std::string(text));
    if (it != index_.end()) return it->second;
    Id id(static_cast<typename Id::rep_type>(names_.size()));
    names_.emplace_back(text);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::optional<Id> find(std::string_view text) const {
    auto it = index_.find(std::string(text));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(Id id) const { return names_.at(id.value()); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Id> index_;
};

struct Edge {
  EdgeId id;
  NodeId subject;
  PredicateId predicate;
  NodeId object;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Wildcard-or-bound access pattern for lookup().
struct EdgePattern {
  std::optional<NodeId> subject;
  std::optional<PredicateId> predicate;
  std::optional<NodeId> object;

  bool matches(const Edge& e) const {
    return (!subject || *subject == e.subject) && (!predicate || *predicate == e.predicate) &&
           (!object || *object == e.object);
  }
};

/// In-memory directed labeled multigraph. Edge ids are issued by a monotone
/// counter and never reused; duplicate (s,p,o) triples receive distinct ids.
/// Mutations must be externally serialized.
class KnowledgeGraph {
 public:
  NodeId intern_node(std::string_view name) { return nodes_.intern(name); }
  PredicateId intern_predicate(std::string_view name) { return predicates_.intern(name); }
  std::optional<NodeId> find_node(std::string_view name) const { return nodes_.find(name); }
  std::optional<PredicateId> find_predicate(std::string_view name) const {
    return predicates_.find(name);
  }
  const std::string& node_name(NodeId id) const { return nodes_.name(id); }
  const std::string& predicate_name(PredicateId id) const { return predicates_.name(id); }

  EdgeId insert_edge(NodeId subject, PredicateId predicate, NodeId object);
  EdgeId insert_edge(std::string_view subject, std::string_view predicate, std::string_view object);

  /// Removes the edge and returns it; nullopt when the id is unknown.
  std::optional<Edge> delete_edge(EdgeId id);

  std::optional<Edge> edge(EdgeId id) const;
  bool contains(EdgeId id) const { return edges_.contains(id); }

  /// Edges matching every bound position, in ascending id order.
  std::vector<Edge> lookup(const EdgePattern& pattern) const;

  /// Visits matching edges in ascending id order without materializing them.
  /// Every bound combination is served by an index; only the all-wildcard
  /// pattern walks the full edge map.
  template <typename Fn>
  void for_each_match(const EdgePattern& pattern, Fn&& fn) const {
    const Bucket* bucket = index_for(pattern);
    if (bucket == nullptr) {
      if (!pattern.subject && !pattern.predicate && !pattern.object) {
        for (const auto& [id, e] : edges_) fn(e);
      }
      return;
    }
    for (const Edge& e : bucket->edges) {
      if (e.predicate.valid() && pattern.matches(e)) fn(e);
    }
  }

  /// Number of edges the chosen index bucket holds (upper bound on matches).
  std::size_t candidate_count(const EdgePattern& pattern) const;

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t vertex_count() const { return nodes_.size(); }
  std::size_t predicate_count() const { return predicates_.size(); }
  std::size_t predicate_edge_count(PredicateId p) const;

  /// All live edges in id order.
  const std::map<EdgeId, Edge>& edges() const { return edges_; }

  /// Ids issued so far; the next insert gets last_issued_id() + 1.
  std::uint64_t last_issued_id() const { return next_edge_id_ - 1; }

  /// Bumped on every mutation.
  std::uint64_t version() const { return version_; }

 private:
  // Id-sorted; deleted slots keep their id with an invalid predicate until
  // the bucket is compacted.
  struct Bucket {
    std::vector<Edge> edges;
    std::size_t live = 0;
  };
  using PairIndex = std::unordered_map<std::uint64_t, Bucket>;
  using SingleIndex = std::unordered_map<std::uint32_t, Bucket>;

  static std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  const Bucket* index_for(const EdgePattern& pattern) const;
  void index_insert(const Edge& e);
  void index_erase(const Edge& e);

  Dictionary<NodeId> nodes_;
  Dictionary<PredicateId> predicates_;
  std::map<EdgeId, Edge> edges_;
  std::uint64_t next_edge_id_ = 1;
  std::uint64_t version_ = 0;

  PairIndex by_sp_;
  PairIndex by_po_;
  PairIndex by_so_;
  SingleIndex by_s_;
  SingleIndex by_p_;
  SingleIndex by_o_;
};

}  // namespace provkg
