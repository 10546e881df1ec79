#include "provkg/graph.hpp"

#include <algorithm>

namespace provkg {

namespace {

template <typename Bucket>
void bucket_erase(Bucket& bucket, EdgeId id) {
  auto& edges = bucket.edges;
  auto it = std::lower_bound(edges.begin(), edges.end(), id,
                             [](const Edge& e, EdgeId key) { return e.id < key; });
  if (it == edges.end() || it->id != id || !it->predicate.valid()) return;
  it->predicate = PredicateId::invalid();
  --bucket.live;
  if (edges.size() > 16 && bucket.live * 2 < edges.size()) {
    std::erase_if(edges, [](const Edge& e) { return !e.predicate.valid(); });
  }
}

template <typename Map, typename Key>
void map_erase(Map& map, const Key& key, EdgeId id) {
  auto it = map.find(key);
  if (it == map.end()) return;
  bucket_erase(it->second, id);
  if (it->second.live == 0) map.erase(it);
}

template <typename Map, typename Key>
const typename Map::mapped_type* find_bucket(const Map& map, const Key& key) {
  static const typename Map::mapped_type kEmpty;
  auto it = map.find(key);
  return it == map.end() ? &kEmpty : &it->second;
}

template <typename Bucket>
void bucket_push(Bucket& bucket, const Edge& e) {
  bucket.edges.push_back(e);
  ++bucket.live;
}

}  // namespace

EdgeId KnowledgeGraph::insert_edge(NodeId subject, PredicateId predicate, NodeId object) {
  Edge e{EdgeId(next_edge_id_++), subject, predicate, object};
  edges_.emplace(e.id, e);
  index_insert(e);
  ++version_;
  return e.id;
}

EdgeId KnowledgeGraph::insert_edge(std::string_view subject, std::string_view predicate,
                                   std::string_view object) {
  NodeId s = intern_node(subject);
  PredicateId p = intern_predicate(predicate);
  NodeId o = intern_node(object);
  return insert_edge(s, p, o);
}

std::optional<Edge> KnowledgeGraph::delete_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) return std::nullopt;
  Edge e = it->second;
  edges_.erase(it);
  index_erase(e);
  ++version_;
  return e;
}

std::optional<Edge> KnowledgeGraph::edge(EdgeId id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> KnowledgeGraph::lookup(const EdgePattern& pattern) const {
  std::vector<Edge> out;
  for_each_match(pattern, [&](const Edge& e) { out.push_back(e); });
  return out;
}

std::size_t KnowledgeGraph::candidate_count(const EdgePattern& pattern) const {
  const Bucket* bucket = index_for(pattern);
  if (bucket == nullptr) {
    return (!pattern.subject && !pattern.predicate && !pattern.object) ? edges_.size() : 0;
  }
  return bucket->live;
}

std::size_t KnowledgeGraph::predicate_edge_count(PredicateId p) const {
  auto it = by_p_.find(p.value());
  return it == by_p_.end() ? 0 : it->second.live;
}

const KnowledgeGraph::Bucket* KnowledgeGraph::index_for(const EdgePattern& pattern) const {
  const auto& [s, p, o] = pattern;
  if (s && p) return find_bucket(by_sp_, pack(s->value(), p->value()));
  if (p && o) return find_bucket(by_po_, pack(p->value(), o->value()));
  if (s && o) return find_bucket(by_so_, pack(s->value(), o->value()));
  if (s) return find_bucket(by_s_, s->value());
  if (p) return find_bucket(by_p_, p->value());
  if (o) return find_bucket(by_o_, o->value());
  return nullptr;
}

// Ids are issued in increasing order, so appending keeps every bucket sorted.
void KnowledgeGraph::index_insert(const Edge& e) {
  bucket_push(by_sp_[pack(e.subject.value(), e.predicate.value())], e);
  bucket_push(by_po_[pack(e.predicate.value(), e.object.value())], e);
  bucket_push(by_so_[pack(e.subject.value(), e.object.value())], e);
  bucket_push(by_s_[e.subject.value()], e);
  bucket_push(by_p_[e.predicate.value()], e);
  bucket_push(by_o_[e.object.value()], e);
}

void KnowledgeGraph::index_erase(const Edge& e) {
  map_erase(by_sp_, pack(e.subject.value(), e.predicate.value()), e.id);
  map_erase(by_po_, pack(e.predicate.value(), e.object.value()), e.id);
  map_erase(by_so_, pack(e.subject.value(), e.object.value()), e.id);
  map_erase(by_s_, e.subject.value(), e.id);
  map_erase(by_p_, e.predicate.value(), e.id);
  map_erase(by_o_, e.object.value(), e.id);
}

}  // namespace provkg
