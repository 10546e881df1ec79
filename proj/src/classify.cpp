#include <algorithm>
#include <cstdint>
#include <numeric>

#include "provkg/query.hpp"

namespace provkg {

PredicateMetadata::Flags PredicateMetadata::get(std::string_view predicate) const {
  auto it = flags.find(predicate);
  return it == flags.end() ? Flags{} : it->second;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool has_cycle(const std::vector<std::vector<std::size_t>>& adj) {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(adj.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < adj.size(); ++root) {
    if (state[root] != 0) continue;
    stack.emplace_back(root, 0);
    state[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < adj[v].size()) {
        std::size_t w = adj[v][next++];
        if (state[w] == 1) return true;
        if (state[w] == 0) {
          state[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        state[v] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace

bool can_cobind(const QueryGraph& q, std::size_t a, std::size_t b, const PredicateMetadata& meta) {
  const auto& pa = q.patterns[a];
  const auto& pb = q.patterns[b];
  auto distinct_constants = [](const Term& x, const Term& y) {
    return x.is_constant() && y.is_constant() && x.id != y.id;
  };
  if (distinct_constants(pa.predicate, pb.predicate) || distinct_constants(pa.subject, pb.subject) ||
      distinct_constants(pa.object, pb.object)) {
    return false;
  }

  const std::size_t nv = q.variables.size();
  auto node = [&](const Term& t) { return t.is_variable() ? t.id : nv + t.id; };
  UnionFind uf(nv + q.constants.size());
  uf.unite(node(pa.subject), node(pb.subject));
  uf.unite(node(pa.object), node(pb.object));

  // Congruence closure over one-to-one predicates: equal subjects force equal
  // objects and vice versa.
  std::vector<std::size_t> functional;
  for (std::size_t i = 0; i < q.patterns.size(); ++i) {
    const auto& p = q.patterns[i];
    if (p.predicate.is_constant() && meta.get(q.constants[p.predicate.id]).one_to_one) {
      functional.push_back(i);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < functional.size(); ++x) {
      for (std::size_t y = x + 1; y < functional.size(); ++y) {
        const auto& px = q.patterns[functional[x]];
        const auto& py = q.patterns[functional[y]];
        if (px.predicate != py.predicate) continue;
        bool same_s = uf.find(node(px.subject)) == uf.find(node(py.subject));
        bool same_o = uf.find(node(px.object)) == uf.find(node(py.object));
        if (same_s && !same_o) changed |= uf.unite(node(px.object), node(py.object));
        if (same_o && !same_s) changed |= uf.unite(node(px.subject), node(py.subject));
      }
    }
  }
  std::vector<std::size_t> constant_of_class(nv + q.constants.size(), SIZE_MAX);
  for (std::size_t c = 0; c < q.constants.size(); ++c) {
    std::size_t cls = uf.find(nv + c);
    if (constant_of_class[cls] != SIZE_MAX && constant_of_class[cls] != c) return false;
    constant_of_class[cls] = c;
  }

  // A path of one asymmetric predicate that closes into a cycle after the
  // unification cannot be realized.
  std::vector<std::uint32_t> asym_predicates;
  for (const auto& p : q.patterns) {
    if (p.predicate.is_constant() && meta.get(q.constants[p.predicate.id]).asymmetric &&
        std::find(asym_predicates.begin(), asym_predicates.end(), p.predicate.id) ==
            asym_predicates.end()) {
      asym_predicates.push_back(p.predicate.id);
    }
  }
  for (std::uint32_t pred : asym_predicates) {
    std::vector<std::vector<std::size_t>> adj(nv + q.constants.size());
    for (const auto& p : q.patterns) {
      if (p.predicate.is_constant() && p.predicate.id == pred) {
        adj[uf.find(node(p.subject))].push_back(uf.find(node(p.object)));
      }
    }
    if (has_cycle(adj)) return false;
  }
  return true;
}

Classification classify_query(const QueryGraph& q, const PredicateMetadata& meta) {
  const std::size_t n = q.patterns.size();
  UnionFind groups(n);
  std::vector<bool> member(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& pa = q.patterns[a].predicate;
      const auto& pb = q.patterns[b].predicate;
      bool same = pa.is_variable() || pb.is_variable() || pa.id == pb.id;
      if (!same || !can_cobind(q, a, b, meta)) continue;
      groups.unite(a, b);
      member[a] = member[b] = true;
    }
  }
  Classification c;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (!member[i]) continue;
    std::size_t root = groups.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = c.shared_groups.size();
      c.shared_groups.emplace_back();
    }
    c.shared_groups[slot[root]].push_back(i);
  }
  c.multimap = !c.shared_groups.empty();
  if (c.multimap) c.trigger = c.shared_groups.front().front();
  return c;
}

}  // namespace provkg
