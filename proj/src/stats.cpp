#include "provkg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace provkg {

namespace {

bool contains_all(const StatsCatalog::PredicateSet& super, const StatsCatalog::PredicateSet& sub) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace

const StatsCatalog::PredicateSet& StatsCatalog::characteristic_set(NodeId v) const {
  return classes_.at(class_of(v));
}

StatsCatalog::ClassId StatsCatalog::class_of(NodeId v) const {
  auto it = node_class_.find(v);
  return it == node_class_.end() ? empty_class_ : it->second;
}

const std::vector<StatsCatalog::PairCount>& StatsCatalog::pairs(PredicateId p) const {
  static const std::vector<PairCount> kNone;
  auto it = pairs_.find(p);
  return it == pairs_.end() ? kNone : it->second;
}

std::uint64_t StatsCatalog::pair_count(ClassId s, ClassId o, PredicateId p) const {
  for (const auto& pc : pairs(p)) {
    if (pc.subject_class == s && pc.object_class == o) return pc.count;
  }
  return 0;
}

std::uint64_t StatsCatalog::predicate_edges(PredicateId p) const {
  auto it = predicate_edges_.find(p);
  return it == predicate_edges_.end() ? 0 : it->second;
}

std::uint64_t StatsCatalog::star_count(const PredicateSet& star) const {
  std::uint64_t n = 0;
  for (ClassId c = 0; c < classes_.size(); ++c) {
    if (contains_all(classes_[c], star)) n += class_sizes_[c];
  }
  return n;
}

std::uint64_t StatsCatalog::chain_pair_count(const PredicateSet& from, const PredicateSet& to,
                                             PredicateId p) const {
  std::uint64_t n = 0;
  for (const auto& pc : pairs(p)) {
    if (contains_all(classes_[pc.subject_class], from) &&
        contains_all(classes_[pc.object_class], to)) {
      n += pc.count;
    }
  }
  return n;
}

StatsCatalog compute_statistics(const KnowledgeGraph& g) {
  StatsCatalog st;
  std::unordered_map<NodeId, StatsCatalog::PredicateSet> sets;
  for (const auto& [id, e] : g.edges()) {
    sets[e.subject].push_back(e.predicate);
    ++st.predicate_edges_[e.predicate];
    ++st.total_edges_;
  }
  auto intern_class = [&](StatsCatalog::PredicateSet set) {
    auto [it, fresh] = st.class_index_.try_emplace(set, static_cast<StatsCatalog::ClassId>(st.classes_.size()));
    if (fresh) {
      st.classes_.push_back(std::move(set));
      st.class_sizes_.push_back(0);
    }
    return it->second;
  };
  st.empty_class_ = intern_class({});
  // Classes are numbered in node-id order so recomputation is deterministic.
  std::vector<NodeId> subjects;
  for (auto& [v, set] : sets) subjects.push_back(v);
  std::sort(subjects.begin(), subjects.end());
  for (NodeId v : subjects) {
    auto& set = sets[v];
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    StatsCatalog::ClassId c = intern_class(set);
    st.node_class_[v] = c;
    ++st.class_sizes_[c];
  }
  // Nodes without outgoing edges: objects that never appear as subjects.
  std::set<NodeId> sinks;
  for (const auto& [id, e] : g.edges()) {
    if (!st.node_class_.contains(e.object)) sinks.insert(e.object);
  }
  st.class_sizes_[st.empty_class_] += sinks.size();

  // Distinct (s, o) pairs per predicate, grouped by class pair.
  std::set<std::tuple<PredicateId, NodeId, NodeId>> seen;
  std::map<std::tuple<PredicateId, StatsCatalog::ClassId, StatsCatalog::ClassId>, std::uint64_t> grouped;
  for (const auto& [id, e] : g.edges()) {
    if (!seen.emplace(e.predicate, e.subject, e.object).second) continue;
    ++grouped[{e.predicate, st.class_of(e.subject), st.class_of(e.object)}];
  }
  for (const auto& [key, count] : grouped) {
    auto [p, cs, co] = key;
    st.pairs_[p].push_back({cs, co, count});
  }
  return st;
}

double estimate_cardinality(const QueryGraph& q, const std::vector<std::size_t>& expr,
                            const StatsCatalog& stats, const KnowledgeGraph& g) {
  if (expr.empty() || stats.empty()) return 0.0;
  auto predicate_of = [&](std::size_t i) -> std::optional<PredicateId> {
    const auto& t = q.patterns[i].predicate;
    if (t.is_variable()) return std::nullopt;
    return g.find_predicate(q.constants[t.id]);
  };
  if (expr.size() == 1) {
    const auto& t = q.patterns[expr.front()].predicate;
    if (t.is_variable()) return static_cast<double>(stats.total_edges());
    auto p = predicate_of(expr.front());
    return p ? static_cast<double>(stats.predicate_edges(*p)) : 0.0;
  }

  // Subject stars in canonical traversal order.
  CanonicalForm form = canonicalize_patterns(q, expr);
  struct Star {
    Term subject;
    std::vector<std::size_t> patterns;
    StatsCatalog::PredicateSet predicates;
  };
  std::vector<Star> stars;
  for (std::size_t i : form.pattern_order) {
    const auto& p = q.patterns[i];
    auto it = std::find_if(stars.begin(), stars.end(),
                           [&](const Star& s) { return s.subject == p.subject; });
    if (it == stars.end()) {
      stars.push_back({p.subject, {}, {}});
      it = stars.end() - 1;
    }
    it->patterns.push_back(i);
    if (p.predicate.is_constant()) {
      auto pid = predicate_of(i);
      if (!pid) return 0.0;
      it->predicates.push_back(*pid);
    }
  }
  for (auto& s : stars) {
    std::sort(s.predicates.begin(), s.predicates.end());
    s.predicates.erase(std::unique(s.predicates.begin(), s.predicates.end()), s.predicates.end());
  }

  double card = 0.0;
  if (stars.size() == 1) {
    card = static_cast<double>(stats.star_count(stars.front().predicates));
  } else {
    for (std::size_t i = 0; i + 1 < stars.size(); ++i) {
      const Star& a = stars[i];
      const Star& b = stars[i + 1];
      std::optional<double> link;
      for (std::size_t k : a.patterns) {
        const auto& p = q.patterns[k];
        if (p.object == b.subject && p.predicate.is_constant()) {
          link = static_cast<double>(stats.chain_pair_count(a.predicates, b.predicates, *predicate_of(k)));
          break;
        }
      }
      if (!link) {
        for (std::size_t k : b.patterns) {
          const auto& p = q.patterns[k];
          if (p.object == a.subject && p.predicate.is_constant()) {
            link = static_cast<double>(stats.chain_pair_count(b.predicates, a.predicates, *predicate_of(k)));
            break;
          }
        }
      }
      if (!link) {
        link = static_cast<double>(
            std::min(stats.star_count(a.predicates), stats.star_count(b.predicates)));
      }
      card += *link;
    }
  }

  // Closing patterns of a cycle each halve the estimate.
  std::set<Term> endpoints;
  for (std::size_t i : expr) {
    endpoints.insert(q.patterns[i].subject);
    endpoints.insert(q.patterns[i].object);
  }
  long cyclomatic = static_cast<long>(expr.size()) - static_cast<long>(endpoints.size()) + 1;
  if (cyclomatic > 0) card *= std::pow(0.5, static_cast<double>(cyclomatic));
  return card;
}

}  // namespace provkg
