#include "provkg/eval.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace provkg {

bool ResolvedPattern::accepts(const Edge& e) const {
  if (e.predicate != predicate) return false;
  if (!subject.variable && subject.node != e.subject) return false;
  if (!object.variable && object.node != e.object) return false;
  if (self_loop() && e.subject != e.object) return false;
  return true;
}

void ResolvedPattern::bind(const Edge& e, Row& row) const {
  if (subject.variable) row[subject.col] = e.subject;
  if (object.variable) row[object.col] = e.object;
}

EdgePattern ResolvedPattern::access(const Row& row, const std::vector<bool>& bound) const {
  EdgePattern ep;
  ep.predicate = predicate;
  if (!subject.variable) {
    ep.subject = subject.node;
  } else if (bound[subject.col]) {
    ep.subject = row[subject.col];
  }
  if (!object.variable) {
    ep.object = object.node;
  } else if (bound[object.col]) {
    ep.object = row[object.col];
  }
  return ep;
}

namespace {

template <typename Resolve>
std::optional<std::vector<ResolvedPattern>> resolve(const QueryGraph& q,
                                                    const std::vector<std::size_t>& subset,
                                                    const std::map<std::uint32_t, std::uint32_t>* var_map,
                                                    Resolve&& node_of, bool& missing) {
  std::vector<ResolvedPattern> out;
  auto term = [&](const Term& t) {
    PlanTerm pt;
    if (t.is_variable()) {
      pt.variable = true;
      pt.col = var_map != nullptr ? var_map->at(t.id) : t.id;
    } else {
      auto n = node_of(q.constants[t.id]);
      if (!n) {
        missing = true;
      } else {
        pt.node = *n;
      }
    }
    return pt;
  };
  for (std::size_t i : subset) {
    const auto& p = q.patterns[i];
    ResolvedPattern rp;
    rp.subject = term(p.subject);
    rp.object = term(p.object);
    out.push_back(rp);
  }
  return out;
}

// Backtracking matcher: at each depth picks the open pattern with the
// smallest index bucket under the current bindings.
class Matcher {
 public:
  Matcher(const std::vector<ResolvedPattern>& patterns, std::size_t arity, const KnowledgeGraph& g)
      : patterns_(patterns), g_(g), row_(arity), bound_(arity, false), used_(patterns.size(), false) {
    edges_.reserve(patterns.size());
  }

  template <typename Sink>
  void run(Sink&& sink) {
    step(sink);
  }

 private:
  template <typename Sink>
  void step(Sink& sink) {
    if (edges_.size() == patterns_.size()) {
      sink(row_, edges_);
      return;
    }
    std::size_t pick = 0;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (used_[i]) continue;
      std::size_t c = g_.candidate_count(patterns_[i].access(row_, bound_));
      if (c < best) {
        best = c;
        pick = i;
      }
    }
    if (best == 0) return;
    const ResolvedPattern& p = patterns_[pick];
    used_[pick] = true;
    bool bind_s = p.subject.variable && !bound_[p.subject.col];
    bool bind_o = p.object.variable && !bound_[p.object.col] && !(bind_s && p.self_loop());
    EdgePattern ep = p.access(row_, bound_);
    g_.for_each_match(ep, [&](const Edge& e) {
      if (p.self_loop() && e.subject != e.object) return;
      if (bind_s) {
        row_[p.subject.col] = e.subject;
        bound_[p.subject.col] = true;
      }
      if (bind_o) {
        row_[p.object.col] = e.object;
        bound_[p.object.col] = true;
      }
      edges_.push_back(e.id);
      step(sink);
      edges_.pop_back();
      if (bind_s) bound_[p.subject.col] = false;
      if (bind_o) bound_[p.object.col] = false;
    });
    used_[pick] = false;
  }

  const std::vector<ResolvedPattern>& patterns_;
  const KnowledgeGraph& g_;
  Row row_;
  std::vector<bool> bound_;
  std::vector<bool> used_;
  std::vector<EdgeId> edges_;
};

}  // namespace

std::vector<ResolvedPattern> resolve_interning(const QueryGraph& q,
                                               const std::vector<std::size_t>& subset,
                                               const std::map<std::uint32_t, std::uint32_t>* var_map,
                                               KnowledgeGraph& g) {
  bool missing = false;
  auto out = *resolve(
      q, subset, var_map, [&](const std::string& name) { return std::optional(g.intern_node(name)); },
      missing);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const auto& t = q.patterns[subset[k]].predicate;
    out[k].predicate = t.is_variable() ? PredicateId::invalid() : g.intern_predicate(q.constants[t.id]);
  }
  return out;
}

std::optional<std::vector<ResolvedPattern>> resolve_lookup(
    const QueryGraph& q, const std::vector<std::size_t>& subset,
    const std::map<std::uint32_t, std::uint32_t>* var_map, const KnowledgeGraph& g) {
  bool missing = false;
  auto out = *resolve(
      q, subset, var_map, [&](const std::string& name) { return g.find_node(name); }, missing);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const auto& t = q.patterns[subset[k]].predicate;
    if (t.is_variable()) return std::nullopt;
    auto p = g.find_predicate(q.constants[t.id]);
    if (!p) return std::nullopt;
    out[k].predicate = *p;
  }
  if (missing) return std::nullopt;
  return out;
}

Table evaluate_patterns(const std::vector<ResolvedPattern>& patterns, std::size_t arity,
                        const KnowledgeGraph& g) {
  std::unordered_map<Row, std::vector<Monomial>, RowHash> found;
  Matcher m(patterns, arity, g);
  m.run([&](const Row& row, const std::vector<EdgeId>& edges) {
    found[row].push_back(Monomial::from_edges(edges));
  });
  Table t(arity);
  for (auto& [row, monos] : found) t.add(row, Polynomial::from_monomials(std::move(monos)));
  return t;
}

std::vector<BindingRow> evaluate_bgp(const QueryGraph& q, const KnowledgeGraph& g) {
  std::vector<std::size_t> all(q.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto patterns = resolve_lookup(q, all, nullptr, g);
  if (!patterns) return {};
  std::unordered_map<Row, std::vector<Monomial>, RowHash> found;
  Row projected(q.projection.size());
  Matcher m(*patterns, q.variable_count(), g);
  m.run([&](const Row& row, const std::vector<EdgeId>& edges) {
    for (std::size_t i = 0; i < q.projection.size(); ++i) projected[i] = row[q.projection[i]];
    found[projected].push_back(Monomial::from_edges(edges));
  });
  std::vector<BindingRow> out;
  out.reserve(found.size());
  for (auto& [row, monos] : found) out.push_back({row, Polynomial::from_monomials(std::move(monos))});
  std::sort(out.begin(), out.end(),
            [](const BindingRow& a, const BindingRow& b) { return a.bindings < b.bindings; });
  return out;
}

}  // namespace provkg
