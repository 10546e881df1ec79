#include "provkg/global_plan.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>
#include <set>
#include <unordered_set>

namespace provkg {

std::optional<std::size_t> GlobalPlan::find(const std::string& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::size_t GlobalPlan::root_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.root_refs > 0; }));
}

std::size_t GlobalPlan::non_leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf(); }));
}

std::size_t GlobalPlan::distinct_leaf_predicates() const {
  std::set<PredicateId> preds;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) preds.insert(n.leaf->predicate);
  }
  return preds.size();
}

std::optional<double> GlobalPlan::coverage() const {
  std::size_t preds = distinct_leaf_predicates();
  if (preds == 0) return std::nullopt;
  return static_cast<double>(non_leaf_count()) / static_cast<double>(preds);
}

const std::vector<std::size_t>& GlobalPlan::nodes_with(PredicateId p) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_predicate_.find(p);
  return it == by_predicate_.end() ? kNone : it->second;
}

GlobalPlan::MergeResult GlobalPlan::merge(const QueryGraph& q, const LocalPlan& local,
                                          KnowledgeGraph& g) {
  MergeResult result;
  local_node_total_ += local.node_count();
  std::vector<std::optional<CanonicalForm>> forms(local.steps.size());
  auto form_of = [&](std::size_t step) -> const CanonicalForm& {
    if (!forms[step]) forms[step] = canonicalize_patterns(q, local.steps[step].patterns);
    return *forms[step];
  };

  std::function<std::size_t(std::size_t)> ensure = [&](std::size_t step) -> std::size_t {
    const CanonicalForm& form = form_of(step);
    if (auto existing = find(form.text)) return *existing;
    const auto& s = local.steps[step];
    Node n;
    n.key = form.text;
    n.pattern_count = s.patterns.size();
    n.arity = form.var_map.size();
    n.estimate = s.estimate;
    if (s.leaf()) {
      n.leaf = resolve_interning(q, s.patterns, &form.var_map, g).front();
      n.predicates = {n.leaf->predicate};
    } else {
      std::size_t l = ensure(static_cast<std::size_t>(s.left));
      std::size_t r = ensure(static_cast<std::size_t>(s.right));
      const CanonicalForm& lf = form_of(static_cast<std::size_t>(s.left));
      const CanonicalForm& rf = form_of(static_cast<std::size_t>(s.right));
      n.left = static_cast<int>(l);
      n.right = static_cast<int>(r);
      n.left_cols.resize(lf.var_map.size());
      n.right_cols.resize(rf.var_map.size());
      for (auto [v, c] : lf.var_map) n.left_cols[c] = form.var_map.at(v);
      for (auto [v, c] : rf.var_map) n.right_cols[c] = form.var_map.at(v);
      std::vector<std::pair<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>> shared;
      for (auto [v, c] : lf.var_map) {
        auto it = rf.var_map.find(v);
        if (it != rf.var_map.end()) shared.push_back({form.var_map.at(v), {c, it->second}});
      }
      std::sort(shared.begin(), shared.end());
      for (auto& [col, lr] : shared) {
        n.left_join.push_back(lr.first);
        n.right_join.push_back(lr.second);
      }
      n.left_index = nodes_[l].table.ensure_index(n.left_join);
      n.right_index = nodes_[r].table.ensure_index(n.right_join);
      std::set_union(nodes_[l].predicates.begin(), nodes_[l].predicates.end(),
                     nodes_[r].predicates.begin(), nodes_[r].predicates.end(),
                     std::back_inserter(n.predicates));
    }
    n.id = nodes_.size();
    n.table = Table(n.arity);
    std::size_t id = n.id;
    by_key_.emplace(n.key, id);
    for (PredicateId p : n.predicates) {
      auto& list = by_predicate_[p];
      list.push_back(id);
      // pattern count orders children before parents
      std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        std::size_t ca = a == id ? n.pattern_count : nodes_[a].pattern_count;
        std::size_t cb = b == id ? n.pattern_count : nodes_[b].pattern_count;
        return ca < cb;
      });
    }
    int left = n.left;
    int right = n.right;
    nodes_.push_back(std::move(n));
    if (left >= 0) {
      nodes_[left].parents.push_back(id);
      if (right != left) nodes_[right].parents.push_back(id);
    }
    result.created.push_back(id);
    materialize(id, g);
    return id;
  };

  result.root = ensure(local.root());
  nodes_[result.root].root_refs++;
  result.var_map = form_of(local.root()).var_map;
  return result;
}

Row GlobalPlan::combine(const Node& n, const Row& l, const Row& r) const {
  Row out(n.arity);
  for (std::size_t c = 0; c < l.size(); ++c) out[n.left_cols[c]] = l[c];
  for (std::size_t c = 0; c < r.size(); ++c) out[n.right_cols[c]] = r[c];
  return out;
}

Row GlobalPlan::left_key(const Node& n, const Row& l) const {
  Row key;
  key.reserve(n.left_join.size());
  for (auto c : n.left_join) key.push_back(l[c]);
  return key;
}

Row GlobalPlan::right_key(const Node& n, const Row& r) const {
  Row key;
  key.reserve(n.right_join.size());
  for (auto c : n.right_join) key.push_back(r[c]);
  return key;
}

bool GlobalPlan::compatible(const Node& n, const Row& l, const Row& r) const {
  for (std::size_t i = 0; i < n.left_join.size(); ++i) {
    if (l[n.left_join[i]] != r[n.right_join[i]]) return false;
  }
  return true;
}

void GlobalPlan::materialize_all(const KnowledgeGraph& g) {
  for (auto& n : nodes_) n.table.clear();
  for (std::size_t id = 0; id < nodes_.size(); ++id) materialize(id, g);
}

void GlobalPlan::materialize(std::size_t id, const KnowledgeGraph& g) {
  Node& n = nodes_[id];
  n.table.clear();
  if (n.is_leaf()) {
    const ResolvedPattern& p = *n.leaf;
    Row row(n.arity);
    std::vector<bool> none(n.arity, false);
    g.for_each_match(p.access(row, none), [&](const Edge& e) {
      if (!p.accepts(e)) return;
      p.bind(e, row);
      n.table.add(row, Polynomial(e.id));
    });
    return;
  }
  const Node& l = nodes_[n.left];
  const Node& r = nodes_[n.right];
  l.table.for_each([&](const Row& lr, const Polynomial& lp) {
    r.table.probe(n.right_index, left_key(n, lr), [&](const Row& rr, const Polynomial& rp) {
      n.table.add(combine(n, lr, rr), lp * rp);
    });
  });
}

GlobalPlan::InsertDelta GlobalPlan::delta_insert(const Edge& e) {
  std::unordered_map<std::size_t, std::unordered_map<Row, Polynomial, RowHash>> delta;
  for (std::size_t id : nodes_with(e.predicate)) {
    const Node& n = nodes_[id];
    if (n.is_leaf()) {
      if (!n.leaf->accepts(e)) continue;
      Row row(n.arity);
      n.leaf->bind(e, row);
      delta[id][row] += Polynomial(e.id);
      continue;
    }
    auto dl = delta.find(static_cast<std::size_t>(n.left));
    auto dr = delta.find(static_cast<std::size_t>(n.right));
    if (dl == delta.end() && dr == delta.end()) continue;
    std::unordered_map<Row, Polynomial, RowHash> out;
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    if (dl != delta.end()) {
      for (const auto& [lr, lp] : dl->second) {
        r.table.probe(n.right_index, left_key(n, lr), [&](const Row& rr, const Polynomial& rp) {
          out[combine(n, lr, rr)] += lp * rp;
        });
      }
    }
    if (dr != delta.end()) {
      for (const auto& [rr, rp] : dr->second) {
        l.table.probe(n.left_index, right_key(n, rr), [&](const Row& lr, const Polynomial& lp) {
          out[combine(n, lr, rr)] += lp * rp;
        });
      }
    }
    if (dl != delta.end() && dr != delta.end()) {
      for (const auto& [lr, lp] : dl->second) {
        for (const auto& [rr, rp] : dr->second) {
          if (compatible(n, lr, rr)) out[combine(n, lr, rr)] += lp * rp;
        }
      }
    }
    if (!out.empty()) delta[id] = std::move(out);
  }

  InsertDelta result;
  for (auto& [id, rows] : delta) {
    auto& list = result[id];
    list.reserve(rows.size());
    for (auto& [row, poly] : rows) {
      nodes_[id].table.add(row, poly);
      list.emplace_back(row, std::move(poly));
    }
  }
  return result;
}

GlobalPlan::DeleteDelta GlobalPlan::delta_delete(const Edge& e) {
  // Phase 1 finds affected rows against the unmodified tables.
  std::vector<std::pair<std::size_t, std::vector<Row>>> affected;
  auto rows_of = [&](std::size_t id) -> const std::vector<Row>* {
    for (const auto& [k, rows] : affected) {
      if (k == id) return &rows;
    }
    return nullptr;
  };
  for (std::size_t id : nodes_with(e.predicate)) {
    const Node& n = nodes_[id];
    if (n.is_leaf()) {
      if (!n.leaf->accepts(e)) continue;
      Row row(n.arity);
      n.leaf->bind(e, row);
      const Polynomial* p = n.table.find(row);
      if (p != nullptr && p->mentions(e.id)) affected.push_back({id, {std::move(row)}});
      continue;
    }
    const std::vector<Row>* al = rows_of(static_cast<std::size_t>(n.left));
    const std::vector<Row>* ar = rows_of(static_cast<std::size_t>(n.right));
    if (al == nullptr && ar == nullptr) continue;
    std::vector<Row> out;
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    if (al != nullptr) {
      for (const Row& lr : *al) {
        r.table.probe(n.right_index, left_key(n, lr),
                      [&](const Row& rr, const Polynomial&) { out.push_back(combine(n, lr, rr)); });
      }
    }
    if (ar != nullptr) {
      for (const Row& rr : *ar) {
        l.table.probe(n.left_index, right_key(n, rr),
                      [&](const Row& lr, const Polynomial&) { out.push_back(combine(n, lr, rr)); });
      }
    }
    if (out.empty()) continue;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    affected.push_back({id, std::move(out)});
  }

  // Phase 2 prunes.
  DeleteDelta result;
  for (auto& [id, rows] : affected) {
    Table& t = nodes_[id].table;
    for (Row& row : rows) {
      const Polynomial* p = t.find(row);
      if (p == nullptr || !p->mentions(e.id)) continue;
      Polynomial kept = p->pruned(e.id);
      if (kept.is_zero()) {
        t.erase(row);
        result.removed[id].push_back(std::move(row));
      } else {
        t.assign(row, std::move(kept));
        result.pruned[id].push_back(std::move(row));
      }
    }
  }
  return result;
}

std::string GlobalPlan::dump_json(const KnowledgeGraph& g) const {
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes_[a].pattern_count < nodes_[b].pattern_count;
  });
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t id : order) {
    const Node& n = nodes_[id];
    nlohmann::json children = nlohmann::json::array();
    if (!n.is_leaf()) children = {n.left, n.right};
    nlohmann::json preds = nlohmann::json::array();
    for (PredicateId p : n.predicates) preds.push_back(g.predicate_name(p));
    list.push_back({{"id", n.id},
                    {"expression", n.key},
                    {"estimate", n.estimate},
                    {"children", children},
                    {"predicates", preds},
                    {"rows", n.table.size()},
                    {"roots", n.root_refs}});
  }
  nlohmann::json out = {{"nodes", list},
                        {"non_leaf_nodes", non_leaf_count()},
                        {"leaf_predicates", distinct_leaf_predicates()},
                        {"local_plan_nodes", local_node_total_}};
  auto cov = coverage();
  out["coverage"] = cov ? nlohmann::json(*cov) : nlohmann::json(nullptr);
  return out.dump(2);
}

}  // namespace provkg
