#include "provkg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <numeric>

#include "provkg/errors.hpp"

namespace provkg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Edges other than `deleted` that occur in `before` but no longer in `after`;
// only monomials carrying `deleted` can have lost them.
std::vector<EdgeId> dropped_edges(const Polynomial& before, const Polynomial& after, EdgeId deleted) {
  std::vector<EdgeId> out;
  for (const auto& term : before.terms()) {
    if (!term.monomial.contains(deleted)) continue;
    for (const auto& [f, exponent] : term.monomial.factors()) {
      if (f == deleted || std::find(out.begin(), out.end(), f) != out.end()) continue;
      if (!after.mentions(f)) out.push_back(f);
    }
  }
  return out;
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::Out ? "out" : "in"; }

std::size_t ConnectionPointHash::operator()(const ConnectionPoint& c) const {
  std::size_t h = hash_combine(c.node.value(), c.exp_rel.value());
  h = hash_combine(h, static_cast<std::size_t>(c.dir));
  h = hash_combine(h, c.subquery);
  h = hash_combine(h, c.side);
  return hash_combine(h, c.partner.value());
}

std::size_t Engine::ResultRefHash::operator()(const ResultRef& r) const {
  return hash_combine(r.query, RowHash{}(r.row));
}

Engine::Engine(EngineOptions options) : options_(std::move(options)) {}

const StatsCatalog& Engine::statistics() {
  if (!stats_ || stats_version_ != graph_.version()) {
    stats_ = compute_statistics(graph_);
    stats_version_ = graph_.version();
    estimates_ = EstimateCache();
  }
  return *stats_;
}

RegistrationReceipt Engine::register_query(const QueryGraph& input) {
  if (input.patterns.empty()) throw RegistrationError("query has no patterns");
  if (input.has_variable_predicate()) {
    throw RegistrationError("variable predicates cannot be maintained");
  }
  if (!input.connected()) {
    throw RegistrationError("query patterns are not connected through shared variables");
  }
  std::string canonical = canonicalize(input).text;
  for (const auto& qs : queries_) {
    if (qs.canonical == canonical) throw RegistrationError("query already registered");
  }

  const std::size_t qid = queries_.size();
  QueryState qs;
  qs.q = input;
  qs.q.classification = classify_query(input, options_.metadata);
  qs.canonical = std::move(canonical);
  std::vector<std::size_t> all(input.size());
  std::iota(all.begin(), all.end(), 0);
  qs.patterns = resolve_interning(qs.q, all, nullptr, graph_);
  qs.answers = Table(qs.q.projection.size());
  qs.trigger.assign(input.size(), false);
  for (std::size_t i : qs.q.classification.multimap_patterns()) qs.trigger[i] = true;
  queries_.push_back(std::move(qs));
  for (std::size_t i = 0; i < input.size(); ++i) {
    by_predicate_[queries_[qid].patterns[i].predicate].emplace_back(qid, i);
  }

  RegistrationReceipt receipt;
  receipt.query_id = qid;
  receipt.multimap = queries_[qid].q.classification.multimap;
  for (auto& row : evaluate_bgp(queries_[qid].q, graph_)) add_answer(qid, row.bindings, row.provenance);

  if (input.size() >= 2) {
    const StatsCatalog& stats = statistics();
    std::size_t annotations_before = annotation_live_;
    for (const Subquery& sq : generate_subqueries(queries_[qid].q)) {
      const QueryGraph& q = queries_[qid].q;
      SubqueryState s;
      s.id = static_cast<std::uint32_t>(subqueries_.size());
      s.query = qid;
      s.sq = sq;
      s.removed = queries_[qid].patterns[sq.removed];
      const TriplePattern& t = q.patterns[sq.removed];
      std::vector<std::uint32_t> endpoints;
      if (t.subject.is_variable()) endpoints.push_back(t.subject.id);
      if (t.object.is_variable()) endpoints.push_back(t.object.id);

      auto make_side = [&](const std::vector<std::size_t>& comp, bool subject_end) {
        SideState side;
        side.patterns = comp;
        AndOrTree tree = build_and_or_tree(q, comp);
        LocalPlan local = select_best_plan(tree, q, stats, graph_, &estimates_);
        auto merged = plan_.merge(q, local, graph_);
        side.node = merged.root;
        side.var_map = std::move(merged.var_map);
        side.endpoint_var = subject_end ? t.subject.id : t.object.id;
        side.dir = subject_end ? Direction::Out : Direction::In;
        for (std::uint32_t v : q.projection) {
          if (!side.var_map.contains(v)) continue;
          if (std::find(endpoints.begin(), endpoints.end(), v) != endpoints.end()) continue;
          if (std::find(side.frag_vars.begin(), side.frag_vars.end(), v) != side.frag_vars.end()) continue;
          side.frag_vars.push_back(v);
        }
        return side;
      };

      switch (sq.type) {
        case SubqueryType::I:
          s.side1 = make_side(sq.sq1, sq.subject_side == Side::Sq1);
          break;
        case SubqueryType::II:
          s.side1 = make_side(sq.sq1, sq.subject_side == Side::Sq1);
          s.single = queries_[qid].patterns[sq.sq2.front()];
          break;
        case SubqueryType::III:
          s.side1 = make_side(sq.sq1, true);
          s.side2 = make_side(sq.sq2, false);
          break;
        case SubqueryType::IV:
          s.side1 = make_side(sq.sq1, true);
          s.x_var = t.subject.id;
          s.y_var = t.object.id;
          break;
      }

      for (std::uint32_t v : q.projection) {
        Slot slot{Source::Single, v};
        if (t.subject.is_variable() && v == t.subject.id) {
          slot = {Source::Subject, 0};
        } else if (t.object.is_variable() && v == t.object.id) {
          slot = {Source::Object, 0};
        } else if (auto it = std::find(s.side1->frag_vars.begin(), s.side1->frag_vars.end(), v);
                   it != s.side1->frag_vars.end()) {
          slot = {Source::Frag1, static_cast<std::uint32_t>(it - s.side1->frag_vars.begin())};
        } else if (s.side2) {
          auto jt = std::find(s.side2->frag_vars.begin(), s.side2->frag_vars.end(), v);
          if (jt != s.side2->frag_vars.end()) {
            slot = {Source::Frag2, static_cast<std::uint32_t>(jt - s.side2->frag_vars.begin())};
          }
        }
        s.slots.push_back(slot);
      }

      subqueries_.push_back(std::move(s));
      const SubqueryState& stored = subqueries_.back();
      queries_[qid].subqueries.push_back(stored.id);
      receipt.subquery_ids.push_back(stored.id);
      for (int side = 1; side <= 2; ++side) {
        const auto& ss = side == 1 ? stored.side1 : stored.side2;
        if (!ss) continue;
        consumers_[ss->node].push_back({stored.id, side});
        receipt.plan_roots.push_back(ss->node);
        plan_.node(ss->node).table.for_each([&](const Row& row, const Polynomial& poly) {
          add_annotations_from_row(stored, side, row, poly);
        });
      }
    }
    receipt.annotation_count = annotation_live_ - annotations_before;
  }
  receipt.answers = answers(qid);
  return receipt;
}

void Engine::add_annotations_from_row(const SubqueryState& s, int side, const Row& row,
                                      const Polynomial& poly) {
  const SideState& ss = side == 1 ? *s.side1 : *s.side2;
  auto value = [&](std::uint32_t v) { return row[ss.var_map.at(v)]; };
  Row fragment;
  fragment.reserve(ss.frag_vars.size());
  for (std::uint32_t v : ss.frag_vars) fragment.push_back(value(v));
  PredicateId p = s.removed.predicate;
  if (s.sq.type == SubqueryType::IV) {
    NodeId x = value(s.x_var);
    NodeId y = value(s.y_var);
    add_annotation({x, p, Direction::Out, s.id, 1, y}, fragment, poly);
    if (s.x_var != s.y_var) add_annotation({y, p, Direction::In, s.id, 1, x}, fragment, poly);
    return;
  }
  add_annotation({value(ss.endpoint_var), p, ss.dir, s.id, static_cast<std::uint8_t>(side),
                  NodeId::invalid()},
                 fragment, poly);
}

void Engine::add_annotation(const ConnectionPoint& cp, const Row& fragment, const Polynomial& poly) {
  if (poly.is_zero()) return;
  auto& slots = cp_index_[cp];
  auto it = slots.find(fragment);
  std::uint32_t id;
  if (it != slots.end()) {
    id = it->second;
    annotation_entries_[id].provenance += poly;
  } else {
    if (!annotation_free_.empty()) {
      id = annotation_free_.back();
      annotation_free_.pop_back();
    } else {
      id = static_cast<std::uint32_t>(annotation_entries_.size());
      annotation_entries_.emplace_back();
    }
    annotation_entries_[id] = {cp, fragment, poly, true};
    slots.emplace(fragment, id);
    ++annotation_live_;
  }
  for (EdgeId e : poly.edges()) edge_to_cp_[e].insert(id);
}

void Engine::add_answer(std::size_t query, const Row& row, const Polynomial& delta) {
  if (delta.is_zero()) return;
  queries_[query].answers.add(row, delta);
  for (EdgeId e : delta.edges()) edge_to_result_[e].insert({query, row});
}

void Engine::complete(const SubqueryState& s, const Edge& e, bool include_e_in_lookups,
                      Completions& out) const {
  if (!s.removed.accepts(e)) return;
  const QueryState& qs = queries_[s.query];
  const Polynomial edge_poly(e.id);
  Row parent(qs.q.projection.size());
  auto fill = [&](const Row* f1, const Row* f2, const Row* single) {
    for (std::size_t j = 0; j < s.slots.size(); ++j) {
      const Slot& slot = s.slots[j];
      switch (slot.source) {
        case Source::Subject: parent[j] = e.subject; break;
        case Source::Object: parent[j] = e.object; break;
        case Source::Frag1: parent[j] = (*f1)[slot.index]; break;
        case Source::Frag2: parent[j] = (*f2)[slot.index]; break;
        case Source::Single: parent[j] = (*single)[slot.index]; break;
      }
    }
  };
  auto entries = [&](const ConnectionPoint& cp) -> const std::unordered_map<Row, std::uint32_t, RowHash>* {
    auto it = cp_index_.find(cp);
    return it == cp_index_.end() ? nullptr : &it->second;
  };
  const PredicateId p = e.predicate;

  switch (s.sq.type) {
    case SubqueryType::I: {
      const SideState& a = *s.side1;
      NodeId at = a.dir == Direction::Out ? e.subject : e.object;
      auto* list = entries({at, p, a.dir, s.id, 1, NodeId::invalid()});
      if (list == nullptr) return;
      for (const auto& [frag, id] : *list) {
        fill(&frag, nullptr, nullptr);
        out[parent] += annotation_entries_[id].provenance * edge_poly;
      }
      return;
    }
    case SubqueryType::II: {
      const SideState& a = *s.side1;
      NodeId at = a.dir == Direction::Out ? e.subject : e.object;
      NodeId other = a.dir == Direction::Out ? e.object : e.subject;
      std::uint32_t other_var = a.dir == Direction::Out ? s.removed.object.col : s.removed.subject.col;
      auto* list = entries({at, p, a.dir, s.id, 1, NodeId::invalid()});
      if (list == nullptr) return;
      const ResolvedPattern& single = *s.single;
      Row srow(qs.q.variable_count());
      std::vector<bool> bound(qs.q.variable_count(), false);
      srow[other_var] = other;
      bound[other_var] = true;
      std::vector<std::pair<Row, EdgeId>> matches;
      graph_.for_each_match(single.access(srow, bound), [&](const Edge& f) {
        if (!include_e_in_lookups && f.id == e.id) return;
        if (!single.accepts(f)) return;
        Row r = srow;
        single.bind(f, r);
        matches.emplace_back(std::move(r), f.id);
      });
      for (const auto& [frag, id] : *list) {
        Polynomial base = annotation_entries_[id].provenance * edge_poly;
        for (const auto& [r, f] : matches) {
          fill(&frag, nullptr, &r);
          out[parent] += base * Polynomial(f);
        }
      }
      return;
    }
    case SubqueryType::III: {
      auto* left = entries({e.subject, p, Direction::Out, s.id, 1, NodeId::invalid()});
      if (left == nullptr) return;
      auto* right = entries({e.object, p, Direction::In, s.id, 2, NodeId::invalid()});
      if (right == nullptr) return;
      for (const auto& [f1, id1] : *left) {
        Polynomial base = annotation_entries_[id1].provenance * edge_poly;
        for (const auto& [f2, id2] : *right) {
          fill(&f1, &f2, nullptr);
          out[parent] += base * annotation_entries_[id2].provenance;
        }
      }
      return;
    }
    case SubqueryType::IV: {
      auto* list = entries({e.subject, p, Direction::Out, s.id, 1, e.object});
      if (list == nullptr) return;
      for (const auto& [frag, id] : *list) {
        fill(&frag, nullptr, nullptr);
        out[parent] += annotation_entries_[id].provenance * edge_poly;
      }
      return;
    }
  }
}

UpdateReport Engine::insert_edge(std::string_view s, std::string_view p, std::string_view o) {
  EdgeId id = graph_.insert_edge(s, p, o);
  return handle_insertion(*graph_.edge(id));
}

UpdateReport Engine::insert_edge(NodeId s, PredicateId p, NodeId o) {
  EdgeId id = graph_.insert_edge(s, p, o);
  return handle_insertion(*graph_.edge(id));
}

UpdateReport Engine::delete_edge(EdgeId id) {
  auto e = graph_.delete_edge(id);
  if (!e) return {};
  return handle_deletion(*e);
}

UpdateReport Engine::handle_insertion(const Edge& e) {
  auto start = Clock::now();
  UpdateReport report;
  report.kind = UpdateReport::Kind::Insert;
  report.edge = e;
  auto users = by_predicate_.find(e.predicate);
  const bool in_plan = !plan_.nodes_with(e.predicate).empty();
  if (users == by_predicate_.end() && !in_plan) {
    report.total_seconds = seconds_since(start);
    return report;
  }

  // Completions through every removed pattern the edge can bind, against the
  // state before this edge was seen by the plan.
  std::map<std::size_t, Completions> delta;
  std::vector<std::pair<std::uint32_t, Completions>> trigger_old;
  if (users != by_predicate_.end()) {
    for (auto [qid, ordinal] : users->second) {
      const QueryState& qs = queries_[qid];
      if (qs.q.size() == 1) {
        const ResolvedPattern& p = qs.patterns[0];
        if (!p.accepts(e)) continue;
        Row full(qs.q.variable_count());
        p.bind(e, full);
        Row row(qs.q.projection.size());
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = full[qs.q.projection[j]];
        delta[qid][row] += Polynomial(e.id);
        continue;
      }
      const SubqueryState& s = subqueries_[qs.subqueries[ordinal]];
      Completions c;
      complete(s, e, false, c);
      for (const auto& [row, poly] : c) delta[qid][row] += poly;
      if (qs.trigger[ordinal] && s.removed.accepts(e)) trigger_old.emplace_back(s.id, std::move(c));
    }
  }
  double response = seconds_since(start);

  auto maintenance_start = Clock::now();
  auto plan_delta = plan_.delta_insert(e);
  for (const auto& [node, rows] : plan_delta) {
    auto it = consumers_.find(node);
    if (it == consumers_.end()) continue;
    for (const Consumer& c : it->second) {
      const SubqueryState& s = subqueries_[c.subquery];
      for (const auto& [row, poly] : rows) add_annotations_from_row(s, c.side, row, poly);
    }
  }
  double maintenance = seconds_since(maintenance_start);

  // Matches that bind the new edge to several patterns show up as the growth
  // of a shared-group subquery's completions.
  auto discharge_start = Clock::now();
  for (auto& [sid, old] : trigger_old) {
    const SubqueryState& s = subqueries_[sid];
    Completions fresh;
    complete(s, e, true, fresh);
    for (auto& [row, poly] : fresh) {
      auto it = old.find(row);
      Polynomial grown = it == old.end() ? poly : poly.minus(it->second);
      if (!grown.is_zero()) delta[s.query][row] += grown;
    }
  }
  for (auto& [qid, rows] : delta) {
    for (auto& [row, poly] : rows) {
      Polynomial d = poly.divided_by_multiplicity(e.id);
      add_answer(qid, row, d);
      report.added.push_back({qid, row, std::move(d)});
    }
  }
  response += seconds_since(discharge_start);
  if (!trigger_old.empty()) {
    // the plan delta was needed to answer a MultiMap query
    response += maintenance;
    maintenance = 0.0;
  }
  report.response_seconds = response;
  report.maintenance_seconds = maintenance;
  report.total_seconds = seconds_since(start);
  return report;
}

UpdateReport Engine::handle_deletion(const Edge& e) {
  auto start = Clock::now();
  UpdateReport report;
  report.kind = UpdateReport::Kind::Delete;
  report.edge = e;

  // Filter through edgeToResult, refine by evaluating with e set to 0.
  if (auto it = edge_to_result_.find(e.id); it != edge_to_result_.end()) {
    std::vector<ResultRef> refs(it->second.begin(), it->second.end());
    std::sort(refs.begin(), refs.end(), [](const ResultRef& a, const ResultRef& b) {
      return std::tie(a.query, a.row) < std::tie(b.query, b.row);
    });
    for (const ResultRef& ref : refs) {
      Table& answers = queries_[ref.query].answers;
      const Polynomial* poly = answers.find(ref.row);
      if (poly == nullptr || !poly->mentions(e.id)) continue;
      if (!poly->survives_deletion(e.id)) {
        for (EdgeId f : poly->edges()) {
          auto jt = edge_to_result_.find(f);
          if (jt == edge_to_result_.end()) continue;
          jt->second.erase(ref);
          if (jt->second.empty() && f != e.id) edge_to_result_.erase(jt);
        }
        report.removed.push_back({ref.query, ref.row, Polynomial()});
        answers.erase(ref.row);
        continue;
      }
      if (options_.fault_skip_prune) {
        report.pruned.push_back({ref.query, ref.row, *poly});
        continue;
      }
      Polynomial kept = poly->pruned(e.id);
      for (EdgeId f : dropped_edges(*poly, kept, e.id)) {
        auto jt = edge_to_result_.find(f);
        if (jt == edge_to_result_.end()) continue;
        jt->second.erase(ref);
        if (jt->second.empty()) edge_to_result_.erase(jt);
      }
      report.pruned.push_back({ref.query, ref.row, kept});
      answers.assign(ref.row, std::move(kept));
    }
    if (!options_.fault_skip_prune) edge_to_result_.erase(e.id);
  }
  report.response_seconds = seconds_since(start);

  auto maintenance_start = Clock::now();
  if (auto it = edge_to_cp_.find(e.id); it != edge_to_cp_.end()) {
    std::vector<std::uint32_t> ids(it->second.begin(), it->second.end());
    for (std::uint32_t id : ids) {
      AnnotationEntry& entry = annotation_entries_[id];
      if (!entry.live || !entry.provenance.mentions(e.id)) continue;
      Polynomial kept = entry.provenance.pruned(e.id);
      for (EdgeId f : dropped_edges(entry.provenance, kept, e.id)) {
        auto jt = edge_to_cp_.find(f);
        if (jt == edge_to_cp_.end()) continue;
        jt->second.erase(id);
        if (jt->second.empty()) edge_to_cp_.erase(jt);
      }
      if (kept.is_zero()) {
        auto cp = cp_index_.find(entry.point);
        cp->second.erase(entry.fragment);
        if (cp->second.empty()) cp_index_.erase(cp);
        entry = AnnotationEntry{};
        annotation_free_.push_back(id);
        --annotation_live_;
      } else {
        entry.provenance = std::move(kept);
      }
    }
    edge_to_cp_.erase(e.id);
  }
  plan_.delta_delete(e);
  report.maintenance_seconds = seconds_since(maintenance_start);
  report.total_seconds = seconds_since(start);
  return report;
}

std::vector<BindingRow> Engine::answers(std::size_t query) const {
  std::vector<BindingRow> out;
  for (auto& [row, poly] : queries_.at(query).answers.sorted_rows()) out.push_back({row, poly});
  return out;
}

const Polynomial* Engine::answer(std::size_t query, const Row& bindings) const {
  return queries_.at(query).answers.find(bindings);
}

std::vector<SubqueryView> Engine::subqueries(std::size_t query) const {
  std::vector<SubqueryView> out;
  for (std::uint32_t sid : queries_.at(query).subqueries) {
    const SubqueryState& s = subqueries_[sid];
    SubqueryView v;
    v.id = s.id;
    v.query = s.query;
    v.subquery = s.sq;
    auto view = [](const SideState& ss) {
      return ComponentView{ss.node, ss.patterns, ss.var_map};
    };
    if (s.side1) v.sq1 = view(*s.side1);
    if (s.side2) v.sq2 = view(*s.side2);
    out.push_back(std::move(v));
  }
  return out;
}

const Polynomial* Engine::component_row(std::uint32_t subquery, int side,
                                        const std::map<std::uint32_t, NodeId>& bindings) const {
  const SubqueryState& s = subqueries_.at(subquery);
  const auto& ss = side == 1 ? s.side1 : s.side2;
  if (!ss) return nullptr;
  const auto& node = plan_.node(ss->node);
  Row row(node.arity);
  for (auto [v, col] : ss->var_map) {
    auto it = bindings.find(v);
    if (it == bindings.end()) return nullptr;
    row[col] = it->second;
  }
  return node.table.find(row);
}

std::size_t Engine::component_size(std::uint32_t subquery, int side) const {
  const SubqueryState& s = subqueries_.at(subquery);
  const auto& ss = side == 1 ? s.side1 : s.side2;
  return ss ? plan_.node(ss->node).table.size() : 0;
}

std::vector<Annotation> Engine::annotations() const {
  std::vector<Annotation> out;
  for (const auto& entry : annotation_entries_) {
    if (!entry.live) continue;
    const SubqueryState& s = subqueries_[entry.point.subquery];
    const SideState& ss = entry.point.side == 1 ? *s.side1 : *s.side2;
    out.push_back({entry.point, ss.frag_vars, entry.fragment, entry.provenance});
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
    return std::tie(a.point.node, a.point.subquery, a.point.side, a.point.dir, a.point.partner,
                    a.fragment) < std::tie(b.point.node, b.point.subquery, b.point.side,
                                           b.point.dir, b.point.partner, b.fragment);
  });
  return out;
}

std::vector<Annotation> Engine::annotations_at(NodeId node) const {
  std::vector<Annotation> out;
  for (auto& a : annotations()) {
    if (a.point.node == node) out.push_back(std::move(a));
  }
  return out;
}

std::size_t Engine::annotation_count(std::uint32_t subquery) const {
  return static_cast<std::size_t>(std::count_if(
      annotation_entries_.begin(), annotation_entries_.end(),
      [&](const AnnotationEntry& e) { return e.live && e.point.subquery == subquery; }));
}

IndexAudit Engine::index_audit() const {
  IndexAudit audit;
  std::unordered_map<EdgeId, std::unordered_set<ResultRef, ResultRefHash>> results;
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    queries_[q].answers.for_each([&](const Row& row, const Polynomial& poly) {
      for (EdgeId e : poly.edges()) results[e].insert({q, row});
    });
  }
  std::unordered_map<EdgeId, std::unordered_set<std::uint32_t>> cps;
  for (std::uint32_t id = 0; id < annotation_entries_.size(); ++id) {
    const auto& entry = annotation_entries_[id];
    if (!entry.live) continue;
    for (EdgeId e : entry.provenance.edges()) cps[e].insert(id);
  }

  auto diff = [&](const auto& rebuilt, const auto& live, const char* name) {
    std::vector<EdgeId> edges;
    for (const auto& [e, set] : rebuilt) edges.push_back(e);
    for (const auto& [e, set] : live) edges.push_back(e);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (EdgeId e : edges) {
      auto a = rebuilt.find(e);
      auto b = live.find(e);
      std::size_t na = a == rebuilt.end() ? 0 : a->second.size();
      std::size_t nb = b == live.end() ? 0 : b->second.size();
      bool same = na == nb;
      if (same && na > 0) {
        for (const auto& item : a->second) {
          if (!b->second.contains(item)) {
            same = false;
            break;
          }
        }
      }
      if (!same) {
        audit.differences.push_back(std::string(name) + " e" + std::to_string(e.value()) +
                                    ": rebuilt " + std::to_string(na) + " entries, live " +
                                    std::to_string(nb));
      }
    }
  };
  diff(results, edge_to_result_, "edgeToResult");
  diff(cps, edge_to_cp_, "edgeToCP");
  return audit;
}

void Engine::corrupt_index_for_testing(EdgeId e) {
  edge_to_result_[e].insert({queries_.size(), Row{}});
}

std::string Engine::dump_answers_jsonl() const {
  std::string out;
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    const QueryGraph& query = queries_[q].q;
    for (const auto& row : answers(q)) {
      nlohmann::ordered_json bindings = nlohmann::ordered_json::object();
      for (std::size_t j = 0; j < query.projection.size(); ++j) {
        bindings[query.variables[query.projection[j]]] = graph_.node_name(row.bindings[j]);
      }
      nlohmann::ordered_json line = {
          {"query", q}, {"bindings", bindings}, {"provenance", row.provenance.to_string()}};
      out += line.dump() + "\n";
    }
  }
  return out;
}

std::string Engine::dump_annotations_jsonl() const {
  std::string out;
  for (const auto& a : annotations()) {
    const SubqueryState& s = subqueries_[a.point.subquery];
    const QueryGraph& q = queries_[s.query].q;
    nlohmann::ordered_json result = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < a.fragment_vars.size(); ++i) {
      result[q.variables[a.fragment_vars[i]]] = graph_.node_name(a.fragment[i]);
    }
    nlohmann::ordered_json line = {{"node", graph_.node_name(a.point.node)},
                                   {"expRel", graph_.predicate_name(a.point.exp_rel)},
                                   {"dir", to_string(a.point.dir)},
                                   {"sqId", a.point.subquery},
                                   {"query", s.query},
                                   {"type", to_string(s.sq.type)},
                                   {"result", result},
                                   {"provPoly", a.provenance.to_string()}};
    if (a.point.partner.valid()) line["partner"] = graph_.node_name(a.point.partner);
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace provkg
