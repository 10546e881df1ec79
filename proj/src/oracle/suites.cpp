#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <set>

#include "provkg/errors.hpp"
#include "provkg/oracle.hpp"
#include "provkg/workload.hpp"

namespace provkg::oracle {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

constexpr std::size_t kMaxMessages = 20;

bool holds(const Poly& p, const std::vector<EdgeId>& monomial) {
  auto it = p.find(monomial);
  return it != p.end() && it->second > 0;
}

std::vector<EdgeId> sorted_edges(const Assignment& a, const std::vector<std::size_t>& patterns,
                                 EdgeId phantom) {
  std::vector<EdgeId> out;
  for (std::size_t i : patterns) out.push_back(a.edges[i].valid() ? a.edges[i] : phantom);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::uint32_t, NodeId> restrict(const Assignment& a, const ComponentView& c) {
  std::map<std::uint32_t, NodeId> out;
  for (auto [v, col] : c.var_map) out[v] = a.bindings[v];
  return out;
}

bool contains_any(const std::vector<std::size_t>& patterns, const std::vector<std::size_t>& wanted) {
  return std::any_of(wanted.begin(), wanted.end(), [&](std::size_t w) {
    return std::find(patterns.begin(), patterns.end(), w) != patterns.end();
  });
}

struct Expected {
  NodeId node;
  Direction dir;
  int side;
  NodeId partner;
  const ComponentView* component;
};

// Connection points a 1:1 match of subquery `v` is expected to be annotated at.
std::vector<Expected> expected_points(const SubqueryView& v, const Phantom& f) {
  std::vector<Expected> out;
  switch (v.subquery.type) {
    case SubqueryType::I:
    case SubqueryType::II:
      if (v.subquery.subject_side == Side::Sq1) {
        out.push_back({f.s, Direction::Out, 1, NodeId::invalid(), &*v.sq1});
      } else {
        out.push_back({f.o, Direction::In, 1, NodeId::invalid(), &*v.sq1});
      }
      break;
    case SubqueryType::III:
      out.push_back({f.s, Direction::Out, 1, NodeId::invalid(), &*v.sq1});
      out.push_back({f.o, Direction::In, 2, NodeId::invalid(), &*v.sq2});
      break;
    case SubqueryType::IV:
      out.push_back({f.s, Direction::Out, 1, f.o, &*v.sq1});
      break;
  }
  return out;
}

}  // namespace

void SuiteResult::fail(std::string message) {
  ++failures;
  if (messages.size() < kMaxMessages) messages.push_back(std::move(message));
}

void check_lemmas(Engine& engine, std::mt19937_64& rng, std::size_t samples, SuiteResult& out) {
  for (std::size_t qid = 0; qid < engine.query_count(); ++qid) {
    const QueryGraph q = engine.query(qid);
    if (q.size() < 2) continue;
    const auto views = engine.subqueries(qid);
    const bool multimap = q.classification.multimap;
    const std::string tag = "query " + std::to_string(qid) + " [" + pretty_print(q) + "]";

    for (std::size_t sample = 0; sample < samples; ++sample) {
      EdgeSet edges(engine.graph());
      const KnowledgeGraph& g = engine.graph();
      // Phantom: complete a partial match of every pattern but one.
      std::size_t k = bounded(rng, q.size());
      QueryGraph rest = q;
      rest.patterns.erase(rest.patterns.begin() + static_cast<std::ptrdiff_t>(k));
      std::optional<std::vector<NodeId>> chosen;
      std::size_t seen = 0;
      enumerate(rest, g, edges, std::nullopt, [&](const Assignment& a) {
        ++seen;
        if (bounded(rng, seen) == 0) chosen = a.bindings;
        return seen < 2000;
      });
      const TriplePattern& t = q.patterns[k];
      auto pid = g.find_predicate(q.constants[t.predicate.id]);
      if (!pid || edges.nodes().empty()) continue;
      auto end_value = [&](const Term& term) -> std::optional<NodeId> {
        if (!term.is_variable()) return g.find_node(q.constants[term.id]);
        if (chosen && (*chosen)[term.id].valid()) return (*chosen)[term.id];
        return edges.nodes()[bounded(rng, edges.nodes().size())];
      };
      auto u = end_value(t.subject);
      auto v = end_value(t.object);
      if (!u || !v) continue;
      Phantom f{*u, *pid, *v};
      if (edges.has_triple(f.s, f.p, f.o)) {
        ++out.counters["phantom_present"];
        continue;
      }

      std::vector<Assignment> one_to_many;
      std::size_t visited = 0;
      enumerate(q, g, edges, f, [&](const Assignment& a) {
        if (a.phantom_patterns.empty()) return true;
        ++visited;
        std::vector<std::size_t> E = a.phantom_patterns;
        std::sort(E.begin(), E.end());
        ++out.checks;
        if (E.size() == 1) {
          ++out.counters["one_to_one"];
          const SubqueryView& own = views[E[0]];
          for (int side = 1; side <= 2; ++side) {
            const auto& comp = side == 1 ? own.sq1 : own.sq2;
            if (!comp) continue;
            const Polynomial* row = engine.component_row(own.id, side, restrict(a, *comp));
            if (row == nullptr || !holds(expand(*row), sorted_edges(a, comp->patterns, EdgeId::invalid()))) {
              out.fail("Lemma 1: " + tag + " subquery " + std::to_string(E[0]) + " side " +
                       std::to_string(side) + " misses a 1:1 potential match");
            }
          }
          for (const Expected& x : expected_points(own, f)) {
            std::vector<EdgeId> mono = sorted_edges(a, x.component->patterns, EdgeId::invalid());
            bool found = false;
            for (const Annotation& ann : engine.annotations_at(x.node)) {
              if (ann.point.subquery != own.id || ann.point.dir != x.dir || ann.point.side != x.side ||
                  ann.point.exp_rel != f.p || ann.point.partner != x.partner) {
                continue;
              }
              bool same = true;
              for (std::size_t i = 0; i < ann.fragment_vars.size(); ++i) {
                same &= ann.fragment[i] == a.bindings[ann.fragment_vars[i]];
              }
              if (same && holds(expand(ann.provenance), mono)) found = true;
            }
            if (!found) {
              out.fail("Lemma 1: " + tag + " connection point at " + g.node_name(x.node) +
                       " not annotated for subquery " + std::to_string(E[0]));
            }
          }
          for (std::size_t j = 0; j < views.size(); ++j) {
            if (j == E[0]) continue;
            for (int side = 1; side <= 2; ++side) {
              const auto& comp = side == 1 ? views[j].sq1 : views[j].sq2;
              if (!comp || !contains_any(comp->patterns, E)) continue;
              if (engine.component_row(views[j].id, side, restrict(a, *comp)) != nullptr) {
                out.fail("Lemma 1: " + tag + " subquery " + std::to_string(j) +
                         " holds bindings that need the missing edge");
              }
            }
          }
        } else {
          ++out.counters["one_to_many"];
          if (!multimap) out.fail("classifier: " + tag + " is Regular but has a 1:m potential match");
          for (const auto& view : views) {
            for (int side = 1; side <= 2; ++side) {
              const auto& comp = side == 1 ? view.sq1 : view.sq2;
              if (!comp || !contains_any(comp->patterns, E)) continue;
              if (engine.component_row(view.id, side, restrict(a, *comp)) != nullptr) {
                out.fail("Lemma 2: " + tag + " subquery " + std::to_string(view.subquery.removed) +
                         " satisfied by a 1:m potential match");
              }
            }
          }
          if (one_to_many.size() < 4) one_to_many.push_back(a);
        }
        return visited < 400;
      });

      if (one_to_many.empty()) continue;
      // Completing the 1:m matches must satisfy every subquery and the parent.
      UpdateReport r = engine.insert_edge(f.s, f.p, f.o);
      EdgeId fid = r.edge->id;
      for (const Assignment& a : one_to_many) {
        ++out.counters["lemma3_completions"];
        ++out.checks;
        Row row;
        for (std::uint32_t var : q.projection) row.push_back(a.bindings[var]);
        std::vector<std::size_t> all(q.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const Polynomial* parent = engine.answer(qid, row);
        if (parent == nullptr || !holds(expand(*parent), sorted_edges(a, all, fid))) {
          out.fail("Lemma 3: " + tag + " parent misses a completed 1:m match");
        }
        for (const auto& view : views) {
          for (int side = 1; side <= 2; ++side) {
            const auto& comp = side == 1 ? view.sq1 : view.sq2;
            if (!comp) continue;
            const Polynomial* p = engine.component_row(view.id, side, restrict(a, *comp));
            if (p == nullptr || !holds(expand(*p), sorted_edges(a, comp->patterns, fid))) {
              out.fail("Lemma 3: " + tag + " subquery " + std::to_string(view.subquery.removed) +
                       " misses a completed 1:m match");
            }
          }
        }
      }
      engine.delete_edge(fid);
    }
  }
}

VerifyReport run_verify(const VerifyConfig& cfg) {
  VerifyReport report;
  auto start = Clock::now();
  std::mt19937_64 seeder(cfg.seed);
  const InstanceConfig& ic = cfg.instance;

  const std::size_t trials = cfg.replay_seed ? 1 : cfg.trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = cfg.replay_seed ? *cfg.replay_seed : seeder();
    std::mt19937_64 rng(trial_seed);
    EngineOptions options;
    options.fault_skip_prune = cfg.fault_skip_prune;
    Engine engine(options);
    std::size_t edges = ic.min_edges + bounded(rng, ic.max_edges - ic.min_edges + 1);
    random_graph(rng, edges, engine.graph());

    std::vector<std::size_t> ids;
    std::size_t wanted = ic.min_queries + bounded(rng, ic.max_queries - ic.min_queries + 1);
    for (std::size_t attempt = 0; ids.size() < wanted && attempt < wanted * 4; ++attempt) {
      std::size_t n = ic.min_patterns + bounded(rng, ic.max_patterns - ic.min_patterns + 1);
      QueryGraph q = random_query(rng, engine.graph(), n);
      try {
        ids.push_back(engine.register_query(q).query_id);
      } catch (const RegistrationError&) {
        ++report.equivalence.counters["duplicate_queries"];
      }
    }
    for (std::size_t id : ids) {
      const QueryGraph& q = engine.query(id);
      ++report.equivalence.counters[q.classification.multimap ? "multimap_queries" : "regular_queries"];
      for (const auto& v : engine.subqueries(id)) {
        ++report.equivalence.counters[std::string("type_") + to_string(v.subquery.type)];
      }
    }
    ++report.equivalence.trials;

    // Query predicates, for steering inserts towards relevant edges.
    std::vector<std::string> relevant;
    for (std::size_t id : ids) {
      const QueryGraph& q = engine.query(id);
      for (const auto& t : q.patterns) relevant.push_back(q.constants[t.predicate.id]);
    }
    std::sort(relevant.begin(), relevant.end());
    relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
    const std::size_t node_count = std::max<std::size_t>(6, edges / 4);
    const std::size_t predicate_count = engine.graph().predicate_count();

    std::vector<Answers> expected(ids.size());
    bool trial_failed = false;
    auto check = [&](std::size_t step, std::optional<PredicateId> changed) {
      std::optional<EdgeSet> es;
      for (std::size_t i = 0; i < ids.size() && !trial_failed; ++i) {
        const QueryGraph& q = engine.query(ids[i]);
        bool relevant_change = !changed;
        if (changed) {
          for (const auto& t : q.patterns) {
            relevant_change |= engine.graph().find_predicate(q.constants[t.predicate.id]) == changed;
          }
        }
        if (relevant_change) {
          if (!es) es.emplace(engine.graph());
          expected[i] = evaluate(q, engine.graph(), *es);
        }
        ++report.equivalence.checks;
        std::string diff = compare(engine.graph(), expected[i], engine_answers(engine, ids[i]));
        if (!diff.empty()) {
          report.equivalence.fail("trial seed " + std::to_string(trial_seed) + " step " +
                                  std::to_string(step) + " query " + std::to_string(ids[i]) + ": " + diff);
          if (!report.failing_seed) {
            report.failing_seed = trial_seed;
            report.failing_step = step;
          }
          trial_failed = cfg.stop_on_failure;
        }
      }
    };
    // separate stream so that a shorter replay draws the same updates
    std::mt19937_64 lemma_rng(trial_seed ^ 0x5bd1e995ULL);
    check(0, std::nullopt);
    if (cfg.lemmas && !trial_failed) check_lemmas(engine, lemma_rng, 6, report.lemmas);

    for (std::size_t step = 1; step <= cfg.updates && !trial_failed; ++step) {
      std::optional<PredicateId> changed;
      const auto& live = engine.graph().edges();
      if (live.empty() || unit(rng) < 0.5) {
        std::string s, p, o;
        if (!live.empty() && unit(rng) < 0.08) {
          auto it = live.begin();
          std::advance(it, static_cast<std::ptrdiff_t>(bounded(rng, live.size())));
          s = engine.graph().node_name(it->second.subject);
          p = engine.graph().predicate_name(it->second.predicate);
          o = engine.graph().node_name(it->second.object);
        } else {
          s = "n" + std::to_string(bounded(rng, node_count));
          o = unit(rng) < 0.03 ? s : "n" + std::to_string(bounded(rng, node_count));
          p = (!relevant.empty() && unit(rng) < 0.8)
                  ? relevant[bounded(rng, relevant.size())]
                  : "p" + std::to_string(bounded(rng, std::max<std::size_t>(predicate_count, 1)));
        }
        auto r = engine.insert_edge(s, p, o);
        changed = r.edge->predicate;
        ++report.equivalence.counters["inserts"];
      } else {
        auto it = live.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(bounded(rng, live.size())));
        EdgeId id = it->first;
        changed = it->second.predicate;
        engine.delete_edge(id);
        ++report.equivalence.counters["deletes"];
      }
      check(step, changed);
      if (cfg.lemmas && !trial_failed && step == cfg.updates / 2) check_lemmas(engine, lemma_rng, 6, report.lemmas);
    }
    if (cfg.lemmas && !trial_failed) check_lemmas(engine, lemma_rng, 6, report.lemmas);

    ++report.audit.checks;
    IndexAudit audit = engine.index_audit();
    if (!audit.ok()) {
      report.audit.fail("trial seed " + std::to_string(trial_seed) + ": " + audit.differences.front());
    }
  }
  report.lemmas.trials = report.equivalence.trials;
  report.audit.trials = report.equivalence.trials;
  report.equivalence.seconds = seconds_since(start);
  return report;
}

std::string VerifyReport::to_json() const {
  auto suite = [](const SuiteResult& s) {
    nlohmann::ordered_json j = {{"ok", s.ok()},        {"trials", s.trials},     {"checks", s.checks},
                                {"failures", s.failures}, {"messages", s.messages}, {"counters", s.counters}};
    return j;
  };
  nlohmann::ordered_json j = {{"ok", ok()},
                              {"seconds", equivalence.seconds},
                              {"equivalence", suite(equivalence)},
                              {"lemmas", suite(lemmas)},
                              {"index_audit", suite(audit)}};
  if (failing_seed) {
    j["failing_seed"] = *failing_seed;
    j["failing_step"] = *failing_step;
  }
  return j.dump(2);
}

SuiteResult run_semiring_suite(std::size_t checks, std::uint64_t seed) {
  SuiteResult out;
  auto start = Clock::now();
  std::mt19937_64 rng(seed);
  auto random_poly = [&] {
    double r = unit(rng);
    if (r < 0.08) return Polynomial::zero();
    if (r < 0.12) return Polynomial::one();
    Polynomial p;
    std::size_t terms = 1 + bounded(rng, 4);
    for (std::size_t t = 0; t < terms; ++t) {
      std::vector<EdgeId> edges;
      std::size_t degree = bounded(rng, 4);
      for (std::size_t d = 0; d < degree; ++d) edges.push_back(EdgeId(1 + bounded(rng, 8)));
      p += Polynomial(Monomial::from_edges(edges), 1 + bounded(rng, 3));
    }
    return p;
  };
  auto law = [&](const char* name, bool ok, const Polynomial& a, const Polynomial& b) {
    ++out.checks;
    ++out.counters[name];
    if (!ok) out.fail(std::string(name) + " fails for a = " + a.to_string() + ", b = " + b.to_string());
  };
  const Polynomial zero = Polynomial::zero();
  const Polynomial one = Polynomial::one();
  for (std::size_t i = 0; i < checks; ++i) {
    ++out.trials;
    Polynomial a = random_poly(), b = random_poly(), c = random_poly();
    EdgeId e(1 + bounded(rng, 8));
    law("add_commutative", a + b == b + a, a, b);
    law("mul_commutative", a * b == b * a, a, b);
    law("add_associative", (a + b) + c == a + (b + c), a, b);
    law("mul_associative", (a * b) * c == a * (b * c), a, b);
    law("distributive", a * (b + c) == a * b + a * c, a, b);
    law("add_identity", a + zero == a && zero + a == a, a, zero);
    law("mul_identity", a * one == a && one * a == a, a, one);
    law("mul_annihilator", (a * zero).is_zero(), a, zero);
    law("add_matches_reference", expand(poly_add(a, b)) == add(expand(a), expand(b)), a, b);
    law("mul_matches_reference", expand(poly_mul(a, b)) == mul(expand(a), expand(b)), a, b);

    Poly kept;
    for (const auto& [m, coeff] : expand(a)) {
      if (std::find(m.begin(), m.end(), e) == m.end()) kept[m] = coeff;
    }
    Polynomial pruned = prune_monomials(a, e);
    law("prune_matches_reference", expand(pruned) == kept, a, Polynomial(e));
    law("evaluate_matches_prune", evaluate_under_deletion(a, e) == !kept.empty(), a, Polynomial(e));
    law("prune_is_homomorphic", (a * b).pruned(e) == a.pruned(e) * b.pruned(e) &&
                                    (a + b).pruned(e) == a.pruned(e) + b.pruned(e),
        a, b);
    law("text_round_trip", Polynomial::parse(a.to_string()) == a, a, zero);
  }
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace provkg::oracle
