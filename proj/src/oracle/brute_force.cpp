#include <algorithm>
#include <set>

#include "provkg/oracle.hpp"

namespace provkg::oracle {

Poly expand(const Polynomial& p) {
  Poly out;
  for (const auto& term : p.terms()) {
    std::vector<EdgeId> key;
    for (const auto& f : term.monomial.factors()) key.insert(key.end(), f.second, f.first);
    out[key] += term.coefficient;
  }
  return out;
}

Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) out[m] += c;
  return out;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<EdgeId> m;
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      out[m] += ca * cb;
    }
  }
  return out;
}

std::string render(const Poly& p) {
  if (p.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : p) {
    if (!out.empty()) out += " + ";
    std::string mono;
    if (c != 1 || m.empty()) mono = std::to_string(c);
    for (EdgeId e : m) mono += (mono.empty() ? "" : "*") + ("e" + std::to_string(e.value()));
    out += mono;
  }
  return out;
}

EdgeSet::EdgeSet(const KnowledgeGraph& g) {
  std::set<NodeId> nodes;
  for (const auto& [id, e] : g.edges()) {
    std::size_t k = edges_.size();
    edges_.push_back({id, e.subject, e.predicate, e.object});
    by_p_[e.predicate.value()].push_back(k);
    by_ps_[{e.predicate.value(), e.subject.value()}].push_back(k);
    by_po_[{e.predicate.value(), e.object.value()}].push_back(k);
    nodes.insert(e.subject);
    nodes.insert(e.object);
  }
  nodes_.assign(nodes.begin(), nodes.end());
}

const std::vector<std::size_t>& EdgeSet::by_predicate(PredicateId p) const {
  auto it = by_p_.find(p.value());
  return it == by_p_.end() ? none_ : it->second;
}

const std::vector<std::size_t>& EdgeSet::by_subject(PredicateId p, NodeId s) const {
  auto it = by_ps_.find({p.value(), s.value()});
  return it == by_ps_.end() ? none_ : it->second;
}

const std::vector<std::size_t>& EdgeSet::by_object(PredicateId p, NodeId o) const {
  auto it = by_po_.find({p.value(), o.value()});
  return it == by_po_.end() ? none_ : it->second;
}

bool EdgeSet::has_triple(NodeId s, PredicateId p, NodeId o) const {
  for (std::size_t k : by_subject(p, s)) {
    if (edges_[k].o == o) return true;
  }
  return false;
}

namespace {

struct Slot {
  bool variable = false;
  std::uint32_t var = 0;
  NodeId node;
};

class Enumerator {
 public:
  Enumerator(const QueryGraph& q, const KnowledgeGraph& g, const EdgeSet& edges,
             const std::optional<Phantom>& phantom, const std::function<bool(const Assignment&)>& fn)
      : q_(q), edges_(edges), phantom_(phantom), fn_(fn) {
    ok_ = true;
    for (const auto& t : q.patterns) {
      Pat pat;
      auto slot = [&](const Term& term) {
        Slot s;
        if (term.is_variable()) {
          s.variable = true;
          s.var = term.id;
        } else if (auto n = g.find_node(q.constants[term.id])) {
          s.node = *n;
        } else {
          ok_ = false;
        }
        return s;
      };
      pat.s = slot(t.subject);
      pat.o = slot(t.object);
      if (t.predicate.is_variable()) {
        ok_ = false;
      } else if (auto p = g.find_predicate(q.constants[t.predicate.id])) {
        pat.p = *p;
      } else {
        ok_ = false;
      }
      pats_.push_back(pat);
    }
    // static order: each next pattern shares a variable with an earlier one
    std::vector<bool> placed(pats_.size(), false);
    std::vector<bool> seen(q.variable_count(), false);
    for (std::size_t step = 0; step < pats_.size(); ++step) {
      std::size_t pick = pats_.size();
      for (std::size_t i = 0; i < pats_.size() && pick == pats_.size(); ++i) {
        if (placed[i]) continue;
        const Pat& p = pats_[i];
        if ((p.s.variable && seen[p.s.var]) || (p.o.variable && seen[p.o.var])) pick = i;
      }
      if (pick == pats_.size()) {
        pick = static_cast<std::size_t>(std::find(placed.begin(), placed.end(), false) - placed.begin());
      }
      placed[pick] = true;
      if (pats_[pick].s.variable) seen[pats_[pick].s.var] = true;
      if (pats_[pick].o.variable) seen[pats_[pick].o.var] = true;
      order_.push_back(pick);
    }
    a_.bindings.assign(q.variable_count(), NodeId::invalid());
    a_.edges.assign(pats_.size(), EdgeId::invalid());
  }

  void run() {
    if (ok_) step(0);
  }

 private:
  struct Pat {
    Slot s, o;
    PredicateId p;
  };

  NodeId value(const Slot& s) const { return s.variable ? a_.bindings[s.var] : s.node; }

  // Binds slot to n; returns false on conflict. `undo` collects fresh vars.
  bool bind(const Slot& s, NodeId n, std::vector<std::uint32_t>& undo) {
    if (!s.variable) return s.node == n;
    NodeId& b = a_.bindings[s.var];
    if (b.valid()) return b == n;
    b = n;
    undo.push_back(s.var);
    return true;
  }

  bool step(std::size_t depth) {
    if (depth == order_.size()) return fn_(a_);
    std::size_t i = order_[depth];
    const Pat& p = pats_[i];
    NodeId sv = value(p.s);
    NodeId ov = value(p.o);
    const std::vector<std::size_t>& cands =
        sv.valid() ? edges_.by_subject(p.p, sv)
                   : (ov.valid() ? edges_.by_object(p.p, ov) : edges_.by_predicate(p.p));
    std::vector<std::uint32_t> undo;
    auto attempt = [&](NodeId s, NodeId o, EdgeId id) {
      undo.clear();
      bool keep = true;
      if (bind(p.s, s, undo) && bind(p.o, o, undo)) {
        a_.edges[i] = id;
        if (!id.valid()) a_.phantom_patterns.push_back(i);
        keep = step(depth + 1);
        if (!id.valid()) a_.phantom_patterns.pop_back();
        a_.edges[i] = EdgeId::invalid();
      }
      for (std::uint32_t v : undo) a_.bindings[v] = NodeId::invalid();
      return keep;
    };
    for (std::size_t k : cands) {
      const auto& e = edges_.edges()[k];
      if (!attempt(e.s, e.o, e.id)) return false;
    }
    if (phantom_ && phantom_->p == p.p) {
      if (!attempt(phantom_->s, phantom_->o, EdgeId::invalid())) return false;
    }
    return true;
  }

  const QueryGraph& q_;
  const EdgeSet& edges_;
  const std::optional<Phantom>& phantom_;
  const std::function<bool(const Assignment&)>& fn_;
  std::vector<Pat> pats_;
  std::vector<std::size_t> order_;
  Assignment a_;
  bool ok_ = true;
};

}  // namespace

void enumerate(const QueryGraph& q, const KnowledgeGraph& g, const EdgeSet& edges,
               const std::optional<Phantom>& phantom,
               const std::function<bool(const Assignment&)>& fn) {
  Enumerator(q, g, edges, phantom, fn).run();
}

Answers evaluate(const QueryGraph& q, const KnowledgeGraph& g, const EdgeSet& edges) {
  Answers out;
  enumerate(q, g, edges, std::nullopt, [&](const Assignment& a) {
    Row row;
    for (std::uint32_t v : q.projection) row.push_back(a.bindings[v]);
    std::vector<EdgeId> mono = a.edges;
    std::sort(mono.begin(), mono.end());
    out[row][mono] += 1;
    return true;
  });
  return out;
}

Answers evaluate(const QueryGraph& q, const KnowledgeGraph& g) { return evaluate(q, g, EdgeSet(g)); }

Answers engine_answers(const Engine& engine, std::size_t query) {
  Answers out;
  for (const auto& row : engine.answers(query)) out[row.bindings] = expand(row.provenance);
  return out;
}

std::string compare(const KnowledgeGraph& g, const Answers& expected, const Answers& actual) {
  auto show = [&](const Row& row) {
    std::string s = "(";
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? ", " : "") + g.node_name(row[i]);
    return s + ")";
  };
  for (const auto& [row, poly] : expected) {
    auto it = actual.find(row);
    if (it == actual.end()) return "missing row " + show(row) + " = " + render(poly);
    if (it->second != poly) {
      return "row " + show(row) + ": expected " + render(poly) + ", stored " + render(it->second);
    }
  }
  for (const auto& [row, poly] : actual) {
    if (!expected.contains(row)) return "spurious row " + show(row) + " = " + render(poly);
  }
  return {};
}

}  // namespace provkg::oracle
