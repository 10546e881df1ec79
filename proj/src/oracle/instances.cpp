#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "provkg/oracle.hpp"
#include "provkg/workload.hpp"

namespace provkg::oracle {

namespace {

// Index in [0, n) with mass shifted towards small values.
std::size_t skewed(std::mt19937_64& rng, std::size_t n, double power) {
  auto k = static_cast<std::size_t>(static_cast<double>(n) * std::pow(unit(rng), power));
  return std::min(k, n - 1);
}

}  // namespace

void random_graph(std::mt19937_64& rng, std::size_t edges, KnowledgeGraph& g) {
  const std::size_t nodes = std::max<std::size_t>(6, edges / 4);
  const std::size_t predicates = 3 + bounded(rng, 3);
  std::vector<std::array<std::size_t, 3>> made;
  for (std::size_t i = 0; i < edges; ++i) {
    std::array<std::size_t, 3> t;
    if (!made.empty() && unit(rng) < 0.02) {
      t = made[bounded(rng, made.size())];
    } else {
      t[0] = skewed(rng, nodes, 1.4);
      t[1] = skewed(rng, predicates, 1.3);
      t[2] = unit(rng) < 0.03 ? t[0] : skewed(rng, nodes, 1.4);
    }
    made.push_back(t);
    g.insert_edge("n" + std::to_string(t[0]), "p" + std::to_string(t[1]), "n" + std::to_string(t[2]));
  }
}

QueryGraph random_query(std::mt19937_64& rng, const KnowledgeGraph& g, std::size_t patterns) {
  std::vector<Edge> edges;
  for (const auto& [id, e] : g.edges()) edges.push_back(e);
  std::map<NodeId, std::vector<std::size_t>> incident;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    incident[edges[k].subject].push_back(k);
    if (edges[k].object != edges[k].subject) incident[edges[k].object].push_back(k);
  }
  std::vector<std::string> predicate_names;
  for (std::size_t p = 0; p < g.predicate_count(); ++p) {
    predicate_names.push_back(g.predicate_name(PredicateId(static_cast<std::uint32_t>(p))));
  }

  // Walk nodes by index; an invalid id marks a node that exists only in the query.
  std::vector<NodeId> walk;
  auto walk_index = [&](NodeId n) {
    auto it = std::find(walk.begin(), walk.end(), n);
    if (it != walk.end()) return static_cast<std::size_t>(it - walk.begin());
    walk.push_back(n);
    return walk.size() - 1;
  };
  struct Pat {
    std::size_t s;
    std::string p;
    std::size_t o;
  };
  std::vector<Pat> pats;
  std::set<std::size_t> used;
  if (edges.empty()) {
    walk.push_back(NodeId::invalid());
    walk.push_back(NodeId::invalid());
    pats.push_back({0, predicate_names.empty() ? "p0" : predicate_names[0], 1});
  } else {
    std::size_t k = bounded(rng, edges.size());
    used.insert(k);
    std::size_t s = walk_index(edges[k].subject);
    std::size_t o = walk_index(edges[k].object);
    pats.push_back({s, g.predicate_name(edges[k].predicate), o});
  }
  while (pats.size() < patterns) {
    bool grown = false;
    for (int attempt = 0; attempt < 20 && !grown; ++attempt) {
      std::size_t at = bounded(rng, walk.size());
      if (!walk[at].valid()) continue;
      auto it = incident.find(walk[at]);
      if (it == incident.end()) continue;
      std::size_t k = it->second[bounded(rng, it->second.size())];
      if (used.contains(k)) continue;
      used.insert(k);
      Pat next{walk_index(edges[k].subject), g.predicate_name(edges[k].predicate),
               walk_index(edges[k].object)};
      // a repeated triple would give the same pattern twice
      if (std::any_of(pats.begin(), pats.end(), [&](const Pat& p) {
            return p.s == next.s && p.p == next.p && p.o == next.o;
          })) {
        continue;
      }
      pats.push_back(std::move(next));
      grown = true;
    }
    if (!grown) {
      // no unused incident edge: hang a pattern off a random walk node
      std::size_t at = bounded(rng, walk.size());
      walk.push_back(NodeId::invalid());
      std::string p = predicate_names.empty() ? "p0" : predicate_names[bounded(rng, predicate_names.size())];
      pats.push_back({at, p, walk.size() - 1});
    }
  }

  // Union of walk nodes into query terms; an occasional fusion closes a cycle.
  std::vector<std::size_t> rep(walk.size());
  for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = i;
  if (walk.size() >= 3 && unit(rng) < 0.15) {
    std::size_t a = bounded(rng, walk.size());
    std::size_t b = bounded(rng, walk.size());
    if (a != b) {
      std::set<std::tuple<std::size_t, std::string, std::size_t>> seen;
      bool clash = false;
      for (const auto& p : pats) {
        std::size_t s = p.s == b ? a : p.s;
        std::size_t o = p.o == b ? a : p.o;
        clash |= !seen.emplace(s, p.p, o).second;
      }
      if (!clash) rep[b] = a;
    }
  }
  std::vector<std::size_t> degree(walk.size(), 0);
  for (const auto& p : pats) {
    ++degree[rep[p.s]];
    if (rep[p.o] != rep[p.s]) ++degree[rep[p.o]];
  }
  std::vector<bool> constant(walk.size(), false);
  for (std::size_t i = 0; i < walk.size(); ++i) {
    constant[i] = rep[i] == i && walk[i].valid() && degree[i] == 1 && unit(rng) < 0.3;
  }
  // a pattern needs at least one variable to stay connected
  for (const auto& p : pats) {
    if (constant[rep[p.s]] && constant[rep[p.o]]) constant[rep[p.o]] = false;
  }

  std::vector<std::string> vars;
  auto term = [&](std::size_t i) {
    i = rep[i];
    if (constant[i]) return render_constant(g.node_name(walk[i]));
    std::string v = "?v" + std::to_string(i);
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    return v;
  };
  std::string body;
  for (const auto& p : pats) {
    std::string s = term(p.s);
    std::string o = term(p.o);
    body += "  " + s + " " + render_constant(p.p) + " " + o + " .\n";
  }
  std::string head;
  if (unit(rng) < 0.2) {
    head = "*";
  } else {
    std::vector<std::string> proj;
    for (const auto& v : vars) {
      if (unit(rng) < 0.6) proj.push_back(v);
    }
    if (proj.empty()) proj.push_back(vars[bounded(rng, vars.size())]);
    for (const auto& v : proj) head += (head.empty() ? "" : " ") + v;
  }
  return parse_query("SELECT " + head + " WHERE {\n" + body + "}");
}

}  // namespace provkg::oracle
