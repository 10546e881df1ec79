#include "provkg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "provkg/errors.hpp"
#include "provkg/workload.hpp"

namespace provkg {

namespace {

std::size_t skewed(std::mt19937_64& rng, std::size_t n, double power) {
  auto k = static_cast<std::size_t>(static_cast<double>(n) * std::pow(unit(rng), power));
  return std::min(k, n - 1);
}

}  // namespace

void generate_synthetic_graph(const SyntheticConfig& cfg, KnowledgeGraph& g) {
  if (cfg.nodes < 2 || cfg.predicates == 0) throw Error("synthetic graph needs two nodes and a predicate");
  std::mt19937_64 rng(cfg.seed);
  std::unordered_set<std::uint64_t> seen;
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < cfg.nodes; ++i) nodes.push_back(g.intern_node("v" + std::to_string(i)));
  std::vector<PredicateId> preds;
  for (std::size_t i = 0; i < cfg.predicates; ++i) preds.push_back(g.intern_predicate("r" + std::to_string(i)));
  // node ids are shuffled so that skew does not line up with name order
  for (std::size_t i = nodes.size(); i > 1; --i) std::swap(nodes[i - 1], nodes[bounded(rng, i)]);

  const std::uint64_t capacity = static_cast<std::uint64_t>(cfg.nodes) * (cfg.nodes - 1) * cfg.predicates;
  if (cfg.edges > capacity / 2) throw Error("synthetic graph too dense for its node count");
  while (seen.size() < cfg.edges) {
    std::size_t s = skewed(rng, cfg.nodes, cfg.skew);
    std::size_t o = bounded(rng, cfg.nodes);
    std::size_t p = skewed(rng, cfg.predicates, cfg.skew);
    if (s == o) continue;
    std::uint64_t key = (static_cast<std::uint64_t>(s) * cfg.nodes + o) * cfg.predicates + p;
    if (!seen.insert(key).second) continue;
    g.insert_edge(nodes[s], preds[p], nodes[o]);
  }
}

std::vector<QueryGraph> generate_synthetic_queries(const SyntheticConfig& cfg, const KnowledgeGraph& g) {
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& [id, e] : g.edges()) edges.push_back(e);
  if (edges.empty()) throw Error("synthetic queries need a non-empty graph");
  std::unordered_map<NodeId, std::vector<std::uint32_t>> incident;
  for (std::uint32_t k = 0; k < edges.size(); ++k) {
    incident[edges[k].subject].push_back(k);
    incident[edges[k].object].push_back(k);
  }

  std::vector<QueryGraph> out;
  std::set<std::string> canonical;
  for (std::size_t attempt = 0; out.size() < cfg.queries && attempt < cfg.queries * 50; ++attempt) {
    std::size_t n = cfg.min_patterns + bounded(rng, cfg.max_patterns - cfg.min_patterns + 1);
    std::vector<NodeId> walk;
    auto index = [&](NodeId v) {
      auto it = std::find(walk.begin(), walk.end(), v);
      if (it != walk.end()) return static_cast<std::size_t>(it - walk.begin());
      walk.push_back(v);
      return walk.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> pats;  // walk index, predicate, walk index
    std::set<std::uint32_t> used;
    std::uint32_t first = static_cast<std::uint32_t>(bounded(rng, edges.size()));
    used.insert(first);
    pats.push_back({index(edges[first].subject), edges[first].predicate.value(), index(edges[first].object)});
    for (int tries = 0; pats.size() < n && tries < 50; ++tries) {
      NodeId at = walk[bounded(rng, walk.size())];
      const auto& inc = incident[at];
      std::uint32_t k = inc[bounded(rng, inc.size())];
      if (!used.insert(k).second) continue;
      pats.push_back({index(edges[k].subject), edges[k].predicate.value(), index(edges[k].object)});
    }
    if (pats.size() < n) continue;

    std::vector<std::size_t> degree(walk.size(), 0);
    for (const auto& p : pats) {
      ++degree[p[0]];
      ++degree[p[2]];
    }
    std::vector<bool> constant(walk.size(), false);
    for (std::size_t i = 0; i < walk.size(); ++i) constant[i] = degree[i] == 1 && unit(rng) < cfg.constant_leaf;
    for (const auto& p : pats) {
      if (constant[p[0]] && constant[p[2]]) constant[p[2]] = false;
    }
    std::string body;
    std::vector<std::string> vars;
    auto term = [&](std::size_t i) {
      if (constant[i]) return render_constant(g.node_name(walk[i]));
      std::string v = "?x" + std::to_string(i);
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
      return v;
    };
    for (const auto& p : pats) {
      std::string s = term(p[0]);
      std::string o = term(p[2]);
      body += "  " + s + " " + render_constant(g.predicate_name(PredicateId(static_cast<std::uint32_t>(p[1])))) +
              " " + o + " .\n";
    }
    std::string head;
    for (const auto& v : vars) {
      if (head.empty() || unit(rng) < 0.5) head += (head.empty() ? "" : " ") + v;
    }
    QueryGraph q = parse_query("SELECT " + head + " WHERE {\n" + body + "}");
    if (!canonical.insert(canonicalize(q).text).second) continue;
    out.push_back(std::move(q));
  }
  if (out.size() < cfg.queries) throw Error("could not draw enough distinct synthetic queries");
  return out;
}

}  // namespace provkg
