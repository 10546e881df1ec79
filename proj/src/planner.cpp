#include "provkg/planner.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <tuple>

namespace provkg {

const AndOrTree::OrNode* AndOrTree::find(const std::vector<std::size_t>& patterns) const {
  for (const auto& n : ors) {
    if (n.patterns == patterns) return &n;
  }
  return nullptr;
}

AndOrTree build_and_or_tree(const QueryGraph& q, const std::vector<std::size_t>& component) {
  std::vector<std::size_t> comp = component;
  std::sort(comp.begin(), comp.end());
  const std::size_t k = comp.size();
  AndOrTree tree;

  auto subset_of = [&](std::uint32_t mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) s.push_back(comp[i]);
    }
    return s;
  };

  if (k > kAndOrTreeCap) {
    tree.truncated = true;
    for (std::size_t i : comp) tree.ors.push_back({{i}, {}, {}});
    tree.ors.push_back({comp, {}, {}});
    tree.root = tree.ors.size() - 1;
    return tree;
  }

  const std::uint32_t full = (1u << k) - 1;
  std::vector<long> or_of(full + 1, -1);
  // Ascending popcount so every node follows its inputs.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 1; m <= full; ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (std::uint32_t m : masks) {
    auto s = subset_of(m);
    if (!q.connected(s)) continue;
    or_of[m] = static_cast<long>(tree.ors.size());
    tree.ors.push_back({std::move(s), {}, {}});
    if (std::popcount(m) < 2) continue;
    std::uint32_t low = m & (~m + 1);
    for (std::uint32_t a = (m - 1) & m; a > 0; a = (a - 1) & m) {
      if (!(a & low)) continue;
      std::uint32_t b = m ^ a;
      if (or_of[a] < 0 || or_of[b] < 0) continue;
      std::size_t id = tree.ands.size();
      tree.ands.push_back({static_cast<std::size_t>(or_of[m]), static_cast<std::size_t>(or_of[a]),
                           static_cast<std::size_t>(or_of[b])});
      tree.ors[or_of[m]].derivations.push_back(id);
      tree.ors[or_of[a]].uses.push_back(id);
      tree.ors[or_of[b]].uses.push_back(id);
    }
  }
  tree.root = static_cast<std::size_t>(or_of[full]);
  return tree;
}

double EstimateCache::estimate(const QueryGraph& q, const std::vector<std::size_t>& expr,
                               const StatsCatalog& stats, const KnowledgeGraph& g) {
  std::string key = canonicalize_patterns(q, expr).text;
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  double v = estimate_cardinality(q, expr, stats, g);
  memo_.emplace(std::move(key), v);
  return v;
}

LocalPlan select_best_plan(const AndOrTree& tree, const QueryGraph& q, const StatsCatalog& stats,
                           const KnowledgeGraph& g, EstimateCache* cache) {
  EstimateCache local_cache;
  EstimateCache& est = cache != nullptr ? *cache : local_cache;
  const std::vector<std::size_t>& comp = tree.ors[tree.root].patterns;

  using Rank = std::tuple<double, std::string, std::size_t>;
  auto rank = [&](const std::vector<std::size_t>& expr, std::size_t added) {
    return Rank{est.estimate(q, expr, stats, g), canonicalize_patterns(q, expr).text, added};
  };

  LocalPlan plan;
  std::size_t first = comp.front();
  Rank best{std::numeric_limits<double>::infinity(), {}, 0};
  for (std::size_t p : comp) {
    Rank r = rank({p}, p);
    if (r < best) {
      best = r;
      first = p;
    }
  }
  std::vector<std::size_t> current{first};
  plan.steps.push_back({current, -1, -1, std::get<0>(best)});
  int current_step = 0;

  while (current.size() < comp.size()) {
    // Parents of the chosen expression one level up: add one adjacent pattern.
    bool found = false;
    Rank level_best{std::numeric_limits<double>::infinity(), {}, 0};
    std::size_t chosen = 0;
    std::vector<std::size_t> chosen_expr;
    for (std::size_t p : comp) {
      if (std::find(current.begin(), current.end(), p) != current.end()) continue;
      std::vector<std::size_t> expr = current;
      expr.push_back(p);
      std::sort(expr.begin(), expr.end());
      if (!q.connected(expr)) continue;
      if (!tree.truncated && tree.find(expr) == nullptr) continue;
      Rank r = rank(expr, p);
      if (!found || r < level_best) {
        found = true;
        level_best = r;
        chosen = p;
        chosen_expr = std::move(expr);
      }
    }
    if (!found) break;  // unreachable for a connected component
    plan.steps.push_back({{chosen}, -1, -1, est.estimate(q, {chosen}, stats, g)});
    int leaf_step = static_cast<int>(plan.steps.size() - 1);
    plan.steps.push_back({chosen_expr, current_step, leaf_step, std::get<0>(level_best)});
    current_step = static_cast<int>(plan.steps.size() - 1);
    current = std::move(chosen_expr);
  }
  return plan;
}

}  // namespace provkg
