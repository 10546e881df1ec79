#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

#include "provkg/query.hpp"

namespace provkg {

namespace {

// Sort key that is invariant under variable renaming.
struct Signature {
  std::string predicate;
  int s_kind, p_kind, o_kind;
  std::string s_const, o_const;
  bool self_loop;

  auto tie() const {
    return std::tie(predicate, p_kind, s_kind, s_const, o_kind, o_const, self_loop);
  }
  friend bool operator<(const Signature& a, const Signature& b) { return a.tie() < b.tie(); }
  friend bool operator==(const Signature& a, const Signature& b) { return a.tie() == b.tie(); }
};

Signature signature_of(const QueryGraph& q, const TriplePattern& p) {
  Signature s;
  s.p_kind = p.predicate.is_variable() ? 0 : 1;
  s.predicate = p.predicate.is_variable() ? std::string() : q.constants[p.predicate.id];
  s.s_kind = p.subject.is_variable() ? 0 : 1;
  s.o_kind = p.object.is_variable() ? 0 : 1;
  s.s_const = p.subject.is_variable() ? std::string() : q.constants[p.subject.id];
  s.o_const = p.object.is_variable() ? std::string() : q.constants[p.object.id];
  s.self_loop = p.subject.is_variable() && p.subject == p.object;
  return s;
}

struct Rendering {
  std::string body;
  std::string key;  // body plus projection marks; what gets minimized
  std::map<std::uint32_t, std::uint32_t> var_map;
};

Rendering render(const QueryGraph& q, const std::vector<std::size_t>& order,
                 const std::vector<std::uint32_t>* projection) {
  Rendering r;
  auto term = [&](const Term& t) {
    if (t.is_constant()) return render_constant(q.constants[t.id]);
    auto [it, fresh] = r.var_map.try_emplace(t.id, static_cast<std::uint32_t>(r.var_map.size()));
    return "?v" + std::to_string(it->second);
  };
  for (std::size_t i : order) {
    const auto& p = q.patterns[i];
    r.body += ' ';
    r.body += term(p.subject);
    r.body += ' ';
    r.body += term(p.predicate);
    r.body += ' ';
    r.body += term(p.object);
    r.body += " .";
  }
  r.key = r.body;
  if (projection != nullptr) {
    std::vector<std::uint32_t> marks;
    for (auto v : *projection) marks.push_back(r.var_map.at(v));
    std::sort(marks.begin(), marks.end());
    r.key += " |";
    for (auto m : marks) r.key += " " + std::to_string(m);
  }
  return r;
}

double factorial(std::size_t n) {
  double f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

CanonicalForm minimize(const QueryGraph& q, std::vector<std::size_t> subset,
                       const std::vector<std::uint32_t>* projection) {
  std::vector<Signature> sigs;
  sigs.reserve(q.patterns.size());
  for (const auto& p : q.patterns) sigs.push_back(signature_of(q, p));
  std::stable_sort(subset.begin(), subset.end(),
                   [&](std::size_t a, std::size_t b) { return sigs[a] < sigs[b]; });

  // Tie groups of equal signature; orderings within them are enumerated.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  double orderings = 1;
  for (std::size_t i = 0; i < subset.size();) {
    std::size_t j = i + 1;
    while (j < subset.size() && sigs[subset[j]] == sigs[subset[i]]) ++j;
    if (j - i > 1) {
      groups.emplace_back(i, j);
      orderings *= factorial(j - i);
    }
    i = j;
  }

  std::vector<std::size_t> best_order = subset;
  Rendering best = render(q, subset, projection);
  if (!groups.empty() && orderings <= static_cast<double>(kCanonicalPermutationCap)) {
    std::vector<std::size_t> order = subset;
    for (auto& [b, e] : groups) std::sort(order.begin() + b, order.begin() + e);
    while (true) {
      Rendering r = render(q, order, projection);
      if (r.key < best.key) {
        best = std::move(r);
        best_order = order;
      }
      // odometer over the tie groups
      std::size_t g = 0;
      for (; g < groups.size(); ++g) {
        auto [b, e] = groups[g];
        if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
      }
      if (g == groups.size()) break;
    }
  }

  CanonicalForm out;
  out.var_map = std::move(best.var_map);
  out.pattern_order = std::move(best_order);
  if (projection == nullptr) {
    out.text = best.body.empty() ? std::string() : best.body.substr(1);
    return out;
  }
  return out;
}

}  // namespace

CanonicalForm canonicalize_patterns(const QueryGraph& q, const std::vector<std::size_t>& subset) {
  return minimize(q, subset, nullptr);
}

CanonicalForm canonicalize(const QueryGraph& q) {
  std::vector<std::size_t> all(q.patterns.size());
  std::iota(all.begin(), all.end(), 0);
  CanonicalForm form = minimize(q, all, &q.projection);

  QueryGraph renamed;
  renamed.select_all = q.select_all;
  renamed.variables.resize(form.var_map.size());
  for (std::size_t i = 0; i < renamed.variables.size(); ++i) {
    renamed.variables[i] = "v" + std::to_string(i);
  }
  auto term = [&](const Term& t) {
    if (t.is_variable()) return Term::variable(form.var_map.at(t.id));
    return Term::constant(renamed.add_constant(q.constants[t.id]));
  };
  for (std::size_t i : form.pattern_order) {
    const auto& p = q.patterns[i];
    renamed.patterns.push_back({term(p.subject), term(p.predicate), term(p.object)});
  }
  for (auto v : q.projection) renamed.projection.push_back(form.var_map.at(v));
  std::sort(renamed.projection.begin(), renamed.projection.end());
  renamed.projection.erase(std::unique(renamed.projection.begin(), renamed.projection.end()),
                           renamed.projection.end());
  form.text = pretty_print(renamed);
  return form;
}

}  // namespace provkg
