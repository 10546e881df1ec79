#include "provkg/subquery.hpp"

#include <algorithm>
#include <json.hpp>

#include "provkg/errors.hpp"

namespace provkg {

const char* to_string(SubqueryType t) {
  switch (t) {
    case SubqueryType::I: return "I";
    case SubqueryType::II: return "II";
    case SubqueryType::III: return "III";
    case SubqueryType::IV: return "IV";
  }
  return "?";
}

namespace {

bool mentions(const TriplePattern& p, const Term& t) {
  return t.is_variable() && (p.subject == t || p.predicate == t || p.object == t);
}

// Splits `rest` into components over shared variables.
std::vector<std::vector<std::size_t>> components(const QueryGraph& q,
                                                 const std::vector<std::size_t>& rest) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> taken(rest.size(), false);
  for (std::size_t start = 0; start < rest.size(); ++start) {
    if (taken[start]) continue;
    std::vector<std::size_t> comp{rest[start]};
    taken[start] = true;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const auto& p = q.patterns[comp[head]];
      for (std::size_t j = 0; j < rest.size(); ++j) {
        if (taken[j]) continue;
        const auto& r = q.patterns[rest[j]];
        if (mentions(r, p.subject) || mentions(r, p.predicate) || mentions(r, p.object)) {
          taken[j] = true;
          comp.push_back(rest[j]);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool component_has(const QueryGraph& q, const std::vector<std::size_t>& comp, const Term& t) {
  return std::any_of(comp.begin(), comp.end(),
                     [&](std::size_t i) { return mentions(q.patterns[i], t); });
}

}  // namespace

std::vector<Subquery> generate_subqueries(const QueryGraph& q) {
  if (q.size() < 2) throw Error("a query with fewer than two patterns has no subqueries");
  std::vector<Subquery> out;
  for (std::size_t removed = 0; removed < q.size(); ++removed) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i != removed) rest.push_back(i);
    }
    const auto& t = q.patterns[removed];
    auto comps = components(q, rest);
    Subquery sq;
    sq.removed = removed;
    if (comps.size() == 1) {
      sq.sq1 = comps.front();
      bool s_in = component_has(q, sq.sq1, t.subject);
      bool o_in = component_has(q, sq.sq1, t.object);
      sq.subject_side = s_in ? Side::Sq1 : Side::Free;
      sq.object_side = o_in ? Side::Sq1 : Side::Free;
      sq.type = (s_in && o_in) ? SubqueryType::IV : SubqueryType::I;
    } else {
      if (comps.size() != 2) throw Error("removing one pattern left more than two components");
      auto& a = comps[0];
      auto& b = comps[1];
      bool a_has_subject = component_has(q, a, t.subject);
      if (a.size() == 1 && b.size() >= 2) {
        sq.type = SubqueryType::II;
        sq.sq1 = b;
        sq.sq2 = a;
      } else if (b.size() == 1 && a.size() >= 2) {
        sq.type = SubqueryType::II;
        sq.sq1 = a;
        sq.sq2 = b;
      } else {
        sq.type = SubqueryType::III;
        sq.sq1 = a_has_subject ? a : b;
        sq.sq2 = a_has_subject ? b : a;
      }
      bool s_in_sq1 = component_has(q, sq.sq1, t.subject);
      sq.subject_side = s_in_sq1 ? Side::Sq1 : Side::Sq2;
      sq.object_side = s_in_sq1 ? Side::Sq2 : Side::Sq1;
    }
    out.push_back(std::move(sq));
  }
  return out;
}

std::size_t expected_connection_point_bound(SubqueryType type, std::size_t a1, std::size_t a2) {
  switch (type) {
    case SubqueryType::I:
    case SubqueryType::II: return a1;
    case SubqueryType::III: return a1 + a2;
    case SubqueryType::IV: return 2 * a1;
  }
  return 0;
}

std::string subquery_json(const QueryGraph& q, const Subquery& sq, std::size_t parent_id) {
  auto patterns = [&](const std::vector<std::size_t>& comp) {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i : comp) {
      const auto& p = q.patterns[i];
      list.push_back({{"ordinal", i},
                      {"pattern", q.term_string(p.subject) + " " + q.term_string(p.predicate) +
                                      " " + q.term_string(p.object)}});
    }
    return list;
  };
  nlohmann::json j = {{"parent", parent_id},
                      {"removed", sq.removed},
                      {"type", to_string(sq.type)},
                      {"sq1", patterns(sq.sq1)},
                      {"sq2", patterns(sq.sq2)}};
  return j.dump();
}

}  // namespace provkg
