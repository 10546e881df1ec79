#include "provkg/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "provkg/errors.hpp"
#include "provkg/eval.hpp"
#include "provkg/ntriples.hpp"

namespace provkg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // rejection keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string Update::to_line() const {
  if (kind == Kind::Delete && edge) return "- e" + std::to_string(edge->value());
  std::string out = kind == Kind::Insert ? "+ " : "- ";
  out += render_constant(subject) + " " + render_constant(predicate) + " " + render_constant(object);
  return out;
}

Update parse_update_line(std::string_view line, std::size_t line_no) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < line.size() && is_space(line[pos])) ++pos;
  };
  skip();
  if (pos == line.size()) throw ParseError("empty update line", line_no, 1);
  Update u;
  if (line[pos] == '+') {
    u.kind = Update::Kind::Insert;
  } else if (line[pos] == '-') {
    u.kind = Update::Kind::Delete;
  } else {
    throw ParseError("update must start with '+' or '-'", line_no, pos + 1);
  }
  ++pos;
  std::vector<std::string> terms;
  while (true) {
    skip();
    if (pos == line.size() || line[pos] == '#') break;
    std::string term;
    std::size_t used = scan_term(line.substr(pos), term);
    if (used == 0 || term.empty()) throw ParseError("malformed term", line_no, pos + 1);
    pos += used;
    terms.push_back(std::move(term));
  }
  if (u.kind == Update::Kind::Delete && terms.size() == 1 && terms[0].size() > 1 &&
      terms[0][0] == 'e' &&
      std::all_of(terms[0].begin() + 1, terms[0].end(), [](char c) { return c >= '0' && c <= '9'; })) {
    u.edge = EdgeId(std::stoull(terms[0].substr(1)));
    return u;
  }
  if (terms.size() != 3) throw ParseError("expected three terms", line_no, pos + 1);
  u.subject = std::move(terms[0]);
  u.predicate = std::move(terms[1]);
  u.object = std::move(terms[2]);
  return u;
}

std::vector<Update> read_workload(std::istream& in) {
  std::vector<Update> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_update_line(line, line_no));
  }
  return out;
}

std::vector<Update> read_workload_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_workload(in);
}

void write_workload(std::ostream& out, const std::vector<Update>& updates) {
  for (const auto& u : updates) out << u.to_line() << '\n';
}

const std::vector<WorkloadPreset>& workload_presets() {
  static const std::vector<WorkloadPreset> presets = {
      {"deletion-heavy", 0.9}, {"deletion-leaning", 0.7}, {"balanced", 0.5},
      {"insertion-leaning", 0.3}, {"insertion-heavy", 0.1}};
  return presets;
}

std::vector<Update> generate_workload(const KnowledgeGraph& g, const std::vector<QueryGraph>& queries,
                                      const WorkloadConfig& cfg) {
  std::set<std::string> pool_names;
  for (const auto& q : queries) {
    for (const auto& t : q.patterns) {
      if (!t.predicate.is_variable()) pool_names.insert(q.constants[t.predicate.id]);
    }
  }
  if (pool_names.empty()) throw Error("workload needs at least one query predicate");
  if (cfg.size == 0) return {};
  std::vector<std::string> pool(pool_names.begin(), pool_names.end());

  // Shadow state over dense vertex indices.
  std::vector<NodeId> vertex_ids;
  std::unordered_map<NodeId, std::uint32_t> index_of;
  auto vertex = [&](NodeId n) {
    auto [it, fresh] = index_of.emplace(n, static_cast<std::uint32_t>(vertex_ids.size()));
    if (fresh) vertex_ids.push_back(n);
    return it->second;
  };
  std::unordered_map<std::uint64_t, std::uint32_t> connected;
  auto pair_key = [](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  struct Live {
    std::uint32_t s, p, o;
  };
  std::vector<Live> live;
  for (const auto& [id, e] : g.edges()) {
    std::uint32_t s = vertex(e.subject);
    std::uint32_t o = vertex(e.object);
    ++connected[pair_key(s, o)];
    const std::string& pname = g.predicate_name(e.predicate);
    auto it = std::lower_bound(pool.begin(), pool.end(), pname);
    if (it != pool.end() && *it == pname) live.push_back({s, static_cast<std::uint32_t>(it - pool.begin()), o});
  }

  std::mt19937_64 rng(cfg.seed);
  const std::size_t deletes =
      std::min(cfg.size, static_cast<std::size_t>(std::llround(cfg.size * cfg.delete_ratio)));
  std::vector<bool> is_delete(cfg.size, false);
  std::fill(is_delete.begin(), is_delete.begin() + static_cast<std::ptrdiff_t>(deletes), true);
  for (std::size_t i = cfg.size; i > 1; --i) {
    std::size_t j = bounded(rng, i);
    std::swap(is_delete[i - 1], is_delete[j]);
  }

  std::vector<Update> out;
  out.reserve(cfg.size);
  for (std::size_t i = 0; i < cfg.size; ++i) {
    Update u;
    if (is_delete[i] && !live.empty()) {
      std::size_t k = bounded(rng, live.size());
      Live d = live[k];
      live[k] = live.back();
      live.pop_back();
      auto c = connected.find(pair_key(d.s, d.o));
      if (--c->second == 0) connected.erase(c);
      u.kind = Update::Kind::Delete;
      u.subject = g.node_name(vertex_ids[d.s]);
      u.predicate = pool[d.p];
      u.object = g.node_name(vertex_ids[d.o]);
    } else {
      if (vertex_ids.size() < 2) throw Error("workload needs at least two vertices");
      std::uint32_t s = 0, o = 0;
      bool found = false;
      for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
        s = static_cast<std::uint32_t>(bounded(rng, vertex_ids.size()));
        o = static_cast<std::uint32_t>(bounded(rng, vertex_ids.size()));
        found = s != o && !connected.contains(pair_key(s, o));
      }
      if (!found) throw Error("no unconnected vertex pair left for insertion");
      auto p = static_cast<std::uint32_t>(bounded(rng, pool.size()));
      ++connected[pair_key(s, o)];
      live.push_back({s, p, o});
      u.kind = Update::Kind::Insert;
      u.subject = g.node_name(vertex_ids[s]);
      u.predicate = pool[p];
      u.object = g.node_name(vertex_ids[o]);
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::optional<EdgeId> find_edge(const KnowledgeGraph& g, std::string_view s, std::string_view p,
                                std::string_view o) {
  auto sid = g.find_node(s);
  auto pid = g.find_predicate(p);
  auto oid = g.find_node(o);
  if (!sid || !pid || !oid) return std::nullopt;
  EdgePattern ep;
  ep.subject = *sid;
  ep.predicate = *pid;
  ep.object = *oid;
  std::optional<EdgeId> best;
  g.for_each_match(ep, [&](const Edge& e) {
    if (!best || e.id < *best) best = e.id;
  });
  return best;
}

double BenchReport::mean_seconds() const {
  if (timings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : timings) sum += t.total;
  return sum / static_cast<double>(timings.size());
}

double BenchReport::median_seconds() const {
  if (timings.empty()) return 0.0;
  std::vector<double> v;
  for (const auto& t : timings) v.push_back(t.total);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

std::string BenchReport::to_json() const {
  double response = 0, maintenance = 0, insert_sum = 0, delete_sum = 0;
  for (const auto& t : timings) {
    response += t.response;
    maintenance += t.maintenance;
    (t.insert ? insert_sum : delete_sum) += t.total;
  }
  nlohmann::ordered_json j = {
      {"mode", mode},
      {"updates", updates},
      {"inserts", inserts},
      {"deletes", deletes},
      {"skipped", skipped},
      {"rows_added", rows_added},
      {"rows_pruned", rows_pruned},
      {"rows_removed", rows_removed},
      {"queries_touched", queries_touched},
      {"total_seconds", total_seconds},
      {"response_seconds", response},
      {"maintenance_seconds", maintenance},
      {"mean_update_seconds", mean_seconds()},
      {"median_update_seconds", median_seconds()},
      {"mean_insert_seconds", inserts ? insert_sum / static_cast<double>(inserts) : 0.0},
      {"mean_delete_seconds", deletes ? delete_sum / static_cast<double>(deletes) : 0.0},
      {"warnings", warnings}};
  return j.dump(2);
}

std::string BenchReport::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(22) << "mode" << mode << '\n'
      << std::setw(22) << "updates" << updates << " (" << inserts << " ins, " << deletes << " del, "
      << skipped << " skipped)\n"
      << std::setw(22) << "rows added" << rows_added << '\n'
      << std::setw(22) << "rows pruned" << rows_pruned << '\n'
      << std::setw(22) << "rows removed" << rows_removed << '\n'
      << std::setw(22) << "total seconds" << total_seconds << '\n'
      << std::setw(22) << "mean per update" << mean_seconds() << '\n'
      << std::setw(22) << "median per update" << median_seconds() << '\n';
  return out.str();
}

BenchReport apply_incremental(Engine& engine, const std::vector<Update>& updates) {
  BenchReport report;
  report.mode = "incremental";
  std::unordered_set<std::size_t> touched;
  auto start = Clock::now();
  for (std::size_t i = 0; i < updates.size(); ++i) {
    const Update& u = updates[i];
    auto t0 = Clock::now();
    UpdateReport r;
    if (u.kind == Update::Kind::Insert) {
      r = engine.insert_edge(u.subject, u.predicate, u.object);
    } else {
      auto id = u.edge ? std::optional(*u.edge) : find_edge(engine.graph(), u.subject, u.predicate, u.object);
      if (!id || !engine.graph().contains(*id)) {
        ++report.skipped;
        report.warnings.push_back("update " + std::to_string(i + 1) + ": no edge for " + u.to_line());
        continue;
      }
      r = engine.delete_edge(*id);
    }
    double total = seconds_since(t0);
    ++report.updates;
    ++(u.kind == Update::Kind::Insert ? report.inserts : report.deletes);
    report.rows_added += r.added.size();
    report.rows_pruned += r.pruned.size();
    report.rows_removed += r.removed.size();
    for (const auto* list : {&r.added, &r.pruned, &r.removed}) {
      for (const auto& c : *list) touched.insert(c.query);
    }
    report.timings.push_back({u.kind == Update::Kind::Insert, r.response_seconds, r.maintenance_seconds,
                              std::max(total, r.response_seconds + r.maintenance_seconds)});
  }
  report.total_seconds = updates.empty() ? 0.0 : seconds_since(start);
  report.queries_touched = touched.size();
  return report;
}

NaiveRunner::NaiveRunner(KnowledgeGraph graph, std::vector<QueryGraph> queries)
    : graph_(std::move(graph)), queries_(std::move(queries)) {
  for (std::size_t q = 0; q < queries_.size(); ++q) {
    answers_.push_back(evaluate_bgp(queries_[q], graph_));
    std::set<PredicateId> seen;
    for (const auto& t : queries_[q].patterns) {
      if (t.predicate.is_variable()) continue;
      PredicateId p = graph_.intern_predicate(queries_[q].constants[t.predicate.id]);
      if (seen.insert(p).second) users_[p].push_back(q);
    }
  }
}

BenchReport NaiveRunner::apply(const std::vector<Update>& updates) {
  BenchReport report;
  report.mode = "naive";
  std::unordered_set<std::size_t> touched;
  auto start = Clock::now();
  for (std::size_t i = 0; i < updates.size(); ++i) {
    const Update& u = updates[i];
    auto t0 = Clock::now();
    PredicateId p;
    if (u.kind == Update::Kind::Insert) {
      EdgeId id = graph_.insert_edge(u.subject, u.predicate, u.object);
      p = graph_.edge(id)->predicate;
    } else {
      auto id = u.edge ? std::optional(*u.edge) : find_edge(graph_, u.subject, u.predicate, u.object);
      auto e = id ? graph_.delete_edge(*id) : std::nullopt;
      if (!e) {
        ++report.skipped;
        report.warnings.push_back("update " + std::to_string(i + 1) + ": no edge for " + u.to_line());
        continue;
      }
      p = e->predicate;
    }
    double maintenance = seconds_since(t0);
    auto t1 = Clock::now();
    auto it = users_.find(p);
    if (it != users_.end()) {
      for (std::size_t q : it->second) {
        auto fresh = evaluate_bgp(queries_[q], graph_);
        // churn: merge-walk of the two sorted answer lists
        const auto& old = answers_[q];
        std::size_t a = 0, b = 0;
        while (a < old.size() || b < fresh.size()) {
          if (b == fresh.size() || (a < old.size() && old[a].bindings < fresh[b].bindings)) {
            ++report.rows_removed;
            touched.insert(q);
            ++a;
          } else if (a == old.size() || fresh[b].bindings < old[a].bindings) {
            ++report.rows_added;
            touched.insert(q);
            ++b;
          } else {
            if (!(old[a].provenance == fresh[b].provenance)) {
              touched.insert(q);
              ++(u.kind == Update::Kind::Insert ? report.rows_added : report.rows_pruned);
            }
            ++a;
            ++b;
          }
        }
        answers_[q] = std::move(fresh);
      }
    }
    double response = seconds_since(t1);
    ++report.updates;
    ++(u.kind == Update::Kind::Insert ? report.inserts : report.deletes);
    report.timings.push_back({u.kind == Update::Kind::Insert, response, maintenance, seconds_since(t0)});
  }
  report.total_seconds = updates.empty() ? 0.0 : seconds_since(start);
  report.queries_touched = touched.size();
  return report;
}

std::string NaiveRunner::dump_answers_jsonl() const {
  return canonical_answer_dump(graph_, queries_, answers_);
}

std::string canonical_answer_dump(const KnowledgeGraph& g, const std::vector<QueryGraph>& queries,
                                  const std::vector<std::vector<BindingRow>>& answers) {
  std::vector<std::string> lines;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const QueryGraph& query = queries[q];
    for (const auto& row : answers[q]) {
      nlohmann::ordered_json bindings = nlohmann::ordered_json::object();
      for (std::size_t j = 0; j < query.projection.size(); ++j) {
        bindings[query.variables[query.projection[j]]] = g.node_name(row.bindings[j]);
      }
      nlohmann::ordered_json line = {
          {"query", q}, {"bindings", bindings}, {"provenance", row.provenance.to_string()}};
      lines.push_back(line.dump());
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace provkg
