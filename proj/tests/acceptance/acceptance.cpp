// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Pass --quick to shrink the two synthetic benchmarks (the verdicts for 7 and
// 8 are then only indicative).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include "provkg/engine.hpp"
#include "provkg/ntriples.hpp"
#include "provkg/oracle.hpp"
#include "provkg/synthetic.hpp"
#include "provkg/workload.hpp"

using namespace provkg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Answer name tuple -> polynomial text.
using Named = std::map<std::vector<std::string>, std::string>;

Named named(const Engine& e, std::size_t q) {
  Named out;
  for (const auto& r : e.answers(q)) {
    std::vector<std::string> names;
    for (NodeId n : r.bindings) names.push_back(e.graph().node_name(n));
    out[names] = r.provenance.to_string();
  }
  return out;
}

std::string show(const Named& n) {
  std::string s;
  for (const auto& [k, v] : n) {
    s += s.empty() ? "" : "; ";
    s += "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? ", " : "") + k[i];
    s += ") " + v;
  }
  return s.empty() ? "none" : s;
}

struct Fixture {
  std::string graph_path, query_text;

  std::pair<std::unique_ptr<Engine>, std::size_t> fresh() const {
    auto e = std::make_unique<Engine>();
    load_ntriples_file(graph_path, e->graph());
    std::size_t q = e->register_query(parse_query(query_text)).query_id;
    return {std::move(e), q};
  }
};

const std::string kTable1 = "e2*e3*e6*e8*e17 + e2*e3*e5*e14*e17";

void golden(const Fixture& fx) {
  auto t = Clock::now();
  auto [e, q] = fx.fresh();
  Named got = named(*e, q);
  double secs = since(t);
  Named want{{{"Stonebraker", "Ramakrishnan"}, kTable1}};
  verdict(1, got == want && secs < 1.0, "running-example golden answer",
          show(got) + " in " + fmt("%.4f s", secs));
}

void deletion(const Fixture& fx) {
  auto [a, qa] = fx.fresh();
  a->delete_edge(EdgeId(14));
  Named after14 = named(*a, qa);
  auto [b, qb] = fx.fresh();
  b->delete_edge(EdgeId(2));
  Named after2 = named(*b, qb);
  bool ok = after14 == Named{{{"Stonebraker", "Ramakrishnan"}, "e2*e3*e6*e8*e17"}} && after2.empty() &&
            a->index_audit().ok() && b->index_audit().ok();
  verdict(2, ok, "deletion semantics", "-e14: " + show(after14) + " | -e2: " + show(after2));
}

void insertion(const Fixture& fx) {
  auto [a, qa] = fx.fresh();
  a->insert_edge("Ooi", "coAuthor", "Gehrke");
  Named ooi = named(*a, qa);
  Named want_ooi{{{"Ramakrishnan", "Ooi"}, "e1*e3*e15*e16*e18"}, {{"Stonebraker", "Ramakrishnan"}, kTable1}};

  auto [b, qb] = fx.fresh();
  b->insert_edge("Sarawagi", "worksIn", "IITB");
  Named iitb = named(*b, qb);
  // G1 binds one worksIn pattern to the new edge, G2 binds both
  Named want_iitb{{{"Stonebraker", "Sarawagi"}, "e7*e12*e13*e17*e18"},
                  {{"Sarawagi", "Sarawagi"}, "e7*e9*e10*e18^2"},
                  {{"Stonebraker", "Ramakrishnan"}, kTable1}};
  bool ok = ooi == want_ooi && iitb == want_iitb && a->index_audit().ok() && b->index_audit().ok();
  verdict(3, ok, "insertion semantics", "+Ooi coAuthor Gehrke: " + show(ooi) + " | +Sarawagi worksIn IITB: " + show(iitb));
}

void equivalence_and_lemmas(bool& audit_ok, std::string& audit_detail) {
  oracle::VerifyConfig cfg;
  cfg.trials = 100;
  cfg.updates = 500;
  cfg.seed = 20240601;
  cfg.instance.max_edges = 300;
  cfg.instance.min_queries = 1;
  cfg.instance.max_queries = 5;
  cfg.instance.min_patterns = 2;
  cfg.instance.max_patterns = 5;
  cfg.stop_on_failure = false;
  auto t = Clock::now();
  auto report = oracle::run_verify(cfg);
  double secs = since(t);
  const auto& eq = report.equivalence;
  std::string detail = std::to_string(eq.trials) + " trials, " + std::to_string(eq.checks) + " comparisons, " +
                       std::to_string(eq.failures) + " mismatches, " + fmt("%.1f s", secs);
  if (!eq.messages.empty()) detail += "; first: " + eq.messages.front();
  verdict(4, eq.ok() && eq.trials >= 100 && secs <= 600.0, "oracle equivalence suite", detail);

  const auto& lm = report.lemmas;
  auto count = [&](const char* k) {
    auto it = lm.counters.find(k);
    return it == lm.counters.end() ? std::size_t{0} : it->second;
  };
  std::string ld = std::to_string(lm.checks) + " checks (1:1 " + std::to_string(count("one_to_one")) + ", 1:m " +
                   std::to_string(count("one_to_many")) + ", completions " +
                   std::to_string(count("lemma3_completions")) + "), " + std::to_string(lm.failures) + " violations";
  if (!lm.messages.empty()) ld += "; first: " + lm.messages.front();
  verdict(5, lm.ok() && count("one_to_one") > 0 && count("one_to_many") > 0 && count("lemma3_completions") > 0,
          "lemma property suites", ld);

  audit_ok = report.audit.ok() && report.audit.checks == eq.trials;
  audit_detail = std::to_string(report.audit.checks) + " trial audits, " + std::to_string(report.audit.failures) +
                 " with differences";
  if (!report.audit.messages.empty()) audit_detail += " (" + report.audit.messages.front() + ")";
}

void plan_sharing() {
  SyntheticConfig cfg;
  cfg.edges = 4000;
  cfg.nodes = 600;
  cfg.predicates = 6;
  cfg.queries = 16;
  cfg.min_patterns = 3;
  cfg.max_patterns = 5;
  cfg.seed = 7;
  Engine e;
  generate_synthetic_graph(cfg, e.graph());
  auto qs = generate_synthetic_queries(cfg, e.graph());
  std::size_t subqueries = 0;
  // leaf expressions common to two components already count as sharing
  std::map<std::string, std::size_t> leaf_owners;
  for (const auto& q : qs) {
    std::size_t id = e.register_query(q).query_id;
    const QueryGraph& rq = e.query(id);
    for (const auto& v : e.subqueries(id)) {
      ++subqueries;
      std::set<std::string> leaves;
      for (const auto* c : {&v.sq1, &v.sq2}) {
        if (!c->has_value()) continue;
        for (std::size_t p : (*c)->patterns) leaves.insert(canonicalize_patterns(rq, {p}).text);
      }
      for (const auto& k : leaves) ++leaf_owners[k];
    }
  }
  bool sharing = std::any_of(leaf_owners.begin(), leaf_owners.end(), [](const auto& kv) { return kv.second > 1; });
  std::set<std::string> keys;
  bool unique = true;
  for (std::size_t i = 0; i < e.plan().size(); ++i) unique &= keys.insert(e.plan().node(i).key).second;
  std::size_t global = e.plan().size(), local = e.plan().local_node_total();
  bool ok = subqueries >= 50 && unique && (!sharing || global < local);
  verdict(6, ok, "plan sharing",
          std::to_string(subqueries) + " subqueries, global nodes " + std::to_string(global) + " < local nodes " +
              std::to_string(local) + (unique ? ", no duplicate expressions" : ", DUPLICATE expressions") +
              (sharing ? "" : ", no sharing present"));
}

struct Synthetic {
  KnowledgeGraph base;
  std::vector<QueryGraph> queries;
};

Synthetic synthetic(bool quick) {
  SyntheticConfig cfg;  // 100K edges, 20K nodes, 20 predicates, 50 queries
  if (quick) {
    cfg.edges = 20000;
    cfg.nodes = 4000;
  }
  Synthetic s;
  generate_synthetic_graph(cfg, s.base);
  s.queries = generate_synthetic_queries(cfg, s.base);
  return s;
}

std::unique_ptr<Engine> registered(const Synthetic& s) {
  auto e = std::make_unique<Engine>();
  e->graph() = s.base;
  for (const auto& q : s.queries) e->register_query(q);
  return e;
}

void performance(const Synthetic& s, std::size_t size, bool& audit_ok, std::string& audit_detail) {
  auto engine = registered(s);
  auto w = generate_workload(engine->graph(), s.queries, {size, 0.5, 11});
  BenchReport inc = apply_incremental(*engine, w);
  NaiveRunner naive(s.base, s.queries);
  BenchReport nv = naive.apply(w);
  std::vector<std::vector<BindingRow>> ans;
  for (std::size_t i = 0; i < s.queries.size(); ++i) ans.push_back(engine->answers(i));
  bool same = canonical_answer_dump(engine->graph(), s.queries, ans) == naive.dump_answers_jsonl();
  double speedup = nv.total_seconds / inc.total_seconds;
  verdict(7, same && speedup >= 2.0, "incremental vs naive",
          std::to_string(s.base.edge_count()) + " edges, " + std::to_string(s.queries.size()) + " queries, " +
              std::to_string(w.size()) + " balanced updates: incremental " + fmt("%.3f s", inc.total_seconds) +
              ", naive " + fmt("%.3f s", nv.total_seconds) + ", speedup " + fmt("%.1fx", speedup) +
              (same ? ", identical final answers" : ", ANSWERS DIFFER"));
  IndexAudit audit = engine->index_audit();
  audit_ok = audit_ok && audit.ok();
  audit_detail += "; synthetic run: " + std::to_string(audit.differences.size()) + " differences";
  if (!audit.ok()) audit_detail += " (" + audit.differences.front() + ")";
}

void ratio_trend(const Synthetic& s, std::size_t size, std::size_t reps) {
  std::vector<double> medians;
  std::string detail;
  for (const auto& p : workload_presets()) {
    std::vector<double> means;
    for (std::size_t r = 0; r < reps; ++r) {
      auto engine = registered(s);
      auto w = generate_workload(engine->graph(), s.queries, {size, p.delete_ratio, 100 + r});
      means.push_back(apply_incremental(*engine, w).mean_seconds());
    }
    std::sort(means.begin(), means.end());
    medians.push_back(means[means.size() / 2]);
    detail += std::string(detail.empty() ? "" : ", ") + p.name + " " + fmt("%.2f us", medians.back() * 1e6);
  }
  bool monotone = std::is_sorted(medians.begin(), medians.end());
  verdict(8, monotone, "workload-ratio trend", "median of " + std::to_string(reps) + " runs: " + detail);
}

void semiring() {
  auto r = oracle::run_semiring_suite(10000, 99);
  std::string d = std::to_string(r.checks) + " checks, " + std::to_string(r.failures) + " violations";
  if (!r.messages.empty()) d += "; first: " + r.messages.front();
  verdict(10, r.ok() && r.checks >= 10000, "semiring law suite", d);
}

}  // namespace

int main(int argc, char** argv) {
  std::string data = PROVKG_TEST_DATA;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;
    else data = argv[i];
  }
  Fixture fx{data + "/fig1.nt", read_file(data + "/running_example.rq")};

  golden(fx);
  deletion(fx);
  insertion(fx);
  bool audit_ok = false;
  std::string audit_detail;
  equivalence_and_lemmas(audit_ok, audit_detail);
  plan_sharing();
  Synthetic s = synthetic(quick);
  performance(s, quick ? 2000 : 10000, audit_ok, audit_detail);
  ratio_trend(s, quick ? 2000 : 10000, quick ? 3 : 5);
  verdict(9, audit_ok, "index audit", audit_detail);
  semiring();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
