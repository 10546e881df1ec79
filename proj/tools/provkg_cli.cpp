#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "provkg/engine.hpp"
#include "provkg/errors.hpp"
#include "provkg/ntriples.hpp"
#include "provkg/oracle.hpp"
#include "provkg/stats.hpp"
#include "provkg/synthetic.hpp"
#include "provkg/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace provkg;

namespace {

// Every command rebuilds its state from files: a graph, query files and an
// optional predicate metadata file.
struct Inputs {
  std::string graph;
  std::vector<std::string> queries;
  std::string manifest;
  std::string metadata;

  void attach(CLI::App* cmd, bool need_graph = true) {
    auto* g = cmd->add_option("-g,--graph", graph, "N-Triples graph file")->check(CLI::ExistingFile);
    if (need_graph) g->required();
    cmd->add_option("-q,--query", queries, "query file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("-m,--manifest", manifest, "file listing query files, one per line")
        ->check(CLI::ExistingFile);
    cmd->add_option("--metadata", metadata, "JSON predicate flags {pred: {one_to_one, asymmetric}}")
        ->check(CLI::ExistingFile);
  }

  std::vector<std::string> query_files() const {
    std::vector<std::string> out = queries;
    if (!manifest.empty()) {
      std::ifstream in(manifest);
      std::string line;
      fs::path base = fs::path(manifest).parent_path();
      while (std::getline(in, line)) {
        line.erase(0, line.find_first_not_of(" \t"));
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        fs::path p(line);
        out.push_back((p.is_absolute() ? p : base / p).string());
      }
    }
    return out;
  }

  std::vector<QueryGraph> load_queries() const {
    std::vector<QueryGraph> out;
    for (const auto& file : query_files()) {
      std::ifstream in(file);
      if (!in) throw Error("cannot open query file " + file);
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        out.push_back(parse_query(ss.str()));
      } catch (const Error& e) {
        throw Error(file + ": " + e.what());
      }
    }
    return out;
  }

  PredicateMetadata load_metadata() const {
    PredicateMetadata meta;
    if (metadata.empty()) return meta;
    std::ifstream in(metadata);
    json j = json::parse(in);
    for (const auto& [name, flags] : j.items()) {
      meta.flags[name] = {flags.value("one_to_one", false), flags.value("asymmetric", false)};
    }
    return meta;
  }

  void load_graph(KnowledgeGraph& g) const {
    if (!graph.empty()) load_ntriples_file(graph, g);
  }
};

json graph_summary(const KnowledgeGraph& g) {
  return {{"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"predicates", g.predicate_count()}};
}

void print_summary(const KnowledgeGraph& g) {
  std::cout << "vertices    " << g.vertex_count() << "\n"
            << "edges       " << g.edge_count() << "\n"
            << "predicates  " << g.predicate_count() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

// Registers every query, reporting a failing file by name.
void register_all(Engine& engine, const std::vector<QueryGraph>& queries) {
  for (std::size_t i = 0; i < queries.size(); ++i) {
    try {
      engine.register_query(queries[i]);
    } catch (const Error& e) {
      throw Error("query " + std::to_string(i) + ": " + e.what());
    }
  }
}

std::string report_json_line(const json& j) { return j.dump() + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"provkg: standing queries with provenance over an evolving knowledge graph"};
  app.require_subcommand(1);

  // load
  std::string load_file;
  auto* load = app.add_subcommand("load", "load an N-Triples file and print its size");
  load->add_option("file", load_file)->required()->check(CLI::ExistingFile);

  // register
  Inputs reg_in;
  std::vector<std::string> reg_files;
  std::string reg_json;
  auto* reg = app.add_subcommand("register", "register queries against a graph and report receipts");
  reg->add_option("files", reg_files, "query files");
  reg_in.attach(reg);
  reg->add_option("--json", reg_json, "write the receipt report here");

  // gen-workload
  Inputs gw_in;
  WorkloadConfig gw_cfg;
  std::string gw_preset, gw_out = "-";
  auto* gw = app.add_subcommand("gen-workload", "draw a random update workload");
  gw_in.attach(gw);
  gw->add_option("--size", gw_cfg.size, "number of updates")->required();
  gw->add_option("--delete-ratio", gw_cfg.delete_ratio, "fraction of deletions")->check(CLI::Range(0.0, 1.0));
  gw->add_option("--preset", gw_preset, "deletion-heavy|deletion-leaning|balanced|insertion-leaning|insertion-heavy");
  gw->add_option("--seed", gw_cfg.seed);
  gw->add_option("-o,--out", gw_out, "output file (default stdout)");

  // apply
  Inputs ap_in;
  std::string ap_workload, ap_mode = "incremental", ap_report, ap_dump;
  bool ap_verify = false;
  std::size_t ap_repeat = 5;
  auto* ap = app.add_subcommand("apply", "replay a workload and report timings");
  ap->add_option("workload", ap_workload)->required()->check(CLI::ExistingFile);
  ap_in.attach(ap);
  ap->add_option("--mode", ap_mode)->check(CLI::IsMember({"incremental", "naive"}));
  ap->add_flag("--verify", ap_verify, "also run the other mode and compare final answers");
  ap->add_option("--repeat", ap_repeat, "runs from a fresh state; the median total is reported")
      ->check(CLI::PositiveNumber);
  ap->add_option("--report", ap_report, "write the JSON report here");
  ap->add_option("--dump-answers", ap_dump, "write the final canonical answer dump here");

  // verify
  oracle::VerifyConfig vf_cfg;
  std::string vf_report;
  std::size_t vf_max_edges = vf_cfg.instance.max_edges;
  std::uint64_t vf_replay = 0;
  auto* vf = app.add_subcommand("verify", "randomized equivalence, lemma and audit suites");
  vf->add_option("--trials", vf_cfg.trials);
  vf->add_option("--max-edges", vf_max_edges);
  vf->add_option("--updates", vf_cfg.updates);
  vf->add_option("--seed", vf_cfg.seed);
  vf->add_option("--replay", vf_replay, "rerun one failing trial by its printed seed");
  vf->add_flag("--fault-skip-prune", vf_cfg.fault_skip_prune, "inject the unpruned-deletion fault");
  vf->add_flag("!--no-lemmas", vf_cfg.lemmas, "skip the lemma checks");
  vf->add_option("--report", vf_report, "write the JSON report here");

  // dump
  Inputs dp_in;
  std::string dp_what, dp_out = "-";
  auto* dp = app.add_subcommand("dump", "dump engine state after registration");
  dp->add_option("what", dp_what)->required()->check(CLI::IsMember({"answers", "annotations", "plan", "stats"}));
  dp_in.attach(dp);
  dp->add_option("-o,--out", dp_out);

  // gen-synthetic
  SyntheticConfig sy_cfg;
  std::string sy_graph, sy_queries;
  auto* sy = app.add_subcommand("gen-synthetic", "write a synthetic graph and query set");
  sy->add_option("--edges", sy_cfg.edges);
  sy->add_option("--nodes", sy_cfg.nodes);
  sy->add_option("--predicates", sy_cfg.predicates);
  sy->add_option("--queries", sy_cfg.queries);
  sy->add_option("--min-patterns", sy_cfg.min_patterns);
  sy->add_option("--max-patterns", sy_cfg.max_patterns);
  sy->add_option("--seed", sy_cfg.seed);
  sy->add_option("--graph-out", sy_graph)->required();
  sy->add_option("--query-dir", sy_queries, "directory for q<i>.rq files and manifest.txt")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (load->parsed()) {
      KnowledgeGraph g;
      load_ntriples_file(load_file, g);
      print_summary(g);
      std::cout << report_json_line(graph_summary(g));
      return 0;
    }

    if (reg->parsed()) {
      reg_in.queries.insert(reg_in.queries.end(), reg_files.begin(), reg_files.end());
      Engine engine({reg_in.load_metadata(), false});
      reg_in.load_graph(engine.graph());
      auto files = reg_in.query_files();
      auto queries = reg_in.load_queries();
      json list = json::array();
      std::cout << "query  answers  subqueries  annotations  multimap  file\n";
      for (std::size_t i = 0; i < queries.size(); ++i) {
        auto r = engine.register_query(queries[i]);
        list.push_back({{"query", r.query_id},
                        {"file", files[i]},
                        {"answers", r.answers.size()},
                        {"subqueries", r.subquery_ids.size()},
                        {"annotations", r.annotation_count},
                        {"multimap", r.multimap}});
        std::printf("%5zu  %7zu  %10zu  %11zu  %8s  %s\n", r.query_id, r.answers.size(),
                    r.subquery_ids.size(), r.annotation_count, r.multimap ? "yes" : "no", files[i].c_str());
      }
      json out = {{"graph", graph_summary(engine.graph())},
                  {"queries", list},
                  {"plan_nodes", engine.plan().size()},
                  {"local_plan_nodes", engine.plan().local_node_total()}};
      if (!reg_json.empty()) write_text(reg_json, out.dump(2) + "\n");
      std::cout << report_json_line(out);
      return 0;
    }

    if (gw->parsed()) {
      if (!gw_preset.empty()) {
        const auto& presets = workload_presets();
        auto it = std::find_if(presets.begin(), presets.end(), [&](const WorkloadPreset& p) {
          std::string n = p.name;
          std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
          return n == gw_preset;
        });
        if (it == presets.end()) throw Error("unknown preset " + gw_preset);
        gw_cfg.delete_ratio = it->delete_ratio;
      }
      KnowledgeGraph g;
      gw_in.load_graph(g);
      auto updates = generate_workload(g, gw_in.load_queries(), gw_cfg);
      std::ostringstream out;
      write_workload(out, updates);
      write_text(gw_out, out.str());
      if (gw_out != "-" && !gw_out.empty()) {
        std::size_t dels = std::count_if(updates.begin(), updates.end(),
                                         [](const Update& u) { return u.kind == Update::Kind::Delete; });
        std::cout << report_json_line({{"updates", updates.size()},
                                       {"inserts", updates.size() - dels},
                                       {"deletes", dels},
                                       {"out", gw_out}});
      }
      return 0;
    }

    if (ap->parsed()) {
      auto updates = read_workload_file(ap_workload);
      auto queries = ap_in.load_queries();
      KnowledgeGraph base;
      ap_in.load_graph(base);
      auto meta = ap_in.load_metadata();

      auto run = [&](const std::string& mode, std::string* dump) {
        if (mode == "incremental") {
          Engine engine({meta, false});
          engine.graph() = base;
          register_all(engine, queries);
          auto r = apply_incremental(engine, updates);
          if (dump != nullptr) {
            std::vector<std::vector<BindingRow>> ans;
            for (std::size_t i = 0; i < queries.size(); ++i) ans.push_back(engine.answers(i));
            *dump = canonical_answer_dump(engine.graph(), queries, ans);
            auto audit = engine.index_audit();
            for (const auto& d : audit.differences) r.warnings.push_back("index audit: " + d);
          }
          return r;
        }
        NaiveRunner naive(base, queries);
        auto r = naive.apply(updates);
        if (dump != nullptr) *dump = naive.dump_answers_jsonl();
        return r;
      };

      std::vector<BenchReport> runs;
      std::string dump;
      for (std::size_t i = 0; i < ap_repeat; ++i) runs.push_back(run(ap_mode, i == 0 ? &dump : nullptr));
      std::vector<double> totals;
      for (const auto& r : runs) totals.push_back(r.total_seconds);
      std::sort(totals.begin(), totals.end());
      double median = totals.size() % 2 == 1 ? totals[totals.size() / 2]
                                              : (totals[totals.size() / 2 - 1] + totals[totals.size() / 2]) / 2;
      const BenchReport& first = runs.front();
      json report = json::parse(first.to_json());
      report["repeat"] = ap_repeat;
      report["median_total_seconds"] = median;
      std::cout << first.to_table();
      std::printf("median total over %zu run(s): %.6f s\n", ap_repeat, median);

      bool mismatch = false;
      if (ap_verify) {
        std::string other_dump;
        std::string other = ap_mode == "incremental" ? "naive" : "incremental";
        auto r = run(other, &other_dump);
        mismatch = other_dump != dump;
        report["verify"] = {{"other_mode", other},
                            {"other_total_seconds", r.total_seconds},
                            {"identical", !mismatch},
                            {"speedup", ap_mode == "incremental" ? r.total_seconds / median
                                                                 : median / r.total_seconds}};
        std::printf("verify against %s: %s (its total %.6f s)\n", other.c_str(),
                    mismatch ? "MISMATCH" : "identical answers", r.total_seconds);
      }
      if (!ap_dump.empty()) write_text(ap_dump, dump);
      if (!ap_report.empty()) write_text(ap_report, report.dump(2) + "\n");
      std::cout << report_json_line(report);
      return mismatch ? 1 : 0;
    }

    if (vf->parsed()) {
      if (vf->count("--replay") > 0) vf_cfg.replay_seed = vf_replay;
      vf_cfg.instance.max_edges = vf_max_edges;
      vf_cfg.instance.min_edges = std::min(vf_cfg.instance.min_edges, vf_max_edges);
      auto report = oracle::run_verify(vf_cfg);
      auto line = [](const char* name, const oracle::SuiteResult& s) {
        std::printf("%-12s %-4s trials %zu checks %zu failures %zu (%.2f s)\n", name, s.ok() ? "ok" : "FAIL",
                    s.trials, s.checks, s.failures, s.seconds);
        for (const auto& m : s.messages) std::printf("    %s\n", m.c_str());
      };
      line("equivalence", report.equivalence);
      line("lemmas", report.lemmas);
      line("audit", report.audit);
      if (report.failing_seed) {
        std::printf("reproduce with: verify --replay %llu --updates %zu --max-edges %zu%s\n",
                    static_cast<unsigned long long>(*report.failing_seed),
                    report.failing_step ? *report.failing_step + 1 : vf_cfg.updates, vf_max_edges,
                    vf_cfg.fault_skip_prune ? " --fault-skip-prune" : "");
      }
      if (!vf_report.empty()) write_text(vf_report, report.to_json() + "\n");
      std::cout << report.to_json() << "\n";
      return report.ok() ? 0 : 1;
    }

    if (dp->parsed()) {
      Engine engine({dp_in.load_metadata(), false});
      dp_in.load_graph(engine.graph());
      auto queries = dp_in.load_queries();
      register_all(engine, queries);
      if (dp_what == "answers") {
        write_text(dp_out, engine.dump_answers_jsonl());
      } else if (dp_what == "annotations") {
        write_text(dp_out, engine.dump_annotations_jsonl());
      } else if (dp_what == "plan") {
        write_text(dp_out, engine.plan().dump_json(engine.graph()) + "\n");
      } else {
        const KnowledgeGraph& g = engine.graph();
        StatsCatalog stats = compute_statistics(g);
        json preds = json::object();
        for (std::size_t p = 0; p < g.predicate_count(); ++p) {
          PredicateId pid(static_cast<std::uint32_t>(p));
          preds[g.predicate_name(pid)] = {{"edges", g.predicate_edge_count(pid)},
                                          {"pairs", stats.pairs(pid).size()}};
        }
        json out = {{"graph", graph_summary(g)},
                    {"characteristic_sets", stats.class_count()},
                    {"predicates", preds},
                    {"queries", engine.query_count()},
                    {"plan_nodes", engine.plan().size()},
                    {"local_plan_nodes", engine.plan().local_node_total()},
                    {"annotations", engine.annotation_count()},
                    {"edge_to_result_entries", engine.edge_to_result_size()},
                    {"edge_to_cp_entries", engine.edge_to_cp_size()}};
        write_text(dp_out, out.dump(2) + "\n");
      }
      return 0;
    }

    if (sy->parsed()) {
      KnowledgeGraph g;
      generate_synthetic_graph(sy_cfg, g);
      auto queries = generate_synthetic_queries(sy_cfg, g);
      {
        std::ofstream out(sy_graph);
        if (!out) throw Error("cannot write " + sy_graph);
        for (const auto& [id, e] : g.edges()) {
          out << '<' << g.node_name(e.subject) << "> <" << g.predicate_name(e.predicate) << "> <"
              << g.node_name(e.object) << "> .\n";
        }
      }
      fs::create_directories(sy_queries);
      std::ofstream manifest(fs::path(sy_queries) / "manifest.txt");
      for (std::size_t i = 0; i < queries.size(); ++i) {
        std::string name = "q" + std::to_string(i) + ".rq";
        std::ofstream(fs::path(sy_queries) / name) << pretty_print(queries[i]);
        manifest << name << "\n";
      }
      print_summary(g);
      std::cout << report_json_line({{"graph", graph_summary(g)}, {"queries", queries.size()}});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
