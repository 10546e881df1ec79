#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "provkg/engine.hpp"
#include "provkg/graph.hpp"
#include "provkg/query.hpp"

namespace provkg {

/// Uniform draw in [0, bound) that does not depend on the standard library's
/// distribution implementation, so seeded files are identical everywhere.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound);
double unit(std::mt19937_64& rng);

struct Update {
  enum class Kind { Insert, Delete };
  Kind kind = Kind::Insert;
  std::string subject, predicate, object;  // empty for delete-by-id
  std::optional<EdgeId> edge;

  std::string to_line() const;
};

/// `+ s p o`, `- s p o` or `- e<id>`; blank lines and `#` comments skipped.
Update parse_update_line(std::string_view line, std::size_t line_no = 1);
std::vector<Update> read_workload(std::istream& in);
std::vector<Update> read_workload_file(const std::string& path);
void write_workload(std::ostream& out, const std::vector<Update>& updates);

struct WorkloadConfig {
  std::size_t size = 0;
  double delete_ratio = 0.5;
  std::uint64_t seed = 1;
};

struct WorkloadPreset {
  const char* name;
  double delete_ratio;
};
/// Deletion-Heavy to Insertion-Heavy.
const std::vector<WorkloadPreset>& workload_presets();

/// Inserts connect a random vertex pair not yet connected in either direction
/// with a random predicate used by some query; deletes pick a random live edge
/// of such a predicate. A shadow copy of the edge set keeps both honest as the
/// workload is drawn. Throws Error when no query predicate exists.
std::vector<Update> generate_workload(const KnowledgeGraph& g, const std::vector<QueryGraph>& queries,
                                      const WorkloadConfig& cfg);

/// Lowest-id live edge with these names, if any.
std::optional<EdgeId> find_edge(const KnowledgeGraph& g, std::string_view s, std::string_view p,
                                std::string_view o);

struct UpdateTiming {
  bool insert = true;
  double response = 0.0;
  double maintenance = 0.0;
  double total = 0.0;
};

struct BenchReport {
  std::string mode;
  std::size_t updates = 0;
  std::size_t inserts = 0;
  std::size_t deletes = 0;
  std::size_t skipped = 0;
  std::size_t rows_added = 0;
  std::size_t rows_pruned = 0;
  std::size_t rows_removed = 0;
  std::size_t queries_touched = 0;
  double total_seconds = 0.0;
  std::vector<UpdateTiming> timings;
  std::vector<std::string> warnings;

  double mean_seconds() const;
  double median_seconds() const;
  std::string to_json() const;
  std::string to_table() const;
};

/// Replays the workload through the engine.
BenchReport apply_incremental(Engine& engine, const std::vector<Update>& updates);

/// Re-evaluation baseline: after each update, every query whose patterns use
/// the updated predicate is evaluated from scratch.
class NaiveRunner {
 public:
  NaiveRunner(KnowledgeGraph graph, std::vector<QueryGraph> queries);

  BenchReport apply(const std::vector<Update>& updates);
  const KnowledgeGraph& graph() const { return graph_; }
  const std::vector<BindingRow>& answers(std::size_t query) const { return answers_.at(query); }
  std::string dump_answers_jsonl() const;

 private:
  KnowledgeGraph graph_;
  std::vector<QueryGraph> queries_;
  std::vector<std::vector<BindingRow>> answers_;
  std::unordered_map<PredicateId, std::vector<std::size_t>> users_;
};

/// Canonical answer dump shared by both modes: one line per row, sorted.
std::string canonical_answer_dump(const KnowledgeGraph& g, const std::vector<QueryGraph>& queries,
                                  const std::vector<std::vector<BindingRow>>& answers);

}  // namespace provkg
