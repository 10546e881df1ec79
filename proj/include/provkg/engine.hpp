#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "provkg/eval.hpp"
#include "provkg/global_plan.hpp"
#include "provkg/graph.hpp"
#include "provkg/polynomial.hpp"
#include "provkg/query.hpp"
#include "provkg/stats.hpp"
#include "provkg/subquery.hpp"
#include "provkg/table.hpp"

namespace provkg {

enum class Direction : std::uint8_t { Out, In };

const char* to_string(Direction d);

/// Connection point: where a potential match waits for an edge labelled
/// exp_rel in direction dir. Type IV points also record the node the
/// completing edge must reach (partner).
struct ConnectionPoint {
  NodeId node;
  PredicateId exp_rel;
  Direction dir = Direction::Out;
  std::uint32_t subquery = 0;
  std::uint8_t side = 1;
  NodeId partner;

  friend bool operator==(const ConnectionPoint&, const ConnectionPoint&) = default;
};

struct ConnectionPointHash {
  std::size_t operator()(const ConnectionPoint& c) const;
};

/// One annotation: a connection point plus the projected values carried by
/// the potential matches that share it and their summed provenance.
struct Annotation {
  ConnectionPoint point;
  std::vector<std::uint32_t> fragment_vars;  // query variable ids
  Row fragment;
  Polynomial provenance;
};

struct EngineOptions {
  PredicateMetadata metadata;
  /// Fault injection for the verification harness: surviving rows keep
  /// their polynomial unpruned on deletion.
  bool fault_skip_prune = false;
};

struct RegistrationReceipt {
  std::size_t query_id = 0;
  std::vector<BindingRow> answers;
  std::vector<std::uint32_t> subquery_ids;
  std::size_t annotation_count = 0;
  std::vector<std::size_t> plan_roots;
  bool multimap = false;
};

struct AnswerChange {
  std::size_t query = 0;
  Row bindings;
  Polynomial delta;  // added monomials (insert) or the polynomial after pruning (delete)
};

struct UpdateReport {
  enum class Kind { Insert, Delete, Noop };
  Kind kind = Kind::Noop;
  std::optional<Edge> edge;
  std::vector<AnswerChange> added;    // new rows or new monomials on existing rows
  std::vector<AnswerChange> pruned;   // rows that survived a deletion
  std::vector<AnswerChange> removed;  // rows whose polynomial vanished
  double response_seconds = 0.0;
  double maintenance_seconds = 0.0;
  double total_seconds = 0.0;
};

struct IndexAudit {
  std::vector<std::string> differences;
  bool ok() const { return differences.empty(); }
};

/// Registered component of a subquery, for inspection.
struct ComponentView {
  std::size_t plan_node = 0;
  std::vector<std::size_t> patterns;
  std::map<std::uint32_t, std::uint32_t> var_map;  // query variable -> plan column
};

struct SubqueryView {
  std::uint32_t id = 0;
  std::size_t query = 0;
  Subquery subquery;
  std::optional<ComponentView> sq1;  // absent only for a Type II single side
  std::optional<ComponentView> sq2;  // Type III only
};

/// Standing-query engine: owns the graph, the shared plan, every registered
/// query's answers, the connection-point annotations and both edge indexes.
/// Updates must be serialized by the caller.
class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  KnowledgeGraph& graph() { return graph_; }
  const KnowledgeGraph& graph() const { return graph_; }
  const GlobalPlan& plan() const { return plan_; }
  const EngineOptions& options() const { return options_; }

  /// Throws RegistrationError for variable predicates, disconnected queries
  /// and duplicates (same canonical form).
  RegistrationReceipt register_query(const QueryGraph& q);

  UpdateReport insert_edge(std::string_view s, std::string_view p, std::string_view o);
  UpdateReport insert_edge(NodeId s, PredicateId p, NodeId o);
  UpdateReport delete_edge(EdgeId id);

  /// Maintenance for an edge already inserted into / removed from graph().
  UpdateReport handle_insertion(const Edge& e);
  UpdateReport handle_deletion(const Edge& e);

  std::size_t query_count() const { return queries_.size(); }
  const QueryGraph& query(std::size_t id) const { return queries_.at(id).q; }
  std::vector<BindingRow> answers(std::size_t query) const;
  const Polynomial* answer(std::size_t query, const Row& bindings) const;

  std::vector<SubqueryView> subqueries(std::size_t query) const;
  /// Row of a subquery component, addressed by query-variable bindings.
  const Polynomial* component_row(std::uint32_t subquery, int side,
                                  const std::map<std::uint32_t, NodeId>& bindings) const;
  std::size_t component_size(std::uint32_t subquery, int side) const;

  std::size_t annotation_count() const { return annotation_live_; }
  std::vector<Annotation> annotations() const;
  std::vector<Annotation> annotations_at(NodeId node) const;
  std::size_t annotation_count(std::uint32_t subquery) const;

  /// Rebuilds both edge indexes from the stored answers and annotations and
  /// diffs them against the live ones.
  IndexAudit index_audit() const;
  /// Plants a bogus edgeToResult entry; audit must then name the edge.
  void corrupt_index_for_testing(EdgeId e);

  std::size_t edge_to_result_size() const { return edge_to_result_.size(); }
  std::size_t edge_to_cp_size() const { return edge_to_cp_.size(); }

  std::string dump_answers_jsonl() const;
  std::string dump_annotations_jsonl() const;

 private:
  struct ResultRef {
    std::size_t query;
    Row row;
    friend bool operator==(const ResultRef&, const ResultRef&) = default;
  };
  struct ResultRefHash {
    std::size_t operator()(const ResultRef& r) const;
  };

  enum class Source : std::uint8_t { Subject, Object, Frag1, Frag2, Single };
  struct Slot {
    Source source;
    std::uint32_t index = 0;  // fragment position, or column of the single-pattern row
  };

  struct SideState {
    std::size_t node = 0;
    std::vector<std::size_t> patterns;
    std::map<std::uint32_t, std::uint32_t> var_map;
    std::vector<std::uint32_t> frag_vars;
    std::uint32_t endpoint_var = 0;
    Direction dir = Direction::Out;
  };

  struct SubqueryState {
    std::uint32_t id = 0;
    std::size_t query = 0;
    Subquery sq;
    ResolvedPattern removed;  // columns are query variable ids
    std::optional<SideState> side1;
    std::optional<SideState> side2;
    std::optional<ResolvedPattern> single;  // Type II lone pattern
    std::uint32_t x_var = 0;  // Type IV endpoints
    std::uint32_t y_var = 0;
    std::vector<Slot> slots;  // one per projection position
  };

  struct QueryState {
    QueryGraph q;
    std::string canonical;
    std::vector<ResolvedPattern> patterns;  // columns are query variable ids
    Table answers;
    std::vector<std::uint32_t> subqueries;  // by removed ordinal
    std::vector<bool> trigger;              // ordinal belongs to a shared group
  };

  struct Consumer {
    std::uint32_t subquery;
    int side;
  };

  using Completions = std::unordered_map<Row, Polynomial, RowHash>;

  void add_annotations_from_row(const SubqueryState& s, int side, const Row& row,
                                const Polynomial& poly);
  void add_annotation(const ConnectionPoint& cp, const Row& fragment, const Polynomial& poly);
  void complete(const SubqueryState& s, const Edge& e, bool include_e_in_lookups,
                Completions& out) const;
  void add_answer(std::size_t query, const Row& row, const Polynomial& delta);

  const StatsCatalog& statistics();

  EngineOptions options_;
  KnowledgeGraph graph_;
  GlobalPlan plan_;
  std::optional<StatsCatalog> stats_;
  std::uint64_t stats_version_ = 0;
  EstimateCache estimates_;

  std::vector<QueryState> queries_;
  std::vector<SubqueryState> subqueries_;
  std::unordered_map<std::size_t, std::vector<Consumer>> consumers_;  // plan node -> sides
  std::unordered_map<PredicateId, std::vector<std::pair<std::size_t, std::size_t>>> by_predicate_;

  // Annotation store: entries addressed by id, looked up by connection point.
  struct AnnotationEntry {
    ConnectionPoint point;
    Row fragment;
    Polynomial provenance;
    bool live = false;
  };
  std::vector<AnnotationEntry> annotation_entries_;
  std::vector<std::uint32_t> annotation_free_;
  std::size_t annotation_live_ = 0;
  std::unordered_map<ConnectionPoint, std::unordered_map<Row, std::uint32_t, RowHash>,
                     ConnectionPointHash>
      cp_index_;

  std::unordered_map<EdgeId, std::unordered_set<ResultRef, ResultRefHash>> edge_to_result_;
  std::unordered_map<EdgeId, std::unordered_set<std::uint32_t>> edge_to_cp_;
};

}  // namespace provkg
