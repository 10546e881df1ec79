#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace provkg {

/// A pattern position: a query variable (id = variable index) or a constant
/// (id = index into the query's constant table).
struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };

  Kind kind = Kind::Constant;
  std::uint32_t id = 0;

  static Term variable(std::uint32_t v) { return {Kind::Variable, v}; }
  static Term constant(std::uint32_t c) { return {Kind::Constant, c}; }
  bool is_variable() const { return kind == Kind::Variable; }
  bool is_constant() const { return kind == Kind::Constant; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

/// Outcome of classify_query().
struct Classification {
  bool multimap = false;
  /// Groups of pattern ordinals that share a predicate and may bind the same
  /// edge (each group has at least two members).
  std::vector<std::vector<std::size_t>> shared_groups;
  /// Ordinal whose removal yields the designated trigger subquery; only
  /// meaningful for MultiMap queries.
  std::optional<std::size_t> trigger;

  /// Every ordinal appearing in some shared group, ascending.
  std::vector<std::size_t> multimap_patterns() const;
};

/// Conjunction of triple patterns with a projection.
class QueryGraph {
 public:
  std::vector<TriplePattern> patterns;
  std::vector<std::string> variables;  // index = variable id, without '?'
  std::vector<std::string> constants;  // index = constant id
  std::vector<std::uint32_t> projection;
  bool select_all = false;
  bool distinct = false;
  Classification classification;

  std::size_t size() const { return patterns.size(); }
  std::size_t variable_count() const { return variables.size(); }

  std::uint32_t add_variable(std::string_view name);
  std::uint32_t add_constant(std::string_view text);

  const std::string& text(const Term& t) const;
  /// "?name" for variables, the constant text otherwise.
  std::string term_string(const Term& t) const;

  /// Variable ids in order of first appearance over the patterns.
  std::vector<std::uint32_t> variables_in(const std::vector<std::size_t>& subset) const;
  /// True when the patterns in `subset` are connected through shared variables.
  bool connected(const std::vector<std::size_t>& subset) const;
  bool connected() const;

  bool has_variable_predicate() const;
};

/// Parses `SELECT [DISTINCT] (?v ...|*) WHERE { s p o . ... }`.
/// Throws ParseError, UnsupportedFeatureError or DisconnectedQueryError.
QueryGraph parse_query(std::string_view text);

/// Builds a query without connectivity checks; used by generators and tests.
/// Terms starting with '?' are variables.
QueryGraph make_query(const std::vector<std::array<std::string, 3>>& patterns,
                      const std::vector<std::string>& projection);

/// Query text that parse_query() reads back to an equal query.
std::string pretty_print(const QueryGraph& q);

/// Constant as it must be written in query text (bare or in angle brackets).
std::string render_constant(const std::string& text);

/// Deterministic representative of a query up to variable renaming and
/// pattern order. The text is itself a parseable query.
struct CanonicalForm {
  std::string text;
  /// original variable id -> canonical variable id (only for variables present)
  std::map<std::uint32_t, std::uint32_t> var_map;
  /// canonical position -> original pattern ordinal
  std::vector<std::size_t> pattern_order;

  friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) { return a.text == b.text; }
};

CanonicalForm canonicalize(const QueryGraph& q);

/// Canonical form of the pattern subset alone (no projection), used to key
/// shared plan expressions.
CanonicalForm canonicalize_patterns(const QueryGraph& q, const std::vector<std::size_t>& subset);

/// Number of orderings canonicalization will try before falling back to the
/// signature order only.
inline constexpr std::size_t kCanonicalPermutationCap = 40320;

struct PredicateMetadata {
  struct Flags {
    bool one_to_one = false;
    bool asymmetric = false;  // read as "no cycles of this predicate"
  };
  std::map<std::string, Flags, std::less<>> flags;

  Flags get(std::string_view predicate) const;
};

Classification classify_query(const QueryGraph& q, const PredicateMetadata& meta = {});

/// True if patterns a and b can be bound to one KG edge in some match.
bool can_cobind(const QueryGraph& q, std::size_t a, std::size_t b, const PredicateMetadata& meta);

}  // namespace provkg
