#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "provkg/ids.hpp"

namespace provkg {

/// Product of edge symbols with positive exponents, sorted by edge id.
/// The empty monomial is the multiplicative identity.
class Monomial {
 public:
  using Factor = std::pair<EdgeId, std::uint32_t>;

  Monomial() = default;
  explicit Monomial(EdgeId e) : factors_{{e, 1}} {}
  /// Builds from an unsorted list of symbols; repeats become exponents.
  static Monomial from_edges(std::vector<EdgeId> edges);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  std::uint32_t degree() const;
  std::uint32_t exponent_of(EdgeId e) const;
  bool contains(EdgeId e) const { return exponent_of(e) > 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

  std::string to_string() const;

 private:
  std::vector<Factor> factors_;
};

/// Graded reverse lexicographic comparison: <0 if a precedes b in descending
/// canonical order (a is the larger monomial), >0 if after, 0 if equal.
int canonical_compare(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

/// Element of N[X] over edge symbols: a how-provenance polynomial. Terms are
/// kept merged and in canonical order, so equality is structural.
class Polynomial {
 public:
  struct Term {
    Monomial monomial;
    std::uint64_t coefficient = 1;

    friend bool operator==(const Term&, const Term&) = default;
  };

  Polynomial() = default;
  explicit Polynomial(EdgeId e) { terms_.push_back({Monomial(e), 1}); }
  explicit Polynomial(Monomial m, std::uint64_t coefficient = 1) {
    if (coefficient > 0) terms_.push_back({std::move(m), coefficient});
  }

  static Polynomial zero() { return {}; }
  static Polynomial one() { return Polynomial(Monomial{}); }
  /// Sorts and merges arbitrary monomials (each with coefficient 1).
  static Polynomial from_monomials(std::vector<Monomial> monomials);
  /// Inverse of to_string(); throws ParseError.
  static Polynomial parse(std::string_view text);

  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Value under deleted -> 0, every other symbol -> 1, as a boolean:
  /// true iff some monomial avoids the deleted edge.
  bool survives_deletion(EdgeId deleted) const;
  /// Drops every monomial that mentions the deleted edge.
  Polynomial pruned(EdgeId deleted) const;
  bool mentions(EdgeId e) const;

  /// Sorted distinct edge symbols.
  std::vector<EdgeId> edges() const;

  /// Set-of-sets view obtained by dropping coefficients and exponents.
  std::set<std::set<EdgeId>> why_provenance() const;

  /// Image in the idempotent semiring B[X]: exponents and coefficients become 1.
  Polynomial collapsed() const;

  /// this - other; every term of `other` must be covered by this one.
  /// Throws std::logic_error otherwise.
  Polynomial minus(const Polynomial& other) const;

  /// Divides each coefficient by the exponent of `e` in its monomial
  /// (monomials without `e` are left alone). Throws std::logic_error if a
  /// coefficient is not divisible.
  Polynomial divided_by_multiplicity(EdgeId e) const;

  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
bool evaluate_under_deletion(const Polynomial& p, EdgeId deleted);
Polynomial prune_monomials(const Polynomial& p, EdgeId deleted);

}  // namespace provkg
