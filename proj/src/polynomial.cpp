#include "provkg/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "provkg/errors.hpp"

namespace provkg {

Monomial Monomial::from_edges(std::vector<EdgeId> edges) {
  std::sort(edges.begin(), edges.end());
  Monomial m;
  for (EdgeId e : edges) {
    if (!m.factors_.empty() && m.factors_.back().first == e) {
      ++m.factors_.back().second;
    } else {
      m.factors_.emplace_back(e, 1);
    }
  }
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

std::uint32_t Monomial::exponent_of(EdgeId e) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), e,
                             [](const Factor& f, EdgeId key) { return f.first < key; });
  return (it != factors_.end() && it->first == e) ? it->second : 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() && j != b.factors_.end()) {
    if (i->first < j->first) {
      out.factors_.push_back(*i++);
    } else if (j->first < i->first) {
      out.factors_.push_back(*j++);
    } else {
      out.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  out.factors_.insert(out.factors_.end(), i, a.factors_.end());
  out.factors_.insert(out.factors_.end(), j, b.factors_.end());
  return out;
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::string s;
  for (const auto& [e, exp] : factors_) {
    if (!s.empty()) s += '*';
    s += 'e';
    s += std::to_string(e.value());
    if (exp > 1) {
      s += '^';
      s += std::to_string(exp);
    }
  }
  return s;
}

int canonical_compare(const Monomial& a, const Monomial& b) {
  std::uint32_t da = a.degree();
  std::uint32_t db = b.degree();
  if (da != db) return da > db ? -1 : 1;
  // Walk from the highest symbol down; at the first difference the monomial
  // with the smaller exponent on that symbol is the larger one.
  auto i = a.factors().rbegin();
  auto j = b.factors().rbegin();
  while (i != a.factors().rend() && j != b.factors().rend()) {
    if (i->first == j->first) {
      if (i->second != j->second) return i->second < j->second ? -1 : 1;
      ++i;
      ++j;
    } else if (i->first > j->first) {
      return 1;  // a has the higher symbol, b has exponent 0 there
    } else {
      return -1;
    }
  }
  if (i != a.factors().rend()) return 1;
  if (j != b.factors().rend()) return -1;
  return 0;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::size_t h = m.factors().size();
  for (const auto& [e, exp] : m.factors()) {
    h = hash_combine(h, e.value());
    h = hash_combine(h, exp);
  }
  return h;
}

namespace {

bool term_before(const Polynomial::Term& a, const Polynomial::Term& b) {
  return canonical_compare(a.monomial, b.monomial) < 0;
}

}  // namespace

Polynomial Polynomial::from_monomials(std::vector<Monomial> monomials) {
  std::sort(monomials.begin(), monomials.end(),
            [](const Monomial& a, const Monomial& b) { return canonical_compare(a, b) < 0; });
  Polynomial p;
  for (auto& m : monomials) {
    if (!p.terms_.empty() && p.terms_.back().monomial == m) {
      ++p.terms_.back().coefficient;
    } else {
      p.terms_.push_back({std::move(m), 1});
    }
  }
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.terms_.empty()) return *this;
  if (terms_.empty()) {
    terms_ = other.terms_;
    return *this;
  }
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto i = terms_.begin();
  auto j = other.terms_.begin();
  while (i != terms_.end() && j != other.terms_.end()) {
    int c = canonical_compare(i->monomial, j->monomial);
    if (c < 0) {
      merged.push_back(std::move(*i++));
    } else if (c > 0) {
      merged.push_back(*j++);
    } else {
      merged.push_back({std::move(i->monomial), i->coefficient + j->coefficient});
      ++i;
      ++j;
    }
  }
  for (; i != terms_.end(); ++i) merged.push_back(std::move(*i));
  merged.insert(merged.end(), j, other.terms_.end());
  terms_ = std::move(merged);
  return *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  out += b;
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  if (a.is_zero() || b.is_zero()) return out;
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      out.terms_.push_back({x.monomial * y.monomial, x.coefficient * y.coefficient});
    }
  }
  if (out.terms_.size() > 1) {
    std::sort(out.terms_.begin(), out.terms_.end(), term_before);
    std::vector<Polynomial::Term> merged;
    merged.reserve(out.terms_.size());
    for (auto& t : out.terms_) {
      if (!merged.empty() && merged.back().monomial == t.monomial) {
        merged.back().coefficient += t.coefficient;
      } else {
        merged.push_back(std::move(t));
      }
    }
    out.terms_ = std::move(merged);
  }
  return out;
}

bool Polynomial::survives_deletion(EdgeId deleted) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return !t.monomial.contains(deleted); });
}

Polynomial Polynomial::pruned(EdgeId deleted) const {
  Polynomial out;
  for (const auto& t : terms_) {
    if (!t.monomial.contains(deleted)) out.terms_.push_back(t);
  }
  return out;
}

bool Polynomial::mentions(EdgeId e) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return t.monomial.contains(e); });
}

std::vector<EdgeId> Polynomial::edges() const {
  std::vector<EdgeId> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.monomial.factors()) out.push_back(f.first);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<std::set<EdgeId>> Polynomial::why_provenance() const {
  std::set<std::set<EdgeId>> out;
  for (const auto& t : terms_) {
    std::set<EdgeId> witness;
    for (const auto& f : t.monomial.factors()) witness.insert(f.first);
    out.insert(std::move(witness));
  }
  return out;
}

Polynomial Polynomial::collapsed() const {
  std::vector<Monomial> monos;
  for (const auto& t : terms_) {
    std::vector<EdgeId> symbols;
    for (const auto& f : t.monomial.factors()) symbols.push_back(f.first);
    monos.push_back(Monomial::from_edges(std::move(symbols)));
  }
  std::sort(monos.begin(), monos.end(),
            [](const Monomial& a, const Monomial& b) { return canonical_compare(a, b) < 0; });
  monos.erase(std::unique(monos.begin(), monos.end()), monos.end());
  Polynomial out;
  for (auto& m : monos) out.terms_.push_back({std::move(m), 1});
  return out;
}

Polynomial Polynomial::minus(const Polynomial& other) const {
  Polynomial out;
  auto j = other.terms_.begin();
  for (const auto& t : terms_) {
    while (j != other.terms_.end() && canonical_compare(j->monomial, t.monomial) < 0) {
      throw std::logic_error("polynomial subtraction would go negative");
    }
    if (j != other.terms_.end() && j->monomial == t.monomial) {
      if (j->coefficient > t.coefficient) {
        throw std::logic_error("polynomial subtraction would go negative");
      }
      if (j->coefficient < t.coefficient) {
        out.terms_.push_back({t.monomial, t.coefficient - j->coefficient});
      }
      ++j;
    } else {
      out.terms_.push_back(t);
    }
  }
  if (j != other.terms_.end()) throw std::logic_error("polynomial subtraction would go negative");
  return out;
}

Polynomial Polynomial::divided_by_multiplicity(EdgeId e) const {
  Polynomial out = *this;
  for (auto& t : out.terms_) {
    std::uint32_t k = t.monomial.exponent_of(e);
    if (k <= 1) continue;
    if (t.coefficient % k != 0) throw std::logic_error("coefficient not divisible by multiplicity");
    t.coefficient /= k;
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += " + ";
    if (t.monomial.is_one()) {
      s += std::to_string(t.coefficient);
      continue;
    }
    if (t.coefficient > 1) {
      s += std::to_string(t.coefficient);
      s += '*';
    }
    s += t.monomial.to_string();
  }
  return s;
}

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  Polynomial parse() {
    skip();
    if (peek() == '0' && rest_is_single_zero()) return {};
    std::vector<Polynomial::Term> terms;
    Polynomial result;
    while (true) {
      result += parse_term();
      skip();
      if (pos_ == text_.size()) break;
      expect('+');
    }
    return result;
  }

 private:
  bool rest_is_single_zero() {
    std::size_t save = pos_;
    ++pos_;
    skip();
    bool only = pos_ == text_.size();
    pos_ = save;
    if (only) pos_ = text_.size();
    return only;
  }

  Polynomial parse_term() {
    std::uint64_t coefficient = 1;
    std::vector<EdgeId> symbols;
    while (true) {
      skip();
      char c = peek();
      if (c == 'e') {
        ++pos_;
        std::uint64_t id = number();
        std::uint64_t exp = 1;
        skip();
        if (peek() == '^') {
          ++pos_;
          skip();
          exp = number();
          if (exp == 0) fail("exponent must be positive");
        }
        for (std::uint64_t k = 0; k < exp; ++k) symbols.emplace_back(id);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::uint64_t k = number();
        if (k == 0) fail("zero coefficient");
        coefficient *= k;
      } else {
        fail("expected edge symbol or coefficient");
      }
      skip();
      if (peek() != '*') break;
      ++pos_;
    }
    return Polynomial(Monomial::from_edges(std::move(symbols)), coefficient);
  }

  std::uint64_t number() {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(std::string_view text) { return PolyParser(text).parse(); }

Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return a + b; }
Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }
bool evaluate_under_deletion(const Polynomial& p, EdgeId deleted) {
  return p.survives_deletion(deleted);
}
Polynomial prune_monomials(const Polynomial& p, EdgeId deleted) { return p.pruned(deleted); }

}  // namespace provkg
