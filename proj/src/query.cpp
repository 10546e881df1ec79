#include "provkg/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <set>

#include "provkg/errors.hpp"
#include "provkg/ntriples.hpp"

namespace provkg {

std::vector<std::size_t> Classification::multimap_patterns() const {
  std::set<std::size_t> all;
  for (const auto& g : shared_groups) all.insert(g.begin(), g.end());
  return {all.begin(), all.end()};
}

std::uint32_t QueryGraph::add_variable(std::string_view name) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == name) return static_cast<std::uint32_t>(i);
  }
  variables.emplace_back(name);
  return static_cast<std::uint32_t>(variables.size() - 1);
}

std::uint32_t QueryGraph::add_constant(std::string_view text) {
  for (std::size_t i = 0; i < constants.size(); ++i) {
    if (constants[i] == text) return static_cast<std::uint32_t>(i);
  }
  constants.emplace_back(text);
  return static_cast<std::uint32_t>(constants.size() - 1);
}

const std::string& QueryGraph::text(const Term& t) const {
  return t.is_variable() ? variables.at(t.id) : constants.at(t.id);
}

std::string QueryGraph::term_string(const Term& t) const {
  return t.is_variable() ? "?" + variables.at(t.id) : constants.at(t.id);
}

std::vector<std::uint32_t> QueryGraph::variables_in(const std::vector<std::size_t>& subset) const {
  std::vector<std::uint32_t> out;
  auto note = [&](const Term& t) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.id) == out.end()) out.push_back(t.id);
  };
  for (std::size_t i : subset) {
    note(patterns[i].subject);
    note(patterns[i].predicate);
    note(patterns[i].object);
  }
  return out;
}

bool QueryGraph::connected(const std::vector<std::size_t>& subset) const {
  if (subset.size() <= 1) return true;
  std::vector<bool> reached(subset.size(), false);
  std::vector<bool> var_seen(variables.size(), false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  std::size_t count = 1;
  auto vars_of = [&](std::size_t k) {
    const auto& p = patterns[subset[k]];
    std::array<Term, 3> terms{p.subject, p.predicate, p.object};
    return terms;
  };
  while (!stack.empty()) {
    std::size_t k = stack.back();
    stack.pop_back();
    for (const Term& t : vars_of(k)) {
      if (!t.is_variable() || var_seen[t.id]) continue;
      var_seen[t.id] = true;
      for (std::size_t j = 0; j < subset.size(); ++j) {
        if (reached[j]) continue;
        for (const Term& u : vars_of(j)) {
          if (u == t) {
            reached[j] = true;
            ++count;
            stack.push_back(j);
            break;
          }
        }
      }
    }
  }
  return count == subset.size();
}

bool QueryGraph::connected() const {
  std::vector<std::size_t> all(patterns.size());
  std::iota(all.begin(), all.end(), 0);
  return connected(all);
}

bool QueryGraph::has_variable_predicate() const {
  return std::any_of(patterns.begin(), patterns.end(),
                     [](const TriplePattern& p) { return p.predicate.is_variable(); });
}

namespace {

const std::array<std::string_view, 19> kUnsupported = {
    "OPTIONAL", "FILTER", "UNION",  "MINUS",   "BIND",  "VALUES",    "SERVICE",
    "GRAPH",    "ORDER",  "GROUP",  "LIMIT",   "OFFSET", "HAVING",   "PREFIX",
    "BASE",     "ASK",    "CONSTRUCT", "DESCRIBE", "FROM"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_keyword(std::string_view word) {
  std::string u = upper(word);
  if (u == "SELECT" || u == "WHERE" || u == "DISTINCT" || u == "REDUCED") return true;
  return std::find(kUnsupported.begin(), kUnsupported.end(), u) != kUnsupported.end();
}

struct Token {
  enum class Kind { End, Punct, Variable, Term };
  Kind kind = Kind::End;
  std::string text;
  bool bracketed = false;  // <...> IRI; never a keyword
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.column = pos_ - line_start_ + 1;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == '{' || c == '}' || c == '.' || c == '*' || c == '(' || c == ')' || c == ',' ||
        c == ';') {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      ++pos_;
      return t;
    }
    if (c == '?' || c == '$') {
      std::size_t start = ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      if (pos_ == start) throw ParseError("empty variable name", t.line, t.column);
      t.kind = Token::Kind::Variable;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    std::string term;
    std::size_t used = scan_term(text_.substr(pos_), term);
    if (used == 0 || term.empty()) throw ParseError("malformed term", t.line, t.column);
    t.kind = Token::Kind::Term;
    t.bracketed = c == '<';
    t.text = std::move(term);
    pos_ += used;
    return t;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        line_start_ = ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : lexer_(text) { advance(); }

  QueryGraph parse() {
    QueryGraph q;
    reject_keyword(cur_);
    expect_word("SELECT");
    if (is_word("DISTINCT") || is_word("REDUCED")) {
      q.distinct = true;
      advance();
    }
    std::vector<std::pair<std::string, Token>> projected;
    if (is_punct("*")) {
      q.select_all = true;
      advance();
    } else {
      while (cur_.kind == Token::Kind::Variable) {
        projected.emplace_back(cur_.text, cur_);
        advance();
      }
      if (is_punct("(")) throw UnsupportedFeatureError("expressions and aggregates in SELECT");
      if (cur_.kind == Token::Kind::Term && !cur_.bracketed &&
          cur_.text.find('(') != std::string::npos) {
        throw UnsupportedFeatureError("aggregate " + cur_.text);
      }
      if (projected.empty()) fail("expected '*' or a projection variable");
    }
    reject_keyword(cur_);
    if (is_word("WHERE")) advance();
    if (!is_punct("{")) fail("expected '{'");
    advance();

    while (!is_punct("}")) {
      if (cur_.kind == Token::Kind::End) fail("unterminated group, expected '}'");
      if (is_punct("{")) throw UnsupportedFeatureError("nested group patterns");
      TriplePattern p;
      p.subject = term(q);
      p.predicate = term(q, true);
      p.object = term(q);
      q.patterns.push_back(p);
      if (is_punct(";") || is_punct(",")) {
        throw UnsupportedFeatureError("predicate-object list shorthand");
      }
      if (is_punct(".")) {
        advance();
      } else if (!is_punct("}")) {
        fail("expected '.' or '}'");
      }
    }
    advance();
    if (cur_.kind != Token::Kind::End) {
      reject_keyword(cur_);
      fail("unexpected text after '}'");
    }

    if (q.patterns.empty()) throw ParseError("empty group pattern", 1, 1);
    for (const auto& [name, tok] : projected) {
      auto it = std::find(q.variables.begin(), q.variables.end(), name);
      if (it == q.variables.end()) {
        throw ParseError("projection variable ?" + name + " does not occur in the pattern",
                         tok.line, tok.column);
      }
      auto id = static_cast<std::uint32_t>(it - q.variables.begin());
      if (std::find(q.projection.begin(), q.projection.end(), id) == q.projection.end()) {
        q.projection.push_back(id);
      }
    }
    if (q.select_all) {
      q.projection.resize(q.variables.size());
      std::iota(q.projection.begin(), q.projection.end(), 0u);
    }
    if (!q.connected()) {
      throw DisconnectedQueryError("query patterns are not connected through shared variables");
    }
    return q;
  }

 private:
  Term term(QueryGraph& q, bool predicate_position = false) {
    if (cur_.kind == Token::Kind::Variable) {
      Term t = Term::variable(q.add_variable(cur_.text));
      advance();
      return t;
    }
    if (cur_.kind != Token::Kind::Term) {
      if (cur_.kind == Token::Kind::End) fail("unexpected end of query");
      fail("expected a term, found '" + cur_.text + "'");
    }
    reject_keyword(cur_);
    if (predicate_position && !cur_.bracketed && cur_.text.front() != '"') {
      const std::string& s = cur_.text;
      char last = s.back();
      if (last == '+' || last == '*' || last == '?' || s.front() == '^' ||
          s.find('|') != std::string::npos) {
        throw UnsupportedFeatureError("property path " + s);
      }
    }
    Term t = Term::constant(q.add_constant(cur_.text));
    advance();
    return t;
  }

  void reject_keyword(const Token& t) {
    if (t.kind != Token::Kind::Term || t.bracketed) return;
    std::string word = t.text.substr(0, t.text.find('('));
    std::string u = upper(word);
    if (std::find(kUnsupported.begin(), kUnsupported.end(), u) != kUnsupported.end()) {
      throw UnsupportedFeatureError(u + " is not supported");
    }
    static const std::array<std::string_view, 7> kAggregates = {"COUNT", "SUM", "MIN", "MAX",
                                                                "AVG", "SAMPLE", "GROUP_CONCAT"};
    if (t.text.find('(') != std::string::npos &&
        std::find(kAggregates.begin(), kAggregates.end(), u) != kAggregates.end()) {
      throw UnsupportedFeatureError("aggregate " + u);
    }
  }

  bool is_punct(std::string_view p) const {
    return cur_.kind == Token::Kind::Punct && cur_.text == p;
  }
  bool is_word(std::string_view w) const {
    return cur_.kind == Token::Kind::Term && !cur_.bracketed && upper(cur_.text) == w;
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected " + std::string(w));
    advance();
  }
  void advance() { cur_ = lexer_.next(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, cur_.line, cur_.column);
  }

  Lexer lexer_;
  Token cur_;
};

bool needs_brackets(const std::string& s) {
  if (s.empty()) return true;
  if (s.front() == '"') return false;
  if (s.front() == '?' || s.front() == '$' || s.front() == '<' || s.front() == '#') return true;
  if (s.back() == '.' || s == "*" || is_keyword(s)) return true;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}' || c == '(' ||
        c == ')' || c == ',' || c == ';' || c == '>' || c == '|' || c == '+' || c == '*') {
      return true;
    }
  }
  return false;
}

}  // namespace

QueryGraph parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::string render_constant(const std::string& text) {
  return needs_brackets(text) ? "<" + text + ">" : text;
}

QueryGraph make_query(const std::vector<std::array<std::string, 3>>& patterns,
                      const std::vector<std::string>& projection) {
  QueryGraph q;
  auto term = [&](const std::string& s) {
    if (!s.empty() && s.front() == '?') return Term::variable(q.add_variable(s.substr(1)));
    return Term::constant(q.add_constant(s));
  };
  for (const auto& p : patterns) {
    TriplePattern tp;
    tp.subject = term(p[0]);
    tp.predicate = term(p[1]);
    tp.object = term(p[2]);
    q.patterns.push_back(tp);
  }
  if (projection.empty()) {
    q.select_all = true;
    q.projection.resize(q.variables.size());
    std::iota(q.projection.begin(), q.projection.end(), 0u);
  } else {
    for (const auto& v : projection) {
      std::string name = (!v.empty() && v.front() == '?') ? v.substr(1) : v;
      auto it = std::find(q.variables.begin(), q.variables.end(), name);
      if (it == q.variables.end()) throw Error("projection variable ?" + name + " not in query");
      q.projection.push_back(static_cast<std::uint32_t>(it - q.variables.begin()));
    }
  }
  return q;
}

std::string pretty_print(const QueryGraph& q) {
  auto term = [&](const Term& t) {
    if (t.is_variable()) return "?" + q.variables[t.id];
    return render_constant(q.constants[t.id]);
  };
  std::string out = "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  if (q.select_all) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < q.projection.size(); ++i) {
      if (i > 0) out += ' ';
      out += "?" + q.variables[q.projection[i]];
    }
  }
  out += " WHERE {";
  for (const auto& p : q.patterns) {
    out += ' ';
    out += term(p.subject);
    out += ' ';
    out += term(p.predicate);
    out += ' ';
    out += term(p.object);
    out += " .";
  }
  out += " }";
  return out;
}

}  // namespace provkg
