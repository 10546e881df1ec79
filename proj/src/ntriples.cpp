#include "provkg/ntriples.hpp"

#include <cctype>
#include <fstream>

#include "provkg/errors.hpp"

namespace provkg {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::size_t scan_term(std::string_view text, std::string& term) {
  if (text.empty()) return 0;
  if (text.front() == '<') {
    auto close = text.find('>');
    if (close == std::string_view::npos) return 0;
    term.assign(text.substr(1, close - 1));
    return close + 1;
  }
  if (text.front() == '"') {
    std::size_t i = 1;
    while (i < text.size() && text[i] != '"') {
      if (text[i] == '\\') ++i;
      ++i;
    }
    if (i >= text.size()) return 0;
    ++i;
    // language tag or datatype stays glued to the literal
    while (i < text.size() && !is_space(text[i]) && text[i] != '.' && text[i] != '}') {
      if (text[i] == '<') {
        auto close = text.find('>', i);
        if (close == std::string_view::npos) return 0;
        i = close + 1;
        continue;
      }
      ++i;
    }
    term.assign(text.substr(0, i));
    return i;
  }
  std::size_t i = 0;
  while (i < text.size() && !is_space(text[i]) && text[i] != '{' && text[i] != '}') ++i;
  // a trailing dot terminates the statement rather than belonging to the name
  std::size_t len = i;
  if (len > 1 && text[len - 1] == '.') --len;
  term.assign(text.substr(0, len));
  return len;
}

bool parse_ntriples_line(std::string_view line, std::size_t line_no, Triple& out) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < line.size() && is_space(line[pos])) ++pos;
  };
  skip();
  if (pos == line.size() || line[pos] == '#') return false;

  std::string* slots[3] = {&out.subject, &out.predicate, &out.object};
  for (std::string* slot : slots) {
    skip();
    if (pos == line.size() || line[pos] == '.') {
      throw ParseError("expected subject, predicate and object", line_no, pos + 1);
    }
    std::size_t used = scan_term(line.substr(pos), *slot);
    if (used == 0 || slot->empty()) throw ParseError("malformed term", line_no, pos + 1);
    pos += used;
  }
  skip();
  if (pos == line.size() || line[pos] != '.') {
    throw ParseError("expected '.' after object", line_no, pos + 1);
  }
  ++pos;
  skip();
  if (pos != line.size() && line[pos] != '#') {
    throw ParseError("trailing characters after '.'", line_no, pos + 1);
  }
  return true;
}

std::size_t load_ntriples(std::istream& in, KnowledgeGraph& graph) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t inserted = 0;
  Triple t;
  while (std::getline(in, line)) {
    ++line_no;
    if (!parse_ntriples_line(line, line_no, t)) continue;
    graph.insert_edge(t.subject, t.predicate, t.object);
    ++inserted;
  }
  return inserted;
}

std::size_t load_ntriples_file(const std::string& path, KnowledgeGraph& graph) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_ntriples(in, graph);
}

}  // namespace provkg
