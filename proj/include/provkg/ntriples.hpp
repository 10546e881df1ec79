#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "provkg/graph.hpp"

namespace provkg {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
};

/// Splits one N-Triples-subset line into (s, p, o). Returns false for blank
/// and `#` comment lines. IRIs lose their angle brackets; literals keep their
/// quotes. Throws ParseError on anything else.
bool parse_ntriples_line(std::string_view line, std::size_t line_no, Triple& out);

/// Appends every triple of the stream to the graph in file order.
/// Returns the number of edges inserted.
std::size_t load_ntriples(std::istream& in, KnowledgeGraph& graph);
std::size_t load_ntriples_file(const std::string& path, KnowledgeGraph& graph);

/// Splits a term token off the front of `text`; shared with the query parser.
/// Returns the token length consumed, 0 if text does not start a term.
std::size_t scan_term(std::string_view text, std::string& term);

}  // namespace provkg
