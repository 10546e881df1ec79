#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "provkg/engine.hpp"
#include "provkg/ntriples.hpp"
#include "provkg/oracle.hpp"
#include "provkg/query.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(PROVKG_TEST_DATA) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void load_fig1(provkg::KnowledgeGraph& g) { provkg::load_ntriples_file(data_path("fig1.nt"), g); }

inline provkg::QueryGraph running_query() { return provkg::parse_query(read_file(data_path("running_example.rq"))); }

inline provkg::NodeId node(const provkg::KnowledgeGraph& g, const std::string& name) { return *g.find_node(name); }

inline provkg::PredicateId pred(const provkg::KnowledgeGraph& g, const std::string& name) {
  return *g.find_predicate(name);
}

inline provkg::EdgeId e(std::uint64_t id) { return provkg::EdgeId(id); }

/// Bindings of a projected row as names.
inline std::vector<std::string> names(const provkg::KnowledgeGraph& g, const provkg::Row& row) {
  std::vector<std::string> out;
  for (auto n : row) out.push_back(g.node_name(n));
  return out;
}

}  // namespace testing
