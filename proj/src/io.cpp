#include "kmplab/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace kmplab {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

namespace {

std::string strip(const std::string& s) {
  const auto hash = s.find('#');
  std::string t = s.substr(0, hash);
  const auto b = t.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = t.find_last_not_of(" \t\r");
  return t.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw IoError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Graph parse_graph_text(std::istream& in, TemperaturePolicy policy) {
  std::size_t n = 0;
  bool have_n = false;
  std::set<VertexId> boundary;
  std::map<VertexId, double> temps;
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    std::istringstream ss(s);
    std::string word;
    ss >> word;
    if (word == "vertices") {
      if (!(ss >> n) || n == 0) bad_line(line, "expected a positive vertex count");
      have_n = true;
    } else if (word == "boundary") {
      VertexId v;
      while (ss >> v) boundary.insert(v);
      if (!ss.eof()) bad_line(line, "bad boundary vertex id");
    } else if (word == "temp") {
      VertexId v;
      double t;
      if (!(ss >> v >> t)) bad_line(line, "expected 'temp <vertex> <value>'");
      if (!temps.emplace(v, t).second) bad_line(line, "temperature given twice");
    } else if (word == "edge") {
      Edge e;
      if (!(ss >> e.first >> e.second)) bad_line(line, "expected 'edge <i> <j>'");
      edges.push_back(e);
    } else {
      bad_line(line, "unknown directive '" + word + "'");
    }
    std::string rest;
    if (ss >> rest) bad_line(line, "trailing text '" + rest + "'");
  }
  if (!have_n) throw IoError("graph text has no 'vertices' line");
  std::vector<VertexId> vertices(n);
  std::vector<VertexId> interior;
  for (VertexId v = 0; v < n; ++v) {
    vertices[v] = v;
    if (!boundary.contains(v)) interior.push_back(v);
  }
  for (VertexId b : boundary) {
    if (b >= n) throw IoError("boundary vertex " + std::to_string(b) + " out of range");
  }
  return build_graph(vertices, interior, edges, temps, policy);
}

Graph load_graph(const std::filesystem::path& path, TemperaturePolicy policy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path.string());
  return parse_graph_text(in, policy);
}

void write_graph_text(std::ostream& out, const Graph& g) {
  out << "vertices " << g.vertex_count() << '\n';
  out << "boundary";
  for (VertexId b : g.boundary()) out << ' ' << b;
  out << '\n';
  for (VertexId b : g.boundary()) out << "temp " << b << ' ' << format_real(g.temperatures()[b]) << '\n';
  for (const Edge& e : g.edges()) out << "edge " << e.first << ' ' << e.second << '\n';
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad_line(line, "expected 'key = value'");
    const std::string key = strip(s.substr(0, eq));
    const std::string value = strip(s.substr(eq + 1));
    if (key.empty()) bad_line(line, "empty key");
    if (!kv.emplace(key, value).second) bad_line(line, "duplicate key '" + key + "'");
  }
  return kv;
}

std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_key_values(in);
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    if (strip(item.substr(used)).size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_uint_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = strip(item);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("not a nonnegative integer: '" + item + "'");
    }
    out.push_back(std::stoull(t));
  }
  return out;
}

}  // namespace kmplab
