#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <cstdint>
#include <string>
#include <vector>

#include "kmplab/graph.hpp"

namespace kmplab {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, "." decimal separator.
std::string format_real(double x);

/// Comma-separated writer with a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::size_t k = 0;
    ((out_ << (k++ ? "," : "") << cell(fields)), ...);
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  static std::string cell(double x) { return format_real(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
  static std::string cell(I x) requires std::is_integral_v<I> { return std::to_string(x); }

  std::filesystem::path path_;
  std::ofstream out_;
};

/// Graph text format, one directive per line, '#' starts a comment:
///   vertices N
///   boundary v1 v2 ...
///   temp v T
///   edge i j
Graph parse_graph_text(std::istream& in, TemperaturePolicy policy = TemperaturePolicy::positive);
Graph load_graph(const std::filesystem::path& path, TemperaturePolicy policy = TemperaturePolicy::positive);
void write_graph_text(std::ostream& out, const Graph& g);

/// Flat "key = value" lines; '#' comments, blank lines ignored, duplicate
/// keys rejected.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

/// Comma-separated lists.
std::vector<double> parse_real_list(const std::string& s);
std::vector<std::uint64_t> parse_uint_list(const std::string& s);

}  // namespace kmplab
