#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nef::cli {

using Json = nlohmann::ordered_json;

// Bad input file, flag value or configuration (exit code 2).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// One numeric column, optional single header row. Blank lines and
/// '#' comment lines are skipped.
std::vector<double> read_column(const std::string& path);
std::vector<double> parse_column(const std::string& text, const std::string& source);

/// y_t = log(P_t / P_{t-1}); prices must be positive.
std::vector<double> log_returns(std::span<const double> prices);

/// "30,50,500" -> {30, 50, 500}
std::vector<double> parse_number_list(const std::string& text);

void write_file(const std::string& path, const std::string& content);

/// Shortest round-trip representation, as in the JSON output.
std::string fmt(double v);

/// CSV text: a '#'-prefixed metadata line, a header row, then rows.
class CsvWriter {
 public:
  CsvWriter(const Json& meta, const std::vector<std::string>& header);
  void row(std::initializer_list<double> values);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace nef::cli
