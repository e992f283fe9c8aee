#include "cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nef::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<double> parse_column(const std::string& text, const std::string& source) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view cell = trim(line);
    if (line_no == 1 && cell.size() >= 3 &&
        cell.substr(0, 3) == "\xEF\xBB\xBF") {
      cell = trim(cell.substr(3));
    }
    if (cell.empty() || cell.front() == '#') continue;
    if (cell.find(',') != std::string_view::npos) {
      throw InputError(source + ":" + std::to_string(line_no) +
                       ": expected a single column");
    }
    double v = 0.0;
    if (parse_double(cell, v)) {
      values.push_back(v);
      continue;
    }
    if (values.empty() && !header_seen) {
      header_seen = true;
      continue;
    }
    throw InputError(source + ":" + std::to_string(line_no) + ": not a number: '" +
                     std::string(cell) + "'");
  }
  if (values.empty()) throw InputError(source + ": no numeric rows");
  return values;
}

std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_column(buf.str(), path);
}

std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw InputError("--prices needs at least two rows");
  std::vector<double> out;
  out.reserve(prices.size() - 1);
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0)) throw InputError("--prices: prices must be positive");
    if (t > 0) out.push_back(std::log(prices[t] / prices[t - 1]));
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    double v = 0.0;
    if (!parse_double(rest.substr(0, comma), v)) {
      throw InputError("bad number list: '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const Json& meta, const std::vector<std::string>& header) {
  text_ = "# " + meta.dump() + "\n";
  row(header);
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) text_ += ',';
    text_ += fmt(v);
    first = false;
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

}  // namespace nef::cli
