#include "cst/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cst/error.hpp"

namespace cst {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  return value;
}

CsvTable parse_csv_table(std::string_view text) {
  const auto lines = split_lines(text);
  require(!lines.empty(), ErrorCode::ParseError, "empty CSV input");
  CsvTable table;
  for (auto cell : split_line(lines[0])) table.header.emplace_back(cell);
  const auto cols = static_cast<Eigen::Index>(table.header.size());
  table.rows.resize(static_cast<Eigen::Index>(lines.size()) - 1, cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (static_cast<Eigen::Index>(cells.size()) != cols)
      fail(ErrorCode::ParseError, "row " + std::to_string(r + 1) + ": expected " +
                                      std::to_string(cols) + " cells, found " +
                                      std::to_string(cells.size()));
    for (Eigen::Index c = 0; c < cols; ++c) {
      try {
        table.rows(static_cast<Eigen::Index>(r) - 1, c) = parse_double(cells[static_cast<std::size_t>(c)]);
      } catch (const Error&) {
        fail(ErrorCode::ParseError, "row " + std::to_string(r + 1) + ", column " +
                                        std::to_string(c + 1) + " (" + table.header[static_cast<std::size_t>(c)] +
                                        "): non-numeric cell '" +
                                        std::string(cells[static_cast<std::size_t>(c)]) + "'");
      }
    }
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  require(static_cast<bool>(out), ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  try {
    return parse_csv_table(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

std::string format_csv_table(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) out += ',';
    out += table.header[c];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < table.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.rows.cols(); ++c) {
      if (c) out += ',';
      out += format_double(table.rows(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_csv_table(const std::filesystem::path& path, const CsvTable& table) {
  write_text_file(path, format_csv_table(table));
}

std::string format_text_table(const TextTable& table) {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + '\n';
  };
  std::string out = join(table.header);
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), ErrorCode::ShapeError, "ragged report row");
    out += join(row);
  }
  return out;
}

void write_text_table(const std::filesystem::path& path, const TextTable& table) {
  write_text_file(path, format_text_table(table));
}

DataMatrix read_data_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_table(path);
  return make_data_matrix(table.rows.transpose(), table.header);
}

void write_data_csv(const std::filesystem::path& path, const DataMatrix& data) {
  CsvTable table;
  table.header = data.feature_names;
  if (table.header.empty())
    for (Eigen::Index i = 0; i < data.features(); ++i) table.header.push_back("f" + std::to_string(i));
  table.rows = data.values.transpose();
  write_csv_table(path, table);
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_table(path);
  require(table.rows.cols() == 1, ErrorCode::ShapeError,
          path.string() + ": expected a single column");
  require(table.rows.allFinite(), ErrorCode::InvalidData, path.string() + ": non-finite value");
  return table.rows.col(0);
}

void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& values) {
  write_csv_table(path, CsvTable{{name}, values});
}

}  // namespace cst
