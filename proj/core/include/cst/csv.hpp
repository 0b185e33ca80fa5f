#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cst/spectral.hpp"

namespace cst {

/// A numeric table with a header row. `rows` holds one CSV row per matrix row.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd rows;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

CsvTable parse_csv_table(std::string_view text);
CsvTable read_csv_table(const std::filesystem::path& path);
std::string format_csv_table(const CsvTable& table);
void write_csv_table(const std::filesystem::path& path, const CsvTable& table);

/// Table with arbitrary (already formatted) cells, used for reports.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_text_table(const TextTable& table);
void write_text_table(const std::filesystem::path& path, const TextTable& table);

/// Observation files are row-major (one observation per line) and are
/// transposed into the N×T layout on read.
DataMatrix read_data_csv(const std::filesystem::path& path);
void write_data_csv(const std::filesystem::path& path, const DataMatrix& data);

/// Single-column file with a header line.
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& values);

/// Throws IoError when the file cannot be opened or written.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cst
