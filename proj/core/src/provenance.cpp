#include "cst/provenance.hpp"

#include "cst/csv.hpp"

namespace cst {

void Provenance::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Provenance::set(const std::string& key, double value) { set(key, format_double(value)); }
void Provenance::set(const std::string& key, int value) { set(key, std::to_string(value)); }
void Provenance::set(const std::string& key, long value) { set(key, std::to_string(value)); }
void Provenance::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Provenance::set(const std::string& key, unsigned long value) { set(key, std::to_string(value)); }
void Provenance::set(const std::string& key, unsigned long long value) {
  set(key, std::to_string(value));
}
void Provenance::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void Provenance::set(const std::string& key, const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  set(key, out);
}

void Provenance::set(const std::string& key, const Eigen::VectorXd& values) {
  set(key, std::vector<double>(values.data(), values.data() + values.size()));
}

void Provenance::set(const std::string& key, const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += values[i];
  }
  set(key, out);
}

void Provenance::merge(const std::string& prefix, const Provenance& other) {
  for (const auto& [k, v] : other.entries_) set(prefix + "." + k, v);
}

const std::string* Provenance::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

std::string Provenance::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void Provenance::write(const std::filesystem::path& path) const { write_text_file(path, to_string()); }

}  // namespace cst
