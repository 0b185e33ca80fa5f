#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cst {

/// Ordered `key = value` record used for sidecar files and model descriptors.
class Provenance {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, long value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, unsigned long value);
  void set(const std::string& key, unsigned long long value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::vector<double>& values);
  void set(const std::string& key, const Eigen::VectorXd& values);
  void set(const std::string& key, const std::vector<std::string>& values);

  /// Copies every entry of `other` under `prefix.`.
  void merge(const std::string& prefix, const Provenance& other);

  const std::string* find(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace cst
