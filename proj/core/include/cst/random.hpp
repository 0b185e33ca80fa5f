#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace cst {

/// Derives an independent child seed from a parent seed and a purpose label,
/// so each consumer of randomness gets its own stream and adding a consumer
/// never shifts another one.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view label) {
  return Rng(derive_seed(seed, label));
}

Eigen::MatrixXd standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index size);

}  // namespace cst
