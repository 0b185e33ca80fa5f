#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "cst/error.hpp"
#include "cst/random.hpp"
#include "cst/spectral.hpp"

namespace cst::fixtures {

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::MatrixXd a = standard_normal(rng, n, n + 2);
  Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(n + 2);
  s.diagonal().array() += 1e-3;
  return 0.5 * (s + s.transpose());
}

inline Eigen::VectorXd random_unit(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v = standard_normal(rng, n);
  return v / v.norm();
}

inline DataMatrix random_data(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
  Rng rng(seed);
  return make_data_matrix(standard_normal(rng, n, t));
}

/// Data whose columns are correlated through a random mixing matrix.
inline DataMatrix mixed_data(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::MatrixXd mix = standard_normal(rng, n, n);
  return make_data_matrix(mix * standard_normal(rng, n, t));
}

/// Code of the cst::Error thrown by `fn`; records a failure if nothing is thrown.
template <class F>
ErrorCode error_code(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace cst::fixtures
