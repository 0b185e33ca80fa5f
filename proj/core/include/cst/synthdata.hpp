#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "cst/provenance.hpp"
#include "cst/spectral.hpp"

namespace cst {

struct SynthSpec {
  int N = 20;
  int T = 1000;
  double tail = 0.5;
  std::optional<double> effective_rank;  // defaults to N/4
  double tail_rate = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;

  double rank() const;
  void validate() const;
  Provenance describe() const;
};

/// λ_i = (1 − tail)·exp(−(i/ν)²) + tail·exp(−rate·i/ν), i = 0…N−1.
Eigen::VectorXd synth_profile(int N, double tail, double effective_rank, double tail_rate);

struct SynthDataset {
  DataMatrix data;
  Eigen::VectorXd targets;
  Eigen::MatrixXd true_cov;
  Eigen::VectorXd true_weights;
};

SynthDataset synth_generate(const SynthSpec& spec);

}  // namespace cst
