#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cst/spectral.hpp"
#include "cst/wavelets.hpp"

namespace cst {

struct BoundConstants {
  double Q = 1.0;
  double G = 1.0;
  double k_max = 1.0;
  double epsilon = 1.0;
  double u = 1.0;

  void validate() const;
};

/// max_j sqrt(max(0, mean_t ‖x_t x_tᵀ v_j‖² − w_j²)) using the samples as
/// given (callers centre them when the mean is not zero).
double estimate_kmax(const DataMatrix& data, const SpectralDecomposition& decomposition);

/// Leading term of the wavelet stability bound:
/// (P·N/√T)·(k_max·e^{ε/2} + (2·Q·G·γ·‖C‖/w₁)·√(log N + u)).
double wavelet_delta(double P, Eigen::Index N, Eigen::Index T, const BoundConstants& constants,
                     double gamma, double cov_norm, double w1);

/// Probability attached to wavelet_delta: (1 − e^{−ε})(1 − 2e^{−u}).
double wavelet_delta_probability(const BoundConstants& constants);

/// lhs = |‖H_j x_p‖² − τ‖x_p‖²| against (Δ·B^{ℓ−1}·‖x‖)²·((ℓ+1)·B + ℓ·τ).
bool pruning_preserved(double lhs, int layer, double delta, double B, double tau, double x_norm);

/// Margin form on norms: lhs = |‖H_j x_p‖ − τ‖x_p‖| for a parent at layer ℓ,
/// against Δ·B^{ℓ−1}·‖x‖·((ℓ+1)·B + ℓ·τ). When true, the keep/prune decision
/// for that child is identical under both operators.
bool pruning_preserved_margin(double lhs, int layer, double delta, double B, double tau, double x_norm);

/// B_U·Δ·‖x‖·sqrt(Σ_{ℓ=1}^{L−1} ℓ²·B^{2ℓ−2}·F_ℓ). `counts` holds F_1…F_{L−1}.
double cst_stability_bound(double delta, double B, double B_U, double x_norm,
                           const std::vector<std::int64_t>& counts, int L);

/// B_U·‖δ‖·sqrt(Σ_{ℓ=0}^{L−1} F_ℓ·B^{2ℓ}). `counts` holds F_0…F_{L−1}.
double signal_stability_bound(double B, double B_U, double delta_norm,
                              const std::vector<std::int64_t>& counts, int L);

struct GapScale {
  double value = 0.0;
  bool degenerate = false;
};

/// (min_{i≠j≤k} |w_i − w_j|)^{−1}; infinite and flagged when two of the top k coincide.
GapScale pca_gap_scale(const Eigen::VectorXd& eigenvalues, int k);

/// Largest singular value of a symmetric matrix.
double spectral_norm(const Eigen::MatrixXd& symmetric);

/// max_j ‖H_j(a) − H_j(b)‖₂ over two matrix sets of equal size.
double measured_wavelet_delta(const WaveletMatrixSet& a, const WaveletMatrixSet& b);

}  // namespace cst
