#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cst/provenance.hpp"
#include "cst/spectral.hpp"

namespace cst {

struct DiffusionFamily {};

struct HannFamily {
  double R = 3.0;
  bool warp = true;
};

struct MonicFamily {
  double alpha = 2.0;
  double beta = 2.0;
  double K = 20.0;
};

using KernelFamily = std::variant<DiffusionFamily, HannFamily, MonicFamily>;

std::string family_name(const KernelFamily& family);
KernelFamily parse_family(const std::string& name);

/// γ = (1/2)^{1/2^{J−2}}, the value that puts the coarsest diffusion peak at λ = γ.
double diffusion_gamma(int J);

/// Operator scale used when the caller does not override it.
double default_gamma(const KernelFamily& family, int J);

/// J kernels of one family, tuned to a particular operator spectrum.
///
/// Kernel index i runs over 0…J−1. For Hann the i-th kernel is the translate
/// t_{i+1}; for monic it is the scale t_{i+1}.
struct Filterbank {
  KernelFamily family;
  int J = 0;
  double gamma = 1.0;
  double lambda_max = 0.0;

  // Hann
  std::vector<double> translations;
  double hann_width = 0.0;
  double warp_offset = 0.0;

  // Monic
  std::vector<double> scales;
  double knee_low = 0.0;
  double knee_high = 0.0;
  std::array<double, 4> cubic{};  // s(u) = c0 + c1 u + c2 u² + c3 u³, u ∈ [0, 1] across the knees

  double frame_lower = 0.0;
  double frame_upper = 0.0;
  double spectral_frame_lower = 0.0;
  double spectral_frame_upper = 0.0;
  std::vector<double> lipschitz;

  /// h_j(λ) for λ ∈ [0, γ].
  double eval(int j, double lambda) const;
  /// G(λ) = Σ_j h_j(λ)².
  double frame_function(double lambda) const;
  Provenance describe() const;
};

double kernel_eval(const Filterbank& bank, int j, double lambda);

Filterbank build_filterbank(const WaveletOperator& op, const KernelFamily& family, int J);

struct WaveletMatrixSet {
  std::vector<Eigen::MatrixXd> matrices;
  KernelFamily family;
  WaveletOperator op;

  int count() const { return static_cast<int>(matrices.size()); }
};

WaveletMatrixSet wavelet_matrices(const Filterbank& bank, const WaveletOperator& op);

/// H_j x computed as T^{2^{j−1}}x − T^{2^j}x (h_0: x − Tx) with matrix–vector
/// products only.
Eigen::VectorXd diffusion_apply(const Eigen::MatrixXd& op, int j, const Eigen::VectorXd& x);

/// All J diffusion responses for one signal, sharing the dyadic powers.
std::vector<Eigen::VectorXd> diffusion_apply_all(const Eigen::MatrixXd& op, int J,
                                                 const Eigen::VectorXd& x);

struct LocalizationProfile {
  Eigen::VectorXd response;        // H_j δ_a
  Eigen::VectorXd distance_low;    // d^{s₀}(a, b) = |[T^{s₀}]_{ab}|^{-1}
  Eigen::VectorXd distance_high;   // d^{s₁}(a, b)
  Eigen::VectorXd bound;           // 1/d^{s₀} + 1/d^{s₁}
  bool bound_holds = true;
};

/// Response of scale j centred on feature a, with the diffusion-distance bound
/// (s₀, s₁) = (2^{j−1}, 2^j), or (0, 1) for j = 0. The bound is only
/// guaranteed for the diffusion family; other families report the comparison.
LocalizationProfile localization_profile(const WaveletMatrixSet& set, Eigen::Index center, int j);

}  // namespace cst
