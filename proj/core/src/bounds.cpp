#include "cst/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cst/error.hpp"

namespace cst {
namespace {

constexpr double kGapTol = 1e-12;

}  // namespace

void BoundConstants::validate() const {
  require(Q > 0 && k_max >= 0 && epsilon > 0 && u > 0, ErrorCode::InvalidArgument,
          "bound constants must be positive");
  require(G >= 1, ErrorCode::InvalidArgument, "G must be at least 1");
}

double estimate_kmax(const DataMatrix& data, const SpectralDecomposition& decomposition) {
  require(data.samples() >= 2, ErrorCode::InsufficientSamples, "need at least 2 samples");
  require(decomposition.eigenvectors.rows() == data.features(), ErrorCode::ShapeError,
          "decomposition does not match the data");
  // ‖x xᵀ v‖² = ‖x‖²·(xᵀv)²
  const Eigen::VectorXd sq_norms = data.values.colwise().squaredNorm().transpose();
  const Eigen::MatrixXd proj = decomposition.eigenvectors.transpose() * data.values;
  double best = 0.0;
  for (Eigen::Index j = 0; j < proj.rows(); ++j) {
    const double second = (sq_norms.array() * proj.row(j).transpose().array().square()).mean();
    const double w = decomposition.eigenvalues(j);
    best = std::max(best, std::sqrt(std::max(0.0, second - w * w)));
  }
  return best;
}

double wavelet_delta(double P, Eigen::Index N, Eigen::Index T, const BoundConstants& constants,
                     double gamma, double cov_norm, double w1) {
  constants.validate();
  require(P >= 0 && N >= 1 && T >= 1 && gamma > 0 && cov_norm >= 0 && w1 > 0,
          ErrorCode::InvalidArgument, "invalid wavelet_delta arguments");
  const double n = static_cast<double>(N);
  const double lead = P * n / std::sqrt(static_cast<double>(T));
  const double spread = constants.k_max * std::exp(constants.epsilon / 2.0);
  const double concentration = 2.0 * constants.Q * constants.G * gamma * cov_norm / w1 *
                               std::sqrt(std::log(n) + constants.u);
  return lead * (spread + concentration);
}

double wavelet_delta_probability(const BoundConstants& constants) {
  constants.validate();
  return (1.0 - std::exp(-constants.epsilon)) * (1.0 - 2.0 * std::exp(-constants.u));
}

bool pruning_preserved(double lhs, int layer, double delta, double B, double tau, double x_norm) {
  require(layer >= 0, ErrorCode::InvalidArgument, "layer must be non-negative");
  const double l = layer;
  const double scale = delta * std::pow(B, l - 1.0) * x_norm;
  return lhs > scale * scale * ((l + 1.0) * B + l * tau);
}

bool pruning_preserved_margin(double lhs, int layer, double delta, double B, double tau, double x_norm) {
  require(layer >= 0, ErrorCode::InvalidArgument, "layer must be non-negative");
  const double l = layer;
  return lhs > delta * std::pow(B, l - 1.0) * x_norm * ((l + 1.0) * B + l * tau);
}

double cst_stability_bound(double delta, double B, double B_U, double x_norm,
                           const std::vector<std::int64_t>& counts, int L) {
  require(L >= 1, ErrorCode::InvalidArgument, "L must be at least 1");
  require(static_cast<int>(counts.size()) == L - 1, ErrorCode::ShapeError,
          "expected one retained count per layer 1…L−1");
  double sum = 0.0;
  for (int l = 1; l < L; ++l)
    sum += static_cast<double>(l) * l * std::pow(B, 2.0 * l - 2.0) *
           static_cast<double>(counts[static_cast<std::size_t>(l - 1)]);
  return B_U * delta * x_norm * std::sqrt(sum);
}

double signal_stability_bound(double B, double B_U, double delta_norm,
                              const std::vector<std::int64_t>& counts, int L) {
  require(L >= 1, ErrorCode::InvalidArgument, "L must be at least 1");
  require(static_cast<int>(counts.size()) == L, ErrorCode::ShapeError,
          "expected one retained count per layer 0…L−1");
  double sum = 0.0;
  for (int l = 0; l < L; ++l)
    sum += static_cast<double>(counts[static_cast<std::size_t>(l)]) * std::pow(B, 2.0 * l);
  return B_U * delta_norm * std::sqrt(sum);
}

GapScale pca_gap_scale(const Eigen::VectorXd& eigenvalues, int k) {
  require(k >= 2 && k <= eigenvalues.size(), ErrorCode::InvalidK, "k must lie in [2, N]");
  const Eigen::VectorXd top = eigenvalues.head(k);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) gap = std::min(gap, std::abs(top(i) - top(j)));
  const double scale = std::max(1.0, top.cwiseAbs().maxCoeff());
  if (gap <= kGapTol * scale) return GapScale{std::numeric_limits<double>::infinity(), true};
  return GapScale{1.0 / gap, false};
}

double spectral_norm(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  return eig_sym(symmetric).eigenvalues.cwiseAbs().maxCoeff();
}

double measured_wavelet_delta(const WaveletMatrixSet& a, const WaveletMatrixSet& b) {
  require(a.count() == b.count(), ErrorCode::ShapeError, "wavelet sets differ in scale count");
  double best = 0.0;
  for (int j = 0; j < a.count(); ++j) {
    const auto& ha = a.matrices[static_cast<std::size_t>(j)];
    const auto& hb = b.matrices[static_cast<std::size_t>(j)];
    require(ha.rows() == hb.rows(), ErrorCode::ShapeError, "wavelet sets differ in size");
    best = std::max(best, spectral_norm(ha - hb));
  }
  return best;
}

}  // namespace cst
