#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cst {

/// N×T observations: rows are features, columns are samples.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;

  Eigen::Index features() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }
};

/// Validates shape (N ≥ 2, T ≥ 2), finiteness and name count.
DataMatrix make_data_matrix(Eigen::MatrixXd values, std::vector<std::string> feature_names = {});

/// Keeps the columns listed in `columns`, in that order.
DataMatrix select_samples(const DataMatrix& data, const std::vector<Eigen::Index>& columns);

struct SampleCovariance {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd mean;
  Eigen::Index sample_count = 0;
};

struct SpectralDecomposition {
  Eigen::MatrixXd eigenvectors;  // columns
  Eigen::VectorXd eigenvalues;   // descending
};

enum class OperatorKind { Normalized, Inverted };

std::string to_string(OperatorKind kind);
OperatorKind parse_operator_kind(const std::string& text);

struct WaveletOperator {
  OperatorKind kind = OperatorKind::Normalized;
  double gamma = 1.0;
  Eigen::MatrixXd matrix;
  SpectralDecomposition decomposition;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Maximum-likelihood (1/T) covariance of the columns.
SampleCovariance sample_covariance(const DataMatrix& data);

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues are
/// returned in descending order and each eigenvector has its largest-magnitude
/// entry positive (lowest index wins ties).
SpectralDecomposition eig_sym(const Eigen::MatrixXd& matrix);

/// Builds γ·C/w₁ (Normalized) or γ·(I − C/w₁) (Inverted) reusing the
/// eigenvectors of C.
WaveletOperator wavelet_operator(const SampleCovariance& cov, OperatorKind kind, double gamma);
WaveletOperator wavelet_operator(const Eigen::MatrixXd& cov, OperatorKind kind, double gamma);
WaveletOperator wavelet_operator(const Eigen::MatrixXd& cov, const SpectralDecomposition& eig,
                                 OperatorKind kind, double gamma);

}  // namespace cst
