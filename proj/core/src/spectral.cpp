#include "cst/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cst/error.hpp"

namespace cst {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kSymmetryTol = 1e-10;
constexpr double kOffDiagonalTol = 1e-12;
constexpr double kSignTieTol = 1e-12;

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest * (1.0 - kSignTieTol)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (r != c) sum += a(r, c) * a(r, c);
  return std::sqrt(sum);
}

}  // namespace

std::string to_string(OperatorKind kind) {
  return kind == OperatorKind::Normalized ? "normalized" : "inverted";
}

OperatorKind parse_operator_kind(const std::string& text) {
  if (text == "normalized" || text == "N" || text == "CN") return OperatorKind::Normalized;
  if (text == "inverted" || text == "I" || text == "CI") return OperatorKind::Inverted;
  fail(ErrorCode::InvalidArgument, "unknown operator kind '" + text + "'");
}

DataMatrix make_data_matrix(Eigen::MatrixXd values, std::vector<std::string> feature_names) {
  require(values.rows() >= 2, ErrorCode::ShapeError, "need at least 2 features");
  require(values.cols() >= 2, ErrorCode::InsufficientSamples, "need at least 2 samples");
  require(values.allFinite(), ErrorCode::InvalidData, "data contains non-finite entries");
  require(feature_names.empty() || static_cast<Eigen::Index>(feature_names.size()) == values.rows(),
          ErrorCode::ShapeError, "feature name count does not match feature count");
  return DataMatrix{std::move(values), std::move(feature_names)};
}

DataMatrix select_samples(const DataMatrix& data, const std::vector<Eigen::Index>& columns) {
  DataMatrix out;
  out.feature_names = data.feature_names;
  out.values.resize(data.features(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Eigen::Index c = columns[i];
    require(c >= 0 && c < data.samples(), ErrorCode::IndexError, "sample index out of range");
    out.values.col(static_cast<Eigen::Index>(i)) = data.values.col(c);
  }
  return out;
}

SampleCovariance sample_covariance(const DataMatrix& data) {
  const Eigen::Index t = data.samples();
  require(t >= 2, ErrorCode::InsufficientSamples, "need at least 2 samples");
  require(data.values.allFinite(), ErrorCode::InvalidData, "data contains non-finite entries");

  SampleCovariance cov;
  cov.sample_count = t;
  cov.mean = data.values.rowwise().mean();
  const Eigen::MatrixXd centered = data.values.colwise() - cov.mean;
  cov.matrix = (centered * centered.transpose()) / static_cast<double>(t);
  cov.matrix = 0.5 * (cov.matrix + cov.matrix.transpose()).eval();
  return cov;
}

SpectralDecomposition eig_sym(const Eigen::MatrixXd& matrix) {
  require(matrix.rows() == matrix.cols(), ErrorCode::ShapeError, "matrix must be square");
  require(matrix.allFinite(), ErrorCode::InvalidData, "matrix contains non-finite entries");
  const Eigen::Index n = matrix.rows();
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double asym = n == 0 ? 0.0 : (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  require(asym <= kSymmetryTol * scale, ErrorCode::NotSymmetric, "matrix is not symmetric");

  Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = kOffDiagonalTol * a.norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    require(sweep < kMaxSweeps, ErrorCode::NoConvergence, "Jacobi iteration did not converge");
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src);
    out.eigenvectors.col(k) = v.col(src);
    fix_sign(out.eigenvectors.col(k));
  }
  return out;
}

WaveletOperator wavelet_operator(const SampleCovariance& cov, OperatorKind kind, double gamma) {
  return wavelet_operator(cov.matrix, kind, gamma);
}

WaveletOperator wavelet_operator(const Eigen::MatrixXd& cov, OperatorKind kind, double gamma) {
  return wavelet_operator(cov, eig_sym(cov), kind, gamma);
}

WaveletOperator wavelet_operator(const Eigen::MatrixXd& cov, const SpectralDecomposition& eig,
                                 OperatorKind kind, double gamma) {
  require(gamma > 0 && std::isfinite(gamma), ErrorCode::InvalidArgument, "gamma must be positive");
  require(cov.rows() == eig.eigenvalues.size(), ErrorCode::ShapeError,
          "decomposition does not match covariance");
  const Eigen::Index n = cov.rows();
  require(n > 0, ErrorCode::ShapeError, "empty covariance");
  const double w1 = eig.eigenvalues(0);
  require(w1 > 0, ErrorCode::DegenerateCovariance, "largest covariance eigenvalue is not positive");

  WaveletOperator op;
  op.kind = kind;
  op.gamma = gamma;
  op.decomposition.eigenvalues.resize(n);
  op.decomposition.eigenvectors.resize(n, n);
  if (kind == OperatorKind::Normalized) {
    op.matrix = (gamma / w1) * cov;
    for (Eigen::Index i = 0; i < n; ++i) {
      op.decomposition.eigenvalues(i) = std::clamp(gamma * eig.eigenvalues(i) / w1, 0.0, gamma);
      op.decomposition.eigenvectors.col(i) = eig.eigenvectors.col(i);
    }
  } else {
    op.matrix = gamma * (Eigen::MatrixXd::Identity(n, n) - cov / w1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index src = n - 1 - i;
      op.decomposition.eigenvalues(i) =
          std::clamp(gamma * (1.0 - eig.eigenvalues(src) / w1), 0.0, gamma);
      op.decomposition.eigenvectors.col(i) = eig.eigenvectors.col(src);
    }
  }
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

}  // namespace cst
