#include "cst/readout.hpp"

#include <cmath>

#include "cst/error.hpp"

namespace cst {
namespace {

constexpr Eigen::Index kDualThreshold = 2000;
constexpr double kMinRcond = 1e-14;

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double alpha) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  bool ok = llt.info() == Eigen::Success;
  if (ok && alpha == 0.0) ok = llt.rcond() >= kMinRcond;
  require(ok, ErrorCode::SingularSystem, "ridge system is singular; use alpha > 0");
  return llt.solve(b);
}

}  // namespace

PcaModel pca_fit(const SampleCovariance& cov, int k) {
  const auto n = static_cast<int>(cov.matrix.rows());
  require(k >= 1 && k <= n, ErrorCode::InvalidK, "k must lie in [1, N]");
  const SpectralDecomposition eig = eig_sym(cov.matrix);
  PcaModel model;
  model.k = k;
  model.components = eig.eigenvectors.leftCols(k);
  model.mean = cov.mean;
  model.source_eigenvalues = eig.eigenvalues;
  return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X) {
  require(X.rows() == model.components.rows(), ErrorCode::ShapeError,
          "data dimension does not match the PCA model");
  return model.components.transpose() * (X.colwise() - model.mean);
}

Eigen::MatrixXd pca_fit_transform(const SampleCovariance& cov, int k, const DataMatrix& X) {
  return pca_transform(pca_fit(cov, k), X.values);
}

Provenance RidgeModel::describe() const {
  Provenance p;
  p.set("alpha", alpha);
  p.set("intercept", intercept);
  p.set("weights", weights);
  return p;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double alpha) {
  require(Z.cols() >= 1, ErrorCode::InsufficientSamples, "ridge needs at least one sample");
  require(Z.cols() == y.size(), ErrorCode::ShapeError, "feature and target counts differ");
  require(alpha >= 0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be non-negative");
  require(Z.allFinite() && y.allFinite(), ErrorCode::InvalidData, "non-finite ridge input");

  const Eigen::VectorXd zbar = Z.rowwise().mean();
  const double ybar = y.mean();
  const Eigen::MatrixXd zc = Z.colwise() - zbar;
  const Eigen::VectorXd yc = y.array() - ybar;

  RidgeModel model;
  model.alpha = alpha;
  if (Z.rows() > kDualThreshold && alpha > 0) {
    Eigen::MatrixXd gram = zc.transpose() * zc;
    gram.diagonal().array() += alpha;
    model.weights = zc * spd_solve(gram, yc, alpha);
  } else {
    Eigen::MatrixXd gram = zc * zc.transpose();
    gram.diagonal().array() += alpha;
    model.weights = spd_solve(gram, zc * yc, alpha);
  }
  model.intercept = ybar - model.weights.dot(zbar);
  return model;
}

Eigen::VectorXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& Z) {
  require(Z.rows() == model.weights.size(), ErrorCode::ShapeError,
          "feature dimension does not match the ridge model");
  return (Z.transpose() * model.weights).array() + model.intercept;
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  require(pred.size() == truth.size(), ErrorCode::ShapeError, "length mismatch");
  require(pred.size() > 0, ErrorCode::ShapeError, "empty input");
  return (pred - truth).cwiseAbs().mean();
}

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require(a.size() == b.size(), ErrorCode::ShapeError, "length mismatch");
  require(a.size() > 0, ErrorCode::ShapeError, "empty input");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::ShapeError, "shape mismatch");
  require(a.size() > 0, ErrorCode::ShapeError, "empty input");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace cst
