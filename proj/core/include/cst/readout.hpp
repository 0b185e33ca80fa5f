#pragma once

#include <Eigen/Dense>

#include "cst/provenance.hpp"
#include "cst/spectral.hpp"

namespace cst {

struct PcaModel {
  Eigen::MatrixXd components;  // N×k
  Eigen::VectorXd mean;
  Eigen::VectorXd source_eigenvalues;
  int k = 0;
};

PcaModel pca_fit(const SampleCovariance& cov, int k);
/// k×T projections of the centred columns of X.
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd pca_fit_transform(const SampleCovariance& cov, int k, const DataMatrix& X);

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double alpha = 0.0;

  Provenance describe() const;
};

/// Fits y ≈ Zᵀw + b with penalty alpha·‖w‖² on centred features. Z is D×T.
RidgeModel ridge_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double alpha);
Eigen::VectorXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& Z);

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);
double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// Mean over all entries.
double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace cst
