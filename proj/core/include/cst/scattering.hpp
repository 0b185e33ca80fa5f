#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cst/provenance.hpp"
#include "cst/spectral.hpp"
#include "cst/wavelets.hpp"

namespace cst {

enum class Nonlinearity { Abs };
enum class Aggregation { Identity, Mean };

std::string to_string(Aggregation aggregation);
Aggregation parse_aggregation(const std::string& text);

struct CstConfig {
  KernelFamily family = DiffusionFamily{};
  int J = 4;
  int L = 2;
  double tau = 0.0;
  Nonlinearity rho = Nonlinearity::Abs;
  Aggregation aggregation = Aggregation::Identity;
  OperatorKind operator_kind = OperatorKind::Normalized;
  std::optional<double> gamma_override;

  double gamma() const;
  void validate() const;
  Provenance describe() const;
};

/// Scale indices (j₁, …, j_ℓ) applied in order; empty is the input itself.
using ScatterPath = std::vector<int>;

/// `p_root` for the input, otherwise `p_j1.j2...`.
std::string path_name(const ScatterPath& path);

/// (J^L − 1)/(J − 1): the number of paths of length < L.
std::int64_t feature_count(int J, int L);

/// Every path of length < L, breadth-first then lexicographic.
std::vector<ScatterPath> full_layout(int J, int L);

struct CstModel {
  CstConfig config;
  WaveletOperator op;
  Filterbank filterbank;
  WaveletMatrixSet wavelets;

  Eigen::Index size() const { return op.size(); }
  /// Coefficients emitted per path.
  Eigen::Index width() const;
  /// Operator norm of the aggregation U.
  double aggregation_norm() const;
  Provenance describe() const;
};

CstModel cst_fit(const SampleCovariance& cov, const CstConfig& config);
CstModel cst_fit(const Eigen::MatrixXd& cov, const CstConfig& config);

struct ScatterNode {
  ScatterPath path;
  Eigen::VectorXd signal;
  double energy = 0.0;  // 2-norm of signal
};

struct PrunedPath {
  ScatterPath path;
  double ratio = 0.0;
};

struct ScatterTree {
  std::vector<ScatterNode> nodes;  // layout order
  std::vector<PrunedPath> pruned;

  const ScatterNode* find(const ScatterPath& path) const;
};

struct FeatureVector {
  Eigen::VectorXd coefficients;
  std::vector<ScatterPath> layout;
  Eigen::Index width = 0;

  std::vector<std::string> names() const;
};

struct CstResult {
  ScatterTree tree;
  FeatureVector features;
};

/// Single-signal transform; a child is kept iff ‖child‖/‖parent‖ > tau.
CstResult cst_transform(const CstModel& model, const Eigen::VectorXd& x, double tau);

/// Evaluates exactly the given prefix-closed layout with no pruning.
FeatureVector cst_transform_with_layout(const CstModel& model, const Eigen::VectorXd& x,
                                        const std::vector<ScatterPath>& layout);

/// Every path of length < L, zero-energy branches included.
FeatureVector cst_transform_full(const CstModel& model, const Eigen::VectorXd& x);

/// Energy statistics of one candidate path across a batch.
struct PathEnergy {
  ScatterPath path;
  Eigen::VectorXd norms;     // ‖x_path‖ per sample
  Eigen::VectorXd ratios;    // ‖x_path‖/‖x_parent‖ per sample (0 for a zero parent)
  double mean_ratio = 0.0;
  bool retained = false;
};

struct BatchResult {
  Eigen::MatrixXd features;  // (paths·width) × samples
  std::vector<ScatterPath> layout;
  Eigen::Index width = 0;
  std::vector<PathEnergy> candidates;  // every examined path, root first

  std::vector<std::string> names(const std::vector<std::string>& feature_names = {}) const;
};

/// Batch transform with one pruning decision shared by all samples: a path is
/// kept iff its mean child-to-parent energy ratio exceeds tau.
BatchResult cst_transform_batch(const CstModel& model, const Eigen::MatrixXd& signals, double tau);

/// Batch transform over a fixed layout (for re-embedding with a frozen layout).
Eigen::MatrixXd cst_transform_batch_with_layout(const CstModel& model, const Eigen::MatrixXd& signals,
                                                const std::vector<ScatterPath>& layout);

/// Retained path count per layer ℓ = 0…L−1 for a layout.
std::vector<std::int64_t> layer_counts(const std::vector<ScatterPath>& layout, int L);

}  // namespace cst
