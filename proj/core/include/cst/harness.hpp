#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cst/csv.hpp"
#include "cst/readout.hpp"
#include "cst/scattering.hpp"
#include "cst/spectral.hpp"

namespace cst {

struct SplitSpec {
  double unlabeled = 0.5;
  double train = 0.1;
  double valid = 0.2;
  double test = 0.2;

  void validate() const;
};

struct Split {
  std::vector<Eigen::Index> unlabeled;
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> valid;
  std::vector<Eigen::Index> test;

  /// Unlabeled ∪ train, sorted: the pool every embedding is fitted on.
  std::vector<Eigen::Index> pool() const;
};

/// Random partition of 0…T−1; each part is returned sorted.
Split make_split(Eigen::Index T, const SplitSpec& spec, std::uint64_t seed);

/// Sorted random subset of `from` with `count` elements (all of them when count ≥ size).
std::vector<Eigen::Index> subsample(const std::vector<Eigen::Index>& from, std::size_t count,
                                    std::uint64_t seed);

enum class MethodKind { Cst, Pca, Raw };

struct MethodSpec {
  MethodKind kind = MethodKind::Cst;
  CstConfig cst;
  int pca_k = 0;

  std::string label() const;
};

MethodSpec cst_method(const CstConfig& config);
MethodSpec pca_method(int k);
MethodSpec raw_method();

/// A fitted representation: CST (over a fixed layout), PCA, or the raw features.
struct Embedding {
  MethodSpec method;
  std::optional<CstModel> cst;
  std::optional<PcaModel> pca;
  std::vector<ScatterPath> layout;
  Eigen::Index input_size = 0;

  Eigen::MatrixXd embed(const Eigen::MatrixXd& X) const;
  Eigen::Index dimension() const;
};

/// Fits on the given samples. CST uses the full unpruned layout.
Embedding fit_embedding(const MethodSpec& method, const DataMatrix& fit_data);

struct RidgeSelection {
  RidgeModel model;
  double valid_mae = 0.0;
};

/// Ridge fit per alpha, keeping the one with the lowest validation MAE
/// (first in grid order on ties).
RidgeSelection select_ridge(const Eigen::MatrixXd& z_train, const Eigen::VectorXd& y_train,
                            const Eigen::MatrixXd& z_valid, const Eigen::VectorXd& y_valid,
                            const std::vector<double>& alphas);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
};

/// Linear-interpolation quartiles ignoring NaN entries.
Quartiles quartiles(std::vector<double> values);

struct StabilityOptions {
  std::vector<MethodSpec> methods;
  SplitSpec split;
  std::vector<double> fractions{0.05, 0.1, 0.2, 0.4, 0.7, 1.0};
  int seeds = 10;
  std::uint64_t seed = 0;
  std::vector<double> alphas{1.0, 10.0, 100.0, 200.0};
};

struct StabilityRow {
  std::string method;
  double fraction = 0.0;
  int seed_index = 0;
  Eigen::Index subsample_size = 0;
  double mae = 0.0;
  double embedding_mse = 0.0;
  double delta_measured = 0.0;  // NaN for non-CST methods
  double mse_bound = 0.0;       // NaN for non-CST methods
  bool skipped = false;
  std::string note;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;

  TextTable table() const;
  /// Rows for one method and fraction, skipped rows excluded.
  std::vector<const StabilityRow*> select(const std::string& method, double fraction) const;
};

/// Fit on the pool, train a frozen ridge on the train split, then refit each
/// embedding on random subsets of the pool and re-embed the test split.
StabilityReport run_stability(const DataMatrix& data, const Eigen::VectorXd& targets,
                              const StabilityOptions& options);

struct PruningOptions {
  CstConfig config;
  std::vector<double> taus{0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  SplitSpec split;
  int seeds = 5;
  std::uint64_t seed = 0;
  std::vector<double> alphas{1.0, 10.0, 100.0, 200.0};
};

struct PruningRow {
  double tau = 0.0;
  int seed_index = 0;
  double mae = 0.0;
  double transform_seconds = 0.0;
  std::int64_t path_count = 0;
  std::int64_t feature_count = 0;
};

struct PruningReport {
  std::vector<PruningRow> rows;

  TextTable table() const;
};

/// The retained layout is decided once per seed on the pool; train and test
/// features then use that layout.
PruningReport run_pruning_sweep(const DataMatrix& data, const Eigen::VectorXd& targets,
                                const PruningOptions& options);

struct LabeledOptions {
  std::vector<MethodSpec> methods;
  std::vector<double> train_fractions{0.006, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
  double valid = 0.2;
  double test = 0.2;
  int seeds = 5;
  std::uint64_t seed = 0;
  std::vector<double> alphas{1.0, 10.0, 100.0, 200.0};
};

struct LabeledRow {
  std::string method;
  double train_fraction = 0.0;
  int seed_index = 0;
  Eigen::Index train_size = 0;
  double mae = 0.0;
  bool skipped = false;
};

struct LabeledReport {
  std::vector<LabeledRow> rows;

  TextTable table() const;
};

LabeledReport run_labeled_sweep(const DataMatrix& data, const Eigen::VectorXd& targets,
                                const LabeledOptions& options);

struct GridOptions {
  std::vector<KernelFamily> families{DiffusionFamily{}};
  std::vector<int> Js{4, 5, 6, 7};
  std::vector<int> Ls{2, 3, 4};
  std::vector<OperatorKind> kinds{OperatorKind::Normalized, OperatorKind::Inverted};
  std::vector<int> pca_ks{10, 20, 50};
  Aggregation aggregation = Aggregation::Identity;
  SplitSpec split;
  std::uint64_t seed = 0;
  std::vector<double> alphas{1.0, 10.0, 100.0, 200.0};
};

struct GridRow {
  std::string method;
  double alpha = 0.0;
  double valid_mae = 0.0;
  double test_mae = 0.0;
  Eigen::Index dimension = 0;
  bool selected = false;
  std::string note;
};

struct GridReport {
  std::vector<GridRow> rows;

  TextTable table() const;
};

/// Evaluates every configuration; within each family (and for PCA) the row with
/// the lowest validation MAE is marked, ties going to the smaller dimension.
GridReport run_grid_search(const DataMatrix& data, const Eigen::VectorXd& targets,
                           const GridOptions& options);

/// `series,x,y,err_low,err_high` with median and quartiles per (series, x).
TextTable plot_data(const std::vector<std::string>& series, const std::vector<double>& x,
                    const std::vector<double>& y);

}  // namespace cst
