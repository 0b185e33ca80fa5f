#include "cst/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "cst/bounds.hpp"
#include "cst/error.hpp"
#include "cst/random.hpp"

namespace cst {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Eigen::Index> permutation(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<Eigen::Index> sorted_slice(const std::vector<Eigen::Index>& order, std::size_t begin,
                                       std::size_t end) {
  std::vector<Eigen::Index> out(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                order.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t portion(double fraction, Eigen::Index total) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(idx[i]);
  return out;
}

Eigen::VectorXd entries(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

// Subtracts the mean of the pool columns from every column.
DataMatrix center_on(const DataMatrix& data, const std::vector<Eigen::Index>& pool) {
  const Eigen::VectorXd mean = columns(data.values, pool).rowwise().mean();
  DataMatrix out = data;
  out.values.colwise() -= mean;
  return out;
}

void check_inputs(const DataMatrix& data, const Eigen::VectorXd& targets) {
  require(targets.size() == data.samples(), ErrorCode::ShapeError,
          "target count does not match sample count");
  require(targets.allFinite(), ErrorCode::InvalidData, "targets contain non-finite values");
  require(data.values.allFinite(), ErrorCode::InvalidData, "data contains non-finite entries");
}

void require_alphas(const std::vector<double>& alphas) {
  require(!alphas.empty(), ErrorCode::InvalidArgument, "ridge alpha grid is empty");
  for (double a : alphas) require(a >= 0, ErrorCode::InvalidArgument, "ridge alpha must be non-negative");
}

std::string fmt(double v) { return std::isnan(v) ? "nan" : format_double(v); }

// Per-sample squared CST distance bound summed over the test columns.
double cst_squared_bound_sum(const CstModel& clean, const CstModel& refit, double delta,
                             const Eigen::MatrixXd& test) {
  const int L = clean.config.L;
  std::vector<std::int64_t> counts;
  std::int64_t layer = 1;
  for (int l = 1; l < L; ++l) counts.push_back(layer *= clean.config.J);
  const double B = std::max(clean.filterbank.frame_upper, refit.filterbank.frame_upper);
  double sum = 0.0;
  for (Eigen::Index t = 0; t < test.cols(); ++t) {
    const double b = cst_stability_bound(delta, B, clean.aggregation_norm(), test.col(t).norm(), counts, L);
    sum += b * b;
  }
  return sum;
}

}  // namespace

void SplitSpec::validate() const {
  require(unlabeled >= 0 && train >= 0 && valid >= 0 && test > 0, ErrorCode::InvalidArgument,
          "split fractions must be non-negative with a positive test share");
  require(std::abs(unlabeled + train + valid + test - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "split fractions must sum to 1");
}

std::vector<Eigen::Index> Split::pool() const {
  std::vector<Eigen::Index> out = unlabeled;
  out.insert(out.end(), train.begin(), train.end());
  std::sort(out.begin(), out.end());
  return out;
}

Split make_split(Eigen::Index T, const SplitSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto order = permutation(T, derive_seed(seed, "split"));
  const std::size_t n_test = std::max<std::size_t>(1, portion(spec.test, T));
  const std::size_t n_valid = portion(spec.valid, T);
  const std::size_t n_train = portion(spec.train, T);
  require(n_test + n_valid + n_train <= static_cast<std::size_t>(T), ErrorCode::InsufficientSamples,
          "not enough samples for the requested split");
  Split s;
  std::size_t at = 0;
  s.test = sorted_slice(order, at, at + n_test);
  at += n_test;
  s.valid = sorted_slice(order, at, at + n_valid);
  at += n_valid;
  s.train = sorted_slice(order, at, at + n_train);
  at += n_train;
  s.unlabeled = sorted_slice(order, at, order.size());
  return s;
}

std::vector<Eigen::Index> subsample(const std::vector<Eigen::Index>& from, std::size_t count,
                                    std::uint64_t seed) {
  if (count >= from.size()) return from;
  const auto order = permutation(static_cast<Eigen::Index>(from.size()), seed);
  std::vector<Eigen::Index> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(from[static_cast<std::size_t>(order[i])]);
  std::sort(out.begin(), out.end());
  return out;
}

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::Pca:
      return "pca-k" + std::to_string(pca_k);
    case MethodKind::Raw:
      return "raw";
    case MethodKind::Cst:
      break;
  }
  std::string out = "cst-" + family_name(cst.family) + "-J" + std::to_string(cst.J) + "-L" +
                    std::to_string(cst.L) + "-" + to_string(cst.operator_kind);
  if (cst.aggregation == Aggregation::Mean) out += "-mean";
  return out;
}

MethodSpec cst_method(const CstConfig& config) {
  config.validate();
  MethodSpec m;
  m.kind = MethodKind::Cst;
  m.cst = config;
  return m;
}

MethodSpec pca_method(int k) {
  require(k >= 1, ErrorCode::InvalidK, "k must be positive");
  MethodSpec m;
  m.kind = MethodKind::Pca;
  m.pca_k = k;
  return m;
}

MethodSpec raw_method() {
  MethodSpec m;
  m.kind = MethodKind::Raw;
  return m;
}

Eigen::MatrixXd Embedding::embed(const Eigen::MatrixXd& X) const {
  switch (method.kind) {
    case MethodKind::Cst:
      return cst_transform_batch_with_layout(*cst, X, layout);
    case MethodKind::Pca:
      return pca_transform(*pca, X);
    case MethodKind::Raw:
      return X;
  }
  return X;
}

Eigen::Index Embedding::dimension() const {
  switch (method.kind) {
    case MethodKind::Cst:
      return static_cast<Eigen::Index>(layout.size()) * cst->width();
    case MethodKind::Pca:
      return pca->k;
    case MethodKind::Raw:
      break;
  }
  return input_size;
}

Embedding fit_embedding(const MethodSpec& method, const DataMatrix& fit_data) {
  Embedding e;
  e.method = method;
  e.input_size = fit_data.features();
  const SampleCovariance cov = sample_covariance(fit_data);
  switch (method.kind) {
    case MethodKind::Cst:
      e.cst = cst_fit(cov, method.cst);
      e.layout = full_layout(method.cst.J, method.cst.L);
      break;
    case MethodKind::Pca:
      e.pca = pca_fit(cov, method.pca_k);
      break;
    case MethodKind::Raw:
      break;
  }
  return e;
}

RidgeSelection select_ridge(const Eigen::MatrixXd& z_train, const Eigen::VectorXd& y_train,
                            const Eigen::MatrixXd& z_valid, const Eigen::VectorXd& y_valid,
                            const std::vector<double>& alphas) {
  require_alphas(alphas);
  std::optional<RidgeSelection> best;
  for (double alpha : alphas) {
    RidgeModel model = ridge_fit(z_train, y_train, alpha);
    const double score = z_valid.cols() > 0 ? mae(ridge_predict(model, z_valid), y_valid) : 0.0;
    if (!best || score < best->valid_mae) best = RidgeSelection{std::move(model), score};
  }
  return *best;
}

Quartiles quartiles(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  Quartiles q;
  q.count = values.size();
  if (values.empty()) {
    q.q1 = q.median = q.q3 = kNaN;
    return q;
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  return q;
}

TextTable StabilityReport::table() const {
  TextTable t;
  t.header = {"method", "fraction", "seed", "subsample_size", "mae", "embedding_mse",
              "delta_measured", "mse_bound", "note"};
  for (const auto& r : rows)
    t.rows.push_back({r.method, fmt(r.fraction), std::to_string(r.seed_index),
                      std::to_string(r.subsample_size), fmt(r.mae), fmt(r.embedding_mse),
                      fmt(r.delta_measured), fmt(r.mse_bound), r.note});
  return t;
}

std::vector<const StabilityRow*> StabilityReport::select(const std::string& method, double fraction) const {
  std::vector<const StabilityRow*> out;
  for (const auto& r : rows)
    if (!r.skipped && r.method == method && r.fraction == fraction) out.push_back(&r);
  return out;
}

StabilityReport run_stability(const DataMatrix& data, const Eigen::VectorXd& targets,
                              const StabilityOptions& options) {
  check_inputs(data, targets);
  require(options.seeds >= 1, ErrorCode::InvalidArgument, "need at least one seed");
  require(!options.methods.empty(), ErrorCode::InvalidArgument, "no methods to evaluate");
  require_alphas(options.alphas);
  std::vector<double> fractions = options.fractions;
  for (double f : fractions)
    require(f > 0 && f <= 1, ErrorCode::InvalidArgument, "subsample fractions must lie in (0, 1]");
  if (std::find(fractions.begin(), fractions.end(), 1.0) == fractions.end()) fractions.push_back(1.0);
  std::sort(fractions.begin(), fractions.end());

  StabilityReport report;
  for (const auto& method : options.methods) {
    for (int s = 0; s < options.seeds; ++s) {
      const std::uint64_t seed = derive_seed(options.seed, "stability.seed", static_cast<std::uint64_t>(s));
      const Split split = make_split(data.samples(), options.split, seed);
      const auto pool = split.pool();
      const DataMatrix centered = center_on(data, pool);
      const Eigen::MatrixXd x_test = columns(centered.values, split.test);
      const Eigen::VectorXd y_test = entries(targets, split.test);

      const Embedding clean = fit_embedding(method, select_samples(centered, pool));
      const RidgeSelection ridge =
          select_ridge(clean.embed(columns(centered.values, split.train)), entries(targets, split.train),
                       clean.embed(columns(centered.values, split.valid)), entries(targets, split.valid),
                       options.alphas);
      const Eigen::MatrixXd z_clean = clean.embed(x_test);

      for (double fraction : fractions) {
        StabilityRow row;
        row.method = method.label();
        row.fraction = fraction;
        row.seed_index = s;
        row.delta_measured = kNaN;
        row.mse_bound = kNaN;
        const std::size_t count = portion(fraction, static_cast<Eigen::Index>(pool.size()));
        row.subsample_size = static_cast<Eigen::Index>(count);
        if (count < 2) {
          row.skipped = true;
          row.mae = row.embedding_mse = kNaN;
          row.note = "subsample smaller than 2";
          report.rows.push_back(row);
          continue;
        }
        const auto subset = subsample(pool, count,
                                      derive_seed(seed, "stability.subsample",
                                                  static_cast<std::uint64_t>(std::llround(fraction * 1e6))));
        try {
          const Embedding refit = fit_embedding(method, select_samples(centered, subset));
          const Eigen::MatrixXd z = refit.embed(x_test);
          row.mae = mae(ridge_predict(ridge.model, z), y_test);
          row.embedding_mse = mse(z, z_clean);
          if (method.kind == MethodKind::Cst) {
            row.delta_measured = measured_wavelet_delta(clean.cst->wavelets, refit.cst->wavelets);
            row.mse_bound = cst_squared_bound_sum(*clean.cst, *refit.cst, row.delta_measured, x_test) /
                            static_cast<double>(z.size());
          }
        } catch (const Error& e) {
          row.skipped = true;
          row.mae = row.embedding_mse = kNaN;
          row.note = std::string(to_string(e.code()));
        }
        report.rows.push_back(row);
      }
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const StabilityRow& a, const StabilityRow& b) {
    return std::tie(a.method, a.fraction, a.seed_index) < std::tie(b.method, b.fraction, b.seed_index);
  });
  return report;
}

TextTable PruningReport::table() const {
  TextTable t;
  t.header = {"tau", "seed", "mae", "transform_seconds", "path_count", "feature_count"};
  for (const auto& r : rows)
    t.rows.push_back({fmt(r.tau), std::to_string(r.seed_index), fmt(r.mae), fmt(r.transform_seconds),
                      std::to_string(r.path_count), std::to_string(r.feature_count)});
  return t;
}

PruningReport run_pruning_sweep(const DataMatrix& data, const Eigen::VectorXd& targets,
                                const PruningOptions& options) {
  check_inputs(data, targets);
  options.config.validate();
  require(options.seeds >= 1, ErrorCode::InvalidArgument, "need at least one seed");
  require_alphas(options.alphas);
  require(!options.taus.empty(), ErrorCode::InvalidArgument, "no thresholds to sweep");
  for (std::size_t i = 0; i < options.taus.size(); ++i) {
    require(options.taus[i] >= 0 && options.taus[i] < 1, ErrorCode::InvalidArgument,
            "thresholds must lie in [0, 1)");
    require(i == 0 || options.taus[i] > options.taus[i - 1], ErrorCode::InvalidArgument,
            "thresholds must be ascending");
  }

  PruningReport report;
  for (int s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = derive_seed(options.seed, "pruning.seed", static_cast<std::uint64_t>(s));
    const Split split = make_split(data.samples(), options.split, seed);
    const auto pool = split.pool();
    const DataMatrix centered = center_on(data, pool);
    const Eigen::MatrixXd x_pool = columns(centered.values, pool);
    const Eigen::MatrixXd x_train = columns(centered.values, split.train);
    const Eigen::MatrixXd x_valid = columns(centered.values, split.valid);
    const Eigen::MatrixXd x_test = columns(centered.values, split.test);
    const CstModel model = cst_fit(sample_covariance(make_data_matrix(x_pool)), options.config);

    for (double tau : options.taus) {
      const BatchResult decided = cst_transform_batch(model, x_pool, tau);
      const auto& layout = decided.layout;
      const auto start = std::chrono::steady_clock::now();
      const Eigen::MatrixXd z_test = cst_transform_batch_with_layout(model, x_test, layout);
      const auto stop = std::chrono::steady_clock::now();
      const RidgeSelection ridge =
          select_ridge(cst_transform_batch_with_layout(model, x_train, layout), entries(targets, split.train),
                       cst_transform_batch_with_layout(model, x_valid, layout), entries(targets, split.valid),
                       options.alphas);
      PruningRow row;
      row.tau = tau;
      row.seed_index = s;
      row.mae = mae(ridge_predict(ridge.model, z_test), entries(targets, split.test));
      row.transform_seconds = std::chrono::duration<double>(stop - start).count();
      row.path_count = static_cast<std::int64_t>(layout.size());
      row.feature_count = row.path_count * model.width();
      report.rows.push_back(row);
    }
  }
  return report;
}

TextTable LabeledReport::table() const {
  TextTable t;
  t.header = {"method", "train_fraction", "seed", "train_size", "mae"};
  for (const auto& r : rows)
    t.rows.push_back({r.method, fmt(r.train_fraction), std::to_string(r.seed_index),
                      std::to_string(r.train_size), fmt(r.mae)});
  return t;
}

LabeledReport run_labeled_sweep(const DataMatrix& data, const Eigen::VectorXd& targets,
                                const LabeledOptions& options) {
  check_inputs(data, targets);
  require(options.seeds >= 1, ErrorCode::InvalidArgument, "need at least one seed");
  require(!options.methods.empty(), ErrorCode::InvalidArgument, "no methods to evaluate");
  require_alphas(options.alphas);
  require(options.valid >= 0 && options.test > 0 && options.valid + options.test < 1,
          ErrorCode::InvalidArgument, "validation and test shares must leave a labeled pool");
  const double pool_share = 1.0 - options.valid - options.test;
  for (double f : options.train_fractions)
    require(f > 0 && f <= pool_share + 1e-12, ErrorCode::InvalidArgument,
            "train fractions must lie in (0, 1 − valid − test]");

  LabeledReport report;
  const Eigen::Index T = data.samples();
  for (int s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = derive_seed(options.seed, "labeled.seed", static_cast<std::uint64_t>(s));
    const auto order = permutation(T, derive_seed(seed, "split"));
    const std::size_t n_test = std::max<std::size_t>(1, portion(options.test, T));
    const std::size_t n_valid = portion(options.valid, T);
    const auto test = sorted_slice(order, 0, n_test);
    const auto valid = sorted_slice(order, n_test, n_test + n_valid);
    const auto pool = sorted_slice(order, n_test + n_valid, order.size());
    const DataMatrix centered = center_on(data, pool);

    for (const auto& method : options.methods) {
      const Embedding emb = fit_embedding(method, select_samples(centered, pool));
      const Eigen::MatrixXd z_valid = emb.embed(columns(centered.values, valid));
      const Eigen::MatrixXd z_test = emb.embed(columns(centered.values, test));
      for (double fraction : options.train_fractions) {
        LabeledRow row;
        row.method = method.label();
        row.train_fraction = fraction;
        row.seed_index = s;
        const std::size_t n_train =
            std::min(portion(fraction, T), static_cast<std::size_t>(T) - n_test - n_valid);
        row.train_size = static_cast<Eigen::Index>(n_train);
        if (n_train < 2) {
          row.skipped = true;
          row.mae = kNaN;
          report.rows.push_back(row);
          continue;
        }
        std::vector<Eigen::Index> train(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid),
                                        order.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid + n_train));
        std::sort(train.begin(), train.end());
        const RidgeSelection ridge = select_ridge(emb.embed(columns(centered.values, train)),
                                                  entries(targets, train), z_valid, entries(targets, valid),
                                                  options.alphas);
        row.mae = mae(ridge_predict(ridge.model, z_test), entries(targets, test));
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

TextTable GridReport::table() const {
  TextTable t;
  t.header = {"method", "alpha", "valid_mae", "test_mae", "dimension", "selected", "note"};
  for (const auto& r : rows)
    t.rows.push_back({r.method, fmt(r.alpha), fmt(r.valid_mae), fmt(r.test_mae), std::to_string(r.dimension),
                      r.selected ? "1" : "0", r.note});
  return t;
}

GridReport run_grid_search(const DataMatrix& data, const Eigen::VectorXd& targets,
                           const GridOptions& options) {
  check_inputs(data, targets);
  require_alphas(options.alphas);
  const Split split = make_split(data.samples(), options.split, derive_seed(options.seed, "grid"));
  const auto pool = split.pool();
  const DataMatrix centered = center_on(data, pool);
  const DataMatrix fit_data = select_samples(centered, pool);
  const Eigen::MatrixXd x_train = columns(centered.values, split.train);
  const Eigen::MatrixXd x_valid = columns(centered.values, split.valid);
  const Eigen::MatrixXd x_test = columns(centered.values, split.test);
  const Eigen::VectorXd y_train = entries(targets, split.train);
  const Eigen::VectorXd y_valid = entries(targets, split.valid);
  const Eigen::VectorXd y_test = entries(targets, split.test);

  std::vector<std::pair<std::string, MethodSpec>> candidates;
  for (const auto& family : options.families)
    for (int J : options.Js)
      for (int L : options.Ls)
        for (OperatorKind kind : options.kinds) {
          CstConfig c;
          c.family = family;
          c.J = J;
          c.L = L;
          c.operator_kind = kind;
          c.aggregation = options.aggregation;
          candidates.emplace_back("cst-" + family_name(family), cst_method(c));
        }
  for (int k : options.pca_ks) candidates.emplace_back("pca", pca_method(k));

  GridReport report;
  std::map<std::string, std::size_t> best;
  for (const auto& [group, method] : candidates) {
    GridRow row;
    row.method = method.label();
    row.alpha = row.valid_mae = row.test_mae = kNaN;
    try {
      if (method.kind == MethodKind::Pca && method.pca_k > data.features())
        fail(ErrorCode::InvalidK, "k exceeds feature count");
      const Embedding emb = fit_embedding(method, fit_data);
      const RidgeSelection ridge =
          select_ridge(emb.embed(x_train), y_train, emb.embed(x_valid), y_valid, options.alphas);
      row.alpha = ridge.model.alpha;
      row.valid_mae = ridge.valid_mae;
      row.test_mae = mae(ridge_predict(ridge.model, emb.embed(x_test)), y_test);
      row.dimension = emb.dimension();
    } catch (const Error& e) {
      row.note = std::string(to_string(e.code()));
      report.rows.push_back(row);
      continue;
    }
    report.rows.push_back(row);
    const std::size_t idx = report.rows.size() - 1;
    auto it = best.find(group);
    if (it == best.end()) {
      best.emplace(group, idx);
    } else {
      const GridRow& cur = report.rows[it->second];
      if (row.valid_mae < cur.valid_mae || (row.valid_mae == cur.valid_mae && row.dimension < cur.dimension))
        it->second = idx;
    }
  }
  for (const auto& [group, idx] : best) report.rows[idx].selected = true;
  return report;
}

TextTable plot_data(const std::vector<std::string>& series, const std::vector<double>& x,
                    const std::vector<double>& y) {
  require(series.size() == x.size() && x.size() == y.size(), ErrorCode::ShapeError,
          "plot columns differ in length");
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (std::size_t i = 0; i < series.size(); ++i) {
    auto key = std::make_pair(series[i], x[i]);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(y[i]);
  }
  TextTable t;
  t.header = {"series", "x", "y", "err_low", "err_high"};
  for (const auto& key : keys) {
    const Quartiles q = quartiles(groups[key]);
    t.rows.push_back({key.first, fmt(key.second), fmt(q.median), fmt(q.q1), fmt(q.q3)});
  }
  return t;
}

}  // namespace cst
