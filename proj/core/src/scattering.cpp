#include "cst/scattering.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "cst/error.hpp"

namespace cst {
namespace {

struct Expansion {
  std::vector<ScatterPath> layout;
  std::vector<Eigen::MatrixXd> signals;
  std::vector<PathEnergy> candidates;
};

Eigen::VectorXd column_norms(const Eigen::MatrixXd& m) { return m.colwise().norm().transpose(); }

Eigen::MatrixXd apply_rho(const CstConfig& config, const Eigen::MatrixXd& m) {
  switch (config.rho) {
    case Nonlinearity::Abs:
      return m.cwiseAbs();
  }
  return m;
}

void check_signals(const CstModel& model, const Eigen::MatrixXd& signals) {
  require(signals.rows() == model.size(), ErrorCode::ShapeError,
          "signal length " + std::to_string(signals.rows()) + " does not match model size " +
              std::to_string(model.size()));
  require(signals.allFinite(), ErrorCode::InvalidData, "signal contains non-finite entries");
}

Expansion expand(const CstModel& model, const Eigen::MatrixXd& signals, double tau, bool prune) {
  const int J = model.config.J;
  const int L = model.config.L;
  Expansion ex;

  PathEnergy root;
  root.norms = column_norms(signals);
  root.ratios = Eigen::VectorXd::Ones(signals.cols());
  root.mean_ratio = 1.0;
  root.retained = true;
  ex.candidates.push_back(root);
  ex.layout.push_back({});
  ex.signals.push_back(signals);

  std::vector<std::size_t> frontier{0};
  for (int layer = 1; layer < L; ++layer) {
    std::vector<std::size_t> next;
    for (std::size_t parent : frontier) {
      const Eigen::VectorXd parent_norms = column_norms(ex.signals[parent]);
      for (int j = 0; j < J; ++j) {
        Eigen::MatrixXd child =
            apply_rho(model.config, model.wavelets.matrices[static_cast<std::size_t>(j)] * ex.signals[parent]);
        PathEnergy e;
        e.path = ex.layout[parent];
        e.path.push_back(j);
        e.norms = column_norms(child);
        e.ratios.resize(child.cols());
        for (Eigen::Index t = 0; t < child.cols(); ++t)
          e.ratios(t) = parent_norms(t) > 0 ? e.norms(t) / parent_norms(t) : 0.0;
        e.mean_ratio = e.ratios.size() ? e.ratios.mean() : 0.0;
        e.retained = !prune || e.mean_ratio > tau;
        if (e.retained) {
          next.push_back(ex.layout.size());
          ex.layout.push_back(e.path);
          ex.signals.push_back(std::move(child));
        }
        ex.candidates.push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  return ex;
}

Eigen::MatrixXd aggregate(const CstModel& model, const std::vector<Eigen::MatrixXd>& signals) {
  const Eigen::Index width = model.width();
  const Eigen::Index samples = signals.empty() ? 0 : signals.front().cols();
  Eigen::MatrixXd out(width * static_cast<Eigen::Index>(signals.size()), samples);
  for (std::size_t p = 0; p < signals.size(); ++p) {
    const Eigen::Index row = static_cast<Eigen::Index>(p) * width;
    if (model.config.aggregation == Aggregation::Identity)
      out.middleRows(row, width) = signals[p];
    else
      out.row(row) = signals[p].colwise().mean();
  }
  return out;
}

std::vector<Eigen::MatrixXd> evaluate_layout(const CstModel& model, const Eigen::MatrixXd& signals,
                                             const std::vector<ScatterPath>& layout) {
  std::map<ScatterPath, std::size_t> index;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(layout.size());
  for (const auto& path : layout) {
    for (int j : path)
      require(j >= 0 && j < model.config.J, ErrorCode::IndexError, "path scale out of range");
    require(static_cast<int>(path.size()) < model.config.L, ErrorCode::InvalidArgument,
            "path " + path_name(path) + " is deeper than the model");
    if (path.empty()) {
      out.push_back(signals);
    } else {
      ScatterPath parent(path.begin(), path.end() - 1);
      auto it = index.find(parent);
      require(it != index.end(), ErrorCode::InvalidArgument,
              "layout is not prefix-closed at " + path_name(path));
      out.push_back(apply_rho(model.config,
                              model.wavelets.matrices[static_cast<std::size_t>(path.back())] * out[it->second]));
    }
    index.emplace(path, out.size() - 1);
  }
  return out;
}

}  // namespace

std::string to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Identity ? "identity" : "mean";
}

Aggregation parse_aggregation(const std::string& text) {
  if (text == "identity") return Aggregation::Identity;
  if (text == "mean") return Aggregation::Mean;
  fail(ErrorCode::InvalidArgument, "unknown aggregation '" + text + "'");
}

double CstConfig::gamma() const {
  return gamma_override ? *gamma_override : default_gamma(family, J);
}

void CstConfig::validate() const {
  require(J >= 2, ErrorCode::InvalidScaleCount, "J must be at least 2");
  require(L >= 1, ErrorCode::InvalidArgument, "L must be at least 1");
  require(tau >= 0.0 && tau < 1.0, ErrorCode::InvalidArgument, "tau must lie in [0, 1)");
  require(!gamma_override || (*gamma_override > 0 && std::isfinite(*gamma_override)),
          ErrorCode::InvalidArgument, "gamma must be positive");
  if (const auto* hann = std::get_if<HannFamily>(&family))
    require(hann->R > 0 && hann->R < J + 1, ErrorCode::InvalidArgument,
            "Hann overlap R must satisfy 0 < R < J + 1");
  if (const auto* monic = std::get_if<MonicFamily>(&family)) {
    require(monic->alpha >= 1 && monic->beta >= 1, ErrorCode::InvalidArgument,
            "monic exponents must be at least 1");
    require(monic->K > 0, ErrorCode::InvalidArgument, "monic K must be positive");
  }
}

Provenance CstConfig::describe() const {
  Provenance p;
  p.set("family", family_name(family));
  if (const auto* hann = std::get_if<HannFamily>(&family)) {
    p.set("hann_R", hann->R);
    p.set("hann_warp", hann->warp);
  }
  if (const auto* monic = std::get_if<MonicFamily>(&family)) {
    p.set("monic_alpha", monic->alpha);
    p.set("monic_beta", monic->beta);
    p.set("monic_K", monic->K);
  }
  p.set("J", J);
  p.set("L", L);
  p.set("tau", tau);
  p.set("rho", "abs");
  p.set("aggregation", to_string(aggregation));
  p.set("operator", to_string(operator_kind));
  p.set("gamma", gamma());
  return p;
}

std::string path_name(const ScatterPath& path) {
  if (path.empty()) return "p_root";
  std::string out = "p_";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

std::int64_t feature_count(int J, int L) {
  require(J >= 2, ErrorCode::InvalidScaleCount, "J must be at least 2");
  require(L >= 1, ErrorCode::InvalidArgument, "L must be at least 1");
  std::int64_t total = 0;
  std::int64_t layer = 1;
  for (int l = 0; l < L; ++l) {
    total += layer;
    require(layer <= std::numeric_limits<std::int64_t>::max() / J, ErrorCode::InvalidArgument,
            "feature count overflows");
    layer *= J;
  }
  return total;
}

std::vector<ScatterPath> full_layout(int J, int L) {
  feature_count(J, L);
  std::vector<ScatterPath> layout{{}};
  std::size_t begin = 0;
  for (int layer = 1; layer < L; ++layer) {
    const std::size_t end = layout.size();
    for (std::size_t p = begin; p < end; ++p) {
      for (int j = 0; j < J; ++j) {
        ScatterPath child = layout[p];
        child.push_back(j);
        layout.push_back(std::move(child));
      }
    }
    begin = end;
  }
  return layout;
}

Eigen::Index CstModel::width() const {
  return config.aggregation == Aggregation::Identity ? size() : 1;
}

double CstModel::aggregation_norm() const {
  return config.aggregation == Aggregation::Identity ? 1.0 : 1.0 / std::sqrt(static_cast<double>(size()));
}

Provenance CstModel::describe() const {
  Provenance p = config.describe();
  p.set("N", static_cast<long long>(size()));
  p.merge("filterbank", filterbank.describe());
  return p;
}

CstModel cst_fit(const SampleCovariance& cov, const CstConfig& config) {
  return cst_fit(cov.matrix, config);
}

CstModel cst_fit(const Eigen::MatrixXd& cov, const CstConfig& config) {
  config.validate();
  CstModel model;
  model.config = config;
  model.op = wavelet_operator(cov, config.operator_kind, config.gamma());
  model.filterbank = build_filterbank(model.op, config.family, config.J);
  model.wavelets = wavelet_matrices(model.filterbank, model.op);
  return model;
}

const ScatterNode* ScatterTree::find(const ScatterPath& path) const {
  for (const auto& node : nodes)
    if (node.path == path) return &node;
  return nullptr;
}

std::vector<std::string> FeatureVector::names() const {
  std::vector<std::string> out;
  for (const auto& path : layout) {
    if (width == 1) {
      out.push_back(path_name(path));
    } else {
      for (Eigen::Index i = 0; i < width; ++i) out.push_back(path_name(path) + ":" + std::to_string(i));
    }
  }
  return out;
}

CstResult cst_transform(const CstModel& model, const Eigen::VectorXd& x, double tau) {
  require(tau >= 0.0 && tau < 1.0, ErrorCode::InvalidArgument, "tau must lie in [0, 1)");
  check_signals(model, x);
  Expansion ex = expand(model, x, tau, true);

  CstResult result;
  for (std::size_t i = 0; i < ex.layout.size(); ++i) {
    const double energy = ex.signals[i].norm();
    result.tree.nodes.push_back(ScatterNode{ex.layout[i], ex.signals[i].col(0), energy});
  }
  for (const auto& c : ex.candidates)
    if (!c.retained) result.tree.pruned.push_back(PrunedPath{c.path, c.mean_ratio});
  result.features.coefficients = aggregate(model, ex.signals).col(0);
  result.features.layout = std::move(ex.layout);
  result.features.width = model.width();
  return result;
}

FeatureVector cst_transform_with_layout(const CstModel& model, const Eigen::VectorXd& x,
                                        const std::vector<ScatterPath>& layout) {
  check_signals(model, x);
  FeatureVector out;
  out.coefficients = aggregate(model, evaluate_layout(model, x, layout)).col(0);
  out.layout = layout;
  out.width = model.width();
  return out;
}

FeatureVector cst_transform_full(const CstModel& model, const Eigen::VectorXd& x) {
  return cst_transform_with_layout(model, x, full_layout(model.config.J, model.config.L));
}

std::vector<std::string> BatchResult::names(const std::vector<std::string>& feature_names) const {
  std::vector<std::string> out;
  for (const auto& path : layout) {
    if (width == 1) {
      out.push_back(path_name(path));
      continue;
    }
    for (Eigen::Index i = 0; i < width; ++i) {
      const bool named = static_cast<Eigen::Index>(feature_names.size()) == width;
      out.push_back(path_name(path) + ":" +
                    (named ? feature_names[static_cast<std::size_t>(i)] : std::to_string(i)));
    }
  }
  return out;
}

BatchResult cst_transform_batch(const CstModel& model, const Eigen::MatrixXd& signals, double tau) {
  require(tau >= 0.0 && tau < 1.0, ErrorCode::InvalidArgument, "tau must lie in [0, 1)");
  check_signals(model, signals);
  Expansion ex = expand(model, signals, tau, true);
  BatchResult out;
  out.features = aggregate(model, ex.signals);
  out.layout = std::move(ex.layout);
  out.width = model.width();
  out.candidates = std::move(ex.candidates);
  return out;
}

Eigen::MatrixXd cst_transform_batch_with_layout(const CstModel& model, const Eigen::MatrixXd& signals,
                                                const std::vector<ScatterPath>& layout) {
  check_signals(model, signals);
  return aggregate(model, evaluate_layout(model, signals, layout));
}

std::vector<std::int64_t> layer_counts(const std::vector<ScatterPath>& layout, int L) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(std::max(L, 0)), 0);
  for (const auto& path : layout) {
    require(static_cast<int>(path.size()) < L, ErrorCode::InvalidArgument, "path deeper than L");
    ++counts[path.size()];
  }
  return counts;
}

}  // namespace cst
