#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cst/bounds.hpp"
#include "cst/csv.hpp"
#include "cst/error.hpp"
#include "cst/harness.hpp"
#include "cst/provenance.hpp"
#include "cst/readout.hpp"
#include "cst/scattering.hpp"
#include "cst/synthdata.hpp"
#include "cst/wavelets.hpp"

namespace cst::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct GlobalFlags {
  std::string data;
  std::string targets;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string config;
  CLI::Option* seed_option = nullptr;
};

struct CstFlags {
  std::string family = "diffusion";
  std::vector<std::string> families;
  int J = 4;
  int L = 2;
  double tau = 0.0;
  std::string aggregation = "identity";
  std::vector<std::string> aggregations;
  std::string operator_kind = "normalized";
  double gamma = 0.0;
  CLI::Option* gamma_option = nullptr;
  double hann_overlap = 3.0;
  bool hann_warp = true;
  double monic_alpha = 2.0;
  double monic_beta = 2.0;
  double monic_K = 20.0;
};

struct SplitFlags {
  SplitSpec split;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> action;
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

void add_cst_flags(CLI::App* app, CstFlags& f, bool many_methods) {
  if (many_methods) {
    app->add_option("--families", f.families, "Kernel families (diffusion, hann, monic)")->delimiter(',');
    app->add_option("--aggregations", f.aggregations, "Aggregations (identity, mean)")->delimiter(',');
  } else {
    app->add_option("--family", f.family, "Kernel family: diffusion, hann or monic")->capture_default_str();
    app->add_option("--aggregation", f.aggregation, "Aggregation: identity or mean")->capture_default_str();
  }
  app->add_option("-J,--scales", f.J, "Number of wavelet scales")->capture_default_str();
  app->add_option("-L,--layers", f.L, "Number of scattering layers")->capture_default_str();
  app->add_option("--operator", f.operator_kind, "Wavelet operator: normalized or inverted")->capture_default_str();
  f.gamma_option = app->add_option("--gamma", f.gamma, "Operator scale (family default when omitted)");
  app->add_option("--hann-overlap", f.hann_overlap, "Hann overlap R")->capture_default_str();
  app->add_flag("--hann-warp,!--no-hann-warp", f.hann_warp, "Log-warp the Hann spectrum axis");
  app->add_option("--monic-alpha", f.monic_alpha, "Monic low-side exponent")->capture_default_str();
  app->add_option("--monic-beta", f.monic_beta, "Monic high-side exponent")->capture_default_str();
  app->add_option("--monic-K", f.monic_K, "Monic scale ratio")->capture_default_str();
}

void add_tau_flag(CLI::App* app, CstFlags& f) {
  app->add_option("--tau", f.tau, "Pruning threshold in [0, 1)")->capture_default_str();
}

void add_split_flags(CLI::App* app, SplitFlags& f) {
  app->add_option("--unlabeled", f.split.unlabeled, "Unlabeled fraction")->capture_default_str();
  app->add_option("--train", f.split.train, "Train fraction")->capture_default_str();
  app->add_option("--valid", f.split.valid, "Validation fraction")->capture_default_str();
  app->add_option("--test", f.split.test, "Test fraction")->capture_default_str();
}

KernelFamily make_family(const std::string& name, const CstFlags& f) {
  KernelFamily family = parse_family(name);
  if (auto* hann = std::get_if<HannFamily>(&family)) {
    hann->R = f.hann_overlap;
    hann->warp = f.hann_warp;
  }
  if (auto* monic = std::get_if<MonicFamily>(&family)) {
    monic->alpha = f.monic_alpha;
    monic->beta = f.monic_beta;
    monic->K = f.monic_K;
  }
  return family;
}

CstConfig make_config(const CstFlags& f, const std::string& family, const std::string& aggregation) {
  CstConfig c;
  c.family = make_family(family, f);
  c.J = f.J;
  c.L = f.L;
  c.tau = f.tau;
  c.aggregation = parse_aggregation(aggregation);
  c.operator_kind = parse_operator_kind(f.operator_kind);
  if (f.gamma_option->count()) c.gamma_override = f.gamma;
  c.validate();
  return c;
}

std::vector<MethodSpec> cst_methods(const CstFlags& f, const std::vector<std::string>& default_families,
                                    const std::vector<std::string>& default_aggregations) {
  const auto& families = f.families.empty() ? default_families : f.families;
  const auto& aggregations = f.aggregations.empty() ? default_aggregations : f.aggregations;
  std::vector<MethodSpec> methods;
  for (const auto& family : families)
    for (const auto& agg : aggregations) methods.push_back(cst_method(make_config(f, family, agg)));
  return methods;
}

void require_seed(const GlobalFlags& g, const std::string& command) {
  require(g.seed_option->count() > 0, ErrorCode::InvalidArgument, "--seed is required for " + command);
}

DataMatrix load_data(const GlobalFlags& g) {
  require(!g.data.empty(), ErrorCode::InvalidArgument, "--data is required");
  return read_data_csv(g.data);
}

Eigen::VectorXd load_targets(const GlobalFlags& g, const DataMatrix& data) {
  require(!g.targets.empty(), ErrorCode::InvalidArgument, "--targets is required");
  Eigen::VectorXd y = read_vector_csv(g.targets);
  require(y.size() == data.samples(), ErrorCode::ShapeError,
          "targets have " + std::to_string(y.size()) + " rows but data has " + std::to_string(data.samples()));
  require(y.allFinite(), ErrorCode::InvalidData, "targets contain non-finite values");
  return y;
}

fs::path output_dir(const GlobalFlags& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  require(!ec && fs::is_directory(g.out), ErrorCode::IoError, "cannot create output directory '" + g.out + "'");
  return fs::path(g.out);
}

int default_pca_k(const DataMatrix& data) { return static_cast<int>(std::min<Eigen::Index>(10, data.features())); }

class Session {
 public:
  Session(std::string command, const std::vector<std::string>& args, const GlobalFlags& g, std::ostream& out)
      : out_(out) {
    base_.set("tool", std::string("cst ") + kVersion);
    base_.set("command", std::move(command));
    base_.set("args", join(args, " "));
    if (g.seed_option->count()) base_.set("seed", static_cast<unsigned long long>(g.seed));
    if (!g.data.empty()) base_.set("data", g.data);
    if (!g.targets.empty()) base_.set("targets", g.targets);
    if (!g.config.empty()) base_.set("config", g.config);
  }

  Provenance provenance() const { return base_; }

  void emit(const fs::path& path, const Provenance& prov) const {
    prov.write(path.string() + ".provenance");
    out_ << "wrote " << path.string() << "\n";
  }

  void write(const fs::path& path, const CsvTable& table, const Provenance& prov) const {
    write_csv_table(path, table);
    emit(path, prov);
  }

  void write(const fs::path& path, const TextTable& table, const Provenance& prov) const {
    write_text_table(path, table);
    emit(path, prov);
  }

 private:
  Provenance base_;
  std::ostream& out_;
};

std::vector<std::string> indexed_names(const std::string& prefix, Eigen::Index n) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

// Flat key = value file expanded into `--key=value` arguments; explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, std::string& config_path) {
  static const std::map<std::string, std::string> short_names = {{"-J", "scales"}, {"-L", "layers"}};
  std::set<std::string> explicit_keys;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (auto it = short_names.find(a.substr(0, 2)); it != short_names.end()) explicit_keys.insert(it->second);
    if (a.rfind("--", 0) != 0) continue;
    std::string key = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
    if (key.rfind("no-", 0) == 0) key = key.substr(3);
    explicit_keys.insert(key);
    if (key == "config") config_path = a.find('=') != std::string::npos ? a.substr(a.find('=') + 1)
                                      : i + 1 < args.size()             ? args[i + 1]
                                                                        : "";
  }
  if (config_path.empty()) return args;
  std::istringstream stream(read_text_file(config_path));
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(stream);
  } catch (const CLI::ParseError& e) {
    fail(ErrorCode::InvalidArgument, "config file '" + config_path + "': " + e.what());
  }
  std::vector<std::string> expanded = args;
  for (const auto& item : items) {
    if (item.name == "--") continue;
    require(item.parents.empty(), ErrorCode::InvalidArgument,
            "config file '" + config_path + "': sections are not supported (" + item.fullname() + ")");
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    require(key != "config", ErrorCode::InvalidArgument, "config files cannot include other config files");
    if (explicit_keys.count(key)) continue;
    expanded.push_back("--" + key + "=" + join(item.inputs, ","));
  }
  return expanded;
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Usage:
      return kUsage;
    case ErrorCategory::Data:
      return kData;
    case ErrorCategory::Numerical:
      return kNumerical;
  }
  return kNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance scattering transforms: features, baselines, bounds and experiments", "cst"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  GlobalFlags g;
  app.add_option("--data", g.data, "Observation CSV (one sample per row, header of feature names)");
  app.add_option("--targets", g.targets, "Single-column target CSV");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  g.seed_option = app.add_option("--seed", g.seed, "Random seed (required by stochastic commands)");
  app.add_option("--config", g.config, "Flat key = value file; command-line flags take precedence");

  std::vector<Command> commands;
  std::vector<std::string> argv;

  // synth
  SynthSpec synth_spec;
  double synth_rank = 0.0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic regression dataset");
  synth->add_option("--features", synth_spec.N, "Number of features N")->capture_default_str();
  synth->add_option("--samples", synth_spec.T, "Number of samples T")->capture_default_str();
  synth->add_option("--tail", synth_spec.tail, "Eigenvalue tail strength in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  auto* rank_option = synth->add_option("--rank", synth_rank, "Effective rank (default N/4)");
  synth->add_option("--tail-rate", synth_spec.tail_rate, "Decay rate of the tail term")->capture_default_str();
  synth->add_option("--noise", synth_spec.noise_sigma, "Target noise standard deviation")->capture_default_str();
  commands.push_back({synth, [&] {
                        require_seed(g, "synth");
                        synth_spec.seed = g.seed;
                        if (rank_option->count()) synth_spec.effective_rank = synth_rank;
                        synth_spec.validate();
                        const fs::path dir = output_dir(g);
                        Session session("synth", argv, g, out);
                        const auto ds = synth_generate(synth_spec);
                        Provenance prov = session.provenance();
                        prov.merge("synth", synth_spec.describe());
                        write_data_csv(dir / "data.csv", ds.data);
                        session.emit(dir / "data.csv", prov);
                        write_vector_csv(dir / "targets.csv", "y", ds.targets);
                        session.emit(dir / "targets.csv", prov);
                        session.write(dir / "true_cov.csv", CsvTable{ds.data.feature_names, ds.true_cov}, prov);
                        write_vector_csv(dir / "true_weights.csv", "w", ds.true_weights);
                        session.emit(dir / "true_weights.csv", prov);
                      }});

  // transform
  CstFlags transform_flags;
  std::string transform_fit;
  auto* transform = app.add_subcommand("transform", "Compute scattering features for every sample");
  add_cst_flags(transform, transform_flags, false);
  add_tau_flag(transform, transform_flags);
  transform->add_option("--fit-data", transform_fit, "Fit the covariance on this file instead of --data");
  commands.push_back({transform, [&] {
                        const auto data = load_data(g);
                        const auto fit = transform_fit.empty() ? data : read_data_csv(transform_fit);
                        require(fit.features() == data.features(), ErrorCode::ShapeError,
                                "--fit-data and --data differ in feature count");
                        const auto config =
                            make_config(transform_flags, transform_flags.family, transform_flags.aggregation);
                        const fs::path dir = output_dir(g);
                        Session session("transform", argv, g, out);
                        const auto model = cst_fit(sample_covariance(fit), config);
                        const auto batch = cst_transform_batch(model, data.values, config.tau);
                        Provenance prov = session.provenance();
                        prov.merge("model", model.describe());
                        prov.set("paths", static_cast<long long>(batch.layout.size()));
                        prov.set("width", static_cast<long long>(batch.width));
                        std::vector<double> counts;
                        for (auto c : layer_counts(batch.layout, config.L)) counts.push_back(static_cast<double>(c));
                        prov.set("layer_counts", counts);
                        session.write(dir / "features.csv",
                                      CsvTable{batch.names(data.feature_names), batch.features.transpose()}, prov);
                      }});

  // pca
  int pca_k = 0;
  std::string pca_fit_path;
  auto* pca = app.add_subcommand("pca", "Project samples onto the leading principal components");
  pca->add_option("-k,--components", pca_k, "Number of components")->required();
  pca->add_option("--fit-data", pca_fit_path, "Fit the covariance on this file instead of --data");
  commands.push_back({pca, [&] {
                        const auto data = load_data(g);
                        const auto fit = pca_fit_path.empty() ? data : read_data_csv(pca_fit_path);
                        require(fit.features() == data.features(), ErrorCode::ShapeError,
                                "--fit-data and --data differ in feature count");
                        const fs::path dir = output_dir(g);
                        Session session("pca", argv, g, out);
                        const auto model = pca_fit(sample_covariance(fit), pca_k);
                        Provenance prov = session.provenance();
                        prov.set("k", pca_k);
                        prov.set("eigenvalues", model.source_eigenvalues);
                        const auto names = indexed_names("pc", pca_k);
                        session.write(dir / "pca.csv", CsvTable{names, pca_transform(model, data.values).transpose()},
                                      prov);
                        session.write(dir / "pca_components.csv", CsvTable{names, model.components}, prov);
                      }});

  // stability
  CstFlags stab_flags;
  SplitFlags stab_split;
  StabilityOptions stab_opt;
  std::vector<int> stab_pca;
  bool stab_raw = false;
  auto* stability = app.add_subcommand("stability", "Embedding stability under covariance subsampling");
  add_cst_flags(stability, stab_flags, true);
  add_split_flags(stability, stab_split);
  stability->add_option("--pca-k", stab_pca, "PCA component counts (default min(10, N))")->delimiter(',');
  stability->add_flag("--raw,!--no-raw", stab_raw, "Include the raw-feature baseline");
  stability->add_option("--fractions", stab_opt.fractions, "Subsample fractions of the fit pool")->delimiter(',');
  stability->add_option("--repeats", stab_opt.seeds, "Repetitions per fraction")->capture_default_str();
  stability->add_option("--alphas", stab_opt.alphas, "Ridge penalty grid")->delimiter(',');
  commands.push_back({stability, [&] {
                        require_seed(g, "stability");
                        const auto data = load_data(g);
                        const auto y = load_targets(g, data);
                        stab_opt.methods = cst_methods(stab_flags, {"diffusion", "hann", "monic"}, {"identity"});
                        for (int k : stab_pca.empty() ? std::vector<int>{default_pca_k(data)} : stab_pca)
                          stab_opt.methods.push_back(pca_method(k));
                        if (stab_raw) stab_opt.methods.push_back(raw_method());
                        stab_opt.split = stab_split.split;
                        stab_opt.seed = g.seed;
                        const fs::path dir = output_dir(g);
                        Session session("stability", argv, g, out);
                        const auto report = run_stability(data, y, stab_opt);
                        Provenance prov = session.provenance();
                        prov.set("fractions", stab_opt.fractions);
                        prov.set("repeats", stab_opt.seeds);
                        prov.set("alphas", stab_opt.alphas);
                        std::vector<std::string> labels;
                        for (const auto& m : stab_opt.methods) labels.push_back(m.label());
                        prov.set("methods", labels);
                        session.write(dir / "stability.csv", report.table(), prov);
                        std::vector<std::string> series;
                        std::vector<double> x;
                        std::vector<double> mse_y;
                        std::vector<double> mae_y;
                        for (const auto& row : report.rows) {
                          if (row.skipped) continue;
                          series.push_back(row.method);
                          x.push_back(row.fraction);
                          mse_y.push_back(row.embedding_mse);
                          mae_y.push_back(row.mae);
                        }
                        session.write(dir / "stability_mse.plotdata", plot_data(series, x, mse_y), prov);
                        session.write(dir / "stability_mae.plotdata", plot_data(series, x, mae_y), prov);
                      }});

  // prune-sweep
  CstFlags prune_flags;
  SplitFlags prune_split;
  PruningOptions prune_opt;
  auto* prune = app.add_subcommand("prune-sweep", "Regression error and cost across pruning thresholds");
  add_cst_flags(prune, prune_flags, false);
  add_split_flags(prune, prune_split);
  prune->add_option("--taus", prune_opt.taus, "Thresholds, ascending in [0, 1)")->delimiter(',');
  prune->add_option("--repeats", prune_opt.seeds, "Repetitions per threshold")->capture_default_str();
  prune->add_option("--alphas", prune_opt.alphas, "Ridge penalty grid")->delimiter(',');
  commands.push_back({prune, [&] {
                        require_seed(g, "prune-sweep");
                        const auto data = load_data(g);
                        const auto y = load_targets(g, data);
                        prune_opt.config = make_config(prune_flags, prune_flags.family, prune_flags.aggregation);
                        prune_opt.split = prune_split.split;
                        prune_opt.seed = g.seed;
                        const fs::path dir = output_dir(g);
                        Session session("prune-sweep", argv, g, out);
                        const auto report = run_pruning_sweep(data, y, prune_opt);
                        Provenance prov = session.provenance();
                        prov.merge("cst", prune_opt.config.describe());
                        prov.set("taus", prune_opt.taus);
                        prov.set("repeats", prune_opt.seeds);
                        session.write(dir / "pruning.csv", report.table(), prov);
                        std::vector<std::string> series;
                        std::vector<double> x;
                        std::vector<double> mae_y;
                        std::vector<double> count_y;
                        for (const auto& row : report.rows) {
                          series.push_back("cst");
                          x.push_back(row.tau);
                          mae_y.push_back(row.mae);
                          count_y.push_back(static_cast<double>(row.feature_count));
                        }
                        session.write(dir / "pruning_mae.plotdata", plot_data(series, x, mae_y), prov);
                        session.write(dir / "pruning_features.plotdata", plot_data(series, x, count_y), prov);
                      }});

  // labeled-sweep
  CstFlags lab_flags;
  LabeledOptions lab_opt;
  std::vector<int> lab_pca;
  bool lab_raw = true;
  auto* labeled = app.add_subcommand("labeled-sweep", "Regression error as the labeled set grows");
  add_cst_flags(labeled, lab_flags, true);
  labeled->add_option("--pca-k", lab_pca, "PCA component counts (default min(10, N))")->delimiter(',');
  labeled->add_flag("--raw,!--no-raw", lab_raw, "Include the raw-feature baseline");
  labeled->add_option("--train-fractions", lab_opt.train_fractions, "Labeled fractions")->delimiter(',');
  labeled->add_option("--valid", lab_opt.valid, "Validation fraction")->capture_default_str();
  labeled->add_option("--test", lab_opt.test, "Test fraction")->capture_default_str();
  labeled->add_option("--repeats", lab_opt.seeds, "Repetitions per fraction")->capture_default_str();
  labeled->add_option("--alphas", lab_opt.alphas, "Ridge penalty grid")->delimiter(',');
  commands.push_back({labeled, [&] {
                        require_seed(g, "labeled-sweep");
                        const auto data = load_data(g);
                        const auto y = load_targets(g, data);
                        lab_opt.methods = cst_methods(lab_flags, {"diffusion"}, {"identity", "mean"});
                        for (int k : lab_pca.empty() ? std::vector<int>{default_pca_k(data)} : lab_pca)
                          lab_opt.methods.push_back(pca_method(k));
                        if (lab_raw) lab_opt.methods.push_back(raw_method());
                        lab_opt.seed = g.seed;
                        const fs::path dir = output_dir(g);
                        Session session("labeled-sweep", argv, g, out);
                        const auto report = run_labeled_sweep(data, y, lab_opt);
                        Provenance prov = session.provenance();
                        prov.set("train_fractions", lab_opt.train_fractions);
                        prov.set("repeats", lab_opt.seeds);
                        session.write(dir / "labeled.csv", report.table(), prov);
                        std::vector<std::string> series;
                        std::vector<double> x;
                        std::vector<double> mae_y;
                        for (const auto& row : report.rows) {
                          if (row.skipped) continue;
                          series.push_back(row.method);
                          x.push_back(row.train_fraction);
                          mae_y.push_back(row.mae);
                        }
                        session.write(dir / "labeled.plotdata", plot_data(series, x, mae_y), prov);
                      }});

  // bounds
  CstFlags bound_flags;
  BoundConstants constants;
  int bound_pca_k = 0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the stability bounds for a fitted model");
  add_cst_flags(bounds, bound_flags, false);
  add_tau_flag(bounds, bound_flags);
  bounds->add_option("--Q", constants.Q, "Absolute constant Q")->capture_default_str();
  bounds->add_option("--G", constants.G, "Variance constant G >= 1")->capture_default_str();
  auto* kmax_option = bounds->add_option("--kmax", constants.k_max, "Kurtosis constant (estimated when omitted)");
  bounds->add_option("--epsilon", constants.epsilon, "Confidence parameter epsilon")->capture_default_str();
  bounds->add_option("--u", constants.u, "Confidence parameter u")->capture_default_str();
  auto* bound_k_option = bounds->add_option("--pca-k", bound_pca_k, "PCA component count (default min(10, N))");
  commands.push_back({bounds, [&] {
                        const auto data = load_data(g);
                        const auto config = make_config(bound_flags, bound_flags.family, bound_flags.aggregation);
                        const fs::path dir = output_dir(g);
                        Session session("bounds", argv, g, out);
                        const auto cov = sample_covariance(data);
                        const auto model = cst_fit(cov, config);
                        const auto cov_eig = eig_sym(cov.matrix);
                        const Eigen::MatrixXd centred = data.values.colwise() - cov.mean;
                        if (!kmax_option->count())
                          constants.k_max = estimate_kmax(make_data_matrix(centred), cov_eig);
                        const auto& bank = model.filterbank;
                        const double P = *std::max_element(bank.lipschitz.begin(), bank.lipschitz.end());
                        const double w1 = cov_eig.eigenvalues(0);
                        const double delta =
                            wavelet_delta(P, data.features(), data.samples(), constants, bank.gamma, w1, w1);
                        const auto batch = cst_transform_batch(model, centred, config.tau);
                        const auto counts = layer_counts(batch.layout, config.L);
                        const std::vector<std::int64_t> deep(counts.begin() + 1, counts.end());
                        const int k = bound_k_option->count() ? bound_pca_k : default_pca_k(data);

                        TextTable table{{"quantity", "value"}, {}};
                        const auto add = [&](const std::string& name, double v) {
                          table.rows.push_back({name, format_double(v)});
                        };
                        add("N", static_cast<double>(data.features()));
                        add("T", static_cast<double>(data.samples()));
                        add("gamma", bank.gamma);
                        add("cov_norm", w1);
                        add("k_max", constants.k_max);
                        add("lipschitz_max", P);
                        add("frame_lower", bank.frame_lower);
                        add("frame_upper", bank.frame_upper);
                        add("aggregation_norm", model.aggregation_norm());
                        add("wavelet_delta", delta);
                        add("wavelet_delta_probability", wavelet_delta_probability(constants));
                        for (int l = 0; l < config.L; ++l)
                          add("retained_layer_" + std::to_string(l), static_cast<double>(counts[static_cast<std::size_t>(l)]));
                        add("cst_bound_per_unit_signal",
                            cst_stability_bound(delta, bank.frame_upper, model.aggregation_norm(), 1.0, deep, config.L));
                        add("signal_bound_per_unit_perturbation",
                            signal_stability_bound(bank.frame_upper, model.aggregation_norm(), 1.0, counts, config.L));
                        if (k >= 2) {
                          const auto gap = pca_gap_scale(cov_eig.eigenvalues, k);
                          add("pca_k", k);
                          add("pca_gap_scale", gap.value);
                        }
                        Provenance prov = session.provenance();
                        prov.merge("model", model.describe());
                        prov.set("Q", constants.Q);
                        prov.set("G", constants.G);
                        prov.set("epsilon", constants.epsilon);
                        prov.set("u", constants.u);
                        prov.set("k_max_estimated", !kmax_option->count());
                        session.write(dir / "bounds.csv", table, prov);
                        out << format_text_table(table);
                      }});

  // grid-search
  CstFlags grid_flags;
  SplitFlags grid_split;
  GridOptions grid_opt;
  std::vector<std::string> grid_kinds;
  auto* grid = app.add_subcommand("grid-search", "Validation-selected hyperparameter grid");
  grid->add_option("--families", grid_flags.families, "Kernel families")->delimiter(',');
  grid->add_option("--aggregation", grid_flags.aggregation, "Aggregation: identity or mean")->capture_default_str();
  grid->add_option("--scales-grid", grid_opt.Js, "Values of J")->delimiter(',');
  grid->add_option("--layers-grid", grid_opt.Ls, "Values of L")->delimiter(',');
  grid->add_option("--operators", grid_kinds, "Operator kinds")->delimiter(',');
  grid->add_option("--pca-k", grid_opt.pca_ks, "PCA component counts")->delimiter(',');
  grid->add_option("--alphas", grid_opt.alphas, "Ridge penalty grid")->delimiter(',');
  add_split_flags(grid, grid_split);
  commands.push_back({grid, [&] {
                        require_seed(g, "grid-search");
                        const auto data = load_data(g);
                        const auto y = load_targets(g, data);
                        if (!grid_flags.families.empty()) {
                          grid_opt.families.clear();
                          for (const auto& name : grid_flags.families)
                            grid_opt.families.push_back(make_family(name, grid_flags));
                        }
                        if (!grid_kinds.empty()) {
                          grid_opt.kinds.clear();
                          for (const auto& name : grid_kinds) grid_opt.kinds.push_back(parse_operator_kind(name));
                        }
                        grid_opt.aggregation = parse_aggregation(grid_flags.aggregation);
                        grid_opt.split = grid_split.split;
                        grid_opt.seed = g.seed;
                        const fs::path dir = output_dir(g);
                        Session session("grid-search", argv, g, out);
                        const auto report = run_grid_search(data, y, grid_opt);
                        Provenance prov = session.provenance();
                        prov.set("alphas", grid_opt.alphas);
                        session.write(dir / "grid.csv", report.table(), prov);
                      }});

  try {
    argv = expand_config(args, g.config);
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  }

  try {
    for (const auto& command : commands)
      if (command.app->parsed()) command.action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kSuccess;
}

}  // namespace cst::cli
