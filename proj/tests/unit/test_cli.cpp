#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "cst/csv.hpp"
#include "cst/scattering.hpp"
#include "cst/synthdata.hpp"
#include "fixtures.hpp"

using namespace cst;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "covscatter_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path synth_into(const std::string& name, const std::string& seed = "7", int samples = 200) {
  const auto dir = scratch(name);
  const auto r = run({"synth", "--features", "8", "--samples", std::to_string(samples), "--tail", "0.5", "--seed",
                      seed, "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

}  // namespace

TEST(Cli, SynthIsDeterministic) {
  const auto a = synth_into("det_a");
  const auto b = synth_into("det_b");
  for (const char* file : {"data.csv", "targets.csv", "true_cov.csv"})
    EXPECT_EQ(read_text_file(a / file), read_text_file(b / file)) << file;
  EXPECT_TRUE(fs::exists(a / "data.csv.provenance"));
  EXPECT_NE(read_text_file(a / "data.csv.provenance").find("synth.tail = 0.5"), std::string::npos);
}

TEST(Cli, SynthRoundTripsThroughIngestion) {
  const auto dir = synth_into("roundtrip", "11");
  SynthSpec spec;
  spec.N = 8;
  spec.T = 200;
  spec.tail = 0.5;
  spec.seed = 11;
  const auto ds = synth_generate(spec);
  EXPECT_EQ(read_data_csv(dir / "data.csv").values, ds.data.values);
  EXPECT_EQ(read_vector_csv(dir / "targets.csv"), ds.targets);
}

TEST(Cli, UsageErrors) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run({"synth", "--tail", "1.5", "--seed", "1", "--out", dir.string()}).code, cli::kUsage);
  EXPECT_EQ(run({"synth", "--out", dir.string()}).code, cli::kUsage);
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"transform", "--bogus", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kSuccess);
}

TEST(Cli, DataAndNumericalErrors) {
  const auto dir = scratch("errors");
  EXPECT_EQ(run({"transform", "--data", (dir / "missing.csv").string(), "--out", dir.string()}).code, cli::kData);
  write_text_file(dir / "bad.csv", "a,b\n1,x\n2,3\n");
  EXPECT_EQ(run({"transform", "--data", (dir / "bad.csv").string(), "--out", dir.string()}).code, cli::kData);
  write_text_file(dir / "flat.csv", "a,b\n1,1\n1,1\n1,1\n");
  EXPECT_EQ(run({"transform", "--data", (dir / "flat.csv").string(), "--out", dir.string()}).code, cli::kNumerical);
}

TEST(Cli, TransformWidthsAndLibraryEquivalence) {
  const auto dir = synth_into("transform");
  const auto data = read_data_csv(dir / "data.csv");
  for (const std::string agg : {"identity", "mean"}) {
    const auto out = dir / agg;
    const auto r = run({"transform", "--data", (dir / "data.csv").string(), "--out", out.string(), "-J", "3", "-L",
                        "3", "--aggregation", agg});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = read_csv_table(out / "features.csv");
    const Eigen::Index width = agg == "identity" ? 8 : 1;
    EXPECT_EQ(table.rows.cols(), feature_count(3, 3) * width);
    EXPECT_EQ(table.rows.rows(), 200);

    CstConfig config;
    config.J = 3;
    config.L = 3;
    config.aggregation = parse_aggregation(agg);
    const auto model = cst_fit(sample_covariance(data), config);
    const auto batch = cst_transform_batch(model, data.values, 0.0);
    EXPECT_EQ(table.header, batch.names(data.feature_names));
    EXPECT_EQ(table.rows, batch.features.transpose());
  }
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto dir = synth_into("config");
  write_text_file(dir / "run.conf", "# transform settings\nscales = 3\nlayers = 2\naggregation = mean\n");
  const auto out = dir / "out";
  const auto r = run({"transform", "--data", (dir / "data.csv").string(), "--config", (dir / "run.conf").string(),
                      "--out", out.string(), "--layers", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv_table(out / "features.csv").rows.cols(), feature_count(3, 3));
  write_text_file(dir / "bad.conf", "scales = 3\nnot_a_key = 1\n");
  EXPECT_EQ(run({"transform", "--data", (dir / "data.csv").string(), "--config", (dir / "bad.conf").string(),
                 "--out", out.string()})
                .code,
            cli::kUsage);
}

TEST(Cli, ExperimentCommandsWriteReports) {
  const auto dir = synth_into("experiments", "5", 300);
  const std::string data = (dir / "data.csv").string();
  const std::string targets = (dir / "targets.csv").string();
  const std::string out = (dir / "out").string();
  const std::vector<std::string> common = {"--data", data, "--targets", targets, "--out", out, "--seed", "3"};
  const auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), common.begin(), common.end());
    return args;
  };
  EXPECT_EQ(run(with({"stability", "--fractions", "0.2,1.0", "--repeats", "2", "-J", "3"})).code, 0);
  EXPECT_EQ(run(with({"prune-sweep", "--taus", "0,0.3", "--repeats", "1", "-J", "3", "-L", "3"})).code, 0);
  EXPECT_EQ(run(with({"labeled-sweep", "--train-fractions", "0.1,0.4", "--repeats", "1", "-J", "3"})).code, 0);
  EXPECT_EQ(run(with({"grid-search", "--scales-grid", "3", "--layers-grid", "2", "--pca-k", "4"})).code, 0);
  EXPECT_EQ(run({"bounds", "--data", data, "--out", out}).code, 0);
  EXPECT_EQ(run({"pca", "-k", "3", "--data", data, "--out", out}).code, 0);
  for (const char* file : {"stability.csv", "stability_mse.plotdata", "pruning.csv", "labeled.csv", "grid.csv",
                           "bounds.csv", "pca.csv", "stability.csv.provenance"})
    EXPECT_TRUE(fs::exists(fs::path(out) / file)) << file;
  EXPECT_NE(read_text_file(fs::path(out) / "stability.csv").find("pca-k8"), std::string::npos);
  EXPECT_EQ(run({"stability", "--data", data, "--targets", targets, "--out", out}).code, cli::kUsage);
}
