#include "cst/synthdata.hpp"

#include <cmath>

#include "cst/error.hpp"
#include "cst/random.hpp"

namespace cst {

double SynthSpec::rank() const { return effective_rank ? *effective_rank : N / 4.0; }

void SynthSpec::validate() const {
  require(N >= 2, ErrorCode::InvalidArgument, "N must be at least 2");
  require(T >= 2, ErrorCode::InvalidArgument, "T must be at least 2");
  require(tail >= 0.0 && tail <= 1.0, ErrorCode::InvalidArgument, "tail must lie in [0, 1]");
  require(rank() > 0 && std::isfinite(rank()), ErrorCode::InvalidArgument,
          "effective rank must be positive");
  require(tail_rate > 0 && std::isfinite(tail_rate), ErrorCode::InvalidArgument,
          "tail rate must be positive");
  require(noise_sigma >= 0 && std::isfinite(noise_sigma), ErrorCode::InvalidArgument,
          "noise sigma must be non-negative");
}

Provenance SynthSpec::describe() const {
  Provenance p;
  p.set("N", N);
  p.set("T", T);
  p.set("tail", tail);
  p.set("effective_rank", rank());
  p.set("tail_rate", tail_rate);
  p.set("noise_sigma", noise_sigma);
  p.set("seed", static_cast<unsigned long long>(seed));
  return p;
}

Eigen::VectorXd synth_profile(int N, double tail, double effective_rank, double tail_rate) {
  Eigen::VectorXd out(N);
  for (int i = 0; i < N; ++i) {
    const double r = i / effective_rank;
    out(i) = (1.0 - tail) * std::exp(-r * r) + tail * std::exp(-tail_rate * r);
  }
  return out;
}

SynthDataset synth_generate(const SynthSpec& spec) {
  spec.validate();
  const Eigen::VectorXd profile = synth_profile(spec.N, spec.tail, spec.rank(), spec.tail_rate);

  Rng basis_rng = make_rng(spec.seed, "synth.basis");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(standard_normal(basis_rng, spec.N, spec.N));
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < spec.N; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);

  SynthDataset out;
  out.true_cov = q * profile.asDiagonal() * q.transpose();
  out.true_cov = 0.5 * (out.true_cov + out.true_cov.transpose()).eval();

  Eigen::MatrixXd jittered = out.true_cov;
  jittered.diagonal().array() += 1e-12 * out.true_cov.trace() / spec.N;
  Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  require(llt.info() == Eigen::Success, ErrorCode::DegenerateCovariance,
          "synthetic covariance is not positive definite");

  Rng sample_rng = make_rng(spec.seed, "synth.samples");
  Eigen::MatrixXd x = llt.matrixL() * standard_normal(sample_rng, spec.N, spec.T);

  Rng weight_rng = make_rng(spec.seed, "synth.weights");
  out.true_weights = standard_normal(weight_rng, spec.N);
  out.true_weights.normalize();

  Rng noise_rng = make_rng(spec.seed, "synth.noise");
  const Eigen::VectorXd noise = standard_normal(noise_rng, spec.T);
  out.targets = x.transpose() * out.true_weights + spec.noise_sigma * noise;

  std::vector<std::string> names;
  for (int i = 0; i < spec.N; ++i) names.push_back("x" + std::to_string(i));
  out.data = make_data_matrix(std::move(x), std::move(names));
  return out;
}

}  // namespace cst
