#include "cst/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cst/error.hpp"

namespace cst {
namespace {

constexpr double kDomainTol = 1e-10;
constexpr double kWarpOffset = 1e-6;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// λ^{2^k} by k squarings.
double dyadic_power(double lambda, int k) {
  double p = lambda;
  for (int i = 0; i < k; ++i) p *= p;
  return p;
}

double diffusion_kernel(int j, double lambda) {
  if (j == 0) return 1.0 - lambda;
  const double p = dyadic_power(lambda, j - 1);
  return p - p * p;
}

double warp(const Filterbank& b, double lambda) {
  return b.lambda_max * std::log1p(lambda / b.warp_offset) / std::log1p(b.lambda_max / b.warp_offset);
}

double unwarp(const Filterbank& b, double warped) {
  return b.warp_offset * std::expm1(warped * std::log1p(b.lambda_max / b.warp_offset) / b.lambda_max);
}

double warp_slope(const Filterbank& b, double lambda) {
  return b.lambda_max / ((lambda + b.warp_offset) * std::log1p(b.lambda_max / b.warp_offset));
}

double hann_kernel(const Filterbank& b, int j, double lambda) {
  const auto& hann = std::get<HannFamily>(b.family);
  const double x = hann.warp ? warp(b, lambda) : lambda;
  const double s = x - b.translations[static_cast<std::size_t>(j)];
  if (s <= -b.hann_width || s >= 0.0) return 0.0;
  return 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * s / b.hann_width + std::numbers::pi);
}

double monic_profile(const Filterbank& b, double mu) {
  const auto& monic = std::get<MonicFamily>(b.family);
  if (mu < b.knee_low) return std::pow(mu / b.knee_low, monic.alpha);
  if (mu > b.knee_high) return std::pow(b.knee_high / mu, monic.beta);
  const double u = (mu - b.knee_low) / (b.knee_high - b.knee_low);
  return b.cubic[0] + u * (b.cubic[1] + u * (b.cubic[2] + u * b.cubic[3]));
}

void configure_hann(Filterbank& b, const HannFamily& hann) {
  const double shift = b.J + 1.0 - hann.R;
  b.hann_width = hann.R * b.lambda_max / shift;
  b.warp_offset = kWarpOffset * b.lambda_max;
  b.translations.resize(static_cast<std::size_t>(b.J));
  b.lipschitz.resize(static_cast<std::size_t>(b.J));
  const double slope = std::numbers::pi / b.hann_width;
  for (int i = 0; i < b.J; ++i) {
    const double t = (i + 1) * b.lambda_max / shift;
    b.translations[static_cast<std::size_t>(i)] = t;
    double p = slope;
    if (hann.warp) p *= warp_slope(b, unwarp(b, std::max(0.0, t - b.hann_width)));
    b.lipschitz[static_cast<std::size_t>(i)] = p;
  }
}

void configure_monic(Filterbank& b, const MonicFamily& monic, const Eigen::VectorXd& eigenvalues) {
  std::vector<double> ascending(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(ascending.begin(), ascending.end());
  const auto n = static_cast<long>(ascending.size());
  const long low = std::max(1L, n / 4);
  const long high = std::min(n, (3 * n + 3) / 4);
  b.knee_low = ascending[static_cast<std::size_t>(low - 1)];
  b.knee_high = ascending[static_cast<std::size_t>(high - 1)];
  require(b.knee_low > 0.0 && b.knee_high > b.knee_low, ErrorCode::DegenerateSpectrum,
          "monic kernel needs distinct positive quartile eigenvalues");

  const double span = b.knee_high - b.knee_low;
  Eigen::Matrix4d m;
  m << 1, 0, 0, 0,
       1, 1, 1, 1,
       0, 1, 0, 0,
       0, 1, 2, 3;
  Eigen::Vector4d rhs(1.0, 1.0, monic.alpha / b.knee_low * span, -monic.beta / b.knee_high * span);
  const Eigen::Vector4d c = m.fullPivLu().solve(rhs);
  for (int k = 0; k < 4; ++k) b.cubic[static_cast<std::size_t>(k)] = c(k);

  const double cubic_slope = (std::abs(c(1)) + 2 * std::abs(c(2)) + 3 * std::abs(c(3))) / span;
  const double piece_slope =
      std::max({monic.alpha / b.knee_low, cubic_slope, monic.beta / b.knee_high});
  b.scales.resize(static_cast<std::size_t>(b.J));
  b.lipschitz.resize(static_cast<std::size_t>(b.J));
  for (int i = 0; i < b.J; ++i) {
    const double exponent = static_cast<double>(b.J - 1 - i) / (b.J - 1);
    const double t = b.knee_high / b.lambda_max * std::pow(monic.K, exponent);
    b.scales[static_cast<std::size_t>(i)] = t;
    b.lipschitz[static_cast<std::size_t>(i)] = t * piece_slope;
  }
}

}  // namespace

std::string family_name(const KernelFamily& family) {
  return std::visit(overloaded{[](const DiffusionFamily&) { return std::string("diffusion"); },
                               [](const HannFamily&) { return std::string("hann"); },
                               [](const MonicFamily&) { return std::string("monic"); }},
                    family);
}

KernelFamily parse_family(const std::string& name) {
  if (name == "diffusion") return DiffusionFamily{};
  if (name == "hann") return HannFamily{};
  if (name == "monic") return MonicFamily{};
  fail(ErrorCode::InvalidArgument, "unknown wavelet family '" + name + "'");
}

double diffusion_gamma(int J) {
  require(J >= 2, ErrorCode::InvalidScaleCount, "J must be at least 2");
  return std::pow(0.5, 1.0 / std::ldexp(1.0, J - 2));
}

double default_gamma(const KernelFamily& family, int J) {
  return std::visit(overloaded{[J](const DiffusionFamily&) { return diffusion_gamma(J); },
                               [](const HannFamily&) { return 10.0; },
                               [](const MonicFamily&) { return 1.0; }},
                    family);
}

double Filterbank::eval(int j, double lambda) const {
  require(j >= 0 && j < J, ErrorCode::IndexError, "kernel index out of range");
  require(std::isfinite(lambda) && lambda >= -kDomainTol && lambda <= gamma + kDomainTol,
          ErrorCode::DomainError, "eigenvalue outside the operator domain");
  lambda = std::clamp(lambda, 0.0, gamma);
  return std::visit(overloaded{[&](const DiffusionFamily&) { return diffusion_kernel(j, lambda); },
                               [&](const HannFamily&) { return hann_kernel(*this, j, lambda); },
                               [&](const MonicFamily&) {
                                 return monic_profile(*this, scales[static_cast<std::size_t>(j)] * lambda);
                               }},
                    family);
}

double Filterbank::frame_function(double lambda) const {
  double g = 0.0;
  for (int j = 0; j < J; ++j) {
    const double h = eval(j, lambda);
    g += h * h;
  }
  return g;
}

Provenance Filterbank::describe() const {
  Provenance p;
  p.set("family", family_name(family));
  p.set("J", J);
  p.set("gamma", gamma);
  std::visit(overloaded{[](const DiffusionFamily&) {},
                        [&](const HannFamily& h) {
                          p.set("R", h.R);
                          p.set("warp", h.warp);
                          p.set("lambda_max", lambda_max);
                          p.set("translations", translations);
                        },
                        [&](const MonicFamily& m) {
                          p.set("alpha", m.alpha);
                          p.set("beta", m.beta);
                          p.set("K", m.K);
                          p.set("lambda_max", lambda_max);
                          p.set("knee_low", knee_low);
                          p.set("knee_high", knee_high);
                          p.set("cubic", std::vector<double>(cubic.begin(), cubic.end()));
                          p.set("scales", scales);
                        }},
             family);
  p.set("frame_lower", frame_lower);
  p.set("frame_upper", frame_upper);
  p.set("lipschitz", lipschitz);
  return p;
}

double kernel_eval(const Filterbank& bank, int j, double lambda) { return bank.eval(j, lambda); }

Filterbank build_filterbank(const WaveletOperator& op, const KernelFamily& family, int J) {
  require(J >= 2, ErrorCode::InvalidScaleCount, "J must be at least 2");
  const Eigen::VectorXd& eigenvalues = op.decomposition.eigenvalues;
  require(eigenvalues.size() > 0, ErrorCode::ShapeError, "empty operator spectrum");

  Filterbank b;
  b.family = family;
  b.J = J;
  b.gamma = op.gamma;
  b.lambda_max = eigenvalues.maxCoeff();

  std::visit(
      overloaded{[&](const DiffusionFamily&) {
                   b.lipschitz.resize(static_cast<std::size_t>(J));
                   for (int j = 0; j < J; ++j)
                     b.lipschitz[static_cast<std::size_t>(j)] = j == 0 ? 1.0 : std::ldexp(1.0, j - 1);
                 },
                 [&](const HannFamily& hann) {
                   require(hann.R > 0 && hann.R < J + 1, ErrorCode::InvalidArgument,
                           "Hann overlap R must satisfy 0 < R < J + 1");
                   require(b.lambda_max > 0, ErrorCode::DegenerateSpectrum, "operator spectrum is zero");
                   configure_hann(b, hann);
                 },
                 [&](const MonicFamily& monic) {
                   require(monic.alpha >= 1 && monic.beta >= 1, ErrorCode::InvalidArgument,
                           "monic exponents must be at least 1");
                   require(monic.K > 0, ErrorCode::InvalidArgument, "monic K must be positive");
                   require(b.lambda_max > 0, ErrorCode::DegenerateSpectrum, "operator spectrum is zero");
                   configure_monic(b, monic, eigenvalues);
                 }},
      family);

  double gmin = std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double g = b.frame_function(eigenvalues(i));
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  b.spectral_frame_lower = std::sqrt(gmin);
  b.spectral_frame_upper = std::sqrt(gmax);
  b.frame_lower = b.spectral_frame_lower;
  b.frame_upper = b.spectral_frame_upper;
  if (std::holds_alternative<DiffusionFamily>(family) && op.gamma <= 1.0) {
    b.frame_lower = 1.0 - op.gamma;
    b.frame_upper = 1.0;
  }
  return b;
}

WaveletMatrixSet wavelet_matrices(const Filterbank& bank, const WaveletOperator& op) {
  const Eigen::Index n = op.size();
  require(op.decomposition.eigenvectors.rows() == n && op.decomposition.eigenvalues.size() == n,
          ErrorCode::ShapeError, "operator decomposition has the wrong size");
  const Eigen::MatrixXd& v = op.decomposition.eigenvectors;
  WaveletMatrixSet set;
  set.family = bank.family;
  set.op = op;
  set.matrices.reserve(static_cast<std::size_t>(bank.J));
  Eigen::VectorXd response(n);
  for (int j = 0; j < bank.J; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) response(i) = bank.eval(j, op.decomposition.eigenvalues(i));
    Eigen::MatrixXd h = v * response.asDiagonal() * v.transpose();
    set.matrices.push_back(0.5 * (h + h.transpose()));
  }
  return set;
}

Eigen::VectorXd diffusion_apply(const Eigen::MatrixXd& op, int j, const Eigen::VectorXd& x) {
  require(j >= 0, ErrorCode::IndexError, "negative scale index");
  require(op.rows() == x.size() && op.cols() == x.size(), ErrorCode::ShapeError,
          "signal length does not match operator");
  if (j == 0) return x - op * x;
  const long low = 1L << (j - 1);
  Eigen::VectorXd v = x;
  for (long s = 0; s < low; ++s) v = op * v;
  Eigen::VectorXd w = v;
  for (long s = 0; s < low; ++s) w = op * w;
  return v - w;
}

std::vector<Eigen::VectorXd> diffusion_apply_all(const Eigen::MatrixXd& op, int J,
                                                 const Eigen::VectorXd& x) {
  require(op.rows() == x.size() && op.cols() == x.size(), ErrorCode::ShapeError,
          "signal length does not match operator");
  // powers[k] = T^{2^k} x, plus T^0 x = x.
  std::vector<Eigen::VectorXd> powers;
  Eigen::VectorXd v = op * x;
  long applied = 1;
  powers.push_back(v);
  for (int k = 1; k < J; ++k) {
    while (applied < (1L << k)) {
      v = op * v;
      ++applied;
    }
    powers.push_back(v);
  }
  std::vector<Eigen::VectorXd> out;
  out.push_back(x - powers[0]);
  for (int j = 1; j < J; ++j)
    out.push_back(powers[static_cast<std::size_t>(j - 1)] - powers[static_cast<std::size_t>(j)]);
  return out;
}

LocalizationProfile localization_profile(const WaveletMatrixSet& set, Eigen::Index center, int j) {
  const Eigen::Index n = set.op.size();
  require(center >= 0 && center < n, ErrorCode::IndexError, "center index out of range");
  require(j >= 0 && j < set.count(), ErrorCode::IndexError, "scale index out of range");

  LocalizationProfile out;
  out.response = set.matrices[static_cast<std::size_t>(j)].col(center);

  const long s_low = j == 0 ? 0 : 1L << (j - 1);
  const long s_high = j == 0 ? 1 : 1L << j;
  Eigen::VectorXd v = Eigen::VectorXd::Unit(n, center);
  Eigen::VectorXd low = v;
  for (long s = 1; s <= s_high; ++s) {
    v = set.op.matrix * v;
    if (s == s_low) low = v;
  }
  const Eigen::VectorXd& high = v;

  const double inf = std::numeric_limits<double>::infinity();
  out.distance_low = low.unaryExpr([inf](double e) { return e == 0.0 ? inf : 1.0 / std::abs(e); });
  out.distance_high = high.unaryExpr([inf](double e) { return e == 0.0 ? inf : 1.0 / std::abs(e); });
  out.bound = low.cwiseAbs() + high.cwiseAbs();
  out.bound_holds = ((out.response.cwiseAbs() - out.bound).array() <= kDomainTol).all();
  return out;
}

}  // namespace cst
