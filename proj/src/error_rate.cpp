#include "hdlda/error_rate.hpp"

#include <cmath>
#include <stdexcept>

#include "hdlda/parallel.hpp"

namespace hdlda {

double er_population(double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("er_population: delta must be nonnegative");
  return normal_cdf(-0.5 * delta);
}

ErPoint er_sample_mc(double delta, const ProblemDims& dims, std::size_t B,
                     const RngStream& base, int threads) {
  if (B < 1) throw std::invalid_argument("er_sample_mc: B must be >= 1");
  const DHatParams params1(delta, dims, 1);
  const DHatParams params2(delta, dims, 2);
  const RngStream base1 = base.substream(0);
  const RngStream base2 = base.substream(1);
  const std::vector<double> draws1 =
      replicate_draws(base.seed(), base1.stream_id(), B, threads,
                      [&](RngStream& s) { return sample_d_hat(s, params1); });
  const std::vector<double> draws2 =
      replicate_draws(base.seed(), base2.stream_id(), B, threads,
                      [&](RngStream& s) { return sample_d_hat(s, params2); });
  std::size_t mis1 = 0, mis2 = 0;
  for (double d : draws1) mis1 += (d <= 0.0);
  for (double d : draws2) mis2 += (d > 0.0);
  const double p1 = static_cast<double>(mis1) / B;
  const double p2 = static_cast<double>(mis2) / B;
  const double se = 0.5 * std::sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / B);
  return ErPoint{0.5 * (p1 + p2), se};
}

AsymptoticErParams::AsymptoticErParams(double gamma_in, double c_in, double b1_in,
                                       double b2_in)
    : gamma(gamma_in), c(c_in), b1(b1_in), b2(b2_in) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("AsymptoticErParams: gamma must be >= 0");
  if (!(c >= 0.0 && c < 1.0))
    throw std::invalid_argument("AsymptoticErParams: c must lie in [0, 1)");
  if (!(b1 > 0.0 && b2 > 0.0))
    throw std::invalid_argument("AsymptoticErParams: b1, b2 must be positive");
  if (std::abs(1.0 / b1 + 1.0 / b2 - 1.0) > 1e-9)
    throw std::invalid_argument("AsymptoticErParams: requires 1/b1 + 1/b2 = 1");
}

AsymptoticErParams AsymptoticErParams::from_dims(double gamma, const ProblemDims& dims) {
  const double lambda = dims.lambda();
  return AsymptoticErParams(gamma, dims.concentration(), lambda * dims.n1,
                            lambda * dims.n2);
}

namespace {

struct LimitMoments {
  double m1;
  double m2;
  double v_sq;
};

LimitMoments limit_moments(const AsymptoticErParams& prm, double tilde_sq) {
  const double omc = 1.0 - prm.c;
  const bool gamma_zero = (prm.gamma == 0.0);
  const bool gamma_le1 = (prm.gamma <= 1.0);
  const bool gamma_ge1 = (prm.gamma >= 1.0);
  const double bsum = prm.b1 + prm.b2;
  const double m1 =
      gamma_zero ? (prm.c / omc) * (prm.b1 - 2.0) / (2.0 * prm.b1) * bsum : 0.0;
  const double m2 =
      gamma_zero ? -(prm.c / omc) * (prm.b2 - 2.0) / (2.0 * prm.b2) * bsum : 0.0;
  const double omc3 = omc * omc * omc;
  const double v_sq =
      (gamma_ge1 ? 0.5 * prm.c / omc3 * tilde_sq * tilde_sq : 0.0) +
      (gamma_zero ? prm.c * bsum / omc3 : 0.0) +
      (gamma_le1 ? tilde_sq / omc3 : 0.0);
  return {m1, m2, v_sq};
}

}  // namespace

double er_sample_asymptotic(double delta, int p, const AsymptoticErParams& params) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("er_sample_asymptotic: delta must be nonnegative");
  if (p < 1) throw std::invalid_argument("er_sample_asymptotic: p must be >= 1");
  const double tilde_sq = std::pow(p, -params.gamma) * delta * delta;
  const double a = 0.5 * tilde_sq / (1.0 - params.c);
  const auto [m1, m2, v_sq] = limit_moments(params, tilde_sq);
  if (!(v_sq > 0.0)) {
    if (a == 0.0) return 0.5;
    throw std::domain_error("er_sample_asymptotic: degenerate limit variance");
  }
  const double v = std::sqrt(v_sq);
  const double shift = a * std::pow(p, 0.5 * std::min(params.gamma, 1.0));
  return 0.5 * (1.0 - normal_cdf((shift - m2) / v)) +
         0.5 * normal_cdf((-shift - m1) / v);
}

double h_c_factor(double delta, int p, double c, double gamma) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("h_c_factor: c must lie in [0, 1)");
  if (!(gamma >= 0.0)) throw std::invalid_argument("h_c_factor: gamma must be >= 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("h_c_factor: delta must be nonnegative");
  if (p < 1) throw std::invalid_argument("h_c_factor: p must be >= 1");
  const double tilde_sq = std::pow(p, -gamma) * delta * delta;
  const AsymptoticErParams equal(gamma, c, 2.0, 2.0);
  const auto moments = limit_moments(equal, tilde_sq);
  if (!(moments.v_sq > 0.0)) {
    // Delta -> 0 limits of the closed form.
    if (gamma > 0.0 && gamma <= 1.0) return std::sqrt(1.0 - c);
    if (gamma == 0.0) return (c > 0.0) ? 0.0 : 1.0;
    throw std::domain_error("h_c_factor: degenerate limit variance");
  }
  return std::pow(p, 0.5 * std::min(gamma, 1.0) - 0.5 * gamma) * std::sqrt(1.0 - c) *
         std::sqrt(tilde_sq) / std::sqrt((1.0 - c) * (1.0 - c) * (1.0 - c) * moments.v_sq);
}

ErrorRateCurve er_curve_population(const std::vector<double>& deltas) {
  ErrorRateCurve curve;
  curve.deltas = deltas;
  curve.method = ErMethod::population;
  for (double d : deltas) {
    curve.er_values.push_back(er_population(d));
    curve.std_errors.push_back(0.0);
  }
  return curve;
}

ErrorRateCurve er_curve_mc(const std::vector<double>& deltas, const ProblemDims& dims,
                           std::size_t B, const RngStream& base, int threads) {
  ErrorRateCurve curve;
  curve.deltas = deltas;
  curve.method = ErMethod::mc_finite;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const ErPoint point = er_sample_mc(deltas[k], dims, B, base.substream(k), threads);
    curve.er_values.push_back(point.value);
    curve.std_errors.push_back(point.std_error);
  }
  return curve;
}

ErrorRateCurve er_curve_asymptotic(const std::vector<double>& deltas, int p,
                                   const AsymptoticErParams& params) {
  ErrorRateCurve curve;
  curve.deltas = deltas;
  curve.method = ErMethod::asymptotic;
  for (double d : deltas) {
    curve.er_values.push_back(er_sample_asymptotic(d, p, params));
    curve.std_errors.push_back(0.0);
  }
  return curve;
}

namespace {

int classify_by_score(double score) { return score > 0.0 ? 1 : 2; }

}  // namespace

int classify(const Eigen::VectorXd& x_new, const PooledEstimates& est) {
  if (x_new.size() != est.dims.p)
    throw std::invalid_argument("classify: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(est.s_pl);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("classify: singular pooled covariance");
  const Eigen::VectorXd diff = est.xbar1 - est.xbar2;
  const Eigen::VectorXd centered = x_new - 0.5 * (est.xbar1 + est.xbar2);
  return classify_by_score(diff.dot(llt.solve(centered)));
}

int classify_population(const Eigen::VectorXd& x_new, const PopulationModel& model) {
  if (x_new.size() != model.dimension())
    throw std::invalid_argument("classify_population: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("classify_population: singular covariance");
  const Eigen::VectorXd diff = model.mu1 - model.mu2;
  const Eigen::VectorXd centered = x_new - 0.5 * (model.mu1 + model.mu2);
  return classify_by_score(diff.dot(llt.solve(centered)));
}

}  // namespace hdlda
