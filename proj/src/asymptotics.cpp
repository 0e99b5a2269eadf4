#include "hdlda/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace hdlda {

CoefLimitParams::CoefLimitParams(double eta_in, double l_quad_in,
                                 double delta_sq_in, double c_in, double gamma_in,
                                 double lambda_n_in)
    : eta(eta_in),
      l_quad(l_quad_in),
      delta_sq(delta_sq_in),
      c(c_in),
      gamma(gamma_in),
      lambda_n(lambda_n_in) {
  if (!(l_quad > 0.0)) throw std::invalid_argument("CoefLimitParams: l_quad must be positive");
  if (!(c >= 0.0 && c < 1.0))
    throw std::invalid_argument("CoefLimitParams: c must lie in [0, 1)");
  if (!(gamma >= 0.0)) throw std::invalid_argument("CoefLimitParams: gamma must be >= 0");
  if (!(lambda_n > 0.0))
    throw std::invalid_argument("CoefLimitParams: lambda_n must be positive");
  if (delta_sq < eta * eta / l_quad - 1e-10 * std::max(1.0, delta_sq))
    throw std::invalid_argument("CoefLimitParams: delta_sq violates Cauchy-Schwarz");
}

CoefLimitParams coef_limit_params(const PopulationModel& model,
                                  const Eigen::VectorXd& l, const ProblemDims& dims,
                                  double gamma) {
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("coef_limit_params: covariance is not positive definite");
  const Eigen::VectorXd diff = model.mu1 - model.mu2;
  const Eigen::VectorXd sig_inv_l = llt.solve(l);
  const double l_quad = l.dot(sig_inv_l);
  const double eta = sig_inv_l.dot(diff);
  const double delta_sq = diff.dot(llt.solve(diff));
  return CoefLimitParams(eta, l_quad, delta_sq, dims.concentration(), gamma,
                         dims.lambda() * dims.total());
}

double sigma_gamma_sq(const CoefLimitParams& params) {
  const double omc = 1.0 - params.c;
  const double extra = (params.gamma == 0.0) ? params.lambda_n * params.l_quad : 0.0;
  return (params.eta * params.eta + params.l_quad * params.delta_sq + extra) /
         (omc * omc * omc);
}

McSample standardize_theta(const McSample& draws, const CoefLimitParams& params,
                           int n_total) {
  if (draws.kind != SampleKind::theta_rep && draws.kind != SampleKind::theta_oracle)
    throw std::invalid_argument("standardize_theta: draws must be theta samples");
  if (n_total < 1) throw std::invalid_argument("standardize_theta: n_total must be >= 1");
  const double sigma = std::sqrt(sigma_gamma_sq(params));
  if (!(sigma > 0.0)) throw std::domain_error("standardize_theta: sigma is zero");
  const double center = params.eta / (1.0 - params.c);
  const double scale = std::sqrt(static_cast<double>(n_total)) / sigma;
  McSample out = draws;
  for (double& x : out.draws) x = scale * (x - center);
  return out;
}

ScoreLimit score_limit(double gamma, double c, double b1, double b2,
                       double delta_tilde_sq, int group) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("score_limit: gamma must be >= 0");
  if (!(c >= 0.0 && c < 1.0))
    throw std::invalid_argument("score_limit: c must lie in [0, 1)");
  if (!(b1 > 0.0 && b2 > 0.0) || std::abs(1.0 / b1 + 1.0 / b2 - 1.0) > 1e-9)
    throw std::invalid_argument("score_limit: requires 1/b1 + 1/b2 = 1");
  if (!(delta_tilde_sq >= 0.0))
    throw std::invalid_argument("score_limit: delta_tilde_sq must be nonnegative");
  if (group != 1 && group != 2)
    throw std::invalid_argument("score_limit: group must be 1 or 2");

  const double omc = 1.0 - c;
  const double omc3 = omc * omc * omc;
  const double b_i = (group == 1) ? b1 : b2;
  const double sign = (group == 1) ? 1.0 : -1.0;
  const bool gamma_zero = (gamma == 0.0);
  const double mean =
      gamma_zero ? sign * (c / omc) * (b_i - 2.0) / (2.0 * b_i) * (b1 + b2) : 0.0;
  const double variance =
      (gamma >= 1.0 ? 0.5 * c / omc3 * delta_tilde_sq * delta_tilde_sq : 0.0) +
      (gamma_zero ? c * (b1 + b2) / omc3 : 0.0) +
      (gamma <= 1.0 ? delta_tilde_sq / omc3 : 0.0);
  if (!(variance > 0.0))
    throw std::domain_error("score_limit: degenerate zero variance");
  return ScoreLimit{mean, variance, group};
}

}  // namespace hdlda
