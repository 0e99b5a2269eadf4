#include "hdlda/stochastic_rep.hpp"

#include <cmath>
#include <stdexcept>

namespace hdlda {

ThetaScalarParams::ThetaScalarParams(double eta_in, double l_quad_in, double s_in,
                                     ProblemDims dims_in)
    : eta(eta_in), l_quad(l_quad_in), s(s_in), dims(dims_in) {
  if (!(l_quad > 0.0)) throw std::invalid_argument("ThetaScalarParams: l_quad must be positive");
  if (!(s >= 0.0)) throw std::invalid_argument("ThetaScalarParams: s must be nonnegative");
  if (!std::isfinite(eta) || !std::isfinite(l_quad) || !std::isfinite(s))
    throw std::invalid_argument("ThetaScalarParams: non-finite parameter");
}

ThetaScalarParams theta_scalar_params(const PopulationModel& model,
                                      const Eigen::VectorXd& l,
                                      const ProblemDims& dims) {
  if (model.dimension() != dims.p || l.size() != dims.p)
    throw std::invalid_argument("theta_scalar_params: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("theta_scalar_params: covariance is not positive definite");
  const Eigen::VectorXd diff = model.mu1 - model.mu2;
  const Eigen::VectorXd sig_inv_l = llt.solve(l);
  const double l_quad = l.dot(sig_inv_l);
  const double eta = sig_inv_l.dot(diff);
  const double delta_sq = diff.dot(llt.solve(diff));
  double s = delta_sq - eta * eta / l_quad;
  // Cauchy-Schwarz makes s >= 0 up to roundoff.
  if (s < -1e-10 * std::max(1.0, delta_sq))
    throw std::runtime_error("theta_scalar_params: inconsistent quadratic forms");
  s = std::max(s, 0.0);
  return ThetaScalarParams(eta, l_quad, s, dims);
}

DHatParams::DHatParams(double delta_in, ProblemDims dims_in, int true_group_in)
    : delta(delta_in), dims(dims_in), true_group(true_group_in) {
  if (!(delta >= 0.0)) throw std::invalid_argument("DHatParams: delta must be nonnegative");
  if (true_group != 1 && true_group != 2)
    throw std::invalid_argument("DHatParams: true_group must be 1 or 2");
}

double sample_theta_scalar(RngStream& stream, const ThetaScalarParams& params) {
  const ProblemDims& d = params.dims;
  const double lambda = d.lambda();
  RngStream xi_stream = stream.substream(0);
  RngStream z_stream = stream.substream(1);
  const double xi = sample_chi_square(xi_stream, d.xi_dof());
  const double z0 = sample_standard_normal(z_stream);
  double u = 0.0;
  if (d.p >= 2) {
    RngStream u_stream = stream.substream(4);
    u = sample_noncentral_f(u_stream, Dof(d.p - 1), d.denom_dof(),
                            Noncentrality(params.s / lambda));
  }
  const double var_factor =
      lambda + lambda * (d.p - 1) * u / static_cast<double>(d.total() - d.p);
  return (d.total() - 2) / xi *
         (params.eta + std::sqrt(var_factor * params.l_quad) * z0);
}

Eigen::VectorXd sample_theta_vector(RngStream& stream, const PopulationModel& model,
                                    const Eigen::MatrixXd& l_mat,
                                    const ProblemDims& dims) {
  const int k = static_cast<int>(l_mat.rows());
  if (l_mat.cols() != dims.p || model.dimension() != dims.p)
    throw std::invalid_argument("sample_theta_vector: dimension mismatch");
  if (k >= dims.p)
    throw std::invalid_argument("sample_theta_vector: requires k < p");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(l_mat);
  if (qr.rank() < k)
    throw std::invalid_argument("sample_theta_vector: L is rank deficient");

  RngStream xi_stream = stream.substream(0);
  RngStream x_stream = stream.substream(1);
  RngStream z_stream = stream.substream(2);
  RngStream w_stream = stream.substream(3);

  const double xi = sample_chi_square(xi_stream, dims.xi_dof());
  const Eigen::VectorXd x_check =
      sample_mvn(x_stream, model.mu1 - model.mu2, dims.lambda() * model.sigma);
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = sample_standard_normal(z_stream);
  const double w = sample_chi_square(w_stream, dims.denom_dof());
  const int denom_dof = dims.total() - dims.p;
  const Eigen::VectorXd t0 = z * std::sqrt(denom_dof / w);

  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_theta_vector: covariance is not positive definite");
  const Eigen::VectorXd sig_inv_x = llt.solve(x_check);
  const double x_quad = x_check.dot(sig_inv_x);
  const Eigen::VectorXd l_sig_x = l_mat * sig_inv_x;
  const Eigen::MatrixXd sig_inv_lt = llt.solve(l_mat.transpose());
  Eigen::MatrixXd m = l_mat * sig_inv_lt -
                      (l_sig_x * l_sig_x.transpose()) / x_quad;
  m = 0.5 * (m + m.transpose().eval());
  const Eigen::MatrixXd m_sqrt = spd_sqrt(m);

  return (dims.total() - 2) / xi *
         (l_sig_x + std::sqrt(x_quad / denom_dof) * (m_sqrt * t0));
}

double sample_d_hat(RngStream& stream, const DHatParams& params) {
  const ProblemDims& d = params.dims;
  const double lambda = d.lambda();
  const double n_i = (params.true_group == 1) ? d.n1 : d.n2;
  const double sign = (params.true_group == 1) ? 1.0 : -1.0;
  const double delta = params.delta;

  RngStream xi_stream = stream.substream(0);
  RngStream normal_stream = stream.substream(1);
  const double xi = sample_chi_square(xi_stream, d.xi_dof());
  const double z0 = sample_standard_normal(normal_stream);
  const double w0 = sample_standard_normal(normal_stream);

  double xi2 = 0.0;
  double u = 0.0;
  const double shifted = delta + std::sqrt(lambda) * w0;
  if (d.p >= 2) {
    RngStream xi2_stream = stream.substream(2);
    xi2 = sample_chi_square(xi2_stream, Dof(d.p - 1));
    const double denom = lambda * xi2 + shifted * shifted;
    const double ncp_xi1 =
        (denom > 0.0)
            ? (static_cast<double>(d.n1) * d.n2 / (n_i * n_i)) * delta * delta * xi2 / denom
            : 0.0;
    RngStream xi1_stream = stream.substream(3);
    const double xi1 =
        sample_noncentral_chi_square(xi1_stream, Dof(d.p - 1), Noncentrality(ncp_xi1));
    RngStream u_stream = stream.substream(4);
    u = sample_noncentral_f(u_stream, Dof(d.p - 1), d.denom_dof(),
                            Noncentrality(xi1 / d.total()));
  }

  const double quad = lambda * xi2 + shifted * shifted;
  const double mean_main = sign * (lambda * n_i - 2.0) / (2.0 * lambda * n_i) * quad;
  const double mean_extra =
      sign / (lambda * n_i) * (delta * delta + std::sqrt(lambda) * delta * w0);
  const double noise_factor = std::sqrt(
      1.0 + 1.0 / d.total() + (d.p - 1) * u / static_cast<double>(d.total() - d.p));
  return (d.total() - 2) / xi *
         (mean_main + mean_extra + noise_factor * std::sqrt(quad) * z0);
}

double brute_force_theta(RngStream& stream, const PopulationModel& model,
                         const Eigen::VectorXd& l, const ProblemDims& dims) {
  RngStream s1 = stream.substream(0);
  RngStream s2 = stream.substream(1);
  const GroupSample g1 = sample_group(s1, model, 1, dims.n1);
  const GroupSample g2 = sample_group(s2, model, 2, dims.n2);
  const PooledEstimates est = pooled_estimates(g1, g2);
  return l.dot(discriminant_coefficients(est).values);
}

double brute_force_d_hat(RngStream& stream, const PopulationModel& model,
                         const ProblemDims& dims, int true_group) {
  if (true_group != 1 && true_group != 2)
    throw std::invalid_argument("brute_force_d_hat: true_group must be 1 or 2");
  RngStream s1 = stream.substream(0);
  RngStream s2 = stream.substream(1);
  RngStream sx = stream.substream(2);
  const GroupSample g1 = sample_group(s1, model, 1, dims.n1);
  const GroupSample g2 = sample_group(s2, model, 2, dims.n2);
  const PooledEstimates est = pooled_estimates(g1, g2);
  const Eigen::VectorXd x = sample_mvn(
      sx, (true_group == 1) ? model.mu1 : model.mu2, model.sigma);
  Eigen::LLT<Eigen::MatrixXd> llt(est.s_pl);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("brute_force_d_hat: singular pooled covariance");
  const Eigen::VectorXd diff = est.xbar1 - est.xbar2;
  const Eigen::VectorXd centered = x - 0.5 * (est.xbar1 + est.xbar2);
  return diff.dot(llt.solve(centered));
}

}  // namespace hdlda
