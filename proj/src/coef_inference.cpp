#include "hdlda/coef_inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdlda {

double test_statistic(const PooledEstimates& est, const Eigen::VectorXd& l) {
  if (l.size() != est.dims.p)
    throw std::invalid_argument("test_statistic: contrast dimension mismatch");
  if (l.isZero(0.0)) throw std::invalid_argument("test_statistic: l must be nonzero");
  Eigen::LLT<Eigen::MatrixXd> llt(est.s_pl);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("test_statistic: singular pooled covariance");

  const Eigen::VectorXd diff = est.xbar1 - est.xbar2;
  const Eigen::VectorXd s_inv_diff = llt.solve(diff);
  const Eigen::VectorXd s_inv_l = llt.solve(l);
  const double l_quad = l.dot(s_inv_l);
  if (!(l_quad > 0.0))
    throw std::runtime_error("test_statistic: l' S_pl^-1 l is not positive");
  const double l_diff = l.dot(s_inv_diff);
  const double residual_quad = std::max(diff.dot(s_inv_diff) - l_diff * l_diff / l_quad, 0.0);

  const ProblemDims& d = est.dims;
  const double numerator = std::sqrt(static_cast<double>(d.total() - d.p - 1)) * l_diff;
  const double denominator =
      std::sqrt(l_quad) *
      std::sqrt((d.total() - 2) * d.lambda() + residual_quad);
  return numerator / denominator;
}

Eigen::VectorXd contrast_vector(int p, int i, int j) {
  if (i < 0 || j < 0 || i >= p || j >= p || i == j)
    throw std::invalid_argument("contrast_vector: need distinct indices in [0, p)");
  Eigen::VectorXd l = Eigen::VectorXd::Zero(p);
  l[i] = 1.0;
  l[j] = -1.0;
  return l;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

TestResult two_sided_test(double t_value, const ProblemDims& dims, double alpha) {
  check_alpha(alpha);
  const Dof dof = dims.xi_dof();
  const double threshold = student_t_quantile(1.0 - 0.5 * alpha, dof);
  const double p_value =
      std::clamp(2.0 * (1.0 - student_t_cdf(std::abs(t_value), dof.value)), 0.0, 1.0);
  return TestResult{t_value, dof, p_value, std::abs(t_value) > threshold, alpha,
                    TestSide::two_sided};
}

TestResult one_sided_test(double t_value, const ProblemDims& dims, double alpha) {
  check_alpha(alpha);
  const Dof dof = dims.xi_dof();
  const double threshold = student_t_quantile(1.0 - alpha, dof);
  const double p_value = std::clamp(1.0 - student_t_cdf(t_value, dof.value), 0.0, 1.0);
  return TestResult{t_value, dof, p_value, t_value > threshold, alpha,
                    TestSide::one_sided};
}

FTDensityParams::FTDensityParams(double eta_in, double s_in, ProblemDims dims_in)
    : eta(eta_in), s(s_in), dims(dims_in) {
  if (!(s >= 0.0)) throw std::invalid_argument("FTDensityParams: s must be nonnegative");
  if (!std::isfinite(eta)) throw std::invalid_argument("FTDensityParams: eta must be finite");
}

double density_T(double x, const FTDensityParams& params) {
  const ProblemDims& d = params.dims;
  const double lambda = d.lambda();
  const Dof t_dof = d.xi_dof();
  if (d.p == 1) {
    // The F mixture weight collapses to a point mass at zero.
    return noncentral_t_pdf(x, t_dof, params.eta / std::sqrt(lambda));
  }
  const Dof f_d1(d.p - 1);
  const Dof f_d2 = d.denom_dof();
  const Noncentrality f_ncp(params.s / lambda);
  const double scale = static_cast<double>(d.total() - d.p) / (lambda * (d.p - 1));

  const auto integrand_y = [&](double y) {
    const double delta1 = params.eta / std::sqrt(lambda + y);
    return noncentral_t_pdf(x, t_dof, delta1) *
           noncentral_f_pdf(scale * y, f_d1, f_d2, f_ncp) * scale;
  };
  // y = t / (1 - t) maps (0, infinity) to (0, 1). For p = 2 the F density is
  // singular (integrably) at the origin; y = r^2 flattens it first.
  QuadratureResult result;
  if (d.p == 2) {
    const auto integrand_t = [&](double t) {
      const double one_minus = 1.0 - t;
      const double r = t / one_minus;
      return integrand_y(r * r) * 2.0 * r / (one_minus * one_minus);
    };
    result = integrate_gk(integrand_t, 0.0, 1.0, 1e-9);
  } else {
    const auto integrand_t = [&](double t) {
      const double one_minus = 1.0 - t;
      return integrand_y(t / one_minus) / (one_minus * one_minus);
    };
    result = integrate_gk(integrand_t, 0.0, 1.0, 1e-9);
  }
  return result.value;
}

}  // namespace hdlda
