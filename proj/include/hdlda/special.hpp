#pragma once

#include <array>
#include <functional>
#include <stdexcept>

namespace hdlda {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal distribution function, computed via erfc. Absolute error
/// is well below 1e-12 everywhere.
double normal_cdf(double x);

/// Inverse standard normal distribution function (Wichura's algorithm
/// AS 241, double-precision branch). Requires p in (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation. Requires a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma function P(a, x). Requires a > 0,
/// x >= 0.
double incomplete_gamma_lower(double a, double x);

double student_t_cdf(double x, double df);
double chi_square_cdf(double x, double df);
double f_cdf(double x, double d1, double d2);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Thrown when adaptive quadrature cannot reach the requested tolerance; the
/// achieved error estimate is carried along.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadratureResult& partial() const noexcept { return partial_; }

private:
  QuadratureResult partial_;
};

/// Adaptive Gauss-Kronrod (G7, K15) integration of f over [a, b] to the given
/// absolute tolerance.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth = 60);

}  // namespace hdlda
