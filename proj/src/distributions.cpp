#include "hdlda/distributions.hpp"

#include <cmath>
#include <limits>

namespace hdlda {

double standard_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("standard_normal_cdf: x must be finite");
  return normal_cdf(x);
}

double sample_standard_normal(RngStream& stream) {
  return normal_quantile(stream.next_double());
}

double sample_gamma(RngStream& stream, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(stream, shape + 1.0);
    return g * std::pow(stream.next_double(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  while (true) {
    double x, v;
    do {
      x = sample_standard_normal(stream);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace {

std::int64_t poisson_knuth(RngStream& stream, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= stream.next_double();
  } while (p > limit);
  return k - 1;
}

// Hoermann's PTRS transformed-rejection sampler, valid for mean >= 10.
std::int64_t poisson_ptrs(RngStream& stream, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = stream.next_double() - 0.5;
    const double v = stream.next_double();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

double chi_square_raw(RngStream& stream, double df) {
  return 2.0 * sample_gamma(stream, 0.5 * df);
}

}  // namespace

std::int64_t sample_poisson(RngStream& stream, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("sample_poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  return (mean < 10.0) ? poisson_knuth(stream, mean) : poisson_ptrs(stream, mean);
}

double sample_chi_square(RngStream& stream, Dof df) {
  return chi_square_raw(stream, df.value);
}

double sample_noncentral_chi_square(RngStream& stream, Dof df, Noncentrality ncp) {
  if (ncp.value == 0.0) return sample_chi_square(stream, df);
  const std::int64_t k = sample_poisson(stream, 0.5 * ncp.value);
  return chi_square_raw(stream, df.value + 2.0 * static_cast<double>(k));
}

double sample_noncentral_f(RngStream& stream, Dof d1, Dof d2, Noncentrality ncp) {
  RngStream num_stream = stream.substream(0);
  RngStream den_stream = stream.substream(1);
  const double num = sample_noncentral_chi_square(num_stream, d1, ncp) / d1.value;
  const double den = sample_chi_square(den_stream, d2) / d2.value;
  return num / den;
}

double student_t_pdf(double x, Dof df) {
  const double v = df.value;
  const double ln_f = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                      0.5 * std::log(v * M_PI) -
                      0.5 * (v + 1.0) * std::log1p(x * x / v);
  return std::exp(ln_f);
}

double f_pdf(double x, Dof d1, Dof d2) {
  const double a = d1.value;
  const double b = d2.value;
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (a > 2.0) return 0.0;
    if (a == 2.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  const double ln_f = 0.5 * a * std::log(a / b) + (0.5 * a - 1.0) * std::log(x) -
                      0.5 * (a + b) * std::log1p(a * x / b) -
                      (std::lgamma(0.5 * a) + std::lgamma(0.5 * b) -
                       std::lgamma(0.5 * (a + b)));
  return std::exp(ln_f);
}

namespace {

// Series form of the noncentral t density,
//   f(x) = pref * sum_j Gamma((v+j+1)/2) / j! * tau^j,  tau = x d sqrt(2/(v+x^2)),
// valid without cancellation when tau >= 0. Terms are accumulated in
// log-sum-exp style so large noncentralities cannot overflow.
double noncentral_t_pdf_series(double x, double v, double delta) {
  const double a = v + x * x;
  const double tau = x * delta * std::sqrt(2.0 / a);
  double log_even = std::lgamma(0.5 * (v + 1.0));
  double log_odd = std::lgamma(0.5 * (v + 2.0)) + std::log(tau > 0.0 ? tau : 1.0);
  if (tau == 0.0) log_odd = -std::numeric_limits<double>::infinity();
  const double log_tau2 = (tau > 0.0) ? 2.0 * std::log(tau) : -std::numeric_limits<double>::infinity();

  double max_log = std::max(log_even, log_odd);
  double sum = std::exp(log_even - max_log) + std::exp(log_odd - max_log);
  for (int m = 0; m < 100000; ++m) {
    log_even += log_tau2 + std::log(0.5 * (v + 2 * m + 1)) -
                std::log((2.0 * m + 1.0) * (2.0 * m + 2.0));
    log_odd += log_tau2 + std::log(0.5 * (v + 2 * m + 2)) -
               std::log((2.0 * m + 2.0) * (2.0 * m + 3.0));
    const double step_max = std::max(log_even, log_odd);
    if (step_max > max_log) {
      sum *= std::exp(max_log - step_max);
      max_log = step_max;
    }
    const double add = std::exp(log_even - max_log) + std::exp(log_odd - max_log);
    sum += add;
    if (add < sum * 1e-17 && m > 2) break;
  }
  const double ln_pref = 0.5 * v * std::log(v) - 0.5 * delta * delta -
                         0.5 * std::log(M_PI) - std::lgamma(0.5 * v) -
                         0.5 * (v + 1.0) * std::log(a);
  return std::exp(ln_pref + max_log + std::log(sum));
}

// Integral form,
//   f(x) = K * int_0^inf u^v exp(-A (u - m)^2 / 2) du,
// with A = v + x^2 and m = x d / A. The integrand is log-concave, so a
// mode-centered window captures it to full precision for any sign of x d.
double noncentral_t_pdf_integral(double x, double v, double delta) {
  const double a = v + x * x;
  const double m = x * delta / a;
  const double mode = 0.5 * (m + std::sqrt(m * m + 4.0 * v / a));
  const double width = 1.0 / std::sqrt(v / (mode * mode) + a);
  const auto log_integrand = [&](double u) {
    return v * std::log(u) - 0.5 * a * (u - m) * (u - m);
  };
  const double peak = log_integrand(mode);
  const double lo = std::max(mode - 15.0 * width, 1e-300);
  const double hi = mode + 15.0 * width;
  const auto f = [&](double u) { return std::exp(log_integrand(u) - peak); };
  const QuadratureResult integral = integrate_gk(f, lo, hi, 1e-13 * width * 20.0);
  const double ln_k = std::log(2.0) + 0.5 * v * std::log(v) -
                      0.5 * v * delta * delta / a - 0.5 * std::log(2.0 * M_PI) -
                      0.5 * v * std::log(2.0) - std::lgamma(0.5 * v);
  return std::exp(ln_k + peak + std::log(integral.value));
}

}  // namespace

double noncentral_t_pdf(double x, Dof df, double ncp) {
  if (!std::isfinite(x) || !std::isfinite(ncp))
    throw std::invalid_argument("noncentral_t_pdf: arguments must be finite");
  if (ncp == 0.0) return student_t_pdf(x, df);
  const double v = df.value;
  if (x * ncp >= 0.0) return noncentral_t_pdf_series(x, v, ncp);
  return noncentral_t_pdf_integral(x, v, ncp);
}

double noncentral_f_pdf(double x, Dof d1, Dof d2, Noncentrality ncp) {
  if (!(x >= 0.0)) return 0.0;
  if (ncp.value == 0.0) return f_pdf(x, d1, d2);
  const double half_ncp = 0.5 * ncp.value;
  const double log_half_ncp = std::log(half_ncp);
  double mass = 0.0;
  double density = 0.0;
  for (int k = 0;; ++k) {
    const double log_w = k * log_half_ncp - half_ncp - std::lgamma(k + 1.0);
    const double w = std::exp(log_w);
    const double dof_k = d1.value + 2.0 * k;
    const double scale = d1.value / dof_k;
    // Central F density with dof_k numerator degrees of freedom, by the same
    // log-space formula as f_pdf but with non-integer-safe dof.
    double fk;
    const double xs = x * scale;
    if (xs == 0.0) {
      fk = (dof_k > 2.0) ? 0.0 : (dof_k == 2.0 ? 1.0 : std::numeric_limits<double>::infinity());
    } else {
      const double ln_f = 0.5 * dof_k * std::log(dof_k / d2.value) +
                          (0.5 * dof_k - 1.0) * std::log(xs) -
                          0.5 * (dof_k + d2.value) * std::log1p(dof_k * xs / d2.value) -
                          (std::lgamma(0.5 * dof_k) + std::lgamma(0.5 * d2.value) -
                           std::lgamma(0.5 * (dof_k + d2.value)));
      fk = std::exp(ln_f);
    }
    density += w * scale * fk;
    mass += w;
    if (1.0 - mass < 1e-12 && k >= 1) break;
    if (k > 10000000)
      throw std::runtime_error("noncentral_f_pdf: series failed to terminate");
  }
  return density;
}

double student_t_quantile(double prob, Dof df) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("student_t_quantile: prob must lie in (0, 1)");
  if (prob == 0.5) return 0.0;
  const double upper = std::max(prob, 1.0 - prob);
  double hi = 1.0;
  while (student_t_cdf(hi, df.value) < upper && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df.value) < upper)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo))) break;
  }
  const double q = 0.5 * (lo + hi);
  return (prob < 0.5) ? -q : q;
}

}  // namespace hdlda
