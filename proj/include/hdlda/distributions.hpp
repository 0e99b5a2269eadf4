#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hdlda/rng.hpp"
#include "hdlda/special.hpp"

namespace hdlda {

/// Degrees of freedom; strictly positive integer.
struct Dof {
  explicit Dof(int v) : value(v) {
    if (v < 1) throw std::invalid_argument("Dof: value must be >= 1");
  }
  int value;
};

/// Noncentrality parameter; finite and nonnegative.
struct Noncentrality {
  explicit Noncentrality(double v) : value(v) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("Noncentrality: value must be finite and >= 0");
  }
  double value;
};

double standard_normal_cdf(double x);

// Samplers are pure functions of the stream state. Samplers that need
// several independent components (noncentral F) partition their stream into
// substreams, so each logical draw must own its stream; Monte Carlo loops
// hand every replication a fresh (seed, base + b) stream.

double sample_standard_normal(RngStream& stream);
double sample_gamma(RngStream& stream, double shape);
std::int64_t sample_poisson(RngStream& stream, double mean);
double sample_chi_square(RngStream& stream, Dof df);

/// Noncentral chi-square via the exact Poisson mixture: a central chi-square
/// with df + 2K degrees of freedom, K ~ Poisson(ncp / 2). With ncp = 0 the
/// draw sequence is identical to sample_chi_square on the same stream.
double sample_noncentral_chi_square(RngStream& stream, Dof df, Noncentrality ncp);

/// Noncentral F as the ratio of independent scaled chi-squares; numerator and
/// denominator come from substreams 0 and 1 of the given stream.
double sample_noncentral_f(RngStream& stream, Dof d1, Dof d2, Noncentrality ncp);

double student_t_pdf(double x, Dof df);
double f_pdf(double x, Dof d1, Dof d2);

/// Density of the noncentral t distribution. Evaluated by series when
/// x * ncp >= 0 and by quadrature of the defining integral otherwise (the
/// alternating series is unstable there).
double noncentral_t_pdf(double x, Dof df, double ncp);

/// Density of the noncentral F distribution: Poisson-weighted series of
/// central F densities, truncated once the remaining Poisson tail mass drops
/// below 1e-12.
double noncentral_f_pdf(double x, Dof d1, Dof d2, Noncentrality ncp);

/// Central t quantile; inverse of student_t_cdf to 1e-12. prob must lie in
/// (0, 1).
double student_t_quantile(double prob, Dof df);

}  // namespace hdlda
