#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "hdlda/model_core.hpp"
#include "hdlda/stochastic_rep.hpp"

namespace hdlda {

/// A Monte Carlo estimate with its binomial standard error.
struct ErPoint {
  double value;
  double std_error;
};

/// Error rate of the optimal rule: Phi(-Delta / 2).
double er_population(double delta);

/// Error rate of the plug-in rule by Monte Carlo on the d_hat representation:
/// B replications per group, group 1 counting {d_hat <= 0} and group 2
/// counting {d_hat > 0}. Group g replications run on substream(g - 1) of the
/// base stream, replication b on stream_id base + b.
ErPoint er_sample_mc(double delta, const ProblemDims& dims, std::size_t B,
                     const RngStream& base, int threads = 1);

/// Limit parameters of the high-dimensional regime. b1, b2 are the limits of
/// lambda n1, lambda n2 and must satisfy 1/b1 + 1/b2 = 1.
struct AsymptoticErParams {
  AsymptoticErParams(double gamma, double c, double b1, double b2);

  /// Derives (c, b1, b2) from a concrete instance: c = p / (n1 + n2),
  /// b_i = lambda n_i.
  static AsymptoticErParams from_dims(double gamma, const ProblemDims& dims);

  double gamma;
  double c;
  double b1;
  double b2;
};

/// High-dimensional approximation of the plug-in error rate, with
/// delta_tilde^2 approximated by p^-gamma Delta^2 and the centering ratio by
/// 1 / (1 - c).
double er_sample_asymptotic(double delta, int p, const AsymptoticErParams& params);

/// Shrinkage factor h_c of the equal-sample-size regime, where the asymptotic
/// error rate is Phi(-h_c Delta / 2). Equals sqrt(1 - c) for gamma in (0, 1).
double h_c_factor(double delta, int p, double c, double gamma);

enum class ErMethod { population, mc_finite, asymptotic };

/// An error-rate curve over a Delta grid, tagged with how it was computed.
struct ErrorRateCurve {
  std::vector<double> deltas;
  std::vector<double> er_values;
  std::vector<double> std_errors;  // zero for closed-form methods
  ErMethod method;
  std::string config;
};

ErrorRateCurve er_curve_population(const std::vector<double>& deltas);

/// Monte Carlo curve; the Delta at index k runs on substream(k) of the base
/// stream.
ErrorRateCurve er_curve_mc(const std::vector<double>& deltas, const ProblemDims& dims,
                           std::size_t B, const RngStream& base, int threads = 1);

ErrorRateCurve er_curve_asymptotic(const std::vector<double>& deltas, int p,
                                   const AsymptoticErParams& params);

/// Plug-in classification rule; score exactly zero goes to group 2.
int classify(const Eigen::VectorXd& x_new, const PooledEstimates& est);

/// Optimal rule with known population parameters.
int classify_population(const Eigen::VectorXd& x_new, const PopulationModel& model);

}  // namespace hdlda
