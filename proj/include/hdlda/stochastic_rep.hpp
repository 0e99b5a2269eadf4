#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlda/model_core.hpp"

namespace hdlda {

/// Scalar functionals of the population that drive the representation of
/// l'a_hat: eta = l' Sigma^-1 (mu1 - mu2), l_quad = l' Sigma^-1 l, and
/// s = (mu1 - mu2)' R_l (mu1 - mu2).
struct ThetaScalarParams {
  ThetaScalarParams(double eta, double l_quad, double s, ProblemDims dims);

  double eta;
  double l_quad;
  double s;
  ProblemDims dims;
};

/// Computes ThetaScalarParams from a population model and direction l, using
/// the identity s = Delta^2 - eta^2 / l_quad.
ThetaScalarParams theta_scalar_params(const PopulationModel& model,
                                      const Eigen::VectorXd& l,
                                      const ProblemDims& dims);

/// Inputs of the classification-score representation: the Mahalanobis
/// distance Delta and the group the fresh observation actually comes from.
struct DHatParams {
  DHatParams(double delta, ProblemDims dims, int true_group);

  double delta;
  ProblemDims dims;
  int true_group;
};

enum class SampleKind { theta_rep, theta_oracle, dhat_rep, dhat_oracle, t_stat };

/// A tagged batch of Monte Carlo draws.
struct McSample {
  std::vector<double> draws;
  SampleKind kind;
  std::string meta;
};

// The representation samplers consume fixed substreams of their stream, in
// this order: 0 -> xi, 1 -> z0 (and w0), 2 -> xi2, 3 -> xi1, 4 -> u for the
// scalar/score samplers; 0 -> xi, 1 -> x_check, 2 -> t0 normals, 3 -> t0
// chi-square for the vector sampler. One logical draw per stream.

/// One draw of l'a_hat from its exact finite-sample representation:
/// (n1+n2-2) xi^-1 (eta + sqrt((lambda + lambda (p-1) u / (n1+n2-p)) l_quad) z0)
/// with xi ~ chi2_{n1+n2-p-1}, z0 ~ N(0,1) and u noncentral F. For p = 1 the
/// F factor degenerates and u = 0.
double sample_theta_scalar(RngStream& stream, const ThetaScalarParams& params);

/// One draw of L a_hat (k-dimensional) from the matrix form of the
/// representation. Requires rank(L) = k < p.
Eigen::VectorXd sample_theta_vector(RngStream& stream, const PopulationModel& model,
                                    const Eigen::MatrixXd& l_mat,
                                    const ProblemDims& dims);

/// One draw of the classification score d_hat for the given true group, from
/// the six-variable representation (xi, xi1, xi2, z0, w0, u).
double sample_d_hat(RngStream& stream, const DHatParams& params);

/// Oracle: simulates full raw data, computes l' S_pl^-1 (xbar1 - xbar2)
/// directly. Substreams: 0 -> group 1 data, 1 -> group 2 data.
double brute_force_theta(RngStream& stream, const PopulationModel& model,
                         const Eigen::VectorXd& l, const ProblemDims& dims);

/// Oracle: simulates training data plus one fresh observation from
/// true_group and evaluates the plug-in score. Substreams: 0, 1 -> training
/// data, 2 -> fresh observation.
double brute_force_d_hat(RngStream& stream, const PopulationModel& model,
                         const ProblemDims& dims, int true_group);

}  // namespace hdlda
