#pragma once

#include <Eigen/Dense>

#include "hdlda/distributions.hpp"
#include "hdlda/rng.hpp"

namespace hdlda {

/// Problem dimensions (p, n1, n2) with the standing validity condition
/// p < n1 + n2 - 2. Derived quantities used throughout are exposed here so
/// every module agrees on them.
struct ProblemDims {
  ProblemDims(int p, int n1, int n2);

  int p;
  int n1;
  int n2;

  int total() const { return n1 + n2; }
  double lambda() const { return 1.0 / n1 + 1.0 / n2; }
  /// Concentration ratio c = p / (n1 + n2).
  double concentration() const { return static_cast<double>(p) / total(); }
  /// Degrees of freedom of the chi-square factor, n1 + n2 - p - 1.
  Dof xi_dof() const { return Dof(total() - p - 1); }
  /// Denominator degrees of freedom n1 + n2 - p.
  Dof denom_dof() const { return Dof(total() - p); }
};

/// Ground truth for the two-group Gaussian model: N_p(mu1, sigma) and
/// N_p(mu2, sigma) with a common positive definite covariance.
struct PopulationModel {
  PopulationModel(Eigen::VectorXd mu1, Eigen::VectorXd mu2, Eigen::MatrixXd sigma);

  Eigen::VectorXd mu1;
  Eigen::VectorXd mu2;
  Eigen::MatrixXd sigma;

  int dimension() const { return static_cast<int>(mu1.size()); }
};

/// Observation matrix of one group; columns are observation vectors.
struct GroupSample {
  GroupSample(Eigen::MatrixXd observations, int group_label);

  Eigen::MatrixXd observations;
  int group_label;

  int dimension() const { return static_cast<int>(observations.rows()); }
  int size() const { return static_cast<int>(observations.cols()); }
};

/// Group means and the pooled covariance estimator.
struct PooledEstimates {
  Eigen::VectorXd xbar1;
  Eigen::VectorXd xbar2;
  Eigen::MatrixXd s_pl;
  ProblemDims dims;
};

/// Discriminant function coefficients.
struct CoefVector {
  Eigen::VectorXd values;
};

PooledEstimates pooled_estimates(const GroupSample& x1, const GroupSample& x2);

/// Solves S_pl a = xbar1 - xbar2 by Cholesky; the inverse is never formed.
CoefVector discriminant_coefficients(const PooledEstimates& est);

/// Squared Mahalanobis distance (mu1 - mu2)' Sigma^-1 (mu1 - mu2).
double mahalanobis_delta_sq(const PopulationModel& model);

/// R_l = Sigma^-1 - Sigma^-1 l l' Sigma^-1 / (l' Sigma^-1 l), built from a
/// precomputed Sigma^-1.
Eigen::MatrixXd projection_residual_matrix(const Eigen::MatrixXd& sigma_inv,
                                           const Eigen::VectorXd& l);

/// Symmetric square root of a symmetric PSD matrix via eigendecomposition.
/// Eigenvalues below -1e-10 * ||m|| are an error; tiny negatives are clamped
/// to zero.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);

Eigen::VectorXd sample_mvn(RngStream& stream, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov);

/// Draws an n-column observation matrix from the given group of the model.
GroupSample sample_group(RngStream& stream, const PopulationModel& model,
                         int group_label, int n);

}  // namespace hdlda
