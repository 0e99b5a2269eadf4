#pragma once

#include <Eigen/Dense>

#include "hdlda/model_core.hpp"

namespace hdlda {

enum class TestSide { two_sided, one_sided };

struct TestResult {
  double statistic;
  Dof dof;
  double p_value;
  bool reject;
  double alpha;
  TestSide side;
};

/// The exact test statistic for l'a:
///   T = sqrt(n1+n2-p-1) l' S_pl^-1 (xbar1 - xbar2)
///       / (sqrt(l' S_pl^-1 l) sqrt((n1+n2-2) lambda + q_hat))
/// with q_hat = (xbar1-xbar2)' R_hat_l (xbar1-xbar2). Under l'a = 0 it is
/// t-distributed with n1+n2-p-1 degrees of freedom.
double test_statistic(const PooledEstimates& est, const Eigen::VectorXd& l);

/// Contrast vector with +1 at position i and -1 at position j (0-based),
/// testing equality of coefficients i and j.
Eigen::VectorXd contrast_vector(int p, int i, int j);

/// Two-sided test of l'a = 0; rejects iff |T| strictly exceeds
/// t_{n1+n2-p-1; 1-alpha/2}.
TestResult two_sided_test(double t_value, const ProblemDims& dims, double alpha);

/// One-sided test of l'a <= 0; rejects iff T strictly exceeds
/// t_{n1+n2-p-1; 1-alpha}. The size is maximized on the boundary l'a = 0.
TestResult one_sided_test(double t_value, const ProblemDims& dims, double alpha);

/// Parameters of the non-null density of T. eta here is the normalized form
/// l' Sigma^-1 (mu1-mu2) / sqrt(l' Sigma^-1 l);
/// s = (mu1-mu2)' R_l (mu1-mu2).
struct FTDensityParams {
  FTDensityParams(double eta, double s, ProblemDims dims);

  double eta;
  double s;
  ProblemDims dims;
};

/// Density of T under arbitrary (eta, s): a noncentral-t density mixed over a
/// noncentral-F weight, evaluated by adaptive quadrature on the transformed
/// half line. Relative accuracy target 1e-6.
double density_T(double x, const FTDensityParams& params);

}  // namespace hdlda
