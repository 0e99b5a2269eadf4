#pragma once

#include <Eigen/Dense>

#include "hdlda/model_core.hpp"
#include "hdlda/stochastic_rep.hpp"

namespace hdlda {

/// Inputs of the coefficient CLT: eta = l' Sigma^-1 (mu1 - mu2) (not
/// normalized), l_quad = l' Sigma^-1 l, delta_sq = Delta^2, c = p / (n1+n2),
/// the growth exponent gamma, and lambda_n = lambda (n1 + n2).
struct CoefLimitParams {
  CoefLimitParams(double eta, double l_quad, double delta_sq, double c,
                  double gamma, double lambda_n);

  double eta;
  double l_quad;
  double delta_sq;
  double c;
  double gamma;
  double lambda_n;
};

/// Builds CoefLimitParams from a concrete instance.
CoefLimitParams coef_limit_params(const PopulationModel& model,
                                  const Eigen::VectorXd& l, const ProblemDims& dims,
                                  double gamma);

/// Asymptotic variance of the standardized coefficient combination:
/// (eta^2 + l_quad Delta^2 + lambda (n1+n2) l_quad 1{gamma = 0}) / (1-c)^3.
double sigma_gamma_sq(const CoefLimitParams& params);

/// Applies the CLT standardization sqrt(n1+n2) (theta - eta / (1-c)) / sigma
/// to every draw.
McSample standardize_theta(const McSample& draws, const CoefLimitParams& params,
                           int n_total);

/// Limiting law of the centered, scaled classification score.
struct ScoreLimit {
  double mean;
  double variance;
  int group;
};

/// Mean and variance of the limit of
/// p^{min(gamma,1)/2} (d_hat / p^gamma - centering) for the given group. At
/// gamma = 1 both variance terms contribute, as the indicator supports
/// overlap.
ScoreLimit score_limit(double gamma, double c, double b1, double b2,
                       double delta_tilde_sq, int group);

}  // namespace hdlda
