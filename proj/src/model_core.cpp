#include "hdlda/model_core.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hdlda {

namespace {

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
    throw std::runtime_error(std::string(what) + ": matrix is numerically singular");
  return llt;
}

}  // namespace

ProblemDims::ProblemDims(int p_in, int n1_in, int n2_in)
    : p(p_in), n1(n1_in), n2(n2_in) {
  if (p < 1) throw std::invalid_argument("ProblemDims: p must be >= 1");
  if (n1 < 2 || n2 < 2)
    throw std::invalid_argument("ProblemDims: group sizes must be >= 2");
  if (p >= n1 + n2 - 2)
    throw std::invalid_argument("ProblemDims: requires p < n1 + n2 - 2");
}

PopulationModel::PopulationModel(Eigen::VectorXd mu1_in, Eigen::VectorXd mu2_in,
                                 Eigen::MatrixXd sigma_in)
    : mu1(std::move(mu1_in)), mu2(std::move(mu2_in)), sigma(std::move(sigma_in)) {
  const auto p = mu1.size();
  if (mu2.size() != p || sigma.rows() != p || sigma.cols() != p)
    throw std::invalid_argument("PopulationModel: dimension mismatch");
  if (!mu1.allFinite() || !mu2.allFinite() || !sigma.allFinite())
    throw std::invalid_argument("PopulationModel: non-finite entries");
  checked_llt(sigma, "PopulationModel");
}

GroupSample::GroupSample(Eigen::MatrixXd observations_in, int group_label_in)
    : observations(std::move(observations_in)), group_label(group_label_in) {
  if (group_label != 1 && group_label != 2)
    throw std::invalid_argument("GroupSample: group_label must be 1 or 2");
  if (observations.cols() < 2)
    throw std::invalid_argument("GroupSample: needs at least 2 observations");
  if (!observations.allFinite())
    throw std::invalid_argument("GroupSample: non-finite entries");
}

PooledEstimates pooled_estimates(const GroupSample& x1, const GroupSample& x2) {
  if (x1.dimension() != x2.dimension())
    throw std::invalid_argument("pooled_estimates: dimension mismatch");
  const ProblemDims dims(x1.dimension(), x1.size(), x2.size());

  const auto group_stats = [](const GroupSample& g) {
    const Eigen::VectorXd mean = g.observations.rowwise().mean();
    const Eigen::MatrixXd centered = g.observations.colwise() - mean;
    const Eigen::MatrixXd cov =
        centered * centered.transpose() / static_cast<double>(g.size() - 1);
    return std::make_pair(mean, cov);
  };
  const auto [xbar1, s1] = group_stats(x1);
  const auto [xbar2, s2] = group_stats(x2);

  Eigen::MatrixXd s_pl = ((dims.n1 - 1) * s1 + (dims.n2 - 1) * s2) /
                         static_cast<double>(dims.n1 + dims.n2 - 2);
  s_pl = 0.5 * (s_pl + s_pl.transpose().eval());
  checked_llt(s_pl, "pooled_estimates");
  return PooledEstimates{xbar1, xbar2, std::move(s_pl), dims};
}

CoefVector discriminant_coefficients(const PooledEstimates& est) {
  const auto llt = checked_llt(est.s_pl, "discriminant_coefficients");
  return CoefVector{llt.solve(est.xbar1 - est.xbar2)};
}

double mahalanobis_delta_sq(const PopulationModel& model) {
  const auto llt = checked_llt(model.sigma, "mahalanobis_delta_sq");
  const Eigen::VectorXd diff = model.mu1 - model.mu2;
  return diff.dot(llt.solve(diff));
}

Eigen::MatrixXd projection_residual_matrix(const Eigen::MatrixXd& sigma_inv,
                                           const Eigen::VectorXd& l) {
  if (l.isZero(0.0)) throw std::invalid_argument("projection_residual_matrix: l must be nonzero");
  const Eigen::VectorXd v = sigma_inv * l;
  const double quad = l.dot(v);
  if (!(quad > 0.0))
    throw std::invalid_argument("projection_residual_matrix: l' Sigma^-1 l must be positive");
  Eigen::MatrixXd r = sigma_inv - (v * v.transpose()) / quad;
  return 0.5 * (r + r.transpose().eval());
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spd_sqrt: matrix must be square");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("spd_sqrt: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("spd_sqrt: eigendecomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-10 * scale)
      throw std::invalid_argument("spd_sqrt: matrix has a materially negative eigenvalue");
    vals[i] = std::sqrt(std::max(vals[i], 0.0));
  }
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::VectorXd sample_mvn(RngStream& stream, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_mvn: covariance is not positive definite");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_standard_normal(stream);
  return mean + llt.matrixL() * z;
}

GroupSample sample_group(RngStream& stream, const PopulationModel& model,
                         int group_label, int n) {
  if (group_label != 1 && group_label != 2)
    throw std::invalid_argument("sample_group: group_label must be 1 or 2");
  const Eigen::VectorXd& mu = (group_label == 1) ? model.mu1 : model.mu2;
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_group: covariance is not positive definite");
  const int p = model.dimension();
  Eigen::MatrixXd obs(p, n);
  Eigen::VectorXd z(p);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < p; ++i) z[i] = sample_standard_normal(stream);
    obs.col(j) = mu + llt.matrixL() * z;
  }
  return GroupSample(std::move(obs), group_label);
}

}  // namespace hdlda
