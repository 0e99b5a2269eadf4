#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdlda/asymptotics.hpp"
#include "hdlda/error_rate.hpp"
#include "hdlda/model_core.hpp"

namespace hdlda {

/// Kernel density estimate on a grid.
struct KdeEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth;
};

/// Bandwidth rule used throughout: 2.345 sigma_hat n^(-1/5) with the
/// Epanechnikov-optimal constant and sigma_hat = min(sd, IQR / 1.349).
double epanechnikov_bandwidth(std::span<const double> samples);

KdeEstimate epanechnikov_kde(std::span<const double> samples,
                             std::span<const double> grid,
                             std::optional<double> bandwidth = std::nullopt);

/// KDE on 512 equally spaced points spanning the sample range plus four
/// bandwidths on each side.
KdeEstimate epanechnikov_kde_auto(std::span<const double> samples,
                                  std::size_t grid_size = 512);

/// One-sample Kolmogorov-Smirnov statistic against a supplied CDF, evaluated
/// at the empirical jump points.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> first, std::vector<double> second);

enum class ExperimentKind {
  fig_error_small_dim,
  fig_error_asymptotic,
  fig_density_gamma0,
  fig_density_gamma_pos,
  fig_density_unbalanced,
};

struct ExperimentConfig {
  ExperimentKind kind;
  std::vector<ProblemDims> dims_list;
  std::vector<double> delta_grid;
  std::vector<double> c_grid;   // asymptotic error figure only
  double gamma = 0.0;
  std::size_t B = 100000;
  std::uint64_t seed = 42;
  int threads = 1;
};

/// A serialized table: metadata comment lines plus pre-formatted cells, so
/// that identical configurations produce byte-identical output.
struct ResultTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double value);

void write_csv(const ResultTable& table, std::ostream& out);

/// Generates the population of the density figures: means uniform on [-1, 1]
/// (all entries for gamma > 0; first ten of mu1 / last ten of mu2 for
/// gamma = 0, rest zero) and a diagonal covariance uniform on (0, 1].
/// Draw order: mu1 entries, mu2 entries, diagonal entries.
PopulationModel density_recipe_model(RngStream& stream, int p, bool gamma_zero);

/// Runs a figure experiment. Cells are independent tasks on disjoint
/// substreams of (seed, 0): cell k uses substream(2k) for its data recipe and
/// substream(2k + 1) as Monte Carlo base, so tables are reproducible for any
/// worker count.
ResultTable run_experiment(const ExperimentConfig& config);

/// Named figure presets (1 through 5): error-rate curves over a (p, n) grid,
/// the closed-form high-dimensional error rate, and the three standardized
/// coefficient density panels (balanced sparse/dense means and unbalanced).
ExperimentConfig figure_preset(int figure, std::uint64_t seed, std::size_t B,
                               int threads);

}  // namespace hdlda
