#include "hdlda/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hdlda/parallel.hpp"

namespace hdlda {

namespace {

double quantile_type7(const std::vector<double>& sorted, double prob) {
  const double h = (sorted.size() - 1) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double epanechnikov_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("epanechnikov_bandwidth: needs >= 2 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  const double sigma_hat = (iqr > 0.0) ? std::min(sd, iqr / 1.349) : sd;
  if (!(sigma_hat > 0.0))
    throw std::invalid_argument("epanechnikov_bandwidth: zero-variance sample");
  return 2.345 * sigma_hat * std::pow(static_cast<double>(n), -0.2);
}

KdeEstimate epanechnikov_kde(std::span<const double> samples,
                             std::span<const double> grid,
                             std::optional<double> bandwidth) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("epanechnikov_kde: needs >= 2 samples");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("epanechnikov_kde: grid must be ascending");
  const double h = bandwidth ? *bandwidth : epanechnikov_bandwidth(samples);
  if (!(h > 0.0)) throw std::invalid_argument("epanechnikov_kde: bandwidth must be positive");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  KdeEstimate kde;
  kde.grid.assign(grid.begin(), grid.end());
  kde.density.resize(grid.size(), 0.0);
  kde.bandwidth = h;
  const double norm = 1.0 / (n * h);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), grid[g] - h);
    const auto hi = std::upper_bound(lo, sorted.end(), grid[g] + h);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (grid[g] - *it) / h;
      sum += 0.75 * (1.0 - u * u);
    }
    kde.density[g] = std::max(sum * norm, 0.0);
  }
  return kde;
}

KdeEstimate epanechnikov_kde_auto(std::span<const double> samples,
                                  std::size_t grid_size) {
  if (grid_size < 2) throw std::invalid_argument("epanechnikov_kde_auto: grid too small");
  const double h = epanechnikov_bandwidth(samples);
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 4.0 * h;
  const double hi = *hi_it + 4.0 * h;
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (grid_size - 1);
  return epanechnikov_kde(samples, grid, h);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: needs >= 1 sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> first, std::vector<double> second) {
  if (first.empty() || second.empty())
    throw std::invalid_argument("ks_statistic_two_sample: needs nonempty samples");
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  const double n1 = static_cast<double>(first.size());
  const double n2 = static_cast<double>(second.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < first.size() && j < second.size()) {
    const double x = std::min(first[i], second[j]);
    while (i < first.size() && first[i] <= x) ++i;
    while (j < second.size() && second[j] <= x) ++j;
    d = std::max(d, std::abs(i / n1 - j / n2));
  }
  return d;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_csv(const ResultTable& table, std::ostream& out) {
  for (const auto& [key, value] : table.meta) out << "# " << key << ": " << value << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ",";
    out << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
}

PopulationModel density_recipe_model(RngStream& stream, int p, bool gamma_zero) {
  if (p < 1) throw std::invalid_argument("density_recipe_model: p must be >= 1");
  const auto uniform_pm1 = [&] { return 2.0 * stream.next_double() - 1.0; };
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(p);
  if (gamma_zero) {
    const int head = std::min(p, 10);
    for (int i = 0; i < head; ++i) mu1[i] = uniform_pm1();
    for (int i = p - head; i < p; ++i) mu2[i] = uniform_pm1();
  } else {
    for (int i = 0; i < p; ++i) mu1[i] = uniform_pm1();
    for (int i = 0; i < p; ++i) mu2[i] = uniform_pm1();
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) sigma(i, i) = 1.0 - stream.next_double();
  return PopulationModel(std::move(mu1), std::move(mu2), std::move(sigma));
}

namespace {

void append_config_meta(ResultTable& table, const ExperimentConfig& config,
                        const char* kind_name) {
  table.meta.emplace_back("experiment", kind_name);
  table.meta.emplace_back("seed", std::to_string(config.seed));
  table.meta.emplace_back("B", std::to_string(config.B));
  table.meta.emplace_back("rng", "philox4x32-10; cell k uses substreams (2k, 2k+1)");
}

ResultTable run_error_small_dim(const ExperimentConfig& config) {
  ResultTable table;
  append_config_meta(table, config, "fig_error_small_dim");
  table.columns = {"p", "n1", "n2", "delta", "er_population", "er_sample", "se"};
  const RngStream root(config.seed, 0);
  std::size_t cell = 0;
  for (const ProblemDims& dims : config.dims_list) {
    const RngStream cell_base = root.substream(2 * cell + 1);
    const ErrorRateCurve mc =
        er_curve_mc(config.delta_grid, dims, config.B, cell_base, config.threads);
    for (std::size_t k = 0; k < config.delta_grid.size(); ++k) {
      table.rows.push_back({std::to_string(dims.p), std::to_string(dims.n1),
                            std::to_string(dims.n2), format_double(config.delta_grid[k]),
                            format_double(er_population(config.delta_grid[k])),
                            format_double(mc.er_values[k]),
                            format_double(mc.std_errors[k])});
    }
    ++cell;
  }
  return table;
}

ResultTable run_error_asymptotic(const ExperimentConfig& config) {
  ResultTable table;
  append_config_meta(table, config, "fig_error_asymptotic");
  table.meta.emplace_back("gamma", format_double(config.gamma));
  table.meta.emplace_back("b1_b2", "2,2");
  table.columns = {"c", "delta", "er_population", "er_asymptotic"};
  for (double c : config.c_grid) {
    const AsymptoticErParams params(config.gamma, c, 2.0, 2.0);
    for (double delta : config.delta_grid) {
      table.rows.push_back({format_double(c), format_double(delta),
                            format_double(er_population(delta)),
                            format_double(er_sample_asymptotic(delta, 1, params))});
    }
  }
  return table;
}

ResultTable run_density_figure(const ExperimentConfig& config, bool gamma_zero_recipe,
                               const char* kind_name) {
  ResultTable table;
  append_config_meta(table, config, kind_name);
  table.meta.emplace_back("recipe", gamma_zero_recipe ? "gamma0" : "gamma_pos");
  table.meta.emplace_back("l", "ones(p)");
  table.columns = {"p", "n1", "n2", "series", "x", "density"};
  const RngStream root(config.seed, 0);
  std::size_t cell = 0;
  for (const ProblemDims& dims : config.dims_list) {
    RngStream recipe_stream = root.substream(2 * cell);
    const RngStream draw_base = root.substream(2 * cell + 1);
    const PopulationModel model =
        density_recipe_model(recipe_stream, dims.p, gamma_zero_recipe);
    const Eigen::VectorXd l = Eigen::VectorXd::Ones(dims.p);
    const ThetaScalarParams theta_params = theta_scalar_params(model, l, dims);

    McSample draws;
    draws.kind = SampleKind::theta_rep;
    draws.draws = replicate_draws(
        config.seed, draw_base.stream_id(), config.B, config.threads,
        [&](RngStream& s) { return sample_theta_scalar(s, theta_params); });

    // The same draws standardized under both variance regimes.
    const CoefLimitParams t2_zero = coef_limit_params(model, l, dims, 0.0);
    const CoefLimitParams t2_pos = coef_limit_params(model, l, dims, 1.0);
    const McSample std_zero = standardize_theta(draws, t2_zero, dims.total());
    const McSample std_pos = standardize_theta(draws, t2_pos, dims.total());

    const KdeEstimate kde_zero = epanechnikov_kde_auto(std_zero.draws);
    const KdeEstimate kde_pos = epanechnikov_kde_auto(std_pos.draws);

    const auto emit_series = [&](const char* name, const KdeEstimate& kde) {
      for (std::size_t i = 0; i < kde.grid.size(); ++i)
        table.rows.push_back({std::to_string(dims.p), std::to_string(dims.n1),
                              std::to_string(dims.n2), name,
                              format_double(kde.grid[i]),
                              format_double(kde.density[i])});
    };
    emit_series("kde_gamma0", kde_zero);
    emit_series("kde_gamma_pos", kde_pos);
    for (std::size_t i = 0; i < kde_zero.grid.size(); ++i)
      table.rows.push_back({std::to_string(dims.p), std::to_string(dims.n1),
                            std::to_string(dims.n2), "std_normal",
                            format_double(kde_zero.grid[i]),
                            format_double(normal_pdf(kde_zero.grid[i]))});

    const std::string cell_name = "cell_p" + std::to_string(dims.p) + "_n" +
                                  std::to_string(dims.n1) + "_" +
                                  std::to_string(dims.n2);
    table.meta.emplace_back(
        cell_name,
        "bw_gamma0=" + format_double(kde_zero.bandwidth) +
            " bw_gamma_pos=" + format_double(kde_pos.bandwidth) +
            " sigma_gamma0=" + format_double(std::sqrt(sigma_gamma_sq(t2_zero))) +
            " sigma_gamma_pos=" + format_double(std::sqrt(sigma_gamma_sq(t2_pos))) +
            " eta=" + format_double(theta_params.eta) +
            " l_quad=" + format_double(theta_params.l_quad) +
            " s=" + format_double(theta_params.s));
    ++cell;
  }
  return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::fig_error_small_dim:
      return run_error_small_dim(config);
    case ExperimentKind::fig_error_asymptotic:
      return run_error_asymptotic(config);
    case ExperimentKind::fig_density_gamma0:
      return run_density_figure(config, true, "fig_density_gamma0");
    case ExperimentKind::fig_density_gamma_pos:
      return run_density_figure(config, false, "fig_density_gamma_pos");
    case ExperimentKind::fig_density_unbalanced:
      return run_density_figure(config, false, "fig_density_unbalanced");
  }
  throw std::invalid_argument("run_experiment: unknown experiment kind");
}

ExperimentConfig figure_preset(int figure, std::uint64_t seed, std::size_t B,
                               int threads) {
  ExperimentConfig config;
  config.seed = seed;
  config.B = B;
  config.threads = threads;
  const auto delta_range = [](double max, double step) {
    std::vector<double> grid;
    for (double d = 0.0; d <= max + 1e-9; d += step) grid.push_back(d);
    return grid;
  };
  switch (figure) {
    case 1:
      config.kind = ExperimentKind::fig_error_small_dim;
      for (int p : {10, 25, 50, 75})
        for (int n : {50, 100, 150, 250}) config.dims_list.emplace_back(p, n, n);
      config.delta_grid = delta_range(6.0, 0.25);
      return config;
    case 2:
      config.kind = ExperimentKind::fig_error_asymptotic;
      config.c_grid = {0.1, 0.5, 0.8, 0.95};
      config.delta_grid = delta_range(100.0, 0.5);
      config.gamma = 0.0;
      return config;
    case 3:
      config.kind = ExperimentKind::fig_density_gamma0;
      for (int p : {50, 250, 400, 475}) config.dims_list.emplace_back(p, 250, 250);
      config.gamma = 0.0;
      return config;
    case 4:
      config.kind = ExperimentKind::fig_density_gamma_pos;
      for (int p : {50, 250, 400, 475}) config.dims_list.emplace_back(p, 250, 250);
      config.gamma = 0.5;
      return config;
    case 5:
      config.kind = ExperimentKind::fig_density_unbalanced;
      for (int p : {50, 250, 400, 475}) config.dims_list.emplace_back(p, 25, 475);
      config.gamma = 0.5;
      return config;
    default:
      throw std::invalid_argument("figure_preset: figure must be 1..5");
  }
}

}  // namespace hdlda
