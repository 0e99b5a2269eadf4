#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hdlda/mc_harness.hpp"
#include "hdlda/parallel.hpp"
#include "oracles.hpp"

using namespace hdlda;

namespace {

std::string serialize(const ResultTable& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

}  // namespace

TEST_CASE("epanechnikov bandwidth") {
  const std::vector<double> flat(10, 3.0);
  CHECK_THROWS_AS(epanechnikov_bandwidth(flat), std::invalid_argument);
  const std::vector<double> spread{0.0, 1.0, 2.0, 3.0, 4.0};
  CHECK(epanechnikov_bandwidth(spread) > 0.0);
}

TEST_CASE("kde of standard normal draws") {
  const std::size_t n = 100000;
  const auto draws = replicate_draws(1001, 0, n, 2, [](RngStream& s) {
    return sample_standard_normal(s);
  });
  std::vector<double> grid;
  for (double x = -5.0; x <= 5.0 + 1e-12; x += 0.02) grid.push_back(x);
  const KdeEstimate kde = epanechnikov_kde(draws, grid);
  double mass = 0.0;
  for (std::size_t i = 1; i < kde.grid.size(); ++i)
    mass += 0.5 * (kde.density[i] + kde.density[i - 1]) * (kde.grid[i] - kde.grid[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));

  std::size_t zero_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i]) < std::abs(grid[zero_idx])) zero_idx = i;
  CHECK(kde.density[zero_idx] == doctest::Approx(0.3989).epsilon(0.025));

  for (double v : kde.density) CHECK(v >= 0.0);

  // Vanishes outside the sample range plus one bandwidth.
  const double max_draw = *std::max_element(draws.begin(), draws.end());
  const std::vector<double> far_grid{max_draw + kde.bandwidth + 0.01,
                                     max_draw + kde.bandwidth + 1.0};
  const KdeEstimate far = epanechnikov_kde(draws, far_grid, kde.bandwidth);
  CHECK(far.density[0] == 0.0);
  CHECK(far.density[1] == 0.0);
}

TEST_CASE("kde auto grid spans the sample by four bandwidths") {
  const auto draws = replicate_draws(1002, 0, 5000, 1, [](RngStream& s) {
    return sample_standard_normal(s);
  });
  const KdeEstimate kde = epanechnikov_kde_auto(draws, 256);
  CHECK(kde.grid.size() == 256);
  const auto [lo, hi] = std::minmax_element(draws.begin(), draws.end());
  CHECK(kde.grid.front() == doctest::Approx(*lo - 4.0 * kde.bandwidth).epsilon(1e-12));
  CHECK(kde.grid.back() == doctest::Approx(*hi + 4.0 * kde.bandwidth).epsilon(1e-12));
  double mass = 0.0;
  for (std::size_t i = 1; i < kde.grid.size(); ++i)
    mass += 0.5 * (kde.density[i] + kde.density[i - 1]) * (kde.grid[i] - kde.grid[i - 1]);
  CHECK(mass > 0.98);
  CHECK(mass < 1.001);

  std::vector<double> bad{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(epanechnikov_kde(draws, bad), std::invalid_argument);
}

TEST_CASE("one-sample ks statistic") {
  const std::size_t n = 10000;
  const auto uniforms = replicate_draws(1003, 0, n, 1, [](RngStream& s) {
    return s.next_double();
  });
  const double d = ks_statistic(uniforms, [](double x) {
    return std::min(1.0, std::max(0.0, x));
  });
  CHECK(d < oracle::ks_one_sample_critical_1pct(n));

  CHECK(ks_statistic({0.0}, [](double x) { return normal_cdf(x); }) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(ks_statistic({}, [](double) { return 0.5; }), std::invalid_argument);
}

TEST_CASE("two-sample ks statistic") {
  const auto a = replicate_draws(1004, 0, 5000, 1, [](RngStream& s) {
    return sample_standard_normal(s);
  });
  CHECK(ks_statistic_two_sample(a, a) == 0.0);
  std::vector<double> shifted(a);
  for (double& x : shifted) x += 3.0;
  CHECK(ks_statistic_two_sample(a, shifted) > 0.8);
}

TEST_CASE("density recipe model") {
  RngStream s1(1005, 0);
  const PopulationModel sparse = density_recipe_model(s1, 50, true);
  int nonzero1 = 0, nonzero2 = 0;
  for (int i = 0; i < 50; ++i) {
    nonzero1 += (sparse.mu1[i] != 0.0);
    nonzero2 += (sparse.mu2[i] != 0.0);
  }
  CHECK(nonzero1 == 10);
  CHECK(nonzero2 == 10);
  CHECK(sparse.mu1.tail(40).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sparse.mu2.head(40).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 50; ++i) {
    CHECK(sparse.sigma(i, i) > 0.0);
    CHECK(sparse.sigma(i, i) <= 1.0);
  }

  RngStream s2(1005, 0);
  const PopulationModel again = density_recipe_model(s2, 50, true);
  CHECK((sparse.mu1 - again.mu1).norm() == 0.0);

  RngStream s3(1006, 0);
  const PopulationModel dense = density_recipe_model(s3, 30, false);
  int nz = 0;
  for (int i = 0; i < 30; ++i) nz += (dense.mu1[i] != 0.0 && dense.mu2[i] != 0.0);
  CHECK(nz == 30);
}

TEST_CASE("error experiment: coin flip cell") {
  ExperimentConfig config;
  config.kind = ExperimentKind::fig_error_small_dim;
  config.dims_list.emplace_back(10, 50, 50);
  config.delta_grid = {0.0};
  config.B = 4000;
  config.seed = 7;
  config.threads = 2;
  const ResultTable table = run_experiment(config);
  REQUIRE(table.rows.size() == 1);
  const double er_p = std::stod(table.rows[0][4]);
  const double er_s = std::stod(table.rows[0][5]);
  const double se = std::stod(table.rows[0][6]);
  CHECK(er_p == 0.5);
  CHECK(std::abs(er_s - 0.5) < 3.0 * se);
}

TEST_CASE("density experiment: low concentration stays near the normal") {
  ExperimentConfig config;
  config.kind = ExperimentKind::fig_density_gamma0;
  config.dims_list.emplace_back(50, 250, 250);
  config.B = 30000;
  config.seed = 11;
  config.threads = 2;
  const ResultTable table = run_experiment(config);
  // Sup gap between the gamma-0 KDE and the normal reference on the grid.
  double gap = 0.0;
  std::vector<double> xs, kde;
  for (const auto& row : table.rows) {
    if (row[3] == "kde_gamma0") {
      xs.push_back(std::stod(row[4]));
      kde.push_back(std::stod(row[5]));
    }
  }
  REQUIRE(kde.size() == 512);
  for (std::size_t i = 0; i < kde.size(); ++i)
    gap = std::max(gap, std::abs(kde[i] - normal_pdf(xs[i])));
  CHECK(gap < 0.05);
}

TEST_CASE("experiment tables are byte-identical across runs and worker counts") {
  ExperimentConfig config;
  config.kind = ExperimentKind::fig_error_small_dim;
  config.dims_list.emplace_back(5, 30, 30);
  config.delta_grid = {0.0, 1.0, 2.0};
  config.B = 3000;
  config.seed = 42;
  config.threads = 1;
  const std::string first = serialize(run_experiment(config));
  const std::string second = serialize(run_experiment(config));
  CHECK(first == second);
  config.threads = 3;
  const std::string threaded = serialize(run_experiment(config));
  CHECK(first == threaded);

  ExperimentConfig density;
  density.kind = ExperimentKind::fig_density_gamma_pos;
  density.dims_list.emplace_back(30, 60, 60);
  density.B = 5000;
  density.seed = 42;
  density.threads = 1;
  const std::string d1 = serialize(run_experiment(density));
  density.threads = 2;
  const std::string d2 = serialize(run_experiment(density));
  CHECK(d1 == d2);
}

TEST_CASE("the two standardizations approach each other as c grows") {
  // The gamma = 0 variance carries an extra lambda n l_quad term; relative to
  // eta^2 + l_quad Delta^2 it shrinks as the dimension grows, so the two
  // reported densities coincide in the high-concentration panels.
  const auto sup_gap = [](int p) {
    const ProblemDims dims(p, 250, 250);
    RngStream root(1007, 0);
    RngStream recipe = root.substream(0);
    const PopulationModel model = density_recipe_model(recipe, p, false);
    const Eigen::VectorXd l = Eigen::VectorXd::Ones(p);
    const auto sc = theta_scalar_params(model, l, dims);
    McSample draws;
    draws.kind = SampleKind::theta_rep;
    draws.draws = replicate_draws(1008, 0, 20000, 2, [&](RngStream& s) {
      return sample_theta_scalar(s, sc);
    });
    const McSample std0 =
        standardize_theta(draws, coef_limit_params(model, l, dims, 0.0), dims.total());
    const McSample std1 =
        standardize_theta(draws, coef_limit_params(model, l, dims, 1.0), dims.total());
    std::vector<double> grid;
    for (double x = -4.0; x <= 4.0 + 1e-12; x += 0.05) grid.push_back(x);
    const KdeEstimate k0 = epanechnikov_kde(std0.draws, grid);
    const KdeEstimate k1 = epanechnikov_kde(std1.draws, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      gap = std::max(gap, std::abs(k0.density[i] - k1.density[i]));
    return gap;
  };
  const double low_c = sup_gap(50);
  const double high_c = sup_gap(400);
  CHECK(high_c < low_c);
  CHECK(high_c < 0.05);
}

TEST_CASE("figure presets") {
  const ExperimentConfig fig1 = figure_preset(1, 42, 1000, 1);
  CHECK(fig1.dims_list.size() == 16);
  CHECK(fig1.delta_grid.size() == 25);
  const ExperimentConfig fig2 = figure_preset(2, 42, 1000, 1);
  CHECK(fig2.c_grid.size() == 4);
  const ExperimentConfig fig5 = figure_preset(5, 42, 1000, 1);
  CHECK(fig5.dims_list.front().n1 == 25);
  CHECK(fig5.dims_list.front().n2 == 475);
  CHECK_THROWS_AS(figure_preset(6, 42, 1000, 1), std::invalid_argument);
}

TEST_CASE("asymptotic error figure needs no rng and is monotone in delta") {
  ExperimentConfig config;
  config.kind = ExperimentKind::fig_error_asymptotic;
  config.c_grid = {0.5};
  config.delta_grid = {0.0, 1.0, 2.0, 4.0, 8.0};
  config.gamma = 0.0;
  const ResultTable table = run_experiment(config);
  double prev = 1.0;
  for (const auto& row : table.rows) {
    const double er = std::stod(row[3]);
    CHECK(er <= prev + 1e-15);
    prev = er;
  }
}
