#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdlda/coef_inference.hpp"
#include "hdlda/error_rate.hpp"
#include "hdlda/mc_harness.hpp"
#include "hdlda/model_core.hpp"
#include "hdlda/parallel.hpp"
#include "hdlda/svg.hpp"

namespace {

using hdlda::ResultTable;

struct CommonOpts {
  std::uint64_t seed = 42;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::string output;
  std::string format = "csv";
  bool deterministic = false;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_format = true) {
  opts.seed_opt = cmd->add_option("--seed", opts.seed, "RNG seed (default 42; HDLDA_SEED overrides the default)");
  cmd->add_option("--threads", opts.threads, "Worker threads; results do not depend on this");
  cmd->add_option("-o,--output", opts.output, "Output file (stdout if omitted)");
  if (with_format)
    cmd->add_option("-f,--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "svg"}));
  cmd->add_flag("--deterministic", opts.deterministic,
                "Suppress the timestamp header line");
}

void resolve_seed(CommonOpts& opts) {
  if (opts.seed_opt != nullptr && opts.seed_opt->count() > 0) return;
  if (const char* env = std::getenv("HDLDA_SEED")) {
    opts.seed = std::strtoull(env, nullptr, 10);
  }
  if (opts.threads < 1) opts.threads = 1;
}

void stamp(ResultTable& table, const CommonOpts& opts) {
  if (opts.deterministic) return;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  table.meta.insert(table.meta.begin(), {"generated_at", buf});
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

double cell_value(const std::string& s) { return std::stod(s); }

// Builds one plot series per value column, keyed on the given x column, for
// tables whose rows all belong to one cell.
hdlda::PlotSpec table_to_plot(const ResultTable& table, const std::string& x_col,
                              const std::vector<std::string>& y_cols,
                              const std::string& title) {
  const auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      if (table.columns[i] == name) return i;
    throw std::runtime_error("plot: missing column " + name);
  };
  hdlda::PlotSpec spec;
  spec.title = title;
  spec.xlabel = x_col;
  spec.ylabel = "value";
  const std::size_t xi = col_index(x_col);
  for (const auto& name : y_cols) {
    const std::size_t yi = col_index(name);
    hdlda::PlotSeries series;
    series.name = name;
    for (const auto& row : table.rows) {
      series.x.push_back(cell_value(row[xi]));
      series.y.push_back(cell_value(row[yi]));
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

// Density tables are long-format: one series per distinct value of the
// `series` column.
hdlda::PlotSpec density_table_to_plot(const ResultTable& table, const std::string& title) {
  hdlda::PlotSpec spec;
  spec.title = title;
  spec.xlabel = "x";
  spec.ylabel = "density";
  std::size_t si = 0, xi = 0, di = 0;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == "series") si = i;
    if (table.columns[i] == "x") xi = i;
    if (table.columns[i] == "density") di = i;
  }
  for (const auto& row : table.rows) {
    const std::string& name = row[si];
    auto it = std::find_if(spec.series.begin(), spec.series.end(),
                           [&](const auto& s) { return s.name == name; });
    if (it == spec.series.end()) {
      spec.series.push_back({name, {}, {}});
      it = spec.series.end() - 1;
    }
    it->x.push_back(cell_value(row[xi]));
    it->y.push_back(cell_value(row[di]));
  }
  return spec;
}

void emit_table(const ResultTable& table, const CommonOpts& opts,
                const std::function<hdlda::PlotSpec(const ResultTable&)>& plot) {
  std::ostringstream buffer;
  if (opts.format == "svg") {
    hdlda::write_svg_plot(plot(table), buffer);
  } else {
    hdlda::write_csv(table, buffer);
  }
  emit(buffer.str(), opts.output);
}

std::vector<double> make_delta_grid(double min, double max, double step) {
  if (!(step > 0.0) || max < min)
    throw std::invalid_argument("invalid delta grid");
  std::vector<double> grid;
  for (double d = min; d <= max + 1e-9; d += step) grid.push_back(d);
  return grid;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("unreadable input CSV: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::invalid_argument("unreadable input CSV (bad number): " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("unreadable input CSV (empty): " + path);
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols)
      throw std::invalid_argument("unreadable input CSV (ragged rows): " + path);
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-sample and high-dimensional distribution theory of the "
               "linear discriminant function: sampling, tests, error rates"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- error-rate ----------------------------------------------------
  auto* er_cmd = app.add_subcommand(
      "error-rate", "Monte Carlo error rate of the plug-in rule over a Delta grid");
  struct {
    int p = 10, n1 = 50, n2 = 50;
    double delta_min = 0.0, delta_max = 6.0, delta_step = 0.25;
    std::size_t B = 100000;
    CommonOpts common;
  } er;
  er_cmd->add_option("--p", er.p, "Dimension")->required();
  er_cmd->add_option("--n1", er.n1, "Group 1 sample size")->required();
  er_cmd->add_option("--n2", er.n2, "Group 2 sample size")->required();
  er_cmd->add_option("--delta-min", er.delta_min, "Smallest Delta");
  er_cmd->add_option("--delta-max", er.delta_max, "Largest Delta");
  er_cmd->add_option("--delta-step", er.delta_step, "Delta grid step");
  er_cmd->add_option("-B,--B", er.B, "Replications per group and Delta");
  add_common(er_cmd, er.common);
  er_cmd->callback([&] {
    resolve_seed(er.common);
    hdlda::ExperimentConfig config;
    config.kind = hdlda::ExperimentKind::fig_error_small_dim;
    config.dims_list.emplace_back(er.p, er.n1, er.n2);
    config.delta_grid = make_delta_grid(er.delta_min, er.delta_max, er.delta_step);
    config.B = er.B;
    config.seed = er.common.seed;
    config.threads = er.common.threads;
    ResultTable table = hdlda::run_experiment(config);
    stamp(table, er.common);
    emit_table(table, er.common, [&](const ResultTable& t) {
      return table_to_plot(t, "delta", {"er_population", "er_sample"}, "error rates");
    });
  });

  // ---- error-rate-asymptotic -----------------------------------------
  auto* era_cmd = app.add_subcommand(
      "error-rate-asymptotic", "High-dimensional closed-form error rate");
  struct {
    double c = -1.0;
    int p = 0, n1 = 0, n2 = 0;
    double gamma = 0.0;
    double delta_min = 0.0, delta_max = 6.0, delta_step = 0.25;
    CommonOpts common;
  } era;
  era_cmd->add_option("--c", era.c, "Concentration ratio (uses b1 = b2 = 2)");
  era_cmd->add_option("--p", era.p, "Dimension (alternative to --c)");
  era_cmd->add_option("--n1", era.n1, "Group 1 sample size");
  era_cmd->add_option("--n2", era.n2, "Group 2 sample size");
  era_cmd->add_option("--gamma", era.gamma, "Growth exponent of Delta^2");
  era_cmd->add_option("--delta-min", era.delta_min, "Smallest Delta");
  era_cmd->add_option("--delta-max", era.delta_max, "Largest Delta");
  era_cmd->add_option("--delta-step", era.delta_step, "Delta grid step");
  add_common(era_cmd, era.common);
  era_cmd->callback([&] {
    resolve_seed(era.common);
    const std::vector<double> grid =
        make_delta_grid(era.delta_min, era.delta_max, era.delta_step);
    ResultTable table;
    table.columns = {"c", "delta", "er_population", "er_asymptotic"};
    table.meta.emplace_back("experiment", "error-rate-asymptotic");
    table.meta.emplace_back("gamma", hdlda::format_double(era.gamma));
    int p_used = 1;
    std::optional<hdlda::AsymptoticErParams> params;
    if (era.c >= 0.0) {
      params.emplace(era.gamma, era.c, 2.0, 2.0);
      p_used = (era.p > 0) ? era.p : 1;
    } else {
      if (era.p <= 0 || era.n1 <= 0 || era.n2 <= 0)
        throw std::invalid_argument("error-rate-asymptotic: pass --c or all of --p/--n1/--n2");
      const hdlda::ProblemDims dims(era.p, era.n1, era.n2);
      params.emplace(hdlda::AsymptoticErParams::from_dims(era.gamma, dims));
      p_used = dims.p;
      table.meta.emplace_back("dims", std::to_string(era.p) + "," +
                                          std::to_string(era.n1) + "," +
                                          std::to_string(era.n2));
    }
    table.meta.emplace_back("p", std::to_string(p_used));
    for (double d : grid) {
      table.rows.push_back({hdlda::format_double(params->c), hdlda::format_double(d),
                            hdlda::format_double(hdlda::er_population(d)),
                            hdlda::format_double(hdlda::er_sample_asymptotic(d, p_used, *params))});
    }
    stamp(table, era.common);
    emit_table(table, era.common, [&](const ResultTable& t) {
      return table_to_plot(t, "delta", {"er_population", "er_asymptotic"},
                           "asymptotic error rate");
    });
  });

  // ---- coef-dist ------------------------------------------------------
  auto* cd_cmd = app.add_subcommand(
      "coef-dist",
      "KDE of the standardized coefficient combination l = 1_p against N(0,1)");
  struct {
    int p = 250, n1 = 250, n2 = 250;
    double gamma = 0.0;
    std::size_t B = 100000;
    CommonOpts common;
  } cd;
  cd_cmd->add_option("--p", cd.p, "Dimension")->required();
  cd_cmd->add_option("--n1", cd.n1, "Group 1 sample size")->required();
  cd_cmd->add_option("--n2", cd.n2, "Group 2 sample size")->required();
  cd_cmd->add_option("--gamma", cd.gamma, "Growth exponent (0 selects the sparse-mean recipe)");
  cd_cmd->add_option("-B,--B", cd.B, "Number of draws");
  add_common(cd_cmd, cd.common);
  cd_cmd->callback([&] {
    resolve_seed(cd.common);
    hdlda::ExperimentConfig config;
    config.kind = (cd.gamma == 0.0) ? hdlda::ExperimentKind::fig_density_gamma0
                                    : hdlda::ExperimentKind::fig_density_gamma_pos;
    config.dims_list.emplace_back(cd.p, cd.n1, cd.n2);
    config.gamma = cd.gamma;
    config.B = cd.B;
    config.seed = cd.common.seed;
    config.threads = cd.common.threads;
    ResultTable table = hdlda::run_experiment(config);
    stamp(table, cd.common);
    emit_table(table, cd.common, [&](const ResultTable& t) {
      return density_table_to_plot(t, "standardized coefficient density");
    });
  });

  // ---- dhat-dist ------------------------------------------------------
  auto* dd_cmd = app.add_subcommand(
      "dhat-dist", "KDE of the classification score for a given group");
  struct {
    int p = 10, n1 = 50, n2 = 50, group = 1;
    double delta = 2.0;
    std::size_t B = 100000;
    CommonOpts common;
  } dd;
  dd_cmd->add_option("--p", dd.p, "Dimension")->required();
  dd_cmd->add_option("--n1", dd.n1, "Group 1 sample size")->required();
  dd_cmd->add_option("--n2", dd.n2, "Group 2 sample size")->required();
  dd_cmd->add_option("--delta", dd.delta, "Mahalanobis distance Delta");
  dd_cmd->add_option("--group", dd.group, "True group of the fresh observation")
      ->check(CLI::IsMember({1, 2}));
  dd_cmd->add_option("-B,--B", dd.B, "Number of draws");
  add_common(dd_cmd, dd.common);
  dd_cmd->callback([&] {
    resolve_seed(dd.common);
    const hdlda::ProblemDims dims(dd.p, dd.n1, dd.n2);
    const hdlda::DHatParams params(dd.delta, dims, dd.group);
    const hdlda::RngStream root(dd.common.seed, 0);
    const hdlda::RngStream base = root.substream(1);
    const std::vector<double> draws = hdlda::replicate_draws(
        dd.common.seed, base.stream_id(), dd.B, dd.common.threads,
        [&](hdlda::RngStream& s) { return hdlda::sample_d_hat(s, params); });
    const hdlda::KdeEstimate kde = hdlda::epanechnikov_kde_auto(draws);
    std::size_t nonpos = 0;
    for (double d : draws) nonpos += (d <= 0.0);
    ResultTable table;
    table.meta.emplace_back("experiment", "dhat-dist");
    table.meta.emplace_back("dims", std::to_string(dd.p) + "," + std::to_string(dd.n1) +
                                        "," + std::to_string(dd.n2));
    table.meta.emplace_back("delta", hdlda::format_double(dd.delta));
    table.meta.emplace_back("group", std::to_string(dd.group));
    table.meta.emplace_back("seed", std::to_string(dd.common.seed));
    table.meta.emplace_back("B", std::to_string(dd.B));
    table.meta.emplace_back("bandwidth", hdlda::format_double(kde.bandwidth));
    table.meta.emplace_back("frac_nonpositive",
                            hdlda::format_double(static_cast<double>(nonpos) / dd.B));
    table.columns = {"series", "x", "density"};
    for (std::size_t i = 0; i < kde.grid.size(); ++i)
      table.rows.push_back({"kde_dhat", hdlda::format_double(kde.grid[i]),
                            hdlda::format_double(kde.density[i])});
    stamp(table, dd.common);
    emit_table(table, dd.common, [&](const ResultTable& t) {
      return density_table_to_plot(t, "classification score density");
    });
  });

  // ---- test -----------------------------------------------------------
  auto* test_cmd = app.add_subcommand(
      "test", "Exact test comparing two discriminant coefficients");
  struct {
    std::string data1, data2;
    int i = 1, j = 2;
    double alpha = 0.05;
    std::string side = "two";
    CommonOpts common;
  } tc;
  test_cmd->add_option("--data1", tc.data1, "Group 1 CSV (rows = variables, columns = observations)")->required();
  test_cmd->add_option("--data2", tc.data2, "Group 2 CSV")->required();
  test_cmd->add_option("--i", tc.i, "First coefficient (1-based)");
  test_cmd->add_option("--j", tc.j, "Second coefficient (1-based)");
  test_cmd->add_option("--alpha", tc.alpha, "Significance level");
  test_cmd->add_option("--side", tc.side, "two (a_i = a_j) or one (a_i <= a_j)")
      ->check(CLI::IsMember({"two", "one"}));
  add_common(test_cmd, tc.common, /*with_format=*/false);
  test_cmd->callback([&] {
    resolve_seed(tc.common);
    const Eigen::MatrixXd m1 = read_matrix_csv(tc.data1);
    const Eigen::MatrixXd m2 = read_matrix_csv(tc.data2);
    const hdlda::GroupSample g1(m1, 1);
    const hdlda::GroupSample g2(m2, 2);
    const hdlda::PooledEstimates est = hdlda::pooled_estimates(g1, g2);
    const Eigen::VectorXd l =
        hdlda::contrast_vector(est.dims.p, tc.i - 1, tc.j - 1);
    const double t_value = hdlda::test_statistic(est, l);
    const hdlda::TestResult result =
        (tc.side == "two") ? hdlda::two_sided_test(t_value, est.dims, tc.alpha)
                           : hdlda::one_sided_test(t_value, est.dims, tc.alpha);
    nlohmann::json out{
        {"statistic", result.statistic},
        {"dof", result.dof.value},
        {"p_value", result.p_value},
        {"reject", result.reject},
        {"alpha", result.alpha},
        {"side", tc.side == "two" ? "two_sided" : "one_sided"},
        {"i", tc.i},
        {"j", tc.j},
        {"p", est.dims.p},
        {"n1", est.dims.n1},
        {"n2", est.dims.n2},
    };
    emit(out.dump(2) + "\n", tc.common.output);
  });

  // ---- classify -------------------------------------------------------
  auto* cls_cmd = app.add_subcommand(
      "classify", "Classify new observations with the plug-in rule");
  struct {
    std::string data1, data2, x;
    CommonOpts common;
  } cls;
  cls_cmd->add_option("--data1", cls.data1, "Group 1 CSV")->required();
  cls_cmd->add_option("--data2", cls.data2, "Group 2 CSV")->required();
  cls_cmd->add_option("--x", cls.x, "CSV of observations to classify (one per column)")->required();
  add_common(cls_cmd, cls.common, /*with_format=*/false);
  cls_cmd->callback([&] {
    resolve_seed(cls.common);
    const hdlda::GroupSample g1(read_matrix_csv(cls.data1), 1);
    const hdlda::GroupSample g2(read_matrix_csv(cls.data2), 2);
    const hdlda::PooledEstimates est = hdlda::pooled_estimates(g1, g2);
    const Eigen::MatrixXd xs = read_matrix_csv(cls.x);
    if (xs.rows() != est.dims.p)
      throw std::invalid_argument("classify: observation dimension mismatch");
    std::ostringstream out;
    for (Eigen::Index k = 0; k < xs.cols(); ++k)
      out << hdlda::classify(xs.col(k), est) << "\n";
    emit(out.str(), cls.common.output);
  });

  // ---- reproduce ------------------------------------------------------
  auto* rep_cmd = app.add_subcommand("reproduce", "Reproduce a named figure preset");
  struct {
    std::string figure;
    std::size_t B = 100000;
    CommonOpts common;
  } rep;
  rep_cmd->add_option("figure", rep.figure, "fig1 .. fig5")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5"}));
  rep_cmd->add_option("-B,--B", rep.B, "Replications per cell");
  add_common(rep_cmd, rep.common, /*with_format=*/false);
  rep_cmd->callback([&] {
    resolve_seed(rep.common);
    const int figure = rep.figure[3] - '0';
    const hdlda::ExperimentConfig config =
        hdlda::figure_preset(figure, rep.common.seed, rep.B, rep.common.threads);
    ResultTable table = hdlda::run_experiment(config);
    stamp(table, rep.common);
    std::ostringstream buffer;
    hdlda::write_csv(table, buffer);
    emit(buffer.str(), rep.common.output);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
