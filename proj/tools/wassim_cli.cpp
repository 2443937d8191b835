#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wassim/acceptance.hpp"
#include "wassim/flows.hpp"
#include "wassim/io.hpp"
#include "wassim/pde.hpp"
#include "wassim/wim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wassim;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string formats = "csv,json";
  std::uint64_t seed = 0;
  bool quiet = false;
  bool no_timestamp = false;

  bool wants(const std::string& fmt) const {
    return ("," + formats + ",").find("," + fmt + ",") != std::string::npos;
  }
  fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), v.size());
}

void emit(const GlobalOpts& g, const std::string& name, const std::string& content) {
  write_text_file(g.out(name).string(), content);
  if (!g.quiet) std::cout << "wrote " << g.out(name).string() << "\n";
}

/// Fills CLI options from the JSON config for flags the user did not pass.
/// Flags win; unknown config keys are an error.
void apply_config(CLI::App* cmd, const GlobalOpts& g) {
  if (g.config_path.empty()) return;
  const json cfg = json::parse(read_text_file(g.config_path));
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string flag = "--" + it.key();
    CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (!opt) throw InvalidModel("config key not recognized by this command: " + it.key());
    if (opt->count() > 0) continue;
    std::string text = it.value().is_string() ? it.value().get<std::string>()
                                              : it.value().dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

MixtureModel default_or_load_model(const std::string& path) {
  if (!path.empty()) return model_from_json(read_text_file(path));
  Vector means(2), scales(2), w(2);
  means << 0.0, 1.0;
  scales << 0.05, 0.05;
  w << 0.3, 0.7;
  return MixtureModel(ComponentFamily::Gaussian, means, scales, SimplexPoint(w));
}

// --- subcommand bodies ----------------------------------------------------

struct WimOpts {
  std::string model_path;
  std::string limits = "fisher,wasserstein";
  std::string sweep_sigma;
  double gap = 1.0;
  double sigma = 0.05;
  bool second_order = false;
};

int run_wim(const GlobalOpts& g, const WimOpts& o) {
  const MixtureModel model = default_or_load_model(o.model_path);
  const SimplexPoint& p = model.weights();
  QuadratureSpec qspec;

  const MetricMatrix fim = fisher_matrix_numeric(model, qspec);
  const MetricMatrix wim = wasserstein_matrix_numeric(model, qspec);
  if (g.wants("json")) {
    emit(g, "metric_fisher_numeric.json", metric_to_json(fim));
    emit(g, "metric_wasserstein_numeric.json", metric_to_json(wim));
    const std::string wanted = "," + o.limits + ",";
    if (wanted.find(",fisher,") != std::string::npos)
      emit(g, "metric_fisher_limit.json", metric_to_json(fisher_limit(p)));
    if (wanted.find(",wasserstein,") != std::string::npos)
      emit(g, "metric_wasserstein_limit.json", metric_to_json(wasserstein_limit(p)));
    if (o.second_order)
      emit(g, "metric_second_order_limit.json",
           metric_to_json(second_order_limit(p, o.sigma, o.gap, qspec)));
  }

  if (!o.sweep_sigma.empty()) {
    const std::vector<double> sigmas = parse_list(o.sweep_sigma);
    CsvTable table;
    table.columns = {"sigma", "scaled_diagonal", "abs_log_residual"};
    std::vector<double> xs, resid;
    for (double s : sigmas) {
      const int n = model.components();
      Vector means(n), scales(n);
      for (int i = 0; i < n; ++i) {
        means(i) = o.gap * i;
        scales(i) = s;
      }
      const MixtureModel swept(model.family(), means, scales, p);
      const MetricMatrix gw = wasserstein_matrix_numeric(swept, qspec);
      const LogScaledValue k =
          scaling_factor(model.family(), s, o.gap, ScalingVariant::Homogeneous);
      const double scaled =
          (gw.log_entry(0, 0) / k).value() * std::sqrt(p[0] * p[1]);
      table.rows.push_back({s, scaled, std::abs(std::log(scaled))});
      xs.push_back(s);
      resid.push_back(std::abs(std::log(scaled)));
    }
    if (g.wants("csv"))
      emit(g, "wim_sigma_sweep.csv", csv_to_string(table, !g.no_timestamp));
    if (g.wants("svg"))
      emit(g, "wim_sigma_sweep.svg",
           svg_line_chart(xs, {resid}, {"|log residual|"}, "scaling-limit convergence"));
    bool monotone = true;
    for (size_t i = 1; i < resid.size(); ++i) monotone = monotone && resid[i] < resid[i - 1];
    if (!g.quiet) {
      std::cout << "sigma sweep residuals " << (monotone ? "decrease" : "do NOT decrease")
                << " monotonically\n";
    }
  }
  return 0;
}

struct AsymptoticsOpts {
  std::string k_values = "1,3";
  std::string t_values = "20,40";
  double sigma = 0.05;
  double gap = 1.0;
  double p_lo = 0.3;
  double p_hi = 0.7;
};

int run_asymptotics(const GlobalOpts& g, const AsymptoticsOpts& o) {
  QuadratureSpec qspec;
  qspec.rel_tol = 1e-12;

  CsvTable gk;
  gk.columns = {"k", "g_quadrature", "g_closed_form", "g2", "matching_point", "delta2_ratio"};
  for (double k : parse_list(o.k_values)) {
    const double l = matching_point(ComponentFamily::Gaussian, o.p_lo, o.p_hi, k, o.sigma,
                                    o.gap);
    const double r = delta2_asymptotic_ratio(ComponentFamily::Gaussian, o.p_lo, o.p_hi, k,
                                             o.sigma, o.gap, qspec);
    gk.rows.push_back({k, g_integral(k, qspec), g_closed_form(k), g2_integral(k, qspec), l, r});
  }
  if (g.wants("csv")) emit(g, "asymptotic_integrals.csv", csv_to_string(gk, !g.no_timestamp));

  CsvTable pert;
  pert.columns = {"t", "scaled_difference", "relative_deviation"};
  const double g2_1 = g2_integral(1.0, qspec);
  for (double t : parse_list(o.t_values)) {
    const double v = perturbation_lemma_check(1.0, 1.0, t, qspec);
    pert.rows.push_back({t, v, std::abs(v / g2_1 - 1.0)});
  }
  if (g.wants("csv"))
    emit(g, "perturbation_deviation.csv", csv_to_string(pert, !g.no_timestamp));
  return 0;
}

struct FlowOpts {
  std::string energy = "entropy";
  std::string p0;
  std::string v_nodes;
  int n = 3;
  double dt = 0.01;
  double t_end = 50.0;
  std::string method = "euler";
  int stride = 10;
};

int run_flow(const GlobalOpts& g, const FlowOpts& o) {
  Vector p0;
  if (!o.p0.empty()) {
    p0 = to_vector(parse_list(o.p0));
  } else {
    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    p0 = Vector(o.n);
    for (int i = 0; i < o.n; ++i) p0(i) = unif(rng);
    p0 /= p0.sum();
  }
  const int n = static_cast<int>(p0.size());

  EnergyFunctional energy;
  if (o.energy == "entropy") {
    energy = entropy_energy();
  } else if (o.energy == "potential") {
    PotentialEnergy e;
    e.v_nodes = o.v_nodes.empty() ? Vector(Vector::LinSpaced(n, 0.0, 1.0))
                                  : to_vector(parse_list(o.v_nodes));
    energy = e;
  } else if (o.energy == "interaction") {
    InteractionEnergy e;
    e.w = Matrix::Identity(n, n);
    energy = e;
  } else {
    throw InvalidModel("unknown energy: " + o.energy);
  }

  IntegratorSpec spec;
  spec.dt = o.dt;
  spec.method =
      o.method == "rk4" ? IntegratorMethod::RungeKutta4 : IntegratorMethod::ForwardEuler;
  const auto traj = integrate_flow(energy, SimplexPoint(p0), spec, o.t_end);

  CsvTable table;
  table.columns = {"t"};
  for (int i = 0; i < n; ++i) table.columns.push_back("p_" + std::to_string(i + 1));
  std::vector<double> ts;
  std::vector<std::vector<double>> series(n);
  for (size_t s = 0; s < traj.size(); ++s) {
    if (s % o.stride != 0 && s + 1 != traj.size()) continue;
    std::vector<double> row{traj[s].t};
    for (int i = 0; i < n; ++i) row.push_back(traj[s].p[i]);
    table.rows.push_back(row);
    ts.push_back(traj[s].t);
    for (int i = 0; i < n; ++i) series[i].push_back(traj[s].p[i]);
  }
  if (g.wants("csv")) emit(g, "flow_trajectory.csv", csv_to_string(table, !g.no_timestamp));
  if (g.wants("svg")) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("p_" + std::to_string(i + 1));
    emit(g, "flow_trajectory.svg",
         svg_line_chart(ts, series, labels, o.energy + " flow on the simplex"));
  }
  return 0;
}

struct HeatOpts {
  double dx = 0.1;
  double dt = 0.001;
  double t_end = 1.0;
  std::string method = "euler";
  int stride = 100;
};

int run_heat1d(const GlobalOpts& g, const HeatOpts& o) {
  const int n = static_cast<int>(std::lround(10.0 / o.dx));
  const Grid1D grid(-5.0, 5.0, n);
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    v(i) = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * grid.dx;
  }
  const Field1D f0(v);
  const int steps = static_cast<int>(std::lround(o.t_end / o.dt));

  IntegratorSpec spec;
  spec.method =
      o.method == "rk4" ? IntegratorMethod::RungeKutta4 : IntegratorMethod::ForwardEuler;
  const Trajectory1D traj = run_scheme_1d(f0, grid, o.dt, steps, spec, o.stride);

  Trajectory1D ref;
  for (size_t s = 0; s < traj.times.size(); ++s) {
    const int k = static_cast<int>(std::lround(traj.times[s] / o.dt));
    ref.times.push_back(traj.times[s]);
    ref.fields.push_back(crank_nicolson_1d(f0, grid, o.dt, k).values);
  }

  CsvTable final_table;
  final_table.columns = {"x", "scheme", "reference", "abs_error"};
  for (int i = 0; i < n; ++i) {
    final_table.rows.push_back({grid.node(i), traj.fields.back()(i), ref.fields.back()(i),
                                std::abs(traj.fields.back()(i) - ref.fields.back()(i))});
  }
  const ErrorReport rep = error_report(traj, ref);
  CsvTable rep_table;
  rep_table.columns = {"t", "max_abs", "l2", "mass_diff"};
  for (size_t s = 0; s < rep.times.size(); ++s)
    rep_table.rows.push_back({rep.times[s], rep.max_abs[s], rep.l2[s], rep.mass_diff[s]});

  if (g.wants("csv")) {
    emit(g, "heat1d_final.csv", csv_to_string(final_table, !g.no_timestamp));
    emit(g, "heat1d_error.csv", csv_to_string(rep_table, !g.no_timestamp));
  }
  if (g.wants("svg")) {
    std::vector<double> xs(n);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = grid.node(i);
      a[i] = traj.fields.back()(i);
      b[i] = ref.fields.back()(i);
    }
    emit(g, "heat1d_overlay.svg",
         svg_line_chart(xs, {a, b}, {"scheme", "Crank-Nicolson"}, "1D heat at t_end"));
  }
  return 0;
}

int run_heat2d(const GlobalOpts& g, const HeatOpts& o) {
  const int n = static_cast<int>(std::lround(10.0 / o.dx));
  const Grid1D gx(-5.0, 5.0, n);
  const Grid2D grid(gx, gx);
  Matrix v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = gx.node(i), y = gx.node(j);
      v(i, j) = std::exp(-0.5 * (x * x + y * y)) / (2.0 * M_PI) * gx.dx * gx.dx;
    }
  }
  const Field2D f0(v);
  const int steps = static_cast<int>(std::lround(o.t_end / o.dt));

  IntegratorSpec spec;
  spec.method =
      o.method == "rk4" ? IntegratorMethod::RungeKutta4 : IntegratorMethod::ForwardEuler;
  const Trajectory2D traj = run_scheme_2d(f0, grid, o.dt, steps, spec, steps);
  const Field2D ref = crank_nicolson_2d(f0, grid, o.dt, steps);

  std::ostringstream field_csv;
  field_csv << "# grid -5 5 " << n << " x " << n << ", row-major, t=" << o.t_end << "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) field_csv << ",";
      field_csv << format_full(traj.fields.back()(i, j));
    }
    field_csv << "\n";
  }
  const double dev = (traj.fields.back() - ref.values).cwiseAbs().maxCoeff();
  if (!g.quiet)
    std::cout << "max-abs deviation from reference: " << format_full(dev) << "\n";
  if (g.wants("csv")) emit(g, "heat2d_final.csv", field_csv.str());
  if (g.wants("svg"))
    emit(g, "heat2d_final.svg", svg_heatmap(traj.fields.back(), "2D heat at t_end"));
  return 0;
}

struct ExtendedOpts {
  std::string p0 = "0.2,0.5,0.3";
  std::string mu0 = "-1,0,3";
  double sigma = 0.1;
  double dt = 0.01;
  int steps = 5000;
  std::string potential = "sin";
};

int run_extended(const GlobalOpts& g, const ExtendedOpts& o) {
  ExtendedFlowState s0;
  s0.weights = to_vector(parse_list(o.p0));
  s0.mu = to_vector(parse_list(o.mu0));
  s0.t = 0.0;
  s0.sigma = o.sigma;

  PotentialEnergy energy;
  if (o.potential == "sin") {
    energy.v = [](double x) { return std::sin(x); };
    energy.v_prime = [](double x) { return std::cos(x); };
  } else if (o.potential == "quadratic") {
    energy.v = [](double x) { return 0.5 * x * x; };
    energy.v_prime = [](double x) { return x; };
  } else {
    throw InvalidModel("unknown potential: " + o.potential);
  }

  IntegratorSpec spec;
  spec.dt = o.dt;
  const auto traj = integrate_extended_flow(s0, energy, spec, o.steps * o.dt);

  const int n0 = static_cast<int>(s0.mu.size());
  CsvTable table;
  table.columns = {"t"};
  for (int i = 0; i < n0; ++i) table.columns.push_back("p_" + std::to_string(i + 1));
  for (int i = 0; i < n0; ++i) table.columns.push_back("mu_" + std::to_string(i + 1));
  std::vector<double> ts;
  std::vector<std::vector<double>> mu_series(n0);
  int prev_n = n0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t s = 0; s < traj.size(); ++s) {
    const int nc = static_cast<int>(traj[s].mu.size());
    if (nc < prev_n && !g.quiet)
      std::cout << "merge at t=" << format_full(traj[s].t) << " (" << prev_n << " -> " << nc
                << " components)\n";
    prev_n = nc;
    if (s % 10 != 0 && s + 1 != traj.size()) continue;
    std::vector<double> row{traj[s].t};
    for (int i = 0; i < n0; ++i) row.push_back(i < nc ? traj[s].weights(i) : nan);
    for (int i = 0; i < n0; ++i) row.push_back(i < nc ? traj[s].mu(i) : nan);
    table.rows.push_back(row);
    ts.push_back(traj[s].t);
    for (int i = 0; i < n0; ++i)
      mu_series[i].push_back(i < nc ? traj[s].mu(i) : mu_series[i].back());
  }
  if (g.wants("csv"))
    emit(g, "extended_trajectory.csv", csv_to_string(table, !g.no_timestamp));
  if (g.wants("svg")) {
    std::vector<std::string> labels;
    for (int i = 0; i < n0; ++i) labels.push_back("mu_" + std::to_string(i + 1));
    emit(g, "extended_means.svg",
         svg_line_chart(ts, mu_series, labels, "extended flow means"));
  }
  if (!g.quiet) {
    std::cout << "final means:";
    for (int i = 0; i < traj.back().mu.size(); ++i)
      std::cout << " " << format_full(traj.back().mu(i));
    std::cout << "\n";
  }
  return 0;
}

int run_verify(const GlobalOpts& g) {
  const auto results = run_acceptance_suite();
  json report = json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.index << "] " << r.name << " ("
              << format_full(r.seconds) << " s)";
    if (!r.pass || !g.quiet) std::cout << " " << r.detail;
    std::cout << "\n";
    report.push_back({{"index", r.index},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
  }
  if (g.wants("json")) emit(g, "verify_report.json", report.dump(2));
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaling Wasserstein geometry of 1D mixture models"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file; flags win over config keys");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--format", g.formats, "comma list from csv,json,svg");
  app.add_option("--seed", g.seed, "seed for randomized sweeps");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamped CSV header line");

  WimOpts wim_o;
  CLI::App* wim_cmd = app.add_subcommand("wim", "information matrices and scaling limits");
  wim_cmd->add_option("--model", wim_o.model_path, "MixtureModel JSON file");
  wim_cmd->add_option("--limits", wim_o.limits, "comma list from fisher,wasserstein");
  wim_cmd->add_option("--sweep-sigma", wim_o.sweep_sigma, "comma list of sigmas");
  wim_cmd->add_option("--gap", wim_o.gap, "mean gap for sweeps");
  wim_cmd->add_option("--sigma", wim_o.sigma, "sigma for the second-order limit");
  wim_cmd->add_flag("--second-order", wim_o.second_order, "emit the second-order limit");

  AsymptoticsOpts asym_o;
  CLI::App* asym_cmd = app.add_subcommand("asymptotics", "limit integrals and expansions");
  asym_cmd->add_option("--k-values", asym_o.k_values, "scale ratios k");
  asym_cmd->add_option("--t-values", asym_o.t_values, "perturbation parameters t");
  asym_cmd->add_option("--sigma", asym_o.sigma, "sigma for matching points");
  asym_cmd->add_option("--gap", asym_o.gap, "gap d");

  FlowOpts flow_o;
  CLI::App* flow_cmd = app.add_subcommand("flow", "gradient flows on the simplex");
  flow_cmd->add_option("--energy", flow_o.energy, "entropy|potential|interaction");
  flow_cmd->add_option("--p0", flow_o.p0, "initial weights (comma list)");
  flow_cmd->add_option("--v-nodes", flow_o.v_nodes, "potential node values");
  flow_cmd->add_option("--n", flow_o.n, "component count for random p0");
  flow_cmd->add_option("--dt", flow_o.dt, "time step");
  flow_cmd->add_option("--t-end", flow_o.t_end, "time horizon");
  flow_cmd->add_option("--method", flow_o.method, "euler|rk4");
  flow_cmd->add_option("--stride", flow_o.stride, "output stride");

  HeatOpts heat1_o, heat2_o;
  CLI::App* heat1_cmd = app.add_subcommand("heat1d", "1D parametric heat experiment");
  heat1_cmd->add_option("--dx", heat1_o.dx, "grid spacing");
  heat1_cmd->add_option("--dt", heat1_o.dt, "time step");
  heat1_cmd->add_option("--t-end", heat1_o.t_end, "time horizon");
  heat1_cmd->add_option("--method", heat1_o.method, "euler|rk4");
  heat1_cmd->add_option("--stride", heat1_o.stride, "snapshot stride");
  CLI::App* heat2_cmd = app.add_subcommand("heat2d", "2D parametric heat experiment");
  heat2_cmd->add_option("--dx", heat2_o.dx, "grid spacing");
  heat2_cmd->add_option("--dt", heat2_o.dt, "time step");
  heat2_cmd->add_option("--t-end", heat2_o.t_end, "time horizon");
  heat2_cmd->add_option("--method", heat2_o.method, "euler|rk4");

  ExtendedOpts ext_o;
  CLI::App* ext_cmd = app.add_subcommand("extended", "flow over weights and means");
  ext_cmd->add_option("--p0", ext_o.p0, "initial weights");
  ext_cmd->add_option("--mu0", ext_o.mu0, "initial means");
  ext_cmd->add_option("--sigma", ext_o.sigma, "component scale");
  ext_cmd->add_option("--dt", ext_o.dt, "time step");
  ext_cmd->add_option("--steps", ext_o.steps, "step count");
  ext_cmd->add_option("--potential", ext_o.potential, "sin|quadratic");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    apply_config(active, g);
    if (!fs::exists(g.out_dir)) fs::create_directories(g.out_dir);
    if (active == wim_cmd) return run_wim(g, wim_o);
    if (active == asym_cmd) return run_asymptotics(g, asym_o);
    if (active == flow_cmd) return run_flow(g, flow_o);
    if (active == heat1_cmd) return run_heat1d(g, heat1_o);
    if (active == heat2_cmd) return run_heat2d(g, heat2_o);
    if (active == ext_cmd) return run_extended(g, ext_o);
    if (active == verify_cmd) return run_verify(g);
  } catch (const NonConvergent& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const StiffnessError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
