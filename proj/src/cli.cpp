#include "dpmvar/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dpmvar/io.hpp"

namespace dpmvar::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
  std::optional<std::string> data;
  std::optional<std::string> preset;
  std::optional<long> draws;
  std::optional<long> burn;
  std::optional<int> lags;
  std::optional<int> max_clusters;
  bool sv = false;
  bool store_latents = false;
  std::optional<std::string> indicator_density;
  // simulate
  std::optional<std::string> shock_kind;
  std::optional<int> dimension;
  std::optional<long> periods;
  // forecast
  std::optional<long> hold_out;
  std::vector<int> horizons;
  std::vector<std::string> models;
  // irf
  std::optional<std::string> shock_variable;
  std::optional<int> irf_horizons;
  std::optional<std::string> draws_dir;
  // bench
  std::vector<int> bench_dims;
  std::optional<int> repeats;
  // geweke
  std::optional<long> iterations;
  // simstudy
  std::optional<int> replications;
  std::vector<std::string> kinds;
};

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

io::RunConfig resolve_config(const std::string& task, const Overrides& o) {
  json base = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw Error("cannot open config file " + o.config);
    try {
      in >> base;
    } catch (const json::exception& e) {
      throw Error("config " + o.config + ": " + e.what());
    }
  }
  base["task"] = task;
  io::RunConfig c;
  try {
    c = io::parse_run_config(base);
  } catch (const json::exception& e) {
    throw Error("config: " + std::string(e.what()));
  }
  if (o.seed) {
    c.seed = *o.seed;
    c.simulate.seed = c.bench.seed = c.study.seed = c.geweke.seed = *o.seed;
  }
  if (o.threads) c.threads = c.options.threads = c.study.threads = *o.threads;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.data) c.data_path = *o.data;
  if (o.preset) {
    c.preset = *o.preset;
    c.selection.variables.clear();
    for (const auto& v : io::preset(c.preset)) c.selection.variables.push_back(v.mnemonic);
  }
  if (o.draws) c.plan.n_draws = *o.draws;
  if (o.burn) c.plan.n_burn = *o.burn;
  if (o.draws && !o.burn && c.plan.n_burn >= c.plan.n_draws) c.plan.n_burn = c.plan.n_draws / 2;
  if (o.lags) c.model.lags = *o.lags;
  if (o.max_clusters) c.model.max_clusters = *o.max_clusters;
  if (o.sv) c.model.stochastic_volatility = true;
  if (o.store_latents) c.plan.store_latents = true;
  if (o.indicator_density) {
    if (*o.indicator_density == "marginal") {
      c.model.indicator_density = IndicatorDensity::marginal;
    } else if (*o.indicator_density == "conditional") {
      c.model.indicator_density = IndicatorDensity::conditional;
    } else {
      throw Error("--indicator-density must be conditional or marginal");
    }
  }
  if (o.shock_kind) c.simulate.shock = dgp::shock_kind_from_string(*o.shock_kind);
  if (o.dimension) c.simulate.dimension = c.geweke.dimension = *o.dimension;
  if (o.periods) c.simulate.periods = c.geweke.periods = *o.periods;
  if (o.hold_out) c.forecast.hold_out = *o.hold_out;
  if (!o.horizons.empty()) c.forecast.horizons = o.horizons;
  if (!o.models.empty()) c.forecast.models = o.models;
  if (o.shock_variable) c.irf.shock = *o.shock_variable;
  if (o.irf_horizons) c.irf.horizons = *o.irf_horizons;
  if (!o.bench_dims.empty()) c.bench.dimensions = o.bench_dims;
  if (o.repeats) c.bench.repeats = *o.repeats;
  if (o.iterations) c.geweke.iterations = *o.iterations;
  if (o.replications) c.study.replications = *o.replications;
  if (!o.kinds.empty()) {
    c.study.kinds.clear();
    for (const auto& k : o.kinds) c.study.kinds.push_back(dgp::shock_kind_from_string(k));
  }
  if (o.sv) c.geweke_sv = true;
  c.validate();
  return c;
}

Dataset load_data(const io::RunConfig& c) {
  if (c.data_path.empty()) throw Error("no data file: set data.path in the config or pass --data");
  const std::string path = io::resolve_data_path(c.data_path);
  if (c.selection.variables.empty() && c.preset.empty()) {
    // Without a selection the file is taken as already transformed.
    io::DataSelection sel = c.selection;
    const io::RawTable raw = io::read_csv(path);
    for (const auto& col : raw.columns) {
      if (!sel.codes.count(col)) sel.codes[col] = 1;
    }
    return io::build_dataset(raw, sel);
  }
  return io::load_dataset(path, c.selection);
}

void write_manifest(const io::RunConfig& c, const std::vector<std::string>& outputs, const json& extra) {
  json m;
  const json cfg = io::to_json(c);
  m["program"] = "dpmvar";
  m["version"] = kVersion;
  m["task"] = c.task;
  m["seed"] = c.seed;
  m["config"] = cfg;
  m["config_hash"] = fnv_hex(cfg.dump());
  m["outputs"] = outputs;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  m["modeling_notes"] = {
      {"coefficient_prior",
       "normal-gamma hierarchy with theta 0.6 and lambda^2 ~ Gamma(0.01, 0.01), mirroring the intercept shrinkage"},
      {"skew_contamination", "location shift of -3u, u ~ U(0,1), drawn i.i.d. per period with probability 0.015"},
      {"log_transform_scale", c.selection.log_scale}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(fs::path(c.output_dir) / "manifest.json");
  if (!out) throw Error("cannot write the run manifest in " + c.output_dir);
  out << m.dump(2) << '\n';
}

std::string out_path(const io::RunConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

mcmc::DrawStore estimate_store(const io::RunConfig& c, const Dataset& data) {
  const PriorConfig priors = io::build_priors(c, data);
  mcmc::SamplerOptions opts = c.options;
  opts.threads = c.threads;
  return mcmc::run_sweeps(data, c.model, priors, c.plan, RngHandle(c.seed, 0), opts);
}

void write_cluster_trace(const mcmc::DrawStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(10);
  out << "draw,effective_clusters,alpha,weight_remainder\n";
  for (std::size_t i = 0; i < store.draws.size(); ++i) {
    const auto& d = store.draws[i];
    out << i << ',' << d.effective_clusters << ',' << d.alpha << ',' << d.weight_remainder << '\n';
  }
}

int find_variable(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("variable '" + name + "' is not in the data");
  return static_cast<int>(it - names.begin());
}

int task_simulate(const io::RunConfig& c) {
  RngHandle rng(c.seed, 0x51ULL);
  const dgp::Simulated sim = dgp::simulate_dataset(c.simulate, rng);
  fs::create_directories(c.output_dir);
  io::write_dataset_csv(sim.data, out_path(c, "data.csv"));
  json truth;
  const auto& t = sim.truth;
  std::vector<std::vector<double>> a, w;
  for (Eigen::Index i = 0; i < t.coefficients.rows(); ++i) {
    std::vector<double> ra, rw;
    for (Eigen::Index j = 0; j < t.coefficients.cols(); ++j) ra.push_back(t.coefficients(i, j));
    for (Eigen::Index j = 0; j < t.w.cols(); ++j) rw.push_back(t.w(i, j));
    a.push_back(std::move(ra));
    w.push_back(std::move(rw));
  }
  truth["coefficients"] = a;
  truth["shock_covariance"] = w;
  truth["skew_shape"] = t.skew_shape;
  truth["shock"] = dgp::to_string(c.simulate.shock);
  std::ofstream(out_path(c, "truth.json")) << truth.dump(2) << '\n';
  write_manifest(c, {"data.csv", "truth.json"}, json::object());
  std::cout << "simulated " << sim.data.periods() << " periods of " << sim.data.dimension() << " variables into "
            << c.output_dir << '\n';
  return 0;
}

int task_estimate(const io::RunConfig& c) {
  const Dataset data = load_data(c);
  const mcmc::DrawStore store = estimate_store(c, data);
  fs::create_directories(c.output_dir);
  store.write(c.output_dir, "draws");
  write_cluster_trace(store, out_path(c, "clusters.csv"));
  const auto trace = store.effective_cluster_trace();
  const double g = dgp::median(trace);
  write_manifest(c, {"draws.json", "draws.bin", "clusters.csv"},
                 {{"draw_config_hash", store.config_hash}, {"median_effective_clusters", g},
                  {"periods", data.periods()}, {"variables", data.names}});
  std::cout << "retained " << store.size() << " draws; posterior median of effective clusters " << g << '\n';
  return 0;
}

int task_forecast(const io::RunConfig& c) {
  const Dataset data = load_data(c);
  forecast::RollingConfig rc;
  rc.first_origin = data.periods() - c.forecast.hold_out;
  rc.horizons = c.forecast.horizons;
  for (const auto& f : c.forecast.focus) rc.focus.push_back(find_variable(data.names, f));
  rc.plan = c.plan;
  rc.benchmark = c.forecast.benchmark;
  rc.paths_per_draw = c.forecast.paths_per_draw;
  rc.seed = c.seed;
  rc.threads = c.threads;
  std::vector<forecast::ModelSpec> models;
  for (const auto& name : c.forecast.models) models.push_back({name, io::estimator_model(name, c.model)});
  if (std::none_of(models.begin(), models.end(), [&](const auto& m) { return m.name == rc.benchmark; })) {
    rc.benchmark = models.front().name;
  }
  const forecast::RollingResult r = forecast::rolling_evaluation(data, models, rc);
  fs::create_directories(c.output_dir);
  forecast::write_origin_csv(r, out_path(c, "forecast_origins.csv"));
  forecast::write_relative_csv(r, out_path(c, "forecast_relative.csv"));
  forecast::write_cumulative_csv(r, out_path(c, "cumulative_lpl.csv"));
  json avg = json::object();
  for (const auto& m : models) {
    for (int h : rc.horizons) {
      try {
        avg[m.name + "_h" + std::to_string(h)] = forecast::average_joint_lpl(r, m.name, h);
      } catch (const Error&) {
      }
    }
  }
  write_manifest(c, {"forecast_origins.csv", "forecast_relative.csv", "cumulative_lpl.csv"},
                 {{"average_joint_lpl", avg}, {"benchmark", r.benchmark}});
  for (const auto& row : r.relative) {
    if (row.variable != "joint") continue;
    std::cout << row.model << " h=" << row.horizon << " mse_ratio=" << row.mse_ratio
              << " lpl_difference=" << row.lpl_difference << '\n';
  }
  return 0;
}

int task_irf(const io::RunConfig& c, const std::optional<std::string>& draws_dir) {
  mcmc::DrawStore store;
  std::vector<std::string> outputs;
  if (draws_dir) {
    store = mcmc::DrawStore::read(*draws_dir, "draws");
  } else {
    io::RunConfig ec = c;
    ec.plan.store_latents = true;
    const Dataset data = load_data(ec);
    store = estimate_store(ec, data);
  }
  structural::IrfOptions opt;
  opt.shock = c.irf.shock.empty() ? 0 : find_variable(store.names, c.irf.shock);
  opt.horizons = c.irf.horizons;
  opt.scale = c.irf.scale;
  opt.omega = c.irf.omega;
  const structural::IrfResult r = structural::compute_irfs(store, opt, c.threads);
  fs::create_directories(c.output_dir);
  structural::write_irf_csv(r, store.names, out_path(c, "irf.csv"));
  outputs.push_back("irf.csv");
  if (!store.draws.empty() && !store.draws.front().delta.empty()) {
    const auto rel = structural::relabel_clusters(store);
    const auto diag = structural::cluster_diagnostics(rel, 4);
    structural::write_diagnostics_csv(diag, out_path(c, "cluster_probability.csv"), out_path(c, "log_det.csv"));
    outputs.push_back("cluster_probability.csv");
    outputs.push_back("log_det.csv");
  }
  write_manifest(c, outputs, {{"shock_variable", store.names.empty() ? "" : store.names[static_cast<std::size_t>(opt.shock)]}});
  std::cout << "impulse responses for " << store.size() << " draws written to " << c.output_dir << '\n';
  return 0;
}

int task_bench(const io::RunConfig& c) {
  const auto rows = io::bench_timing(c.bench);
  fs::create_directories(c.output_dir);
  io::write_bench_csv(rows, out_path(c, "bench.csv"));
  std::vector<double> m, g1, niw;
  for (const auto& r : rows) {
    m.push_back(r.dimension);
    g1.push_back(r.g1_seconds);
    niw.push_back(r.niw_seconds);
    std::cout << "M=" << r.dimension << " dpm=" << r.dpm_seconds << "s g1=" << r.g1_seconds << "s niw=" << r.niw_seconds
              << "s\n";
  }
  json extra = json::object();
  if (rows.size() >= 2) {
    extra["slope_g1"] = io::loglog_slope(m, g1);
    extra["slope_niw"] = io::loglog_slope(m, niw);
  }
  write_manifest(c, {"bench.csv"}, extra);
  return 0;
}

int task_geweke(const io::RunConfig& c) {
  ModelConfig model = c.model;
  model.stochastic_volatility = c.geweke_sv;
  const PriorConfig priors = mcmc::geweke_priors(c.geweke.dimension);
  const mcmc::GewekeReport r = mcmc::geweke_joint_test(model, priors, c.geweke, c.options);
  fs::create_directories(c.output_dir);
  std::ofstream out(out_path(c, "geweke.csv"));
  out.precision(10);
  out << "statistic,marginal_mean,successive_mean,z\n";
  for (const auto& s : r.statistics) {
    out << s.name << ',' << s.marginal_mean << ',' << s.successive_mean << ',' << s.z << '\n';
  }
  write_manifest(c, {"geweke.csv"}, {{"max_abs_z", r.max_abs_z()}});
  std::cout << "max |z| = " << r.max_abs_z() << '\n';
  return 0;
}

int task_simstudy(const io::RunConfig& c) {
  const auto cells = dgp::run_simulation_study(c.study);
  fs::create_directories(c.output_dir);
  dgp::write_study_csv(cells, out_path(c, "simulation_study.csv"));
  write_manifest(c, {"simulation_study.csv"}, json::object());
  for (const auto& cell : cells) {
    std::cout << "M=" << cell.size << ' ' << dgp::to_string(cell.kind) << ' ' << cell.estimator
              << " mae=" << cell.mae << " clusters=" << cell.effective_clusters << '\n';
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Bayesian VARs with Dirichlet process mixture shocks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Root RNG seed");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", o.output_dir, "Directory for outputs and the run manifest");

  auto add_data_flags = [&](CLI::App* s) {
    s->add_option("--data", o.data, "CSV file (relative paths also searched in $DPMVAR_DATA_DIR or ./data)");
    s->add_option("--preset", o.preset, "Variable set S, M or L")->check(CLI::IsMember({"S", "M", "L"}));
  };
  auto add_model_flags = [&](CLI::App* s) {
    s->add_option("--draws", o.draws, "Total sweeps");
    s->add_option("--burn", o.burn, "Discarded sweeps");
    s->add_option("--lags", o.lags, "Lag order");
    s->add_option("--max-clusters", o.max_clusters, "Cluster cap (1 gives the Gaussian model)");
    s->add_flag("--sv", o.sv, "Stochastic volatility for the idiosyncratic errors");
    s->add_option("--indicator-density", o.indicator_density, "conditional or marginal");
  };

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from one of the four shock laws");
  sim->add_option("--shock", o.shock_kind, "skew, student_t, common_sv or homoskedastic");
  sim->add_option("--dimension", o.dimension, "Number of variables");
  sim->add_option("--periods", o.periods, "Number of periods");

  auto* est = app.add_subcommand("estimate", "Run the sampler and store the posterior draws");
  add_data_flags(est);
  add_model_flags(est);
  est->add_flag("--store-latents", o.store_latents, "Keep indicators and log-volatility paths");

  auto* fc = app.add_subcommand("forecast", "Expanding-window forecast evaluation");
  add_data_flags(fc);
  add_model_flags(fc);
  fc->add_option("--hold-out", o.hold_out, "Number of final periods to forecast");
  fc->add_option("--horizons", o.horizons, "Forecast horizons");
  fc->add_option("--models", o.models, "Estimators among DPM, G1, DPM-SV, G1-SV");

  auto* irf = app.add_subcommand("irf", "Impulse responses per cluster and mixture-weighted");
  add_data_flags(irf);
  add_model_flags(irf);
  irf->add_option("--shock-variable", o.shock_variable, "Name of the shocked variable");
  irf->add_option("--horizons", o.irf_horizons, "Largest response horizon");
  irf->add_option("--draws-dir", o.draws_dir, "Reuse a stored draw directory instead of estimating");

  auto* bench = app.add_subcommand("bench", "Timing of equation-by-equation and full-system samplers");
  bench->add_option("--dims", o.bench_dims, "Dimension grid");
  bench->add_option("--repeats", o.repeats, "Repetitions per dimension (median reported)");

  auto* gw = app.add_subcommand("geweke", "Joint-distribution test of the sampler");
  gw->add_option("--iterations", o.iterations, "Draws per simulator");
  gw->add_option("--dimension", o.dimension, "Number of variables");
  gw->add_option("--periods", o.periods, "Periods of simulated data");
  gw->add_option("--max-clusters", o.max_clusters, "Cluster cap");
  gw->add_flag("--sv", o.sv, "Test the stochastic volatility variant");

  auto* ss = app.add_subcommand("simstudy", "Simulation study of coefficient accuracy and cluster counts");
  ss->add_option("--replications", o.replications, "Replications per cell");
  ss->add_option("--kinds", o.kinds, "Shock laws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const std::string task = app.get_subcommands().front()->get_name();
    const io::RunConfig c = resolve_config(task, o);
    if (task == "simulate") return task_simulate(c);
    if (task == "estimate") return task_estimate(c);
    if (task == "forecast") return task_forecast(c);
    if (task == "irf") return task_irf(c, o.draws_dir);
    if (task == "bench") return task_bench(c);
    if (task == "geweke") return task_geweke(c);
    if (task == "simstudy") return task_simstudy(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dpmvar::cli
