#include <algorithm>
#include <fstream>
#include <set>

#include "dpmvar/io.hpp"

namespace dpmvar::io {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& section) {
  if (!j.is_object()) throw Error("config: section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw Error("config: unknown key '" + key + "' in section '" + section + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

IndicatorDensity parse_density(const std::string& s) {
  if (s == "conditional") return IndicatorDensity::conditional;
  if (s == "marginal") return IndicatorDensity::marginal;
  throw Error("config: indicator_density must be 'conditional' or 'marginal'");
}

TruncationPolicy parse_truncation(const std::string& s) {
  if (s == "truncate") return TruncationPolicy::truncate;
  if (s == "strict") return TruncationPolicy::strict;
  throw Error("config: truncation must be 'truncate' or 'strict'");
}

structural::ShockScale parse_scale(const std::string& s) {
  if (s == "one_sd") return structural::ShockScale::one_sd;
  if (s == "unit") return structural::ShockScale::unit;
  throw Error("config: irf scale must be 'one_sd' or 'unit'");
}

structural::OmegaChoice parse_omega(const std::string& s) {
  if (s == "cluster_average") return structural::OmegaChoice::cluster_average;
  if (s == "posterior_mean") return structural::OmegaChoice::posterior_mean;
  throw Error("config: irf omega must be 'cluster_average' or 'posterior_mean'");
}

void parse_model(const json& j, ModelConfig& m) {
  check_keys(j, {"lags", "stochastic_volatility", "max_clusters", "slice_decay", "indicator_density", "truncation"},
             "model");
  read(j, "lags", m.lags);
  read(j, "stochastic_volatility", m.stochastic_volatility);
  read(j, "max_clusters", m.max_clusters);
  read(j, "slice_decay", m.slice_decay);
  if (j.contains("indicator_density")) m.indicator_density = parse_density(j.at("indicator_density").get<std::string>());
  if (j.contains("truncation")) m.truncation = parse_truncation(j.at("truncation").get<std::string>());
}

void parse_plan(const json& j, mcmc::SweepPlan& plan, mcmc::SamplerOptions& opt) {
  check_keys(j, {"draws", "burn", "thin", "store_latents", "alpha_update", "alpha_step"}, "sampler");
  read(j, "draws", plan.n_draws);
  read(j, "burn", plan.n_burn);
  read(j, "thin", plan.thin);
  read(j, "store_latents", plan.store_latents);
  if (j.contains("alpha_update")) {
    const auto s = j.at("alpha_update").get<std::string>();
    if (s == "conjugate") {
      opt.alpha_update = mcmc::AlphaUpdate::conjugate;
    } else if (s == "metropolis") {
      opt.alpha_update = mcmc::AlphaUpdate::metropolis;
    } else {
      throw Error("config: alpha_update must be 'conjugate' or 'metropolis'");
    }
  }
  read(j, "alpha_step", opt.alpha_mh_step);
}

std::string density_name(IndicatorDensity d) { return d == IndicatorDensity::marginal ? "marginal" : "conditional"; }

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> tasks = {"simulate", "estimate", "forecast", "irf", "bench", "geweke", "simstudy"};
  if (!tasks.count(task)) throw Error("config: unknown task '" + task + "'");
  model.validate();
  plan.validate();
  if (threads < 1) throw Error("config: threads must be >= 1");
  if (!(selection.log_scale > 0.0)) throw Error("config: data log_scale must be positive");
  for (const auto& [name, code] : selection.codes) {
    if (code < 1 || code > 7) throw Error("config: transformation code for " + name + " must lie in 1..7");
  }
  for (const auto& v : selection.variables) {
    const auto it = selection.codes.find(v);
    const int code = it != selection.codes.end() ? it->second : default_code(v).value_or(1);
    if (code < 1 || code > 7) throw Error("config: transformation code for " + v + " must lie in 1..7");
  }
  for (int h : forecast.horizons) {
    if (h < 1) throw Error("config: forecast horizons must be >= 1");
  }
  if (forecast.hold_out < 1) throw Error("config: forecast hold_out must be >= 1");
  if (irf.horizons < 0) throw Error("config: irf horizons must be nonnegative");
  if (bench.dimensions.empty()) throw Error("config: bench needs at least one dimension");
  if (bench.draws < 1 || bench.repeats < 1) throw Error("config: bench draws and repeats must be >= 1");
}

RunConfig parse_run_config(const json& j) {
  check_keys(j,
             {"task", "seed", "threads", "output_dir", "data", "model", "priors", "sampler", "forecast", "irf",
              "simulate", "bench", "simstudy", "geweke"},
             "top level");
  RunConfig c;
  read(j, "task", c.task);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  read(j, "output_dir", c.output_dir);

  if (j.contains("data")) {
    const auto& d = j.at("data");
    check_keys(d, {"path", "preset", "variables", "codes", "frequency", "log_scale"}, "data");
    read(d, "path", c.data_path);
    read(d, "preset", c.preset);
    read(d, "variables", c.selection.variables);
    read(d, "frequency", c.selection.frequency);
    read(d, "log_scale", c.selection.log_scale);
    if (d.contains("codes")) c.selection.codes = d.at("codes").get<std::map<std::string, int>>();
  }
  if (!c.preset.empty() && c.selection.variables.empty()) {
    for (const auto& v : preset(c.preset)) c.selection.variables.push_back(v.mnemonic);
  }
  if (j.contains("model")) parse_model(j.at("model"), c.model);
  if (j.contains("priors")) {
    c.prior_overrides = j.at("priors");
    PriorConfig probe = default_priors(1);
    probe.sigma0_diag = VectorXd::Ones(1);
    json trial = c.prior_overrides;
    trial.erase("sigma0");
    apply_prior_overrides(probe, trial);  // rejects unknown keys early
  }
  if (j.contains("sampler")) parse_plan(j.at("sampler"), c.plan, c.options);
  c.options.threads = c.threads;

  if (j.contains("forecast")) {
    const auto& f = j.at("forecast");
    check_keys(f, {"horizons", "hold_out", "focus", "models", "benchmark", "paths_per_draw"}, "forecast");
    read(f, "horizons", c.forecast.horizons);
    read(f, "hold_out", c.forecast.hold_out);
    read(f, "focus", c.forecast.focus);
    read(f, "models", c.forecast.models);
    read(f, "benchmark", c.forecast.benchmark);
    read(f, "paths_per_draw", c.forecast.paths_per_draw);
  }
  if (j.contains("irf")) {
    const auto& f = j.at("irf");
    check_keys(f, {"shock", "horizons", "scale", "omega"}, "irf");
    read(f, "shock", c.irf.shock);
    read(f, "horizons", c.irf.horizons);
    if (f.contains("scale")) c.irf.scale = parse_scale(f.at("scale").get<std::string>());
    if (f.contains("omega")) c.irf.omega = parse_omega(f.at("omega").get<std::string>());
  }
  if (j.contains("simulate")) {
    const auto& f = j.at("simulate");
    check_keys(f, {"dimension", "periods", "shock", "shock_scale", "burn_in"}, "simulate");
    read(f, "dimension", c.simulate.dimension);
    read(f, "periods", c.simulate.periods);
    read(f, "shock_scale", c.simulate.shock_scale);
    read(f, "burn_in", c.simulate.burn_in);
    if (f.contains("shock")) c.simulate.shock = dgp::shock_kind_from_string(f.at("shock").get<std::string>());
  }
  c.simulate.seed = c.seed;
  if (j.contains("bench")) {
    const auto& f = j.at("bench");
    check_keys(f, {"dimensions", "draws", "repeats", "periods"}, "bench");
    read(f, "dimensions", c.bench.dimensions);
    read(f, "draws", c.bench.draws);
    read(f, "repeats", c.bench.repeats);
    read(f, "periods", c.bench.periods);
  }
  c.bench.seed = c.seed;
  if (j.contains("simstudy")) {
    const auto& f = j.at("simstudy");
    check_keys(f, {"sizes", "kinds", "estimators", "replications", "lags", "periods", "draws", "burn", "max_clusters",
                   "indicator_density", "shock_scale"},
               "simstudy");
    read(f, "sizes", c.study.sizes);
    read(f, "replications", c.study.replications);
    read(f, "lags", c.study.lags);
    read(f, "periods", c.study.periods);
    read(f, "draws", c.study.plan.n_draws);
    read(f, "burn", c.study.plan.n_burn);
    read(f, "max_clusters", c.study.max_clusters);
    read(f, "shock_scale", c.study.shock_scale);
    if (f.contains("indicator_density")) {
      c.study.indicator_density = parse_density(f.at("indicator_density").get<std::string>());
    }
    if (f.contains("kinds")) {
      c.study.kinds.clear();
      for (const auto& k : f.at("kinds")) c.study.kinds.push_back(dgp::shock_kind_from_string(k.get<std::string>()));
    }
    if (f.contains("estimators")) {
      const auto all = dgp::default_estimators();
      c.study.estimators.clear();
      for (const auto& e : f.at("estimators")) {
        const auto name = e.get<std::string>();
        const auto it = std::find_if(all.begin(), all.end(), [&](const dgp::Estimator& x) { return x.name == name; });
        if (it == all.end()) throw Error("config: unknown estimator '" + name + "'");
        c.study.estimators.push_back(*it);
      }
    }
  }
  c.study.seed = c.seed;
  c.study.threads = c.threads;
  if (j.contains("geweke")) {
    const auto& f = j.at("geweke");
    check_keys(f, {"dimension", "periods", "iterations", "burn", "batches", "sv"}, "geweke");
    read(f, "dimension", c.geweke.dimension);
    read(f, "periods", c.geweke.periods);
    read(f, "iterations", c.geweke.iterations);
    read(f, "burn", c.geweke.burn);
    read(f, "batches", c.geweke.batch_count);
    read(f, "sv", c.geweke_sv);
  }
  c.geweke.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
  try {
    return parse_run_config(j);
  } catch (const json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["task"] = c.task;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  j["data"] = {{"path", c.data_path},
               {"preset", c.preset},
               {"variables", c.selection.variables},
               {"codes", c.selection.codes},
               {"frequency", c.selection.frequency},
               {"log_scale", c.selection.log_scale}};
  j["model"] = {{"lags", c.model.lags},
                {"stochastic_volatility", c.model.stochastic_volatility},
                {"max_clusters", c.model.max_clusters},
                {"slice_decay", c.model.slice_decay},
                {"indicator_density", density_name(c.model.indicator_density)},
                {"truncation", c.model.truncation == TruncationPolicy::strict ? "strict" : "truncate"}};
  j["priors"] = c.prior_overrides;
  j["sampler"] = {{"draws", c.plan.n_draws},
                  {"burn", c.plan.n_burn},
                  {"thin", c.plan.thin},
                  {"store_latents", c.plan.store_latents},
                  {"alpha_update", c.options.alpha_update == mcmc::AlphaUpdate::metropolis ? "metropolis" : "conjugate"},
                  {"alpha_step", c.options.alpha_mh_step}};
  j["forecast"] = {{"horizons", c.forecast.horizons},
                   {"hold_out", c.forecast.hold_out},
                   {"focus", c.forecast.focus},
                   {"models", c.forecast.models},
                   {"benchmark", c.forecast.benchmark},
                   {"paths_per_draw", c.forecast.paths_per_draw}};
  j["irf"] = {{"shock", c.irf.shock},
              {"horizons", c.irf.horizons},
              {"scale", c.irf.scale == structural::ShockScale::unit ? "unit" : "one_sd"},
              {"omega", c.irf.omega == structural::OmegaChoice::posterior_mean ? "posterior_mean" : "cluster_average"}};
  j["simulate"] = {{"dimension", c.simulate.dimension},
                   {"periods", c.simulate.periods},
                   {"shock", dgp::to_string(c.simulate.shock)},
                   {"shock_scale", c.simulate.shock_scale},
                   {"burn_in", c.simulate.burn_in}};
  j["bench"] = {{"dimensions", c.bench.dimensions},
                {"draws", c.bench.draws},
                {"repeats", c.bench.repeats},
                {"periods", c.bench.periods}};
  std::vector<std::string> kinds, estimators;
  for (auto k : c.study.kinds) kinds.push_back(dgp::to_string(k));
  for (const auto& e : c.study.estimators) estimators.push_back(e.name);
  j["simstudy"] = {{"sizes", c.study.sizes},
                   {"kinds", kinds},
                   {"estimators", estimators},
                   {"replications", c.study.replications},
                   {"lags", c.study.lags},
                   {"periods", c.study.periods},
                   {"draws", c.study.plan.n_draws},
                   {"burn", c.study.plan.n_burn},
                   {"max_clusters", c.study.max_clusters},
                   {"indicator_density", density_name(c.study.indicator_density)},
                   {"shock_scale", c.study.shock_scale}};
  j["geweke"] = {{"dimension", c.geweke.dimension},
                 {"periods", c.geweke.periods},
                 {"iterations", c.geweke.iterations},
                 {"burn", c.geweke.burn},
                 {"batches", c.geweke.batch_count},
                 {"sv", c.geweke_sv}};
  return j;
}

void apply_prior_overrides(PriorConfig& p, const json& o) {
  check_keys(o,
             {"c_b", "d_b", "c_mu0", "c0", "sigma0", "alpha_shape", "alpha_rate", "omega_shape", "omega_scale", "sv",
              "coef"},
             "priors");
  read(o, "c_b", p.c_b);
  read(o, "d_b", p.d_b);
  read(o, "c_mu0", p.c_mu0);
  read(o, "c0", p.c0);
  read(o, "alpha_shape", p.alpha_shape);
  read(o, "alpha_rate", p.alpha_rate);
  read(o, "omega_shape", p.omega_shape);
  read(o, "omega_scale", p.omega_scale);
  if (o.contains("sigma0")) {
    const auto v = o.at("sigma0").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != p.sigma0_diag.size()) {
      throw Error("config: priors.sigma0 must have one entry per variable");
    }
    p.sigma0_diag = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (o.contains("sv")) {
    const auto& s = o.at("sv");
    check_keys(s, {"mu_mean", "mu_var", "rho_a", "rho_b", "sigma2_shape", "sigma2_rate"}, "priors.sv");
    read(s, "mu_mean", p.sv.mu_mean);
    read(s, "mu_var", p.sv.mu_var);
    read(s, "rho_a", p.sv.rho_a);
    read(s, "rho_b", p.sv.rho_b);
    read(s, "sigma2_shape", p.sv.sigma2_shape);
    read(s, "sigma2_rate", p.sv.sigma2_rate);
  }
  if (o.contains("coef")) {
    const auto& s = o.at("coef");
    check_keys(s, {"kind", "theta", "lambda_shape", "lambda_rate", "fixed_variance"}, "priors.coef");
    if (s.contains("kind")) {
      const auto k = s.at("kind").get<std::string>();
      if (k == "normal_gamma") {
        p.coef.kind = CoefficientPriorKind::normal_gamma;
      } else if (k == "fixed") {
        p.coef.kind = CoefficientPriorKind::fixed;
      } else {
        throw Error("config: priors.coef.kind must be 'normal_gamma' or 'fixed'");
      }
    }
    read(s, "theta", p.coef.theta);
    read(s, "lambda_shape", p.coef.lambda_shape);
    read(s, "lambda_rate", p.coef.lambda_rate);
    read(s, "fixed_variance", p.coef.fixed_variance);
  }
  p.validate();
}

PriorConfig build_priors(const RunConfig& cfg, const Dataset& data) {
  PriorConfig p = default_priors(static_cast<int>(data.dimension()));
  p.sigma0_diag = estimate_sigma0(data, cfg.model.lags);
  apply_prior_overrides(p, cfg.prior_overrides);
  return p;
}

ModelConfig estimator_model(const std::string& name, const ModelConfig& base) {
  ModelConfig m = base;
  if (name == "DPM" || name == "DPM-SV") {
    if (m.max_clusters < 2) m.max_clusters = 30;
  } else if (name == "G1" || name == "G1-SV") {
    m.max_clusters = 1;
  } else {
    throw Error("unknown estimator '" + name + "' (expected DPM, G1, DPM-SV or G1-SV)");
  }
  m.stochastic_volatility = name.size() > 3 && name.substr(name.size() - 3) == "-SV";
  return m;
}

}  // namespace dpmvar::io
