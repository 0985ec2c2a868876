#include "dpmvar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "dpmvar/distributions.hpp"
#include "dpmvar/priors.hpp"
#include "parallel.hpp"

namespace dpmvar::forecast {

// ---- GaussianMixture ----

VectorXd GaussianMixture::mean() const {
  if (weights.empty()) throw Error("mixture: no components");
  VectorXd m = VectorXd::Zero(means.front().size());
  double total = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    m += weights[k] * means[k];
    total += weights[k];
  }
  return m / total;
}

MatrixXd GaussianMixture::covariance() const {
  const VectorXd mbar = mean();
  MatrixXd c = MatrixXd::Zero(mbar.size(), mbar.size());
  double total = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const VectorXd d = means[k] - mbar;
    c += weights[k] * (covariances[k] + d * d.transpose());
    total += weights[k];
  }
  return c / total;
}

GaussianMixture GaussianMixture::marginal(const std::vector<int>& index) const {
  GaussianMixture out;
  out.weights = weights;
  const auto n = static_cast<Eigen::Index>(index.size());
  for (std::size_t k = 0; k < size(); ++k) {
    VectorXd m(n);
    MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m[i] = means[k][index[static_cast<std::size_t>(i)]];
      for (Eigen::Index j = 0; j < n; ++j) {
        c(i, j) = covariances[k](index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
      }
    }
    out.means.push_back(std::move(m));
    out.covariances.push_back(std::move(c));
  }
  return out;
}

double GaussianMixture::log_density(const VectorXd& y) const {
  std::vector<double> terms;
  terms.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    if (weights[k] <= 0.0) continue;
    const MatrixXd l = dist::cholesky_lower(covariances[k], "predictive covariance");
    terms.push_back(std::log(weights[k]) + dist::log_mvn_pdf_chol(y, means[k], l));
  }
  if (terms.empty()) throw Error("mixture: all weights are zero");
  const double top = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

// ---- simulation ----

PredictivePath predictive_simulate(const mcmc::PosteriorDraw& draw, const mcmc::DrawStore& meta, const MatrixXd& history,
                                   int horizon, RngHandle& rng, double overflow_limit,
                                   const RngHandle* component_rng) {
  if (horizon < 1) throw Error("forecast: horizon must be >= 1");
  const int m = meta.dimension;
  const int p = meta.lags;
  if (history.cols() != m || history.rows() < p) throw Error("forecast: history must hold the last p observations");

  std::vector<double> weights;
  std::vector<VectorXd> mus;
  std::vector<MatrixXd> sigmas;
  for (const auto& c : draw.clusters) {
    if (c.weight <= 0.0) continue;
    weights.push_back(c.weight);
    mus.push_back(c.mu);
    sigmas.push_back(c.sigma);
  }
  if (draw.weight_remainder > 0.0 && meta.sigma0_diag.size() == m && meta.c0 > m - 1) {
    // Mass not yet assigned to an instantiated component goes to a fresh prior draw.
    RngHandle cr = component_rng ? *component_rng : rng.substream(0xc0ULL);
    const VectorXd sd = draw.b.array().sqrt();
    mus.push_back(draw.mu0 + sd.cwiseProduct(dist::standard_normal(cr, m)));
    const MatrixXd scale = meta.sigma0_diag.cwiseInverse().asDiagonal();
    sigmas.push_back(dist::wishart(meta.c0, scale, cr).inverse());
    weights.push_back(draw.weight_remainder);
  }
  if (weights.empty()) throw Error("forecast: draw has no weighted component");
  std::vector<MatrixXd> chols;
  chols.reserve(sigmas.size());
  for (const auto& s : sigmas) chols.push_back(dist::cholesky_lower(s, "cluster covariance"));
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  PredictivePath out;
  out.path = MatrixXd::Zero(horizon, m);
  MatrixXd hist(p + horizon, m);
  hist.topRows(p) = history.bottomRows(p);
  VectorXd log_vol = draw.log_vol_last;

  for (int s = 0; s < horizon; ++s) {
    if (meta.stochastic_volatility) {
      for (int i = 0; i < m; ++i) {
        const auto& sv = draw.sv[static_cast<std::size_t>(i)];
        log_vol[i] = sv.mu + sv.rho * (log_vol[i] - sv.mu) + std::sqrt(sv.sigma2) * dist::normal(rng);
      }
    }
    const VectorXd omega = log_vol.array().exp();
    const VectorXd ax = draw.coefficients * lag_vector(hist.topRows(p + s), p);

    if (s == horizon - 1) {
      for (std::size_t k = 0; k < weights.size(); ++k) {
        out.terminal.weights.push_back(weights[k] / total);
        out.terminal.means.push_back(mus[k] + ax);
        MatrixXd xi = sigmas[k];
        xi.diagonal() += omega;
        out.terminal.covariances.push_back(std::move(xi));
      }
    }

    double pick = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < weights.size() && (pick -= weights[k]) > 0.0) ++k;
    const VectorXd eps = mus[k] + chols[k] * dist::standard_normal(rng, m);
    const VectorXd v = omega.array().sqrt() * dist::standard_normal(rng, m).array();
    const VectorXd y = ax + eps + v;
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > overflow_limit) {
      out.rejected = true;
      return out;
    }
    out.path.row(s) = y.transpose();
    hist.row(p + s) = y.transpose();
  }
  return out;
}

std::vector<double> ForecastResult::terminal_sample(int variable) const {
  std::vector<double> v;
  v.reserve(paths.size());
  for (const auto& p : paths) v.push_back(p.path(horizon - 1, variable));
  return v;
}

VectorXd ForecastResult::point_forecast() const {
  if (paths.empty()) throw Error("forecast: no accepted paths");
  VectorXd m = VectorXd::Zero(paths.front().terminal.means.front().size());
  for (const auto& p : paths) m += p.terminal.mean();
  return m / static_cast<double>(paths.size());
}

double ForecastResult::log_predictive(const VectorXd& realized, const std::vector<int>& index) const {
  if (paths.empty()) throw Error("forecast: no accepted paths");
  VectorXd y(static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) y[static_cast<Eigen::Index>(i)] = realized[index[i]];
  std::vector<double> logs;
  logs.reserve(paths.size());
  for (const auto& p : paths) logs.push_back(p.terminal.marginal(index).log_density(y));
  return log_mean_exp(logs);
}

ForecastResult predict(const mcmc::DrawStore& store, const MatrixXd& history, const PredictiveOptions& options,
                       const RngHandle& rng, int threads) {
  if (options.horizon < 1) throw Error("forecast: horizon must be >= 1");
  if (options.paths_per_draw < 1) throw Error("forecast: paths_per_draw must be >= 1");
  if (store.draws.empty()) throw Error("forecast: the draw store is empty");
  const long n = static_cast<long>(store.draws.size()) * options.paths_per_draw;
  std::vector<PredictivePath> all(static_cast<std::size_t>(n));
  detail::parallel_for(n, threads, [&](long i) {
    const long d = i / options.paths_per_draw;
    RngHandle r = rng.substream(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i % options.paths_per_draw));
    const RngHandle cr = rng.substream(static_cast<std::uint64_t>(d), 0xc0ULL << 32);
    all[static_cast<std::size_t>(i)] = predictive_simulate(store.draws[static_cast<std::size_t>(d)], store, history,
                                                           options.horizon, r, options.overflow_limit, &cr);
  });
  ForecastResult out;
  out.horizon = options.horizon;
  out.names = store.names;
  for (auto& p : all) {
    if (p.rejected) {
      ++out.rejected;
    } else {
      out.paths.push_back(std::move(p));
    }
  }
  if (out.paths.empty()) throw Error("forecast: every simulated path overflowed");
  return out;
}

// ---- scores ----

double pinball_loss(double realized, double quantile_forecast, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error("pinball_loss: level must lie in (0, 1)");
  const double indicator = realized < quantile_forecast ? 1.0 : 0.0;
  return (realized - quantile_forecast) * (level - indicator);
}

double empirical_quantile(std::vector<double> sample, double level) {
  if (sample.empty()) throw Error("empirical_quantile: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw Error("empirical_quantile: level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = level * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

double log_mean_exp(const std::vector<double>& values) {
  if (values.empty()) throw Error("log_mean_exp: empty input");
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double v : values) s += std::exp(v - top);
  return top + std::log(s / static_cast<double>(values.size()));
}

Scores score_forecasts(const ForecastResult& result, const VectorXd& realized, const std::vector<int>& focus) {
  if (result.paths.empty()) throw Error("score_forecasts: no accepted paths");
  const Eigen::Index m = result.paths.front().path.cols();
  if (realized.size() != m) throw Error("score_forecasts: realized vector has the wrong length");
  std::vector<int> idx = focus;
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
  }
  for (int i : idx) {
    if (i < 0 || i >= m) throw Error("score_forecasts: focus index out of range");
  }

  Scores s;
  const VectorXd point = result.point_forecast();
  for (int i : idx) {
    const auto sample = result.terminal_sample(i);
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (!(*hi > *lo)) throw Error("score_forecasts: degenerate predictive for variable " + std::to_string(i));
    s.squared_error.push_back((point[i] - realized[i]) * (point[i] - realized[i]));
    s.lpl.push_back(result.log_predictive(realized, {i}));
    s.qs10.push_back(pinball_loss(realized[i], empirical_quantile(sample, 0.1), 0.1));
    s.qs90.push_back(pinball_loss(realized[i], empirical_quantile(sample, 0.9), 0.9));
  }
  s.lpl_joint = result.log_predictive(realized, idx);
  return s;
}

// ---- rolling evaluation ----

RollingResult rolling_evaluation(const Dataset& data, const std::vector<ModelSpec>& models, const RollingConfig& cfg) {
  if (models.empty()) throw Error("rolling_evaluation: no models");
  if (cfg.horizons.empty()) throw Error("rolling_evaluation: no horizons");
  const long t_total = data.periods();
  const int m = static_cast<int>(data.dimension());
  int max_lags = 0;
  for (const auto& spec : models) max_lags = std::max(max_lags, spec.model.lags);
  if (cfg.first_origin < max_lags + 2) throw Error("rolling_evaluation: the first window leaves fewer than p+2 points");
  if (cfg.first_origin >= t_total) throw Error("rolling_evaluation: no hold-out periods after the split");

  RollingResult out;
  out.benchmark = cfg.benchmark.empty() ? models.front().name : cfg.benchmark;
  if (std::none_of(models.begin(), models.end(), [&](const ModelSpec& s) { return s.name == out.benchmark; })) {
    throw Error("rolling_evaluation: unknown benchmark '" + out.benchmark + "'");
  }
  std::vector<int> focus = cfg.focus;
  if (focus.empty()) {
    focus.resize(static_cast<std::size_t>(m));
    std::iota(focus.begin(), focus.end(), 0);
  }
  for (int i : focus) {
    if (i < 0 || i >= m) throw Error("rolling_evaluation: focus index out of range");
    out.focus_names.push_back(i < static_cast<int>(data.names.size()) ? data.names[static_cast<std::size_t>(i)]
                                                                     : "y" + std::to_string(i + 1));
  }

  const RngHandle root(cfg.seed, 0xf0ca57ULL);
  for (long o = cfg.first_origin; o < t_total; ++o) {
    Dataset train;
    train.observations = data.observations.topRows(o);
    train.names = data.names;
    train.frequency = data.frequency;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      const auto& spec = models[mi];
      try {
        PriorConfig priors = default_priors(m);
        priors.sigma0_diag = estimate_sigma0(train, spec.model.lags);
        mcmc::SamplerOptions opts;
        opts.threads = cfg.threads;
        const RngHandle chain = root.substream(static_cast<std::uint64_t>(o), mi);
        const mcmc::DrawStore store = mcmc::run_sweeps(train, spec.model, priors, cfg.plan, chain, opts);
        for (int h : cfg.horizons) {
          if (o + h - 1 >= t_total) continue;
          PredictiveOptions po;
          po.horizon = h;
          po.paths_per_draw = cfg.paths_per_draw;
          const ForecastResult f = predict(store, store.history, po, chain.substream(0x9e7ULL, h), cfg.threads);
          OriginScore os;
          os.origin = o;
          os.model = spec.name;
          os.horizon = h;
          os.scores = score_forecasts(f, data.observations.row(o + h - 1).transpose(), focus);
          out.origins.push_back(std::move(os));
        }
      } catch (const Error& e) {
        throw Error("origin " + std::to_string(o) + " (" + spec.name + "): " + e.what());
      }
    }
  }

  // Relative scores on the (origin, horizon) pairs every model shares with the benchmark.
  std::map<std::pair<long, int>, const Scores*> bench;
  for (const auto& os : out.origins) {
    if (os.model == out.benchmark) bench[{os.origin, os.horizon}] = &os.scores;
  }
  const std::size_t nf = focus.size();
  for (const auto& spec : models) {
    for (int h : cfg.horizons) {
      std::vector<double> mse(nf, 0.0), mse_b(nf, 0.0), q10(nf, 0.0), q10_b(nf, 0.0), q90(nf, 0.0), q90_b(nf, 0.0),
          lpl(nf, 0.0);
      double joint = 0.0;
      long count = 0;
      for (const auto& os : out.origins) {
        if (os.model != spec.name || os.horizon != h) continue;
        const auto it = bench.find({os.origin, h});
        if (it == bench.end()) continue;
        const Scores& b = *it->second;
        for (std::size_t i = 0; i < nf; ++i) {
          mse[i] += os.scores.squared_error[i];
          mse_b[i] += b.squared_error[i];
          q10[i] += os.scores.qs10[i];
          q10_b[i] += b.qs10[i];
          q90[i] += os.scores.qs90[i];
          q90_b[i] += b.qs90[i];
          lpl[i] += os.scores.lpl[i] - b.lpl[i];
        }
        joint += os.scores.lpl_joint - b.lpl_joint;
        ++count;
      }
      if (count == 0) continue;
      auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a == b ? 1.0 : INFINITY); };
      for (std::size_t i = 0; i < nf; ++i) {
        RelativeRow row;
        row.model = spec.name;
        row.horizon = h;
        row.variable = out.focus_names[i];
        row.mse_ratio = ratio(mse[i], mse_b[i]);
        row.qs10_ratio = ratio(q10[i], q10_b[i]);
        row.qs90_ratio = ratio(q90[i], q90_b[i]);
        row.lpl_difference = lpl[i] / static_cast<double>(count);
        out.relative.push_back(row);
      }
      RelativeRow row;
      row.model = spec.name;
      row.horizon = h;
      row.variable = "joint";
      row.mse_ratio = ratio(std::accumulate(mse.begin(), mse.end(), 0.0), std::accumulate(mse_b.begin(), mse_b.end(), 0.0));
      row.qs10_ratio = ratio(std::accumulate(q10.begin(), q10.end(), 0.0), std::accumulate(q10_b.begin(), q10_b.end(), 0.0));
      row.qs90_ratio = ratio(std::accumulate(q90.begin(), q90.end(), 0.0), std::accumulate(q90_b.begin(), q90_b.end(), 0.0));
      row.lpl_difference = joint / static_cast<double>(count);
      out.relative.push_back(row);
    }
  }
  return out;
}

double average_joint_lpl(const RollingResult& r, const std::string& model, int horizon) {
  double s = 0.0;
  long n = 0;
  for (const auto& os : r.origins) {
    if (os.model == model && os.horizon == horizon) {
      s += os.scores.lpl_joint;
      ++n;
    }
  }
  if (n == 0) throw Error("average_joint_lpl: no scores for " + model);
  return s / static_cast<double>(n);
}

std::vector<double> cumulative_lpl_difference(const RollingResult& r, const std::string& model, int horizon) {
  std::map<long, double> mine, bench;
  for (const auto& os : r.origins) {
    if (os.horizon != horizon) continue;
    if (os.model == model) mine[os.origin] = os.scores.lpl_joint;
    if (os.model == r.benchmark) bench[os.origin] = os.scores.lpl_joint;
  }
  std::vector<double> out;
  double running = 0.0;
  for (const auto& [origin, value] : mine) {
    const auto it = bench.find(origin);
    if (it == bench.end()) continue;
    running += value - it->second;
    out.push_back(running);
  }
  return out;
}

namespace {
std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(10);
  return out;
}
}  // namespace

void write_origin_csv(const RollingResult& r, const std::string& path) {
  auto out = open_csv(path);
  out << "origin,model,horizon,variable,squared_error,lpl,qs10,qs90\n";
  for (const auto& os : r.origins) {
    for (std::size_t i = 0; i < r.focus_names.size(); ++i) {
      out << os.origin << ',' << os.model << ',' << os.horizon << ',' << r.focus_names[i] << ','
          << os.scores.squared_error[i] << ',' << os.scores.lpl[i] << ',' << os.scores.qs10[i] << ','
          << os.scores.qs90[i] << '\n';
    }
    out << os.origin << ',' << os.model << ',' << os.horizon << ",joint,," << os.scores.lpl_joint << ",,\n";
  }
}

void write_relative_csv(const RollingResult& r, const std::string& path) {
  auto out = open_csv(path);
  out << "model,horizon,variable,mse_ratio,qs10_ratio,qs90_ratio,lpl_difference\n";
  for (const auto& row : r.relative) {
    out << row.model << ',' << row.horizon << ',' << row.variable << ',' << row.mse_ratio << ',' << row.qs10_ratio
        << ',' << row.qs90_ratio << ',' << row.lpl_difference << '\n';
  }
}

void write_cumulative_csv(const RollingResult& r, const std::string& path) {
  auto out = open_csv(path);
  out << "model,horizon,origin,cumulative_lpl_difference\n";
  std::vector<std::string> models;
  std::vector<int> horizons;
  for (const auto& os : r.origins) {
    if (std::find(models.begin(), models.end(), os.model) == models.end()) models.push_back(os.model);
    if (std::find(horizons.begin(), horizons.end(), os.horizon) == horizons.end()) horizons.push_back(os.horizon);
  }
  for (const auto& model : models) {
    for (int h : horizons) {
      std::vector<long> origins;
      std::map<long, bool> seen_bench;
      for (const auto& os : r.origins) {
        if (os.horizon == h && os.model == r.benchmark) seen_bench[os.origin] = true;
      }
      for (const auto& os : r.origins) {
        if (os.horizon == h && os.model == model && seen_bench.count(os.origin)) origins.push_back(os.origin);
      }
      std::sort(origins.begin(), origins.end());
      const auto cum = cumulative_lpl_difference(r, model, h);
      for (std::size_t i = 0; i < cum.size() && i < origins.size(); ++i) {
        out << model << ',' << h << ',' << origins[i] << ',' << cum[i] << '\n';
      }
    }
  }
}

void write_paths_csv(const ForecastResult& f, const std::string& path) {
  auto out = open_csv(path);
  out << "path,step";
  for (const auto& n : f.names) out << ',' << n;
  out << '\n';
  for (std::size_t p = 0; p < f.paths.size(); ++p) {
    for (Eigen::Index s = 0; s < f.paths[p].path.rows(); ++s) {
      out << p << ',' << s + 1;
      for (Eigen::Index i = 0; i < f.paths[p].path.cols(); ++i) out << ',' << f.paths[p].path(s, i);
      out << '\n';
    }
  }
}

}  // namespace dpmvar::forecast
