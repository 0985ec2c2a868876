#include "dpmvar/structural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dpmvar/distributions.hpp"
#include "dpmvar/forecast.hpp"
#include "parallel.hpp"

namespace dpmvar::structural {

MatrixXd companion(const MatrixXd& a, int lags) {
  const Eigen::Index m = a.rows();
  if (lags < 1 || a.cols() != m * lags) throw Error("companion: coefficient matrix must be M x Mp");
  MatrixXd f = MatrixXd::Zero(m * lags, m * lags);
  f.topRows(m) = a;
  if (lags > 1) f.bottomLeftCorner(m * (lags - 1), m * (lags - 1)).setIdentity();
  return f;
}

MatrixXd propagate(const MatrixXd& a, int lags, const VectorXd& impact, int horizons) {
  if (horizons < 0) throw Error("propagate: horizons must be nonnegative");
  const Eigen::Index m = a.rows();
  if (impact.size() != m) throw Error("propagate: impact has the wrong length");
  const MatrixXd f = companion(a, lags);
  MatrixXd out(horizons + 1, m);
  VectorXd state = VectorXd::Zero(m * lags);
  state.head(m) = impact;
  out.row(0) = impact.transpose();
  for (int h = 1; h <= horizons; ++h) {
    state = f * state;
    out.row(h) = state.head(m).transpose();
  }
  return out;
}

MatrixXd impact_matrix(const mcmc::PosteriorDraw& draw, int cluster, OmegaChoice omega) {
  if (cluster < 0 || cluster >= static_cast<int>(draw.clusters.size())) throw Error("irf: cluster index out of range");
  const auto& c = draw.clusters[static_cast<std::size_t>(cluster)];
  MatrixXd xi = c.sigma;
  const VectorXd& om = omega == OmegaChoice::cluster_average && c.omega_bar.size() == xi.rows() ? c.omega_bar
                                                                                                  : draw.omega_mean;
  xi.diagonal() += om;
  return dist::cholesky_lower(xi, "cluster covariance");
}

MatrixXd irf_per_cluster(const mcmc::PosteriorDraw& draw, int lags, int cluster, const IrfOptions& options) {
  const Eigen::Index m = draw.coefficients.rows();
  if (options.shock < 0 || options.shock >= m) throw Error("irf: shock variable out of range");
  if (cluster < 0 || cluster >= static_cast<int>(draw.clusters.size()) ||
      draw.clusters[static_cast<std::size_t>(cluster)].count <= 0) {
    throw Error("irf: cluster " + std::to_string(cluster) + " is not live in this draw");
  }
  const MatrixXd psi = impact_matrix(draw, cluster, options.omega);
  VectorXd impact = psi.col(options.shock);
  if (options.scale == ShockScale::unit) impact /= psi(options.shock, options.shock);
  return propagate(draw.coefficients, lags, impact, options.horizons);
}

MatrixXd irf_weighted(const mcmc::PosteriorDraw& draw, int lags, const std::vector<double>& weights,
                      const IrfOptions& options) {
  MatrixXd acc;
  double total = 0.0;
  for (std::size_t k = 0; k < draw.clusters.size(); ++k) {
    if (draw.clusters[k].count <= 0) continue;
    const double w = k < weights.size() ? weights[k] : 0.0;
    if (w <= 0.0) continue;
    const MatrixXd r = irf_per_cluster(draw, lags, static_cast<int>(k), options);
    if (acc.size() == 0) acc = MatrixXd::Zero(r.rows(), r.cols());
    acc += w * r;
    total += w;
  }
  if (total <= 0.0) throw Error("irf: no live cluster carries positive weight");
  return acc / total;
}

std::vector<double> posterior_mean_weights(const mcmc::DrawStore& store) {
  std::vector<double> w;
  for (const auto& d : store.draws) {
    if (d.clusters.size() > w.size()) w.resize(d.clusters.size(), 0.0);
    for (std::size_t k = 0; k < d.clusters.size(); ++k) w[k] += d.clusters[k].weight;
  }
  if (!store.draws.empty()) {
    for (double& v : w) v /= static_cast<double>(store.draws.size());
  }
  return w;
}

double log_det_spd(const MatrixXd& m) {
  const MatrixXd l = dist::cholesky_lower(m, "log-determinant argument");
  return 2.0 * l.diagonal().array().log().sum();
}

mcmc::PosteriorDraw relabel(const mcmc::PosteriorDraw& draw) {
  const std::size_t n = draw.clusters.size();
  std::vector<double> ld(n);
  for (std::size_t k = 0; k < n; ++k) ld[k] = log_det_spd(draw.clusters[k].sigma);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ca = draw.clusters[a].count;
    const int cb = draw.clusters[b].count;
    if (ca != cb) return ca > cb;
    return ld[a] < ld[b];
  });
  mcmc::PosteriorDraw out = draw;
  std::vector<int> new_label(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.clusters[k] = draw.clusters[order[k]];
    new_label[order[k]] = static_cast<int>(k);
  }
  for (int& d : out.delta) d = new_label[static_cast<std::size_t>(d)];
  return out;
}

mcmc::DrawStore relabel_clusters(const mcmc::DrawStore& store) {
  mcmc::DrawStore out = store;
  for (auto& d : out.draws) d = relabel(d);
  return out;
}

Band percentile_band(const std::vector<MatrixXd>& samples) {
  Band b;
  if (samples.empty()) return b;
  const Eigen::Index r = samples.front().rows();
  const Eigen::Index c = samples.front().cols();
  b.lower.resize(r, c);
  b.median.resize(r, c);
  b.upper.resize(r, c);
  b.draws = static_cast<long>(samples.size());
  std::vector<double> col(samples.size());
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      for (std::size_t s = 0; s < samples.size(); ++s) col[s] = samples[s](i, j);
      b.lower(i, j) = forecast::empirical_quantile(col, 0.16);
      b.median(i, j) = forecast::empirical_quantile(col, 0.5);
      b.upper(i, j) = forecast::empirical_quantile(col, 0.84);
    }
  }
  return b;
}

IrfResult compute_irfs(const mcmc::DrawStore& store, const IrfOptions& options, int threads) {
  if (store.draws.empty()) throw Error("irf: the draw store is empty");
  const mcmc::DrawStore rel = relabel_clusters(store);
  IrfResult out;
  out.options = options;
  out.weights = posterior_mean_weights(rel);
  const std::size_t n = rel.draws.size();
  const std::size_t labels = out.weights.size();
  out.responses.assign(n, std::vector<MatrixXd>(labels));
  out.weighted.resize(n);
  detail::parallel_for(static_cast<long>(n), threads, [&](long i) {
    const auto& d = rel.draws[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < d.clusters.size(); ++k) {
      if (d.clusters[k].count > 0) {
        out.responses[static_cast<std::size_t>(i)][k] = irf_per_cluster(d, rel.lags, static_cast<int>(k), options);
      }
    }
    out.weighted[static_cast<std::size_t>(i)] = irf_weighted(d, rel.lags, out.weights, options);
  });
  out.weighted_band = percentile_band(out.weighted);
  out.cluster_bands.resize(labels);
  for (std::size_t k = 0; k < labels; ++k) {
    std::vector<MatrixXd> live;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.responses[i][k].size() > 0) live.push_back(out.responses[i][k]);
    }
    out.cluster_bands[k] = percentile_band(live);
  }
  return out;
}

std::vector<double> rolling_mean(const std::vector<double>& x, int window) {
  if (window < 1) throw Error("rolling_mean: window must be >= 1");
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sum += x[t];
    if (t >= static_cast<std::size_t>(window)) sum -= x[t - static_cast<std::size_t>(window)];
    const auto n = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
    out[t] = sum / static_cast<double>(n);
  }
  return out;
}

ClusterDiagnostics cluster_diagnostics(const mcmc::DrawStore& store, int window) {
  if (store.draws.empty()) throw Error("diagnostics: the draw store is empty");
  std::size_t labels = 0;
  for (const auto& d : store.draws) {
    if (d.delta.empty()) throw Error("diagnostics: draws were stored without indicators (enable store_latents)");
    labels = std::max(labels, d.clusters.size());
  }
  const auto t_eff = static_cast<Eigen::Index>(store.draws.front().delta.size());
  ClusterDiagnostics out;
  out.probability = MatrixXd::Zero(t_eff, static_cast<Eigen::Index>(labels));
  out.log_det.resize(labels);
  for (const auto& d : store.draws) {
    for (Eigen::Index t = 0; t < t_eff; ++t) out.probability(t, d.delta[static_cast<std::size_t>(t)]) += 1.0;
    for (std::size_t k = 0; k < d.clusters.size(); ++k) {
      if (d.clusters[k].count > 0) out.log_det[k].push_back(log_det_spd(d.clusters[k].sigma));
    }
  }
  out.probability /= static_cast<double>(store.draws.size());
  out.rolling.resize(t_eff, static_cast<Eigen::Index>(labels));
  for (Eigen::Index k = 0; k < out.probability.cols(); ++k) {
    std::vector<double> col(out.probability.col(k).data(), out.probability.col(k).data() + t_eff);
    const auto r = rolling_mean(col, window);
    for (Eigen::Index t = 0; t < t_eff; ++t) out.rolling(t, k) = r[static_cast<std::size_t>(t)];
  }
  for (const auto& s : out.log_det) {
    BoxSummary b;
    b.n = static_cast<long>(s.size());
    if (!s.empty()) {
      b.min = *std::min_element(s.begin(), s.end());
      b.max = *std::max_element(s.begin(), s.end());
      b.q25 = forecast::empirical_quantile(s, 0.25);
      b.median = forecast::empirical_quantile(s, 0.5);
      b.q75 = forecast::empirical_quantile(s, 0.75);
    }
    out.log_det_summary.push_back(b);
  }
  return out;
}

namespace {
void write_band(std::ofstream& out, const std::string& kind, const Band& b, const std::vector<std::string>& names) {
  for (Eigen::Index h = 0; h < b.median.rows(); ++h) {
    for (Eigen::Index i = 0; i < b.median.cols(); ++i) {
      const std::string name = i < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(i)]
                                                                            : "y" + std::to_string(i + 1);
      out << kind << ',' << h << ',' << name << ',' << b.lower(h, i) << ',' << b.median(h, i) << ',' << b.upper(h, i)
          << ',' << b.draws << '\n';
    }
  }
}
}  // namespace

void write_irf_csv(const IrfResult& r, const std::vector<std::string>& names, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(10);
  out << "response,horizon,variable,p16,median,p84,draws\n";
  write_band(out, "weighted", r.weighted_band, names);
  for (std::size_t k = 0; k < r.cluster_bands.size(); ++k) {
    if (r.cluster_bands[k].draws > 0) write_band(out, "cluster" + std::to_string(k + 1), r.cluster_bands[k], names);
  }
}

void write_diagnostics_csv(const ClusterDiagnostics& d, const std::string& probability_path,
                           const std::string& log_det_path) {
  std::ofstream p(probability_path);
  if (!p) throw Error("cannot write " + probability_path);
  p.precision(10);
  p << "period,cluster,probability,rolling\n";
  for (Eigen::Index t = 0; t < d.probability.rows(); ++t) {
    for (Eigen::Index k = 0; k < d.probability.cols(); ++k) {
      p << t << ',' << k + 1 << ',' << d.probability(t, k) << ',' << d.rolling(t, k) << '\n';
    }
  }
  std::ofstream l(log_det_path);
  if (!l) throw Error("cannot write " + log_det_path);
  l.precision(10);
  l << "cluster,n,min,q25,median,q75,max\n";
  for (std::size_t k = 0; k < d.log_det_summary.size(); ++k) {
    const auto& b = d.log_det_summary[k];
    if (b.n == 0) continue;
    l << k + 1 << ',' << b.n << ',' << b.min << ',' << b.q25 << ',' << b.median << ',' << b.q75 << ',' << b.max << '\n';
  }
}

}  // namespace dpmvar::structural
