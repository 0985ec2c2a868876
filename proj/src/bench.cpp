#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "dpmvar/distributions.hpp"
#include "dpmvar/io.hpp"

namespace dpmvar::io {

std::vector<ReducedFormDraw> niw_reference(const LaggedData& data, int draws, int burn, RngHandle& rng) {
  if (draws < 1 || burn < 0) throw Error("niw_reference: draws must be >= 1 and burn >= 0");
  const MatrixXd& x = data.design;
  const MatrixXd& y = data.response;
  const Eigen::Index t = y.rows();
  const Eigen::Index m = y.cols();
  const Eigen::Index k = x.cols();
  const double prior_var = 1.0;
  const double nu0 = static_cast<double>(m) + 2.0;
  const MatrixXd s0 = MatrixXd::Identity(m, m);

  const MatrixXd xtx = x.transpose() * x;
  const MatrixXd xty = x.transpose() * y;
  MatrixXd sigma_inv = MatrixXd::Identity(m, m);
  MatrixXd b(k, m);
  std::vector<ReducedFormDraw> out;
  out.reserve(static_cast<std::size_t>(draws));
  MatrixXd precision(m * k, m * k);
  for (int it = 0; it < burn + draws; ++it) {
    // vec(B) | Sigma with B = A' (K x M), column-stacked.
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) precision.block(i * k, j * k, k, k) = sigma_inv(i, j) * xtx;
    }
    precision.diagonal().array() += 1.0 / prior_var;
    const MatrixXd lin_mat = xty * sigma_inv;
    const VectorXd linear = Eigen::Map<const VectorXd>(lin_mat.data(), m * k);
    const VectorXd vb = dist::mvn_canonical(precision, linear, rng, "NIW coefficient precision");
    b = Eigen::Map<const MatrixXd>(vb.data(), k, m);
    const MatrixXd e = y - x * b;
    const MatrixXd scale = (s0 + e.transpose() * e).inverse();
    sigma_inv = dist::wishart(nu0 + static_cast<double>(t), 0.5 * (scale + scale.transpose()), rng);
    if (it >= burn) out.push_back({b.transpose(), sigma_inv.inverse()});
  }
  return out;
}

std::vector<ReducedFormDraw> triangular_reference(const LaggedData& data, int draws, RngHandle& rng) {
  if (draws < 1) throw Error("triangular_reference: draws must be >= 1");
  const MatrixXd& x = data.design;
  const MatrixXd& y = data.response;
  const Eigen::Index t = y.rows();
  const Eigen::Index m = y.cols();
  const Eigen::Index k = x.cols();
  const double lag_var = 0.1;
  const double contemporaneous_var = 0.1;
  const double a0 = 1.0;
  const double b0 = 0.1;

  struct Posterior {
    VectorXd mean;
    MatrixXd chol_cov;  // Cholesky factor of V_n
    double shape = 0.0;
    double scale = 0.0;
  };
  std::vector<Posterior> post(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    MatrixXd z(t, k + i);
    z.leftCols(k) = x;
    if (i > 0) z.rightCols(i) = y.leftCols(i);
    VectorXd v0inv(k + i);
    v0inv.head(k).setConstant(1.0 / lag_var);
    v0inv.tail(i).setConstant(1.0 / contemporaneous_var);
    MatrixXd prec = z.transpose() * z;
    prec.diagonal() += v0inv;
    const Eigen::LLT<MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("triangular_reference: posterior precision");
    const VectorXd zy = z.transpose() * y.col(i);
    Posterior& p = post[static_cast<std::size_t>(i)];
    p.mean = llt.solve(zy);
    p.chol_cov = dist::cholesky_lower(llt.solve(MatrixXd::Identity(k + i, k + i)), "triangular posterior");
    p.shape = a0 + 0.5 * static_cast<double>(t);
    p.scale = b0 + 0.5 * (y.col(i).squaredNorm() - zy.dot(p.mean));
  }

  std::vector<ReducedFormDraw> out;
  out.reserve(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) {
    MatrixXd phi(m, k);
    MatrixXd b0m = MatrixXd::Identity(m, m);
    VectorXd dvar(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Posterior& p = post[static_cast<std::size_t>(i)];
      const double s2 = dist::inverse_gamma(rng, p.shape, p.scale);
      const VectorXd theta = p.mean + std::sqrt(s2) * (p.chol_cov * dist::standard_normal(rng, k + i));
      phi.row(i) = theta.head(k).transpose();
      for (Eigen::Index j = 0; j < i; ++j) b0m(i, j) = -theta[k + j];
      dvar[i] = s2;
    }
    const MatrixXd inv = b0m.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m));
    out.push_back({inv * phi, inv * dvar.asDiagonal() * inv.transpose()});
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Fn>
double time_it(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

Dataset bench_data(int m, long periods, RngHandle& rng) {
  Dataset d;
  d.observations.resize(periods, m);
  VectorXd prev = VectorXd::Zero(m);
  for (long t = 0; t < periods; ++t) {
    prev = 0.5 * prev + dist::standard_normal(rng, m);
    d.observations.row(t) = prev.transpose();
  }
  for (int i = 0; i < m; ++i) d.names.push_back("y" + std::to_string(i + 1));
  return d;
}

}  // namespace

std::vector<BenchRow> bench_timing(const BenchConfig& cfg) {
  if (cfg.dimensions.empty()) throw Error("bench: the dimension grid is empty");
  if (cfg.draws < 1 || cfg.repeats < 1) throw Error("bench: draws and repeats must be >= 1");
  std::vector<BenchRow> rows;
  const RngHandle root(cfg.seed, 0xbe7cULL);
  for (int m : cfg.dimensions) {
    if (m < 1) throw Error("bench: dimensions must be >= 1");
    RngHandle drng = root.substream(static_cast<std::uint64_t>(m));
    const Dataset data = bench_data(m, cfg.periods, drng);
    const LaggedData lagged = build_lag_matrix(data, 1);
    PriorConfig priors = default_priors(m);
    priors.sigma0_diag = estimate_sigma0(data, 1);

    std::vector<double> dpm, g1, niw;
    for (int r = 0; r < cfg.repeats; ++r) {
      const RngHandle rr = root.substream(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r + 1));
      ModelConfig model;
      model.lags = 1;
      model.max_clusters = 30;
      {
        mcmc::Sampler s(lagged, model, priors, {}, rr.substream(1));
        dpm.push_back(time_it([&] {
          for (int i = 0; i < cfg.draws; ++i) s.sweep();
        }));
      }
      model.max_clusters = 1;
      {
        mcmc::Sampler s(lagged, model, priors, {}, rr.substream(2));
        g1.push_back(time_it([&] {
          for (int i = 0; i < cfg.draws; ++i) s.sweep();
        }));
      }
      RngHandle nr = rr.substream(3);
      niw.push_back(time_it([&] { (void)niw_reference(lagged, cfg.draws, 0, nr); }));
    }
    rows.push_back({m, median_of(dpm), median_of(g1), median_of(niw)});
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need two or more matching points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw Error("loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(10);
  out << "dimension,bvar_dpm_seconds,bvar_g1_seconds,bvar_niw_seconds\n";
  for (const auto& r : rows) {
    out << r.dimension << ',' << r.dpm_seconds << ',' << r.g1_seconds << ',' << r.niw_seconds << '\n';
  }
}

}  // namespace dpmvar::io
