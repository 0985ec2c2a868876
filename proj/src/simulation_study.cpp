#include <algorithm>
#include <fstream>

#include "dpmvar/dgp.hpp"
#include "dpmvar/priors.hpp"

namespace dpmvar::dgp {

std::vector<Estimator> default_estimators() {
  return {{"DPM", true, false}, {"G1", false, false}, {"DPM-SV", true, true}, {"G1-SV", false, true}};
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty sample");
  const auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

double coefficient_mae(const mcmc::DrawStore& store, const MatrixXd& true_a) {
  if (store.draws.empty()) throw Error("coefficient_mae: no retained draws");
  const Eigen::Index m = store.dimension;
  const Eigen::Index k = m * store.lags;
  if (true_a.rows() != m || true_a.cols() > k) throw Error("coefficient_mae: true coefficient shape mismatch");
  MatrixXd truth = MatrixXd::Zero(m, k);
  truth.leftCols(true_a.cols()) = true_a;
  double total = 0.0;
  std::vector<double> col(store.draws.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      for (std::size_t d = 0; d < store.draws.size(); ++d) col[d] = store.draws[d].coefficients(i, j);
      total += std::abs(median(col) - truth(i, j));
    }
  }
  return total / static_cast<double>(m * k);
}

std::vector<StudyCell> run_simulation_study(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw Error("simulation study: replications must be >= 1");
  std::vector<StudyCell> cells;
  const RngHandle root(cfg.seed, 0x5714ULL);
  for (int size : cfg.sizes) {
    for (ShockKind kind : cfg.kinds) {
      std::vector<StudyCell> row;
      for (const auto& est : cfg.estimators) {
        StudyCell c;
        c.size = size;
        c.kind = kind;
        c.estimator = est.name;
        row.push_back(c);
      }
      for (int r = 0; r < cfg.replications; ++r) {
        DgpSpec spec;
        spec.dimension = size;
        spec.periods = cfg.periods;
        spec.shock = kind;
        spec.shock_scale = cfg.shock_scale;
        RngHandle sim_rng = root.substream(static_cast<std::uint64_t>(size) * 16 + static_cast<std::uint64_t>(kind),
                                           static_cast<std::uint64_t>(r));
        const Simulated sim = simulate_dataset(spec, sim_rng);
        PriorConfig priors = default_priors(size);
        priors.sigma0_diag = estimate_sigma0(sim.data, cfg.lags);
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
          const auto& est = cfg.estimators[e];
          ModelConfig model;
          model.lags = cfg.lags;
          model.stochastic_volatility = est.stochastic_volatility;
          model.max_clusters = est.dpm ? cfg.max_clusters : 1;
          model.indicator_density = cfg.indicator_density;
          mcmc::SamplerOptions opts;
          opts.threads = cfg.threads;
          const RngHandle chain = sim_rng.substream(0xe5ULL, e);
          const mcmc::DrawStore store = mcmc::run_sweeps(sim.data, model, priors, cfg.plan, chain, opts);
          row[e].replication_mae.push_back(coefficient_mae(store, sim.truth.coefficients));
          row[e].replication_clusters.push_back(median(store.effective_cluster_trace()));
        }
      }
      for (auto& c : row) {
        double mae = 0.0;
        double g = 0.0;
        for (int r = 0; r < cfg.replications; ++r) {
          mae += c.replication_mae[static_cast<std::size_t>(r)];
          g += c.replication_clusters[static_cast<std::size_t>(r)];
        }
        c.mae = mae / cfg.replications;
        c.effective_clusters = g / cfg.replications;
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

void write_study_csv(const std::vector<StudyCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "size,shock,estimator,mae,effective_clusters\n";
  out.precision(10);
  for (const auto& c : cells) {
    out << c.size << ',' << to_string(c.kind) << ',' << c.estimator << ',' << c.mae << ',' << c.effective_clusters
        << '\n';
  }
}

}  // namespace dpmvar::dgp
