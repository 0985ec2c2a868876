// Columnar draw files: <stem>.bin holds little-endian column blocks laid out
// draw-major; <stem>.json describes each column (dtype, shape, byte offset)
// together with the run metadata needed for forecasting.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "dpmvar/mcmc.hpp"
#include "json.hpp"

namespace dpmvar::mcmc {
namespace {

using nlohmann::json;
constexpr int kFormatVersion = 1;

struct ColumnWriter {
  std::vector<char> bytes;
  json columns = json::array();

  void add_f64(const std::string& name, std::vector<std::int64_t> shape, const std::vector<double>& v) {
    columns.push_back({{"name", name}, {"dtype", "float64"}, {"shape", shape}, {"offset", bytes.size()},
                       {"bytes", v.size() * sizeof(double)}});
    const auto* p = reinterpret_cast<const char*>(v.data());
    bytes.insert(bytes.end(), p, p + v.size() * sizeof(double));
  }
  void add_i32(const std::string& name, std::vector<std::int64_t> shape, const std::vector<std::int32_t>& v) {
    columns.push_back({{"name", name}, {"dtype", "int32"}, {"shape", shape}, {"offset", bytes.size()},
                       {"bytes", v.size() * sizeof(std::int32_t)}});
    const auto* p = reinterpret_cast<const char*>(v.data());
    bytes.insert(bytes.end(), p, p + v.size() * sizeof(std::int32_t));
  }
};

struct ColumnReader {
  std::vector<char> bytes;
  std::map<std::string, json> index;

  template <class T>
  std::vector<T> get(const std::string& name, const char* dtype) const {
    auto it = index.find(name);
    if (it == index.end()) throw Error("draw store: missing column " + name);
    if (it->second.at("dtype").get<std::string>() != dtype) throw Error("draw store: column " + name + " has wrong dtype");
    const auto offset = it->second.at("offset").get<std::size_t>();
    const auto n = it->second.at("bytes").get<std::size_t>();
    if (offset + n > bytes.size() || n % sizeof(T) != 0) throw Error("draw store: column " + name + " is truncated");
    std::vector<T> out(n / sizeof(T));
    std::memcpy(out.data(), bytes.data() + offset, n);
    return out;
  }
  bool has(const std::string& name) const { return index.count(name) > 0; }
};

std::vector<double> to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }
VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void DrawStore::write(const std::string& directory, const std::string& stem) const {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const auto n = static_cast<std::int64_t>(draws.size());
  const std::int64_t m = dimension;
  const std::int64_t k = static_cast<std::int64_t>(dimension) * lags;
  std::int64_t slots = 1;
  for (const auto& d : draws) slots = std::max<std::int64_t>(slots, static_cast<std::int64_t>(d.clusters.size()));
  const bool latents = !draws.empty() && !draws.front().delta.empty();
  const std::int64_t t_eff = periods;

  std::vector<double> a, alpha, remainder, weights, mu, sigma, omega_bar, mu0, b, log_vol_last, omega_mean, sv, log_vol;
  std::vector<std::int32_t> ncomp, eff, counts, delta;
  for (const auto& d : draws) {
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t j = 0; j < k; ++j) a.push_back(d.coefficients(i, j));
    }
    alpha.push_back(d.alpha);
    remainder.push_back(d.weight_remainder);
    ncomp.push_back(static_cast<std::int32_t>(d.clusters.size()));
    eff.push_back(d.effective_clusters);
    for (std::int64_t c = 0; c < slots; ++c) {
      const bool live = c < static_cast<std::int64_t>(d.clusters.size());
      const ClusterDraw* cl = live ? &d.clusters[static_cast<std::size_t>(c)] : nullptr;
      weights.push_back(live ? cl->weight : 0.0);
      counts.push_back(live ? cl->count : 0);
      for (std::int64_t i = 0; i < m; ++i) {
        mu.push_back(live ? cl->mu[i] : 0.0);
        omega_bar.push_back(live ? cl->omega_bar[i] : 0.0);
        for (std::int64_t j = 0; j < m; ++j) sigma.push_back(live ? cl->sigma(i, j) : 0.0);
      }
    }
    for (double v : to_vec(d.mu0)) mu0.push_back(v);
    for (double v : to_vec(d.b)) b.push_back(v);
    for (double v : to_vec(d.log_vol_last)) log_vol_last.push_back(v);
    for (double v : to_vec(d.omega_mean)) omega_mean.push_back(v);
    if (stochastic_volatility) {
      for (const auto& p : d.sv) {
        sv.push_back(p.mu);
        sv.push_back(p.rho);
        sv.push_back(p.sigma2);
      }
    }
    if (latents) {
      for (int v : d.delta) delta.push_back(v);
      for (std::int64_t t = 0; t < t_eff; ++t) {
        for (std::int64_t i = 0; i < m; ++i) log_vol.push_back(d.log_vol(t, i));
      }
    }
  }

  ColumnWriter w;
  w.add_f64("a", {n, m, k}, a);
  w.add_f64("alpha", {n}, alpha);
  w.add_f64("weight_remainder", {n}, remainder);
  w.add_i32("n_components", {n}, ncomp);
  w.add_i32("effective_clusters", {n}, eff);
  w.add_f64("weights", {n, slots}, weights);
  w.add_i32("counts", {n, slots}, counts);
  w.add_f64("mu", {n, slots, m}, mu);
  w.add_f64("sigma", {n, slots, m, m}, sigma);
  w.add_f64("omega_bar", {n, slots, m}, omega_bar);
  w.add_f64("mu0", {n, m}, mu0);
  w.add_f64("b", {n, m}, b);
  w.add_f64("log_vol_last", {n, m}, log_vol_last);
  w.add_f64("omega_mean", {n, m}, omega_mean);
  if (stochastic_volatility) w.add_f64("sv_params", {n, m, 3}, sv);
  if (latents) {
    w.add_i32("delta", {n, t_eff}, delta);
    w.add_f64("log_vol", {n, t_eff, m}, log_vol);
  }

  std::vector<double> hist;
  for (Eigen::Index t = 0; t < history.rows(); ++t) {
    for (Eigen::Index i = 0; i < history.cols(); ++i) hist.push_back(history(t, i));
  }
  json manifest = {{"format", "dpmvar-draws"},
                   {"version", kFormatVersion},
                   {"byte_order", "little"},
                   {"draw_count", n},
                   {"seed", seed},
                   {"config_hash", config_hash},
                   {"dimension", m},
                   {"lags", lags},
                   {"periods", t_eff},
                   {"cluster_slots", slots},
                   {"max_clusters", max_clusters},
                   {"stochastic_volatility", stochastic_volatility},
                   {"plan",
                    {{"n_draws", plan.n_draws},
                     {"n_burn", plan.n_burn},
                     {"thin", plan.thin},
                     {"store_latents", plan.store_latents}}},
                   {"names", names},
                   {"c0", c0},
                   {"sigma0_diag", to_vec(sigma0_diag)},
                   {"history", hist},
                   {"data_file", stem + ".bin"},
                   {"columns", w.columns}};

  const fs::path dir(directory);
  std::ofstream bin(dir / (stem + ".bin"), std::ios::binary | std::ios::trunc);
  bin.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
  if (!bin) throw Error("draw store: failed writing " + (dir / (stem + ".bin")).string());
  std::ofstream js(dir / (stem + ".json"), std::ios::trunc);
  js << manifest.dump(2) << '\n';
  if (!js) throw Error("draw store: failed writing " + (dir / (stem + ".json")).string());
}

DrawStore DrawStore::read(const std::string& directory, const std::string& stem) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  std::ifstream js(dir / (stem + ".json"));
  if (!js) throw Error("draw store: cannot open " + (dir / (stem + ".json")).string());
  json manifest;
  try {
    js >> manifest;
  } catch (const json::exception& e) {
    throw Error(std::string("draw store: malformed manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "dpmvar-draws") throw Error("draw store: not a draw manifest");
  if (manifest.value("version", 0) != kFormatVersion) throw Error("draw store: unsupported format version");

  ColumnReader r;
  std::ifstream bin(dir / manifest.at("data_file").get<std::string>(), std::ios::binary);
  if (!bin) throw Error("draw store: cannot open the column file");
  r.bytes.assign(std::istreambuf_iterator<char>(bin), std::istreambuf_iterator<char>());
  for (const auto& c : manifest.at("columns")) r.index[c.at("name").get<std::string>()] = c;

  DrawStore s;
  s.dimension = manifest.at("dimension");
  s.lags = manifest.at("lags");
  s.periods = manifest.at("periods");
  s.max_clusters = manifest.at("max_clusters");
  s.stochastic_volatility = manifest.at("stochastic_volatility");
  s.seed = manifest.at("seed");
  s.config_hash = manifest.at("config_hash");
  s.names = manifest.at("names").get<std::vector<std::string>>();
  s.c0 = manifest.at("c0");
  s.sigma0_diag = to_eigen(manifest.at("sigma0_diag").get<std::vector<double>>());
  const auto& plan = manifest.at("plan");
  s.plan.n_draws = plan.at("n_draws");
  s.plan.n_burn = plan.at("n_burn");
  s.plan.thin = plan.at("thin");
  s.plan.store_latents = plan.at("store_latents");
  const auto hist = manifest.at("history").get<std::vector<double>>();
  const Eigen::Index m = s.dimension;
  const Eigen::Index k = m * s.lags;
  s.history = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      hist.data(), static_cast<Eigen::Index>(hist.size()) / m, m);

  const auto n = manifest.at("draw_count").get<std::size_t>();
  const auto slots = manifest.at("cluster_slots").get<std::size_t>();
  const auto a = r.get<double>("a", "float64");
  const auto alpha = r.get<double>("alpha", "float64");
  const auto remainder = r.get<double>("weight_remainder", "float64");
  const auto ncomp = r.get<std::int32_t>("n_components", "int32");
  const auto eff = r.get<std::int32_t>("effective_clusters", "int32");
  const auto weights = r.get<double>("weights", "float64");
  const auto counts = r.get<std::int32_t>("counts", "int32");
  const auto mu = r.get<double>("mu", "float64");
  const auto sigma = r.get<double>("sigma", "float64");
  const auto omega_bar = r.get<double>("omega_bar", "float64");
  const auto mu0 = r.get<double>("mu0", "float64");
  const auto b = r.get<double>("b", "float64");
  const auto lvl = r.get<double>("log_vol_last", "float64");
  const auto om = r.get<double>("omega_mean", "float64");
  const bool has_sv = r.has("sv_params");
  const bool has_latents = r.has("delta");
  const auto sv = has_sv ? r.get<double>("sv_params", "float64") : std::vector<double>();
  const auto delta = has_latents ? r.get<std::int32_t>("delta", "int32") : std::vector<std::int32_t>();
  const auto log_vol = has_latents ? r.get<double>("log_vol", "float64") : std::vector<double>();
  if (a.size() != n * static_cast<std::size_t>(m * k)) throw Error("draw store: coefficient column size mismatch");

  const auto um = static_cast<std::size_t>(m);
  const auto t_eff = static_cast<std::size_t>(s.periods);
  s.draws.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    auto& pd = s.draws[d];
    pd.coefficients.resize(m, k);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) pd.coefficients(i, j) = a[d * um * static_cast<std::size_t>(k) + static_cast<std::size_t>(i * k + j)];
    }
    pd.alpha = alpha[d];
    pd.weight_remainder = remainder[d];
    pd.effective_clusters = eff[d];
    for (std::int32_t c = 0; c < ncomp[d]; ++c) {
      const std::size_t slot = d * slots + static_cast<std::size_t>(c);
      ClusterDraw cl;
      cl.weight = weights[slot];
      cl.count = counts[slot];
      cl.mu.resize(m);
      cl.omega_bar.resize(m);
      cl.sigma.resize(m, m);
      for (std::size_t i = 0; i < um; ++i) {
        cl.mu[static_cast<Eigen::Index>(i)] = mu[slot * um + i];
        cl.omega_bar[static_cast<Eigen::Index>(i)] = omega_bar[slot * um + i];
        for (std::size_t j = 0; j < um; ++j) {
          cl.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sigma[slot * um * um + i * um + j];
        }
      }
      pd.clusters.push_back(std::move(cl));
    }
    auto slice = [&](const std::vector<double>& v) {
      return to_eigen(std::vector<double>(v.begin() + static_cast<long>(d * um), v.begin() + static_cast<long>((d + 1) * um)));
    };
    pd.mu0 = slice(mu0);
    pd.b = slice(b);
    pd.log_vol_last = slice(lvl);
    pd.omega_mean = slice(om);
    if (has_sv) {
      for (std::size_t i = 0; i < um; ++i) {
        const std::size_t o = (d * um + i) * 3;
        pd.sv.push_back(SvParams{sv[o], sv[o + 1], sv[o + 2]});
      }
    }
    if (has_latents) {
      pd.delta.assign(delta.begin() + static_cast<long>(d * t_eff), delta.begin() + static_cast<long>((d + 1) * t_eff));
      pd.log_vol.resize(static_cast<Eigen::Index>(t_eff), m);
      for (std::size_t t = 0; t < t_eff; ++t) {
        for (std::size_t i = 0; i < um; ++i) {
          pd.log_vol(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = log_vol[(d * t_eff + t) * um + i];
        }
      }
    }
  }
  return s;
}

}  // namespace dpmvar::mcmc
