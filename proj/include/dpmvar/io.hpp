#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpmvar/common.hpp"
#include "dpmvar/dgp.hpp"
#include "dpmvar/forecast.hpp"
#include "dpmvar/mcmc.hpp"
#include "dpmvar/model.hpp"
#include "dpmvar/priors.hpp"
#include "dpmvar/structural.hpp"
#include "json.hpp"

namespace dpmvar::io {

// ---- transformation codes ----
// 1 level, 2 first difference, 3 second difference, 4 log, 5 log difference,
// 6 second log difference, 7 first difference of the growth rate.
int transform_lead(int code);
// Transformed series with the undefined leading entries removed.
std::vector<double> apply_transform(const std::vector<double>& series, int code, const std::string& name = "series");

// ---- presets ----
struct VariableInfo {
  std::string mnemonic;
  int code = 1;
};

// Variable sets "S" (4), "M" (7) and "L" (28), in the VAR ordering.
std::vector<VariableInfo> preset(const std::string& name);
// Transformation code of a known mnemonic.
std::optional<int> default_code(const std::string& mnemonic);

// ---- CSV ----
struct RawTable {
  std::vector<std::string> dates;
  std::vector<std::string> columns;  // without the date column
  MatrixXd values;                   // NaN marks an empty cell
};

RawTable parse_csv(const std::string& text, const std::string& source = "csv");
RawTable read_csv(const std::string& path);

struct DataSelection {
  std::vector<std::string> variables;  // empty: every column
  std::map<std::string, int> codes;    // overrides; otherwise the preset table, otherwise 1
  std::string frequency = "quarterly";
  // Multiplier applied after the log-based codes 4-7; 100 puts growth rates in percent.
  double log_scale = 100.0;
};

// Selects the variables, applies the transforms and keeps the maximal common sample.
Dataset build_dataset(const RawTable& raw, const DataSelection& sel);
Dataset load_dataset(const std::string& path, const DataSelection& sel);

// Date column plus one column per variable.
void write_dataset_csv(const Dataset& data, const std::string& path);

// Directory searched for relative data paths: DPMVAR_DATA_DIR, else "data".
std::string default_data_dir();
std::string resolve_data_path(const std::string& path);

// ---- run configuration ----
struct ForecastSettings {
  std::vector<int> horizons = {1, 4};
  long hold_out = 60;                 // number of final periods used as forecast targets
  std::vector<std::string> focus;     // names; empty means all variables
  std::vector<std::string> models = {"DPM", "G1"};
  std::string benchmark = "G1";
  int paths_per_draw = 1;
};

struct IrfSettings {
  std::string shock;  // variable name; empty selects the first variable
  int horizons = 20;
  structural::ShockScale scale = structural::ShockScale::one_sd;
  structural::OmegaChoice omega = structural::OmegaChoice::cluster_average;
};

struct BenchConfig {
  std::vector<int> dimensions = {5, 10, 15, 20, 25};
  int draws = 10;
  int repeats = 3;
  long periods = 250;
  std::uint64_t seed = 1;
};

struct RunConfig {
  std::string task = "estimate";
  std::string data_path;
  std::string preset;  // S, M or L
  DataSelection selection;
  ModelConfig model;
  nlohmann::json prior_overrides = nlohmann::json::object();
  mcmc::SweepPlan plan;
  mcmc::SamplerOptions options;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  ForecastSettings forecast;
  IrfSettings irf;
  dgp::DgpSpec simulate;
  BenchConfig bench;
  dgp::StudyConfig study;
  mcmc::GewekeConfig geweke;
  bool geweke_sv = false;

  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

// Data-based defaults with the configured overrides applied.
PriorConfig build_priors(const RunConfig& cfg, const Dataset& data);
void apply_prior_overrides(PriorConfig& p, const nlohmann::json& overrides);
// Model settings for the named estimators DPM, G1, DPM-SV and G1-SV.
ModelConfig estimator_model(const std::string& name, const ModelConfig& base);

// ---- timing benchmark ----
struct ReducedFormDraw {
  MatrixXd a;      // M x Mp
  MatrixXd sigma;  // M x M
};

// Full-system independent Normal-inverse-Wishart Gibbs sampler.
std::vector<ReducedFormDraw> niw_reference(const LaggedData& data, int draws, int burn, RngHandle& rng);
// Recursive (lower-triangular) system with conjugate equation-by-equation priors; depends on the ordering.
std::vector<ReducedFormDraw> triangular_reference(const LaggedData& data, int draws, RngHandle& rng);

struct BenchRow {
  int dimension = 0;
  double dpm_seconds = 0.0;
  double g1_seconds = 0.0;
  double niw_seconds = 0.0;
};

std::vector<BenchRow> bench_timing(const BenchConfig& cfg);
// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace dpmvar::io
