#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dpmvar/cli.hpp"
#include "dpmvar/distributions.hpp"
#include "dpmvar/io.hpp"

using namespace dpmvar;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dpmvar_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_demo_csv(const fs::path& dir) {
  RngHandle rng(81, 1);
  std::ofstream out(dir / "demo.csv");
  out << "date,y1,y2\n";
  double a = 0.0, b = 0.0;
  for (int t = 0; t < 60; ++t) {
    a = 0.5 * a + dist::normal(rng);
    b = 0.3 * b + 0.2 * a + dist::normal(rng);
    out << 2000 + t / 4 << "-Q" << t % 4 + 1 << ',' << a << ',' << b << '\n';
  }
  return dir / "demo.csv";
}

}  // namespace

TEST_SUITE("io_cli") {
  TEST_CASE("transformation codes") {
    const auto d = io::apply_transform({1.0, 1.1}, 5);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(0.0953101798));
    const auto second = io::apply_transform({1.0, 2.0, 4.0, 7.0}, 3);
    REQUIRE(second.size() == 2);
    CHECK(second[0] == 1.0);
    CHECK(second[1] == 1.0);
    CHECK(io::apply_transform({2.0, 3.0}, 1).size() == 2);
    CHECK(io::apply_transform({std::exp(1.0)}, 4)[0] == doctest::Approx(1.0));
    const auto g = io::apply_transform({1.0, 2.0, 3.0}, 7);
    CHECK(g[0] == doctest::Approx(0.5 - 1.0));
    for (int c = 1; c <= 7; ++c) CHECK(io::transform_lead(c) == (c == 1 || c == 4 ? 0 : (c == 2 || c == 5 ? 1 : 2)));
    CHECK_THROWS_AS((void)io::transform_lead(8), Error);
    try {
      (void)io::apply_transform({1.0, -2.0, 3.0}, 5, "GDPC1");
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("GDPC1") != std::string::npos);
      CHECK(msg.find("index 1") != std::string::npos);
    }
  }

  TEST_CASE("presets") {
    CHECK(io::preset("S").size() == 4);
    CHECK(io::preset("L").size() == 28);
    CHECK(io::preset("M").size() == 7);
    CHECK(io::default_code("UNRATE") == 2);
    CHECK(io::default_code("CPIAUCSL") == 6);
    CHECK_FALSE(io::default_code("NOPE").has_value());
    CHECK_THROWS_AS((void)io::preset("XL"), Error);
  }

  TEST_CASE("csv parsing and dataset construction") {
    const std::string text =
        "date,a,\"b\"\n"
        "q1,,1\n"
        "q2,1,2\n"
        "q3,1.1,NA\n"
        "q4,1.21,4\n";
    const io::RawTable raw = io::parse_csv(text);
    CHECK(raw.columns == std::vector<std::string>{"a", "b"});
    CHECK(std::isnan(raw.values(0, 0)));
    CHECK(std::isnan(raw.values(2, 1)));

    io::DataSelection sel;
    sel.variables = {"a"};
    sel.codes = {{"a", 5}};
    const Dataset d = io::build_dataset(raw, sel);
    CHECK(d.periods() == 2);
    CHECK(d.observations(0, 0) == doctest::Approx(100.0 * std::log(1.1)));
    CHECK(d.dates.front() == "q3");
    sel.log_scale = 1.0;
    CHECK(io::build_dataset(raw, sel).observations(0, 0) == doctest::Approx(std::log(1.1)));
    sel.codes = {{"a", 2}};
    sel.log_scale = 100.0;
    CHECK(io::build_dataset(raw, sel).observations(1, 0) == doctest::Approx(0.11));  // level codes are unscaled

    sel.variables = {"a", "b"};
    sel.codes = {{"a", 1}, {"b", 1}};
    CHECK_THROWS_AS((void)io::build_dataset(raw, sel), Error);  // interior gap in b
    sel.variables = {"c"};
    CHECK_THROWS_AS((void)io::build_dataset(raw, sel), Error);

    CHECK_THROWS_AS((void)io::parse_csv(""), Error);
    try {
      (void)io::parse_csv("date,a\nq1,1,2\n", "f.csv");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("f.csv") != std::string::npos);
    }
    try {
      (void)io::parse_csv("date,a\nq1,abc\n", "g.csv");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    CHECK_THROWS_AS((void)io::read_csv("/nonexistent/file.csv"), Error);
  }

  TEST_CASE("dataset csv round trip") {
    const auto dir = fresh_dir("roundtrip");
    Dataset d;
    d.observations.resize(3, 2);
    d.observations << 1.5, -2.0, 0.25, 1e-3, 7.0, 8.0;
    d.names = {"x", "y"};
    io::write_dataset_csv(d, (dir / "d.csv").string());
    io::DataSelection sel;
    sel.codes = {{"x", 1}, {"y", 1}};
    const Dataset back = io::load_dataset((dir / "d.csv").string(), sel);
    CHECK(back.names == d.names);
    CHECK((back.observations - d.observations).norm() < 1e-12);
    fs::remove_all(dir);
  }

  TEST_CASE("run configuration") {
    using nlohmann::json;
    const json j = {{"task", "estimate"},
                    {"seed", 3},
                    {"model", {{"lags", 2}, {"max_clusters", 10}, {"indicator_density", "marginal"}}},
                    {"sampler", {{"draws", 500}, {"burn", 100}}},
                    {"priors", {{"alpha_shape", 3.0}}}};
    const io::RunConfig c = io::parse_run_config(j);
    CHECK(c.model.lags == 2);
    CHECK(c.model.indicator_density == IndicatorDensity::marginal);
    CHECK(c.plan.retained() == 400);
    const io::RunConfig again = io::parse_run_config(io::to_json(c));
    CHECK(io::to_json(again) == io::to_json(c));

    Dataset d;
    d.observations = MatrixXd::Random(40, 2);
    d.names = {"a", "b"};
    const PriorConfig p = io::build_priors(c, d);
    CHECK(p.alpha_shape == 3.0);
    CHECK(p.sigma0_diag.size() == 2);

    CHECK_THROWS_AS((void)io::parse_run_config(json{{"bogus", 1}}), Error);
    CHECK_THROWS_AS((void)io::parse_run_config(json{{"model", {{"lag", 2}}}}), Error);
    CHECK_THROWS_AS((void)io::parse_run_config(json{{"priors", {{"alpha", 2}}}}), Error);
    CHECK_THROWS_AS((void)io::parse_run_config(json{{"sampler", {{"draws", 10}, {"burn", 20}}}}), Error);
    CHECK_THROWS_AS((void)io::load_run_config("/nonexistent.json"), Error);

    const ModelConfig g1 = io::estimator_model("G1-SV", ModelConfig{});
    CHECK(g1.max_clusters == 1);
    CHECK(g1.stochastic_volatility);
    CHECK_THROWS_AS((void)io::estimator_model("BVAR", ModelConfig{}), Error);
  }

  TEST_CASE("reference samplers and timing helpers") {
    RngHandle rng(82, 1);
    Dataset d;
    d.observations.resize(300, 2);
    VectorXd y = VectorXd::Zero(2);
    for (int t = 0; t < 300; ++t) {
      y = 0.5 * y + dist::standard_normal(rng, 2);
      d.observations.row(t) = y.transpose();
    }
    const LaggedData lagged = build_lag_matrix(d, 1);
    const auto niw = io::niw_reference(lagged, 200, 50, rng);
    const auto tri = io::triangular_reference(lagged, 200, rng);
    double a_niw = 0.0, a_tri = 0.0;
    for (const auto& r : niw) a_niw += r.a(0, 0) / 200.0;
    for (const auto& r : tri) a_tri += r.a(0, 0) / 200.0;
    CHECK(a_niw == doctest::Approx(0.5).epsilon(0.3));
    CHECK(a_tri == doctest::Approx(0.5).epsilon(0.3));
    CHECK(Eigen::LLT<MatrixXd>(tri.front().sigma).info() == Eigen::Success);
    CHECK(io::loglog_slope({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)io::loglog_slope({1.0}, {1.0}), Error);
  }

  TEST_CASE("command line smoke test") {
    const auto dir = fresh_dir("cli");
    const auto csv = write_demo_csv(dir);
    const std::string out1 = (dir / "run1").string();
    const std::string out2 = (dir / "run2").string();
    CHECK(cli::run({"dpmvar", "--seed", "7", "estimate", "--data", csv.string(), "--draws", "40", "--burn", "20",
                    "--output-dir", out1}) == 0);
    CHECK(cli::run({"dpmvar", "estimate", "--seed", "7", "--data", csv.string(), "--draws", "40", "--burn", "20",
                    "--output-dir", out2}) == 0);
    CHECK(fs::exists(fs::path(out1) / "draws.bin"));
    CHECK(fs::exists(fs::path(out1) / "draws.json"));
    CHECK(fs::exists(fs::path(out1) / "clusters.csv"));
    const auto manifest = nlohmann::json::parse(slurp(fs::path(out1) / "manifest.json"));
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("task") == "estimate");
    CHECK(manifest.contains("config_hash"));
    CHECK(slurp(fs::path(out1) / "draws.bin") == slurp(fs::path(out2) / "draws.bin"));

    const std::string out3 = (dir / "irf").string();
    CHECK(cli::run({"dpmvar", "irf", "--draws-dir", out1, "--horizons", "4", "--output-dir", out3}) == 0);
    CHECK(fs::exists(fs::path(out3) / "irf.csv"));

    CHECK(cli::run({"dpmvar", "--config", (dir / "missing.json").string(), "estimate"}) != 0);
    CHECK(cli::run({"dpmvar", "estimate", "--output-dir", out3}) != 0);
    CHECK(cli::run({"dpmvar", "estimate", "--data", csv.string(), "--draws", "10", "--burn", "20"}) != 0);
    fs::remove_all(dir);
  }
}
