#include <cmath>

#include "dpmvar/io.hpp"

namespace dpmvar::io {

int transform_lead(int code) {
  switch (code) {
    case 1:
    case 4: return 0;
    case 2:
    case 5: return 1;
    case 3:
    case 6:
    case 7: return 2;
    default: throw Error("unknown transformation code " + std::to_string(code) + " (expected 1..7)");
  }
}

namespace {
std::vector<double> diff(const std::vector<double>& x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t t = 1; t < x.size(); ++t) d.push_back(x[t] - x[t - 1]);
  return d;
}
}  // namespace

std::vector<double> apply_transform(const std::vector<double>& series, int code, const std::string& name) {
  const int lead = transform_lead(code);
  if (static_cast<int>(series.size()) <= lead) {
    throw Error("series " + name + ": too short for transformation code " + std::to_string(code));
  }
  std::vector<double> x = series;
  if (code >= 4 && code <= 6) {
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (!(x[t] > 0.0)) {
        throw Error("series " + name + ": nonpositive value at index " + std::to_string(t) + " under log code " +
                    std::to_string(code));
      }
      x[t] = std::log(x[t]);
    }
  }
  switch (code) {
    case 1:
    case 4: return x;
    case 2:
    case 5: return diff(x);
    case 3:
    case 6: return diff(diff(x));
    case 7: {
      std::vector<double> g;
      g.reserve(x.size() - 1);
      for (std::size_t t = 1; t < x.size(); ++t) {
        if (x[t - 1] == 0.0) throw Error("series " + name + ": zero value at index " + std::to_string(t - 1));
        g.push_back(x[t] / x[t - 1] - 1.0);
      }
      return diff(g);
    }
    default: break;
  }
  throw Error("unknown transformation code " + std::to_string(code));
}

namespace {
const std::vector<VariableInfo>& table() {
  static const std::vector<VariableInfo> t = {
      {"GDPC1", 5},         {"PCECC96", 5},    {"FPIx", 5},          {"GCEC1", 5},
      {"INDPRO", 5},        {"CUMFNS", 1},     {"PAYEMS", 5},        {"CE16OV", 5},
      {"UNRATE", 2},        {"AWHMAN", 1},     {"CES0600000007", 2}, {"CLAIMSx", 5},
      {"GDPCTPI", 6},       {"CPIAUCSL", 6},   {"PPIACO", 6},        {"WPSID61", 6},
      {"WPSID62", 6},       {"COMPRNFB", 5},   {"ULCNFB", 5},        {"CES0600000008", 6},
      {"FEDFUNDS", 2},      {"BAA10YM", 1},    {"GS10TB3Mx", 1},     {"CPF3MTB3Mx", 1},
      {"M2REAL", 5},        {"BUSLOANSx", 5},  {"CONSUMERx", 5},     {"S.P.500", 5},
  };
  return t;
}

std::vector<VariableInfo> pick(const std::vector<std::string>& names) {
  std::vector<VariableInfo> out;
  for (const auto& n : names) out.push_back({n, *default_code(n)});
  return out;
}
}  // namespace

std::optional<int> default_code(const std::string& mnemonic) {
  for (const auto& v : table()) {
    if (v.mnemonic == mnemonic) return v.code;
  }
  return std::nullopt;
}

std::vector<VariableInfo> preset(const std::string& name) {
  if (name == "S") return pick({"GDPC1", "UNRATE", "CPIAUCSL", "FEDFUNDS"});
  if (name == "M") return pick({"GDPC1", "UNRATE", "CPIAUCSL", "CES0600000008", "FEDFUNDS", "GS10TB3Mx", "S.P.500"});
  if (name == "L") return table();
  throw Error("unknown variable preset '" + name + "' (expected S, M or L)");
}

}  // namespace dpmvar::io
