#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpmvar/io.hpp"

namespace dpmvar::io {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "."; }

}  // namespace

RawTable parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(split_fields(line));
  }
  if (rows.empty()) throw Error(source + ": empty file");
  if (rows.front().size() < 2) throw Error(source + ": header needs a date column and at least one variable");

  RawTable t;
  t.columns.assign(rows.front().begin() + 1, rows.front().end());
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  const auto m = static_cast<Eigen::Index>(t.columns.size());
  if (n == 0) throw Error(source + ": no data rows");
  t.values.resize(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r + 1)];
    if (static_cast<Eigen::Index>(row.size()) != m + 1) {
      throw Error(source + ": row " + std::to_string(r + 2) + " has " + std::to_string(row.size()) +
                  " fields, expected " + std::to_string(m + 1));
    }
    t.dates.push_back(row.front());
    for (Eigen::Index c = 0; c < m; ++c) {
      const std::string& cell = row[static_cast<std::size_t>(c + 1)];
      if (is_missing(cell)) {
        t.values(r, c) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw Error(source + ": non-numeric cell '" + cell + "' at row " + std::to_string(r + 2) + ", column " +
                    std::to_string(c + 2) + " (" + t.columns[static_cast<std::size_t>(c)] + ")");
      }
      t.values(r, c) = v;
    }
  }
  return t;
}

RawTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

Dataset build_dataset(const RawTable& raw, const DataSelection& sel) {
  const std::vector<std::string> vars = sel.variables.empty() ? raw.columns : sel.variables;
  const auto n = static_cast<long>(raw.values.rows());
  struct Series {
    std::vector<double> values;  // from index `first`
    long first = 0;
    long last = 0;
  };
  std::vector<Series> series;
  long start = 0;
  long end = n - 1;
  for (const auto& v : vars) {
    const auto it = std::find(raw.columns.begin(), raw.columns.end(), v);
    if (it == raw.columns.end()) throw Error("data: variable '" + v + "' not found in the file");
    const auto col = static_cast<Eigen::Index>(it - raw.columns.begin());
    int code = 1;
    if (const auto o = sel.codes.find(v); o != sel.codes.end()) {
      code = o->second;
    } else if (const auto d = default_code(v)) {
      code = *d;
    }
    long first = 0;
    while (first < n && std::isnan(raw.values(first, col))) ++first;
    long last = n - 1;
    while (last >= first && std::isnan(raw.values(last, col))) --last;
    if (first > last) throw Error("data: variable '" + v + "' has no observations");
    std::vector<double> x;
    for (long t = first; t <= last; ++t) {
      const double value = raw.values(t, col);
      if (std::isnan(value)) {
        throw Error("data: missing value for '" + v + "' at " + raw.dates[static_cast<std::size_t>(t)] +
                    " inside its sample");
      }
      x.push_back(value);
    }
    Series s;
    s.values = apply_transform(x, code, v);
    if (code >= 4) {
      for (double& e : s.values) e *= sel.log_scale;
    }
    s.first = first + transform_lead(code);
    s.last = last;
    start = std::max(start, s.first);
    end = std::min(end, s.last);
    series.push_back(std::move(s));
  }
  if (end - start + 1 < 2) throw Error("data: the common sample after transformation has fewer than two periods");

  Dataset d;
  d.names = vars;
  d.frequency = sel.frequency;
  d.observations.resize(end - start + 1, static_cast<Eigen::Index>(vars.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (long t = start; t <= end; ++t) {
      d.observations(t - start, static_cast<Eigen::Index>(i)) =
          series[i].values[static_cast<std::size_t>(t - series[i].first)];
    }
  }
  for (long t = start; t <= end; ++t) d.dates.push_back(raw.dates[static_cast<std::size_t>(t)]);
  return d;
}

Dataset load_dataset(const std::string& path, const DataSelection& sel) {
  return build_dataset(read_csv(path), sel);
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(12);
  out << "date";
  for (Eigen::Index i = 0; i < data.dimension(); ++i) {
    out << ',' << (i < static_cast<Eigen::Index>(data.names.size()) ? data.names[static_cast<std::size_t>(i)]
                                                                    : "y" + std::to_string(i + 1));
  }
  out << '\n';
  for (Eigen::Index t = 0; t < data.periods(); ++t) {
    out << (t < static_cast<Eigen::Index>(data.dates.size()) ? data.dates[static_cast<std::size_t>(t)]
                                                             : std::to_string(t + 1));
    for (Eigen::Index i = 0; i < data.dimension(); ++i) out << ',' << data.observations(t, i);
    out << '\n';
  }
}

std::string default_data_dir() {
  if (const char* env = std::getenv("DPMVAR_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return "data";
}

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty()) throw Error("no data path given");
  if (fs::path(path).is_absolute() || fs::exists(path)) return path;
  const fs::path candidate = fs::path(default_data_dir()) / path;
  if (fs::exists(candidate)) return candidate.string();
  throw Error("data file not found: " + path + " (also tried " + candidate.string() + ")");
}

}  // namespace dpmvar::io
