#include "krf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "krf/error.hpp"
#include "krf/io.hpp"

namespace krf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Line {
  int number;
  std::string key;
};

[[noreturn]] void range_error(const Line& l, const std::string& what) {
  std::ostringstream os;
  os << "line " << l.number << ": " << l.key << " " << what;
  fail(ErrorCode::OutOfRange, os.str());
}

double to_double(const Line& l, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    std::ostringstream os;
    os << "line " << l.number << ": " << l.key << ": expected a number, got '" << v << "'";
    fail(ErrorCode::ParseError, os.str());
  }
  return out;
}

std::int64_t to_int(const Line& l, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    std::ostringstream os;
    os << "line " << l.number << ": " << l.key << ": expected an integer, got '" << v << "'";
    fail(ErrorCode::ParseError, os.str());
  }
  return out;
}

std::vector<double> to_list(const Line& l, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(l, item));
  }
  return out;
}

bool to_bool(const Line& l, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  std::ostringstream os;
  os << "line " << l.number << ": " << l.key << ": expected true or false, got '" << v << "'";
  fail(ErrorCode::ParseError, os.str());
}

// "r:xi; r:xi; ..."
std::vector<std::pair<double, double>> to_table(const Line& l, const std::string& v) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      std::ostringstream os;
      os << "line " << l.number << ": " << l.key << ": table entries are r:xi";
      fail(ErrorCode::ParseError, os.str());
    }
    out.emplace_back(to_double(l, trim(item.substr(0, colon))), to_double(l, trim(item.substr(colon + 1))));
  }
  return out;
}

void assign(RunConfig& c, const Line& l, const std::string& v) {
  const std::string& k = l.key;
  if (k == "metric.n") {
    const auto n = to_int(l, v);
    if (n < 1 || n > 64) range_error(l, "must lie in [1, 64]");
    c.n = static_cast<int>(n);
  } else if (k == "metric.preset") {
    c.preset = v;
  } else if (k == "metric.beta") {
    c.params.beta = to_double(l, v);
    if (!(c.params.beta > 0.0 && c.params.beta < 1.0)) range_error(l, "must lie in (0, 1)");
  } else if (k == "metric.c0") {
    c.params.c0 = to_double(l, v);
    if (!(c.params.c0 > 0.0)) range_error(l, "must be positive");
  } else if (k == "metric.table") {
    c.params.table = to_table(l, v);
  } else if (k == "grid.r_min") {
    c.r_min = to_double(l, v);
    if (!(c.r_min > 0.0)) range_error(l, "must be positive");
  } else if (k == "grid.r_max") {
    c.r_max = to_double(l, v);
    if (!(c.r_max > 0.0)) range_error(l, "must be positive");
  } else if (k == "grid.count") {
    const auto n = to_int(l, v);
    if (n < 16) range_error(l, "= " + v + " is below the minimum 16");
    if (n > (1 << 24)) range_error(l, "= " + v + " is above the maximum 16777216");
    c.count = static_cast<std::size_t>(n);
  } else if (k == "flow.t_end") {
    c.t_end = to_double(l, v);
    if (!(c.t_end > 0.0)) range_error(l, "must be positive");
  } else if (k == "flow.dt_safety") {
    c.dt_safety = to_double(l, v);
    if (!(c.dt_safety > 0.0 && c.dt_safety <= 1.0)) range_error(l, "must lie in (0, 1]");
  } else if (k == "flow.output_times") {
    c.output_times = to_list(l, v);
    for (double t : c.output_times)
      if (!(t >= 0.0)) range_error(l, "entries must be non-negative");
  } else if (k == "flow.stepper") {
    if (v == "implicit")
      c.stepper = Stepper::Implicit;
    else if (v == "rk4")
      c.stepper = Stepper::ExplicitRK4;
    else
      range_error(l, "must be implicit or rk4");
  } else if (k == "flow.parallel") {
    c.parallel = to_bool(l, v);
  } else if (k == "compare.epsilon") {
    c.epsilon = to_double(l, v);
    if (!(c.epsilon > 0.0)) range_error(l, "must be positive");
  } else if (k == "compare.candidates") {
    const auto n = to_int(l, v);
    if (n < 1 || n > 100000) range_error(l, "must lie in [1, 100000]");
    c.candidates = static_cast<int>(n);
  } else if (k == "compare.slack") {
    c.slack = to_double(l, v);
    if (!(c.slack >= 0.0)) range_error(l, "must be non-negative");
  } else if (k == "curvature.oracle_points") {
    const auto n = to_int(l, v);
    if (n < 0 || n > 10000) range_error(l, "must lie in [0, 10000]");
    c.oracle_points = static_cast<int>(n);
  } else if (k == "run.seed") {
    std::uint64_t s = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec != std::errc() || p != v.data() + v.size()) range_error(l, "must be an unsigned 64-bit integer");
    c.seed = s;
  } else if (k == "output.dir") {
    c.output_dir = v;
  } else {
    std::ostringstream os;
    os << "line " << l.number << ": unknown key '" << k << "'";
    fail(ErrorCode::UnknownKey, os.str());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "metric.n",       "metric.preset",      "metric.beta",        "metric.c0",     "metric.table",
      "grid.r_min",     "grid.r_max",         "grid.count",         "flow.t_end",    "flow.dt_safety",
      "flow.output_times", "flow.stepper",    "flow.parallel",      "compare.epsilon", "compare.candidates",
      "compare.slack",  "curvature.oracle_points", "run.seed",      "output.dir"};
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string raw;
  int number = 0;
  while (std::getline(ss, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << number << ": expected key = value";
      fail(ErrorCode::ParseError, os.str());
    }
    const Line l{number, trim(line.substr(0, eq))};
    const std::string value = trim(line.substr(eq + 1));
    if (l.key.empty() || value.empty()) {
      std::ostringstream os;
      os << "line " << number << ": empty key or value";
      fail(ErrorCode::ParseError, os.str());
    }
    assign(c, l, value);
  }
  if (!(c.r_min <= 1e-6 * c.r_max)) fail(ErrorCode::OutOfRange, "grid.r_min must be at most 1e-6 * grid.r_max");
  if (c.preset == "custom_table" && c.params.table.empty())
    fail(ErrorCode::OutOfRange, "metric.table is required for the custom_table preset");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
  };
  os << "metric.n = " << c.n << "\n";
  os << "metric.preset = " << c.preset << "\n";
  os << "metric.beta = " << format_double(c.params.beta) << "\n";
  os << "metric.c0 = " << format_double(c.params.c0) << "\n";
  if (!c.params.table.empty()) {
    os << "metric.table = ";
    for (std::size_t i = 0; i < c.params.table.size(); ++i)
      os << (i ? "; " : "") << format_double(c.params.table[i].first) << ":" << format_double(c.params.table[i].second);
    os << "\n";
  }
  os << "grid.r_min = " << format_double(c.r_min) << "\n";
  os << "grid.r_max = " << format_double(c.r_max) << "\n";
  os << "grid.count = " << c.count << "\n";
  os << "flow.t_end = " << format_double(c.t_end) << "\n";
  os << "flow.dt_safety = " << format_double(c.dt_safety) << "\n";
  if (!c.output_times.empty()) os << "flow.output_times = " << list(c.output_times) << "\n";
  os << "flow.stepper = " << (c.stepper == Stepper::Implicit ? "implicit" : "rk4") << "\n";
  os << "flow.parallel = " << (c.parallel ? "true" : "false") << "\n";
  os << "compare.epsilon = " << format_double(c.epsilon) << "\n";
  os << "compare.candidates = " << c.candidates << "\n";
  os << "compare.slack = " << format_double(c.slack) << "\n";
  os << "curvature.oracle_points = " << c.oracle_points << "\n";
  os << "run.seed = " << c.seed << "\n";
  os << "output.dir = " << c.output_dir << "\n";
  return os.str();
}

GridPtr grid_of(const RunConfig& c) { return make_grid(c.r_min, c.r_max, c.count); }

XiSource source_of(const RunConfig& c) { return make_preset(c.preset, c.params); }

FlowConfig flow_config_of(const RunConfig& c) {
  FlowConfig f;
  f.n = c.n;
  f.grid = grid_of(c);
  f.t_end = c.t_end;
  f.dt_safety = c.dt_safety;
  f.output_times = c.output_times;
  f.stepper = c.stepper;
  f.parallel = c.parallel;
  return f;
}

}  // namespace krf
