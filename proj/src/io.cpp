#include "krf/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "krf/error.hpp"

namespace krf {

namespace fs = std::filesystem;

namespace {

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(ErrorCode::CorruptSnapshot, where + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create directory " + parent.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  return out;
}

std::string records_text(const MetricProfile& m) {
  std::string body;
  const RadialGrid& g = m.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    body += format_double(g.r(i)) + "," + format_double(m.xi[i]) + "," + format_double(m.h[i]) + "," +
            format_double(m.f[i]) + "\n";
  }
  return body;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCode::IoError, "cannot format number");
  return std::string(buf, p);
}

void write_csv(const std::string& path, const Table& t) {
  for (const auto& c : t.columns)
    if (c.size() != t.columns.front().size()) fail(ErrorCode::IoError, "ragged table for " + path);
  if (t.header.size() != t.columns.size()) fail(ErrorCode::IoError, "header does not match columns for " + path);
  std::ofstream out = open_out(path);
  for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << t.header[j];
  out << "\n";
  const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << format_double(t.columns[j][i]);
    out << "\n";
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, path + " is empty");
  t.header = split(line, ',');
  t.columns.assign(t.header.size(), {});
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) fail(ErrorCode::IoError, path + ": wrong field count on row " + std::to_string(row));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(cells[j].data(), cells[j].data() + cells[j].size(), v);
      if (ec != std::errc() || p != cells[j].data() + cells[j].size())
        fail(ErrorCode::IoError, path + ": non-numeric field on row " + std::to_string(row));
      t.columns[j].push_back(v);
    }
  }
  return t;
}

Table metric_table(const MetricProfile& m) {
  const auto nodes = m.grid().nodes();
  return {{"r", "xi", "h", "f"}, {std::vector<double>(nodes.begin(), nodes.end()), m.xi.values, m.h.values, m.f.values}};
}

Table curvature_table(const MetricProfile& m, const CurvatureProfile& c) {
  Table t = metric_table(m);
  t.header.push_back("A");
  t.columns.push_back(c.A.values);
  if (c.B_) {
    t.header.push_back("B");
    t.columns.push_back(c.B_->values);
  }
  if (c.Cc_) {
    t.header.push_back("C");
    t.columns.push_back(c.Cc_->values);
  }
  t.header.push_back("R");
  t.columns.push_back(c.scalar.values);
  return t;
}

void export_records(const MetricProfile& m, const std::string& path) { write_csv(path, metric_table(m)); }

void export_records(const MetricProfile& m, const CurvatureProfile& c, const std::string& path) {
  write_csv(path, curvature_table(m, c));
}

void export_records(const ClassificationReport& r, const std::string& path) {
  std::ofstream out = open_out(path);
  auto num = [](double v) { return format_double(v); };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "field,value\n";
  out << "xi_limit," << (r.xi_limit ? num(*r.xi_limit) : "none") << "\n";
  out << "c1," << flag(r.c1.holds) << "\nc1_alpha," << num(r.c1.alpha) << "\nc1_beta," << num(r.c1.beta)
      << "\nc1_gamma," << num(r.c1.gamma) << "\n";
  out << "c2," << flag(r.c2.holds) << "\nc2_delta," << num(r.c2.delta) << "\n";
  out << "c3," << flag(r.c3.holds) << "\nc3_b," << num(r.c3.b) << "\n";
  out << "cigar," << flag(r.growth.cigar) << "\nconoid," << flag(r.growth.conoid) << "\nvolume_exponent,"
      << num(r.growth.exponent) << "\n";
  out << "completeness," << to_string(r.completeness) << "\n";
  out << "bisectional_sign," << to_string(r.sign) << "\n";
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

std::vector<std::string> export_records(const Trajectory& traj, const std::string& dir) {
  std::vector<std::string> files;
  std::vector<double> idx, ts, lo, hi, h0;
  const int width = std::max<int>(4, static_cast<int>(std::to_string(traj.states.size()).size()));
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const MetricProfile& m = traj.states[s].metric;
    Table t = metric_table(m);
    t.header.push_back("R");
    t.columns.push_back(scalar_curvature(m).values);
    t.header.push_back("F");
    t.columns.push_back(log_det_ratio(traj, traj.states[s].t).values);
    std::ostringstream name;
    name << "state_" << std::setw(width) << std::setfill('0') << s << ".csv";
    const std::string path = (fs::path(dir) / name.str()).string();
    write_csv(path, t);
    files.push_back(path);
    idx.push_back(static_cast<double>(s));
    ts.push_back(traj.states[s].t);
    lo.push_back(traj.equivalence[s].first);
    hi.push_back(traj.equivalence[s].second);
    h0.push_back(m.c0);
  }
  const std::string index = (fs::path(dir) / "times.csv").string();
  write_csv(index, {{"index", "t", "h_origin", "ratio_lower", "ratio_upper"}, {idx, ts, h0, lo, hi}});
  files.push_back(index);
  return files;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_snapshot(const FlowState& state, const std::string& path, const std::string& provenance) {
  const MetricProfile& m = state.metric;
  const RadialGrid& g = m.grid();
  for (char c : provenance)
    if (c == '\n' || c == '\r') fail(ErrorCode::IoError, "provenance must be a single line");
  const std::string body = records_text(m);
  std::ofstream out = open_out(path);
  out << "# krfsnap v1\n";
  out << "# n=" << m.n << "\n";
  out << "# t=" << format_double(state.t) << "\n";
  out << "# grid=" << format_double(g.r_min()) << "," << format_double(g.r_max()) << "," << g.size() << "\n";
  out << "# origin=" << format_double(m.c0) << "," << format_double(m.xi_origin_slope) << "\n";
  out << "# provenance=" << provenance << "\n";
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(body)));
  out << "# checksum=" << hex << "\n";
  out << body;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

LoadedSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::string line;
  auto header = [&](const std::string& key) {
    if (!std::getline(in, line)) fail(ErrorCode::CorruptSnapshot, path + ": truncated header");
    const std::string prefix = "# " + key + "=";
    if (line.rfind(prefix, 0) != 0) fail(ErrorCode::CorruptSnapshot, path + ": expected '" + prefix + "'");
    return line.substr(prefix.size());
  };
  if (!std::getline(in, line)) fail(ErrorCode::CorruptSnapshot, path + ": empty file");
  if (line.rfind("# krfsnap ", 0) != 0) fail(ErrorCode::CorruptSnapshot, path + ": not a snapshot");
  if (line != "# krfsnap v1") fail(ErrorCode::VersionMismatch, path + ": unsupported " + line.substr(2));

  const std::string n_text = header("n");
  const double t = parse_double(header("t"), path);
  const auto grid_fields = split(header("grid"), ',');
  const auto origin = split(header("origin"), ',');
  LoadedSnapshot snap;
  snap.provenance = header("provenance");
  const std::string checksum = header("checksum");
  if (grid_fields.size() != 3 || origin.size() != 2) fail(ErrorCode::CorruptSnapshot, path + ": malformed header");

  int n = 0;
  {
    auto [p, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
    if (ec != std::errc() || n < 1) fail(ErrorCode::CorruptSnapshot, path + ": bad dimension");
  }
  std::size_t count = 0;
  {
    const std::string& c = grid_fields[2];
    auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc()) fail(ErrorCode::CorruptSnapshot, path + ": bad node count");
  }

  std::string body, row;
  std::vector<double> r, xi, h, f;
  while (std::getline(in, row)) {
    body += row + "\n";
    const auto cells = split(row, ',');
    if (cells.size() != 4) fail(ErrorCode::CorruptSnapshot, path + ": malformed record");
    r.push_back(parse_double(cells[0], path));
    xi.push_back(parse_double(cells[1], path));
    h.push_back(parse_double(cells[2], path));
    f.push_back(parse_double(cells[3], path));
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(body)));
  if (checksum != hex) fail(ErrorCode::CorruptSnapshot, path + ": checksum mismatch");
  if (r.size() != count) fail(ErrorCode::CorruptSnapshot, path + ": record count does not match header");

  GridPtr grid = make_grid(parse_double(grid_fields[0], path), parse_double(grid_fields[1], path), count);
  for (std::size_t i = 0; i < count; ++i)
    if (r[i] != grid->r(i)) fail(ErrorCode::CorruptSnapshot, path + ": node radii do not match the grid");
  snap.state.t = t;
  snap.state.metric.n = n;
  snap.state.metric.xi = Profile(grid, std::move(xi));
  snap.state.metric.h = Profile(grid, std::move(h));
  snap.state.metric.f = Profile(grid, std::move(f));
  snap.state.metric.c0 = parse_double(origin[0], path);
  snap.state.metric.xi_origin_slope = parse_double(origin[1], path);
  return snap;
}

FlowState snapshot_roundtrip(const FlowState& state, const std::string& path) {
  save_snapshot(state, path);
  return load_snapshot(path).state;
}

DirectoryLock::DirectoryLock(const std::string& dir) : path_((fs::path(dir) / ".krf.lock").string()) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create directory " + dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) fail(ErrorCode::Locked, dir + " is in use by another run (" + path_ + ")");
    fail(ErrorCode::IoError, "cannot create " + path_);
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto w = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

}  // namespace krf
