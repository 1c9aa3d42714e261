#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "krf/classify.hpp"
#include "krf/curvature.hpp"
#include "krf/flow.hpp"

namespace krf {

// Shortest decimal that parses back to the same double; -0 prints as "0".
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

Table metric_table(const MetricProfile& m);
Table curvature_table(const MetricProfile& m, const CurvatureProfile& c);

void export_records(const MetricProfile& m, const std::string& path);
void export_records(const MetricProfile& m, const CurvatureProfile& c, const std::string& path);
// field,value rows
void export_records(const ClassificationReport& r, const std::string& path);
// <dir>/state_<index>.csv per stored time (r, xi, h, f, R, F) and <dir>/times.csv
std::vector<std::string> export_records(const Trajectory& traj, const std::string& dir);

std::uint64_t fnv1a(const std::string& bytes);

void save_snapshot(const FlowState& state, const std::string& path, const std::string& provenance = "");
struct LoadedSnapshot {
  FlowState state;
  std::string provenance;
};
LoadedSnapshot load_snapshot(const std::string& path);
FlowState snapshot_roundtrip(const FlowState& state, const std::string& path);

// Exclusive claim on an output directory via <dir>/.krf.lock (created with
// O_EXCL); released on destruction.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::string& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::string path_;
};

}  // namespace krf
