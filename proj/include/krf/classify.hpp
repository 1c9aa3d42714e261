#pragma once

#include <optional>
#include <string>

#include "krf/curvature.hpp"
#include "krf/radial_metric.hpp"

namespace krf {

struct TailLimit {
  std::optional<double> value;
  // "constant", "power" (L + K r^-p), "log" (L + K (log r)^-p) or
  // "inverse-log" (L + K/(log r + c))
  std::string model;
  double residual = 0.0;
};

// Extrapolated limit of xi at infinity from the last decades of the grid.
TailLimit estimate_xi_limit(const MetricProfile& m);

struct ClassifyTolerances {
  double limit_tol = 0.05;       // |L - 1| below this counts as xi -> 1
  double divergence_step = 0.1;  // per-decade growth that counts as divergent
  double stability = 0.1;        // allowed change of gamma under tail truncation
  double growth_band = 0.15;     // volume exponent band, in units of n
};

struct C1Record {
  bool holds = false;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  std::string note;
};
struct C2Record {
  bool holds = false;
  double delta = 0.0;
  std::string note;
};
struct C3Record {
  bool holds = false;
  double b = 0.0;
  std::string note;
};
struct GrowthRecord {
  bool cigar = false, conoid = false;
  double limsup_2n = 0.0, limsup_n = 0.0;
  double exponent = 0.0;  // d log v / d log rho over the last decade
  double chen_zhu_constant = 0.0;
  bool chen_zhu_checked = false, chen_zhu_holds = false;
  std::string note;
};

struct ClassificationReport {
  C1Record c1;
  C2Record c2;
  C3Record c3;
  GrowthRecord growth;
  std::optional<double> xi_limit;
  Completeness completeness = Completeness::Inconclusive;
  BisectionalSign sign = BisectionalSign::Flat;
};

C1Record check_c1(const MetricProfile& m, const ClassifyTolerances& tol = {});
C2Record check_c2(const MetricProfile& m, const ClassifyTolerances& tol = {});
C3Record check_c3(const MetricProfile& m, const ClassifyTolerances& tol = {});
GrowthRecord volume_growth_class(const MetricProfile& m, const ClassifyTolerances& tol = {});
ClassificationReport classify(const MetricProfile& m, const ClassifyTolerances& tol = {});

// Per-decade increments of int (1 - xi)/s ds over the last two decades
// (normalized to exactly one decade), and the running integral from r = 1.
struct TailIntegral {
  double prev_decade = 0.0, last_decade = 0.0;
  double from_one = 0.0;  // int_1^{r_max} (1 - xi)/s ds
  double max_drop = 0.0;  // sup over a < r of -int_a^r (1 - xi)/s ds
};
TailIntegral tail_integral(const MetricProfile& m);

}  // namespace krf
