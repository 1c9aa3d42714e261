#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <utility>

#include "krf/grid.hpp"
#include "krf/interp.hpp"

namespace krf {

// |xi(r_min)/r_min| above this is treated as a non-integrable xi/s at the origin.
inline constexpr double kDefaultSlopeCap = 1e4;

struct MetricProfile {
  int n = 1;
  Profile xi, h, f;
  double c0 = 1.0;
  double xi_origin_slope = 0.0;

  const RadialGrid& grid() const { return *xi.grid; }
  const GridPtr& grid_ptr() const { return xi.grid; }
};

Profile h_from_xi(const Profile& xi, double c0, double slope0, double slope_cap = kDefaultSlopeCap);
Profile f_from_h(const Profile& h, double c0);
Profile xi_from_h(const Profile& h);

MetricProfile make_metric(int n, const Profile& xi, double c0, double slope0);

// Rebuilds h = (r f)' and xi = -r h'/h from f alone; c0 and xi'(0) come from a
// linear fit f = a + b r through the first two nodes.
MetricProfile metric_from_f(int n, const Profile& f);

// Smooth evaluation of h, f and their r-derivatives anywhere in [0, r_max].
class MetricInterpolant {
 public:
  explicit MetricInterpolant(const MetricProfile& m);

  int n() const noexcept { return n_; }
  double r_max() const noexcept { return r_max_; }
  double r_min() const noexcept { return r_min_; }
  double h(double r) const;
  double f(double r) const;
  double dh(double r) const;
  // f' = (h - f)/r, with the series limit below r_min
  double df(double r) const;
  double xi(double r) const;

 private:
  int n_;
  double r_min_, r_max_, c0_, slope0_;
  numeric::UniformSpline log_h_, log_f_;
};

using HermitianMatrix = Eigen::MatrixXcd;

HermitianMatrix metric_at_point(const MetricInterpolant& mi, std::span<const std::complex<double>> z);
HermitianMatrix metric_at_point(const MetricProfile& m, std::span<const std::complex<double>> z);

std::pair<double, double> equivalence_bounds(const MetricProfile& m1, const MetricProfile& m2);
std::pair<double, double> equivalence_bounds(const Profile& h1, const Profile& h2);

// rho at every node
Profile geodesic_radius_profile(const MetricProfile& m);
double geodesic_radius(const MetricProfile& m, double r);

// Normalized volume (r f)^n; the unit-sphere constant is dropped.
double ball_volume(const MetricProfile& m, double r);
Profile ball_volume_profile(const MetricProfile& m);

enum class Completeness { Complete, Incomplete, Inconclusive };
const char* to_string(Completeness c);

struct CompletenessReport {
  Completeness verdict = Completeness::Inconclusive;
  double tail_exponent = 0.0;
  double truncated_integral = 0.0;
  double growth_prev_decade = 0.0;
  double growth_last_decade = 0.0;
};

CompletenessReport completeness_test(const MetricProfile& m, double eps_fit = 0.02);

// Samples spaced one decade below r_max: indices of nodes in [r_max/10^decades, r_max].
std::size_t tail_start(const RadialGrid& grid, double decades);

}  // namespace krf
