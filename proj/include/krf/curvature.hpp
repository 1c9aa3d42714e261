#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "krf/radial_metric.hpp"

namespace krf {

// Frame components: A = R(1,1,1,1) radial, B = R(1,1,i,i) mixed, Cc = R(i,i,i,i) spherical.
class CurvatureProfile {
 public:
  Profile A;
  std::optional<Profile> B_, Cc_;
  Profile scalar;
  // The closed form Cc = 2(f-h)/(r f^2) rests on r(f-h) = int_0^r h xi ds.
  // Largest |r(f-h) - int_0^r h xi ds| / (r f) over the grid; measured on the
  // numerators since the closed form loses digits as r -> 0.
  double c_route_discrepancy = 0.0;

  const Profile& B() const;
  const Profile& Cc() const;
};

// d xi / dr at the nodes
Profile xi_prime(const MetricProfile& m);

CurvatureProfile curvature_components(const MetricProfile& m);
Profile scalar_curvature(const MetricProfile& m);

enum class BisectionalSign { Positive, NonNegative, NonPositive, Indefinite, Flat };
const char* to_string(BisectionalSign s);
BisectionalSign bisectional_sign(const MetricProfile& m, double tol = 1e-10);

struct BoundedCurvatureReport {
  bool bounded = true;
  double sup_ratio = 0.0;
  double tail_exponent = 0.0;
  std::vector<double> decade_maxima;  // max |xi'/h| per decade, oldest first
};
BoundedCurvatureReport bounded_curvature_test(const MetricProfile& m, int decades = 4);

// Largest frame component magnitude over the grid (|A| when n = 1).
double curvature_sup(const MetricProfile& m);
// Largest frame component, signed, over the grid; an upper bound for the
// bisectional curvature.
double curvature_max(const MetricProfile& m);

struct OracleResult {
  int n = 0;
  double A = 0, B = 0, Cc = 0, scalar = 0;
  // largest |component| among those the U(n) pattern forces to vanish or to
  // repeat A, B, Cc or Cc/2, measured against the pattern value
  double pattern_residual = 0;
  // largest |component| among those that must vanish
  double off_pattern = 0;
  double magnitude = 0;
  std::vector<std::complex<double>> frame;  // n^4 entries, index ((a*n+b)*n+c)*n+d

  std::complex<double> at(int a, int b, int c, int d) const {
    return frame[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)];
  }
};

OracleResult fd_curvature_oracle(const MetricInterpolant& mi, std::span<const std::complex<double>> z,
                                 double step_factor = 1e-3);
OracleResult fd_curvature_oracle(const MetricProfile& m, std::span<const std::complex<double>> z);

}  // namespace krf
