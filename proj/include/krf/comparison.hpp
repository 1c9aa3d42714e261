#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krf/presets.hpp"
#include "krf/radial_metric.hpp"

namespace krf {

// Metric of the pullback by z -> z/sqrt(k): xi_k(r) = xi(r/k), h_k(r) = h(r/k)/k.
MetricProfile pullback_rescale(const MetricProfile& m, double k);

// (e^-gamma k^(alpha-1), e^gamma k^(beta-1)) bracketing h_k/h.
std::pair<double, double> c1_equivalence_bounds(double gamma, double alpha, double beta, double k);

// xi = 6u^5 - 15u^4 + 10u^3 on [0, 1], 1 beyond; h(0) = 1.
XiSource auxiliary_source();
MetricProfile auxiliary_metric(const GridPtr& grid, int n);

std::uint64_t select_k_for_epsilon(const MetricProfile& m, const MetricProfile& aux, double epsilon);

struct BumpSequence {
  Profile o, o_prime;
  Profile I;  // int_{R_k}^r (1 + o - xi)/s ds, zero below R_k
  std::vector<double> r_seq;
  double max_abs_o = 0.0;
  double max_kr_o_prime = 0.0;  // max k r |o'|
  double max_abs_I = 0.0;
};

// Transition shape on [0, 1] in log2(r/r_i); its derivative is a trapezoid of height 1.25.
double bump_ramp(double v);
double bump_ramp_prime(double v);

BumpSequence build_bump_sequence(const MetricProfile& m, double k, double R_k);

// Smallest grid node R > k with |xi - 1| <= 1/k at every node from R on.
std::optional<double> choose_R_k(const MetricProfile& m, double k);

struct ComparisonResult {
  std::string route;  // "c1" or "c2"
  Profile xi_tilde;
  MetricProfile metric;
  std::uint64_t k = 1;
  double R_k = 0.0;
  std::vector<double> r_seq;
  double epsilon = 0.0;
  double lower = 0.0, upper = 0.0;  // inf and sup of h / h_tilde
  double curvature_sup = 0.0;
  double lower_bound = 0.0;  // 1/eps on the c1 route, 1/(4 e eps) on the c2 route
  bool lower_holds = false;
  std::optional<double> curvature_bound;  // 16 e^(1+delta)/h_aux(1) on the c2 route
  bool curvature_holds = true;
  std::optional<BumpSequence> bumps;
};

ComparisonResult assemble_comparison_metric(const MetricProfile& m, double epsilon);

struct Truncation {
  MetricProfile metric;
  double r_k = 0.0;
  double delta = 0.0;       // blend width in r below r_k
  double distortion = 1.0;  // exp(int |xi - xi_k|/s ds)
};
// Blend width defaults to eight grid cells.
Truncation truncate_xi(const MetricProfile& m, double r_k, int blend_cells = 8);

// h -> lambda h with lambda the largest signed curvature component, so the
// result has curvature at most 1. Non-positively curved inputs are returned as is.
MetricProfile scale_to_unit_curvature(const MetricProfile& m);

// Seeded family xi = beta r/(s + r) with random beta, s and h(0), each scaled
// to unit curvature.
std::vector<MetricProfile> conoid_candidates(const GridPtr& grid, int n, int count, std::uint64_t seed);

struct ObstructionReport {
  double h_at_one = 0.0;
  double e_sup_rh = 0.0;  // e sup r h, the bound the argument actually delivers
  std::vector<double> alphas;
  double max_alpha = 0.0;
  double slack = 0.1;
  bool within_h1 = false;
  bool within_e_sup = false;
};
ObstructionReport cigar_obstruction_bound(const MetricProfile& m, const std::vector<MetricProfile>& candidates,
                                          double slack = 0.1);

}  // namespace krf
