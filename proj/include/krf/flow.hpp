#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krf/presets.hpp"
#include "krf/radial_metric.hpp"

namespace krf {

enum class Stepper { Implicit, ExplicitRK4 };
enum class TailRule { HoldXi };

struct FlowTolerances {
  double newton = 1e-12;  // relative Newton update
  int max_newton = 20;
  int max_halvings = 20;
  double blowup = 1e12;
};

struct FlowConfig {
  int n = 1;
  GridPtr grid;
  double t_end = 1.0;
  double dt_safety = 0.2;
  TailRule boundary = TailRule::HoldXi;
  FlowTolerances tol;
  std::vector<double> output_times;  // t_end is always stored as well
  Stepper stepper = Stepper::Implicit;
  bool parallel = true;
};

void validate(const FlowConfig& cfg);

struct FlowState {
  double t = 0.0;
  MetricProfile metric;
};

struct Trajectory {
  std::vector<FlowState> states;
  FlowConfig config;
  std::string provenance;
  // (inf, sup) of h(r,t)/h(r,t_0) per stored state
  std::vector<std::pair<double, double>> equivalence;
  std::uint64_t steps = 0;
  std::uint64_t halvings = 0;

  const FlowState& at(double t) const;
};

// Right-hand side f_t of the radial flow for a profile f.
std::vector<double> flow_rhs(const Profile& f, int n, bool parallel = false);

// Explicit parabolic step limit: min over nodes of dx^2 r h / (1 + (n-1) h/f).
double parabolic_step_bound(const MetricProfile& m);

// One classical Runge-Kutta step on f.
FlowState time_step(const FlowState& state, double dt, int n);
// One step of the three-stage L-stable SDIRK scheme on f.
FlowState implicit_step(const FlowState& state, double dt, int n, bool parallel = false);

// Butcher tableau of the implicit scheme, exposed for order-condition tests.
struct SdirkTableau {
  double gamma;
  double a[3][3];
  double b[3];
  double c[3];
};
const SdirkTableau& sdirk_tableau();

Trajectory run_flow(const MetricProfile& initial, const FlowConfig& cfg,
                    const std::string& provenance = "");
Trajectory run_flow(const Profile& xi0, const FlowConfig& cfg);
Trajectory run_flow(const XiSource& src, const FlowConfig& cfg);
// Continue from a stored state; stepping decisions depend only on
// (state.t, output times, t_end), so a resumed run repeats the original.
Trajectory resume_flow(const FlowState& start, const FlowConfig& cfg,
                       const std::string& provenance = "");

Profile log_det_ratio(const Trajectory& traj, double t);

struct FBoundTerms {
  double lhs = 0.0;                 // -F(x0, t)
  double rhs = 0.0;                 // bracket with the constant set to 1
  double m_inf = 0.0;               // inf of F over the ball
  double curvature_integral = 0.0;  // int_0^{2 rho} s k(x0, s) ds
};
FBoundTerms f_lower_bound_rhs(const Trajectory& traj, double t, double rho, double x0_radius);

// Mean of the initial scalar curvature over the geodesic ball of radius s
// about the origin, sampled at the grid radii: (s_i, k_i).
std::vector<std::pair<double, double>> ball_average_curvature(const MetricProfile& m0);

double rescaled_deviation(const Trajectory& traj, double t, double R);

struct LyhReport {
  double worst_margin = std::numeric_limits<double>::infinity();
  double max_scalar = 0.0;
  int checks = 0;
  int failures = 0;
  bool passed = true;
};
// Failures are margins below -rel_tol * scale; scale defaults to max |R| of this trajectory.
LyhReport lyh_monotonicity(const Trajectory& traj, const std::vector<double>& radii,
                           const std::vector<double>& times, double rel_tol = 1e-4,
                           std::optional<double> scale = std::nullopt);

struct RefinementReport {
  std::vector<std::size_t> counts;
  std::vector<double> differences;  // sup |h_{l+1} - h_l| at t_end on the coarse nodes
  std::vector<double> orders;
  bool contracting = false;
  bool passed = false;
};
RefinementReport refinement_uniqueness(const XiSource& xi0, const FlowConfig& cfg, int levels);

double existence_horizon(double K, double epsilon, int n);

// Flow of the pullback by k against the pullback of the flow, on a shared grid.
struct EquivarianceReport {
  double defect = 0.0;
  double error_estimate = 0.0;  // |h_N - h_2N| of the base run on the same nodes
};
EquivarianceReport equivariance_defect(const XiSource& src, const FlowConfig& cfg, double k);

// Smallest constants c with F(r) >= -c - n log r + F(1) and F(r) >= -c + n F(1), r >= 1:
// first: max(0, -min[F(r) + n log r - F(1)]), second: max(0, -min[F(r) - n F(1)]).
struct FTailConstants {
  double first = 0.0, second = 0.0;
};
FTailConstants f_tail_constants(const Trajectory& traj, double t);

}  // namespace krf
