#include "krf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krf/curvature.hpp"
#include "krf/error.hpp"
#include "krf/interp.hpp"
#include "krf/kernels.hpp"
#include "krf/quadrature.hpp"

namespace krf {

namespace {

using Vec = std::vector<double>;

struct Stepping {
  const RadialGrid& grid;
  int n;
  bool parallel;

  void rhs(const Vec& f, Vec& out) const {
    out.resize(f.size());
    if (parallel)
      kernels::parallel::flow_rhs(f, grid.nodes(), grid.dx(), n, out);
    else
      kernels::serial::flow_rhs(f, grid.nodes(), grid.dx(), n, out);
  }
  void jacobian(const Vec& f, kernels::TriJacobian& jac) const {
    if (parallel)
      kernels::parallel::flow_jacobian(f, grid.nodes(), grid.dx(), n, jac);
    else
      kernels::serial::flow_jacobian(f, grid.nodes(), grid.dx(), n, jac);
  }
};

bool admissible(const Vec& f, const RadialGrid& g) {
  for (double v : f)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  Vec h(f.size()), xi(f.size());
  kernels::h_xi_from_f(f, g.nodes(), g.dx(), h, xi);
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  return true;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

double sup_norm(const Vec& v) {
  double s = 0.0;
  for (double a : v) s = std::max(s, std::abs(a));
  return s;
}

// Newton solve of Z - s F(Z) = known, starting from Z.
bool solve_stage(const Stepping& st, double s, const Vec& known, Vec& Z, const FlowTolerances& tol) {
  kernels::TriJacobian jac;
  Vec F, res(Z.size());
  for (int it = 0; it < tol.max_newton; ++it) {
    st.rhs(Z, F);
    if (!all_finite(F)) return false;
    for (std::size_t i = 0; i < Z.size(); ++i) res[i] = known[i] + s * F[i] - Z[i];
    st.jacobian(Z, jac);
    kernels::solve_shifted(jac, s, res);
    if (!all_finite(res)) return false;
    for (std::size_t i = 0; i < Z.size(); ++i) Z[i] += res[i];
    for (double v : Z)
      if (!(v > 0.0)) return false;
    if (sup_norm(res) <= tol.newton * sup_norm(Z)) return true;
  }
  return false;
}

bool sdirk_advance(const Stepping& st, Vec& f, double dt, const FlowTolerances& tol) {
  const SdirkTableau& T = sdirk_tableau();
  const double s = dt * T.gamma;
  Vec K[3], Z = f, known(f.size());
  for (int i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      double acc = f[j];
      for (int l = 0; l < i; ++l) acc += dt * T.a[i][l] * K[l][j];
      known[j] = acc;
    }
    if (!solve_stage(st, s, known, Z, tol)) return false;
    K[i].resize(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) K[i][j] = (Z[j] - known[j]) / s;
  }
  if (!admissible(Z, st.grid)) return false;
  f = std::move(Z);
  return true;
}

bool rk4_advance(const Stepping& st, Vec& f, double dt) {
  const std::size_t N = f.size();
  Vec k1, k2, k3, k4, y(N);
  st.rhs(f, k1);
  for (std::size_t i = 0; i < N; ++i) y[i] = f[i] + 0.5 * dt * k1[i];
  if (!admissible(y, st.grid)) return false;
  st.rhs(y, k2);
  for (std::size_t i = 0; i < N; ++i) y[i] = f[i] + 0.5 * dt * k2[i];
  if (!admissible(y, st.grid)) return false;
  st.rhs(y, k3);
  for (std::size_t i = 0; i < N; ++i) y[i] = f[i] + dt * k3[i];
  if (!admissible(y, st.grid)) return false;
  st.rhs(y, k4);
  for (std::size_t i = 0; i < N; ++i)
    y[i] = f[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!admissible(y, st.grid) || !all_finite(k4)) return false;
  f = std::move(y);
  return true;
}

struct Advancer {
  Stepping st;
  Stepper kind;
  FlowTolerances tol;
  std::uint64_t steps = 0, halvings = 0;

  bool once(Vec& f, double dt) {
    return kind == Stepper::Implicit ? sdirk_advance(st, f, dt, tol) : rk4_advance(st, f, dt);
  }

  void advance(Vec& f, double dt, int depth) {
    Vec trial = f;
    if (once(trial, dt)) {
      f = std::move(trial);
      ++steps;
      return;
    }
    if (depth >= tol.max_halvings) {
      std::ostringstream os;
      os << "step failed after " << depth << " halvings (dt = " << dt << ")";
      fail(ErrorCode::StabilityViolation, os.str());
    }
    ++halvings;
    advance(f, 0.5 * dt, depth + 1);
    advance(f, 0.5 * dt, depth + 1);
  }
};

Vec h_of(const Vec& f, const RadialGrid& g) {
  Vec h(f.size()), xi(f.size());
  kernels::h_xi_from_f(f, g.nodes(), g.dx(), h, xi);
  return h;
}

std::vector<double> stop_times(double t0, const FlowConfig& cfg) {
  std::vector<double> ts;
  for (double t : cfg.output_times)
    if (t > t0 && t < cfg.t_end) ts.push_back(t);
  ts.push_back(cfg.t_end);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

Trajectory integrate(const MetricProfile& start, double t0, const FlowConfig& cfg,
                     const std::string& provenance) {
  validate(cfg);
  if (!start.grid().same_as(*cfg.grid)) fail(ErrorCode::GridMismatch, "initial data not on the flow grid");
  if (start.n != cfg.n) fail(ErrorCode::InvalidParams, "initial data has a different dimension");
  if (!(cfg.t_end > t0)) fail(ErrorCode::InvalidParams, "t_end must exceed the start time");

  const RadialGrid& g = *cfg.grid;
  Trajectory traj;
  traj.config = cfg;
  traj.provenance = provenance;
  FlowState first{t0, metric_from_f(cfg.n, start.f)};
  traj.states.push_back(first);
  traj.equivalence.emplace_back(1.0, 1.0);

  Advancer adv{Stepping{g, cfg.n, cfg.parallel}, cfg.stepper, cfg.tol};
  double dt_nominal = cfg.dt_safety * g.dx();
  if (cfg.stepper == Stepper::ExplicitRK4) dt_nominal = cfg.dt_safety * parabolic_step_bound(first.metric);

  const Vec h0 = first.metric.h.values;
  Vec f = first.metric.f.values;
  double t = t0;
  for (double target : stop_times(t0, cfg)) {
    const double span = target - t;
    const auto m = static_cast<std::uint64_t>(std::max(1.0, std::ceil(span / dt_nominal - 1e-9)));
    const double dt = span / static_cast<double>(m);
    for (std::uint64_t k = 0; k < m; ++k) {
      adv.advance(f, dt, 0);
      const Vec h = h_of(f, g);
      double worst = 1.0;
      for (std::size_t i = 0; i < h.size(); ++i) worst = std::max({worst, h[i] / h0[i], h0[i] / h[i]});
      if (worst > cfg.tol.blowup) {
        std::ostringstream os;
        os << "metric ratio " << worst << " at t = " << t + dt * static_cast<double>(k + 1);
        fail(ErrorCode::BlowUp, os.str());
      }
    }
    t = target;
    FlowState s{t, metric_from_f(cfg.n, Profile(cfg.grid, f))};
    traj.equivalence.push_back(equivalence_bounds(s.metric.h, first.metric.h));
    traj.states.push_back(std::move(s));
  }
  traj.steps = adv.steps;
  traj.halvings = adv.halvings;
  return traj;
}

}  // namespace

void validate(const FlowConfig& cfg) {
  if (cfg.n < 1) fail(ErrorCode::InvalidParams, "complex dimension must be at least 1");
  if (!cfg.grid) fail(ErrorCode::InvalidGrid, "flow configuration has no grid");
  if (!(cfg.dt_safety > 0.0 && cfg.dt_safety <= 1.0))
    fail(ErrorCode::InvalidParams, "dt_safety must lie in (0, 1]");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) fail(ErrorCode::InvalidParams, "t_end must be positive");
  if (cfg.tol.max_newton < 1 || cfg.tol.max_halvings < 0 || !(cfg.tol.newton > 0.0) || !(cfg.tol.blowup > 1.0))
    fail(ErrorCode::InvalidParams, "invalid flow tolerances");
  for (double t : cfg.output_times)
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::InvalidParams, "output times must be non-negative");
}

const FlowState& Trajectory::at(double t) const {
  for (const FlowState& s : states)
    if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
  std::ostringstream os;
  os << "no stored state at t = " << t;
  fail(ErrorCode::TimeNotStored, os.str());
}

const SdirkTableau& sdirk_tableau() {
  static const SdirkTableau T = [] {
    const double g = 0.435866521508459;
    const double tau = 0.5 * (1.0 + g);
    const double b1 = -(6.0 * g * g - 16.0 * g + 1.0) / 4.0;
    const double b2 = (6.0 * g * g - 20.0 * g + 5.0) / 4.0;
    SdirkTableau t{};
    t.gamma = g;
    t.a[0][0] = g;
    t.a[1][0] = tau - g;
    t.a[1][1] = g;
    t.a[2][0] = b1;
    t.a[2][1] = b2;
    t.a[2][2] = g;
    t.b[0] = b1;
    t.b[1] = b2;
    t.b[2] = g;
    t.c[0] = g;
    t.c[1] = tau;
    t.c[2] = 1.0;
    return t;
  }();
  return T;
}

std::vector<double> flow_rhs(const Profile& f, int n, bool parallel) {
  Vec out;
  Stepping{*f.grid, n, parallel}.rhs(f.values, out);
  return out;
}

double parabolic_step_bound(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.dx() * g.dx() * g.r(i) * m.h[i] / (1.0 + (m.n - 1) * m.h[i] / m.f[i]);
    bound = std::min(bound, d);
  }
  return bound;
}

FlowState time_step(const FlowState& state, double dt, int n) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParams, "time step must be positive");
  Vec f = state.metric.f.values;
  if (!rk4_advance(Stepping{state.metric.grid(), n, false}, f, dt))
    fail(ErrorCode::StabilityViolation, "explicit step left the admissible set");
  return {state.t + dt, metric_from_f(n, Profile(state.metric.grid_ptr(), std::move(f)))};
}

FlowState implicit_step(const FlowState& state, double dt, int n, bool parallel) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParams, "time step must be positive");
  Vec f = state.metric.f.values;
  if (!sdirk_advance(Stepping{state.metric.grid(), n, parallel}, f, dt, FlowTolerances{}))
    fail(ErrorCode::StabilityViolation, "implicit step did not converge");
  return {state.t + dt, metric_from_f(n, Profile(state.metric.grid_ptr(), std::move(f)))};
}

Trajectory run_flow(const MetricProfile& initial, const FlowConfig& cfg, const std::string& provenance) {
  return integrate(initial, 0.0, cfg, provenance);
}

Trajectory run_flow(const Profile& xi0, const FlowConfig& cfg) {
  validate(cfg);
  const double slope0 = xi0[0] / xi0.grid->r_min();
  return integrate(make_metric(cfg.n, xi0, 1.0, slope0), 0.0, cfg, "profile");
}

Trajectory run_flow(const XiSource& src, const FlowConfig& cfg) {
  validate(cfg);
  return integrate(build_metric(src, cfg.grid, cfg.n), 0.0, cfg, src.name);
}

Trajectory resume_flow(const FlowState& start, const FlowConfig& cfg, const std::string& provenance) {
  return integrate(start.metric, start.t, cfg, provenance);
}

Profile log_det_ratio(const Trajectory& traj, double t) {
  const MetricProfile& a = traj.at(t).metric;
  const MetricProfile& b = traj.states.front().metric;
  Vec F(a.h.size());
  for (std::size_t i = 0; i < F.size(); ++i)
    F[i] = std::log(a.h[i] / b.h[i]) + (a.n - 1) * std::log(a.f[i] / b.f[i]);
  return Profile(a.grid_ptr(), std::move(F));
}

namespace {

struct BallData {
  Vec s, volume, weighted;  // geodesic radius, (r f)^n, int R d(r f)^n
};

BallData ball_data(const MetricProfile& m0) {
  const RadialGrid& g = m0.grid();
  const Profile R = scalar_curvature(m0);
  const Profile rho = geodesic_radius_profile(m0);
  BallData d;
  d.s = rho.values;
  d.volume.resize(g.size());
  Vec integrand(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rf = g.r(i) * m0.f[i];
    d.volume[i] = std::pow(rf, m0.n);
    integrand[i] = R[i] * m0.n * std::pow(rf, m0.n - 1) * m0.h[i] * g.r(i);
  }
  d.weighted = numeric::cumulative_integral(integrand, g.dx());
  for (double& v : d.weighted) v += R[0] * d.volume[0];
  return d;
}

}  // namespace

std::vector<std::pair<double, double>> ball_average_curvature(const MetricProfile& m0) {
  const BallData d = ball_data(m0);
  std::vector<std::pair<double, double>> out(d.s.size());
  for (std::size_t i = 0; i < d.s.size(); ++i) out[i] = {d.s[i], d.weighted[i] / d.volume[i]};
  return out;
}

FBoundTerms f_lower_bound_rhs(const Trajectory& traj, double t, double rho, double x0_radius) {
  if (!(rho > 0.0)) fail(ErrorCode::InvalidParams, "ball radius must be positive");
  if (x0_radius < 0.0) fail(ErrorCode::InvalidParams, "centre radius must be non-negative");
  const MetricProfile& m0 = traj.states.front().metric;
  const RadialGrid& g = m0.grid();
  const BallData d = ball_data(m0);
  const Profile F = log_det_ratio(traj, t);
  const double s_c = x0_radius > 0.0 ? geodesic_radius(m0, x0_radius) : 0.0;
  if (s_c + 2.0 * rho > d.s.back()) fail(ErrorCode::BallOutOfDomain, "ball leaves the grid");

  // A ball about an off-axis centre is replaced by the U(n)-invariant shell
  // of geodesic radii [s_c - s, s_c + s], which contains it.
  numeric::MonotoneCubic vol(d.s, d.volume), wsum(d.s, d.weighted);
  auto cumulative = [&](const numeric::MonotoneCubic& q, double s) {
    if (s <= d.s.front()) {
      const double ratio = std::pow(s / d.s.front(), 2 * m0.n);
      return q(d.s.front()) * ratio;
    }
    return q(s);
  };
  const double k_origin = d.weighted.front() / d.volume.front();
  auto k_avg = [&](double s) {
    const double a = std::max(0.0, s_c - s), b = s_c + s;
    const double dv = cumulative(vol, b) - cumulative(vol, a);
    if (!(dv > 0.0)) return k_origin;
    return (cumulative(wsum, b) - cumulative(wsum, a)) / dv;
  };

  const int samples = 4000;
  const double ds = 2.0 * rho / samples;
  double integral = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double s = ds * i;
    integral += (i == samples ? 0.5 : 1.0) * s * k_avg(s) * ds;
  }

  double m_inf = std::numeric_limits<double>::infinity();
  if (s_c <= rho) m_inf = F[0];
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(d.s[i] - s_c) <= rho) m_inf = std::min(m_inf, F[i]);

  const double lhs_F = x0_radius > 0.0 ? numeric::MonotoneCubic(d.s, F.values)(s_c) : F[0];
  FBoundTerms out;
  out.lhs = -lhs_F;
  out.m_inf = m_inf;
  out.curvature_integral = integral;
  out.rhs = (1.0 + t * (1.0 - m_inf) / (rho * rho)) * integral - t * m_inf * (1.0 - m_inf) / (rho * rho);
  return out;
}

double rescaled_deviation(const Trajectory& traj, double t, double R) {
  const MetricProfile& m = traj.at(t).metric;
  const RadialGrid& g = m.grid();
  if (!(R > 0.0) || R > g.r_max() / 10.0) fail(ErrorCode::OutOfDomain, "R must lie in (0, r_max/10]");
  double dev = 0.0;
  for (std::size_t i = 0; i < g.size() && g.r(i) <= R; ++i)
    dev = std::max({dev, std::abs(m.h[i] / m.c0 - 1.0), std::abs(m.f[i] / m.c0 - 1.0)});
  return dev;
}

LyhReport lyh_monotonicity(const Trajectory& traj, const std::vector<double>& radii,
                           const std::vector<double>& times, double rel_tol, std::optional<double> scale) {
  if (times.size() < 2) fail(ErrorCode::InvalidParams, "need at least two times");
  std::vector<Profile> R;
  for (double t : times) R.push_back(scalar_curvature(traj.at(t).metric));
  const RadialGrid& g = *R.front().grid;
  LyhReport rep;
  for (const Profile& p : R)
    for (double v : p.values) rep.max_scalar = std::max(rep.max_scalar, std::abs(v));
  const double tol = rel_tol * scale.value_or(rep.max_scalar);
  for (double r : radii) {
    if (r < g.r_min() || r > g.r_max()) fail(ErrorCode::OutOfDomain, "sample radius outside the grid");
    std::size_t i = g.locate(r);
    if (i + 1 < g.size() && std::abs(g.r(i + 1) - r) < std::abs(g.r(i) - r)) ++i;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const double margin = times[k + 1] * R[k + 1][i] - times[k] * R[k][i];
      rep.worst_margin = std::min(rep.worst_margin, margin);
      ++rep.checks;
      if (margin < -tol) ++rep.failures;
    }
  }
  rep.passed = rep.failures == 0;
  return rep;
}

RefinementReport refinement_uniqueness(const XiSource& xi0, const FlowConfig& cfg, int levels) {
  validate(cfg);
  if (levels < 2) fail(ErrorCode::InvalidParams, "need at least two refinement levels");
  RefinementReport rep;
  std::vector<Vec> h_on_base;
  for (int l = 0; l < levels; ++l) {
    FlowConfig c = cfg;
    c.grid = refine_grid(*cfg.grid, l);
    c.output_times.clear();
    const Trajectory tr = run_flow(xi0, c);
    const Profile& h = tr.states.back().metric.h;
    const std::size_t stride = std::size_t{1} << l;
    Vec base(cfg.grid->size());
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = h[i * stride];
    h_on_base.push_back(std::move(base));
    rep.counts.push_back(c.grid->size());
  }
  for (int l = 0; l + 1 < levels; ++l) {
    double d = 0.0;
    for (std::size_t i = 0; i < h_on_base[l].size(); ++i)
      d = std::max(d, std::abs(h_on_base[l + 1][i] - h_on_base[l][i]));
    rep.differences.push_back(d);
  }
  rep.contracting = true;
  for (std::size_t l = 0; l + 1 < rep.differences.size(); ++l) {
    rep.orders.push_back(std::log2(rep.differences[l] / rep.differences[l + 1]));
    if (!(rep.differences[l + 1] < rep.differences[l])) rep.contracting = false;
  }
  rep.passed = rep.contracting && (rep.orders.empty() || rep.orders.back() >= 1.5);
  return rep;
}

double existence_horizon(double K, double epsilon, int n) {
  if (!(epsilon > 0.0)) fail(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
  if (n < 1) fail(ErrorCode::InvalidParams, "complex dimension must be at least 1");
  if (!(K > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * n * K * epsilon);
}

EquivarianceReport equivariance_defect(const XiSource& src, const FlowConfig& cfg, double k) {
  validate(cfg);
  const XiSource pulled = rescaled(src, k);
  FlowConfig c = cfg;
  c.output_times.clear();
  const Trajectory base = run_flow(src, c);
  const Trajectory moved = run_flow(pulled, c);
  FlowConfig fine = c;
  fine.grid = refine_grid(*cfg.grid, 1);
  const Trajectory base_fine = run_flow(src, fine);

  const RadialGrid& g = *cfg.grid;
  const Profile& hb = base.states.back().metric.h;
  const Profile& hm = moved.states.back().metric.h;
  const Profile& hf = base_fine.states.back().metric.h;
  Vec log_hb(hb.size());
  for (std::size_t i = 0; i < hb.size(); ++i) log_hb[i] = std::log(hb[i]);
  numeric::UniformSpline spline(log_hb, g.x_min(), g.dx());

  // Both closures sit at r_max; only compare well inside either domain.
  EquivarianceReport rep;
  const double lo = 10.0 * g.r_min() * k, hi = g.r_max() / (100.0 * k);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    if (r < lo || r > hi) continue;
    const double pulled_back = std::exp(spline(std::log(r / k))) / k;
    rep.defect = std::max(rep.defect, std::abs(hm[i] - pulled_back));
    rep.error_estimate = std::max(rep.error_estimate, std::abs(hf[2 * i] - hb[i]));
  }
  return rep;
}

FTailConstants f_tail_constants(const Trajectory& traj, double t) {
  const Profile F = log_det_ratio(traj, t);
  const RadialGrid& g = *F.grid;
  const int n = traj.states.front().metric.n;
  const std::size_t one = g.first_at_or_above(1.0);
  if (one >= g.size()) fail(ErrorCode::OutOfDomain, "grid does not reach r = 1");
  Vec Fv = F.values;
  numeric::UniformSpline spline(Fv, g.x_min(), g.dx());
  const double F1 = spline(0.0);
  double a = std::numeric_limits<double>::infinity(), b = a;
  for (std::size_t i = one; i < g.size(); ++i) {
    a = std::min(a, F[i] + n * std::log(g.r(i)) - F1);
    b = std::min(b, F[i] - n * F1);
  }
  return {std::max(0.0, -a), std::max(0.0, -b)};
}

}  // namespace krf
