#include "krf/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "krf/classify.hpp"
#include "krf/curvature.hpp"
#include "krf/error.hpp"
#include "krf/quadrature.hpp"

namespace krf {

namespace {

constexpr double kRampHeight = 1.25;
constexpr double kRampWidth = 0.2;
constexpr double kMaxK = 1152921504606846976.0;  // 2^60

double smootherstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

// int_0^u smootherstep
double smootherstep_integral(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double u4 = u * u * u * u;
  return u4 * (u * u - 3.0 * u + 2.5);
}

double inf_ratio(const Profile& a, const Profile& b) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) lo = std::min(lo, a[i] / b[i]);
  return lo;
}

// Power-law decay exponent of h over the last decade.
double tail_decay(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  const std::size_t s = tail_start(g, 1.0);
  std::vector<double> x, y;
  for (std::size_t i = s; i < g.size(); ++i) {
    x.push_back(g.x(i));
    y.push_back(std::log(m.h[i]));
  }
  return -numeric::fit_slope(x, y);
}

class AuxEvaluator {
 public:
  explicit AuxEvaluator(const MetricProfile& aux) : interp_(aux), r_max_(aux.grid().r_max()), h_end_(aux.h.values.back()) {}
  double h(double r) const { return r > r_max_ ? h_end_ * r_max_ / r : interp_.h(r); }
  double h_k(double r, double k) const { return h(r / k) / k; }

 private:
  MetricInterpolant interp_;
  double r_max_, h_end_;
};

}  // namespace

MetricProfile pullback_rescale(const MetricProfile& m, double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) fail(ErrorCode::InvalidK, "pullback factor must be at least 1");
  const MetricInterpolant mi(m);
  const RadialGrid& g = m.grid();
  std::vector<double> xi(g.size()), h(g.size()), f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = g.r(i) / k;
    xi[i] = mi.xi(u);
    h[i] = mi.h(u) / k;
    f[i] = mi.f(u) / k;
  }
  MetricProfile out;
  out.n = m.n;
  out.xi = Profile(m.grid_ptr(), std::move(xi));
  out.h = Profile(m.grid_ptr(), std::move(h));
  out.f = Profile(m.grid_ptr(), std::move(f));
  out.c0 = m.c0 / k;
  out.xi_origin_slope = m.xi_origin_slope / k;
  return out;
}

std::pair<double, double> c1_equivalence_bounds(double gamma, double alpha, double beta, double k) {
  if (!(alpha >= 0.0) || !(alpha <= beta) || !(beta < 1.0) || !(gamma >= 0.0) || !(k >= 1.0))
    fail(ErrorCode::InvalidC1Parameters, "need 0 <= alpha <= beta < 1, gamma >= 0, k >= 1");
  return {std::exp(-gamma) * std::pow(k, alpha - 1.0), std::exp(gamma) * std::pow(k, beta - 1.0)};
}

XiSource auxiliary_source() {
  XiSource s;
  s.name = "auxiliary";
  s.xi = [](double r) { return smootherstep(r); };
  s.slope0 = 0.0;
  s.c0 = 1.0;
  s.description = "smootherstep to 1 on [0,1]";
  return s;
}

MetricProfile auxiliary_metric(const GridPtr& grid, int n) { return build_metric(auxiliary_source(), grid, n); }

std::uint64_t select_k_for_epsilon(const MetricProfile& m, const MetricProfile& aux, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
  if (!check_c2(m).holds) fail(ErrorCode::NotC2, "metric does not satisfy the divergent-tail condition");
  if (std::abs(aux.c0 - 1.0) > 1e-12) fail(ErrorCode::InvalidParams, "auxiliary metric must have h(0) = 1");
  const RadialGrid& ga = aux.grid();
  for (std::size_t i = ga.first_at_or_above(1.0); i < ga.size(); ++i)
    if (std::abs(aux.xi[i] - 1.0) > 1e-12) fail(ErrorCode::InvalidParams, "auxiliary xi must equal 1 for r >= 1");

  const AuxEvaluator A(aux);
  const RadialGrid& g = m.grid();
  const double p = tail_decay(m);
  if (p > 1.0 + 1e-6) fail(ErrorCode::NotC2, "h decays faster than 1/r");
  const double h_end = m.h.values.back();

  auto ok = [&](double k) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (A.h_k(g.r(i), k) > epsilon * m.h[i]) return false;
    // beyond the grid: h ~ h_end (r_max/r)^p against the auxiliary 1/r tail
    const double r_end = std::max(10.0 * k, 10.0 * g.r_max());
    for (double r = g.r_max() * std::pow(10.0, 0.05); r <= r_end; r *= std::pow(10.0, 0.05))
      if (A.h_k(r, k) > epsilon * h_end * std::pow(g.r_max() / r, p)) return false;
    return true;
  };

  std::uint64_t hi = 1;
  while (!ok(static_cast<double>(hi))) {
    if (hi >= (std::uint64_t{1} << 60)) {
      std::ostringstream os;
      os << "no k <= 2^60 gives h_aux,k <= " << epsilon << " h";
      fail(ErrorCode::NoKFound, os.str());
    }
    hi *= 2;
  }
  if (hi == 1) return 1;
  std::uint64_t lo = hi / 2;  // known to fail
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (ok(static_cast<double>(mid)))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double bump_ramp(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  if (v > 0.5) return 1.0 - bump_ramp(1.0 - v);
  if (v <= kRampWidth) return kRampHeight * kRampWidth * smootherstep_integral(v / kRampWidth);
  return kRampHeight * (0.5 * kRampWidth + (v - kRampWidth));
}

double bump_ramp_prime(double v) {
  if (v <= 0.0 || v >= 1.0) return 0.0;
  if (v > 0.5) return bump_ramp_prime(1.0 - v);
  if (v <= kRampWidth) return kRampHeight * smootherstep(v / kRampWidth);
  return kRampHeight;
}

namespace {

struct BumpShape {
  double k;
  const std::vector<double>& r_seq;

  // (o, o')
  std::pair<double, double> at(double r) const {
    if (r_seq.empty() || r < r_seq.front()) return {0.0, 0.0};
    std::size_t i = static_cast<std::size_t>(std::upper_bound(r_seq.begin(), r_seq.end(), r) - r_seq.begin()) - 1;
    const double ri = r_seq[i];
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    if (r >= 2.0 * ri) return {sign / k, 0.0};
    const double v = std::log2(r / ri);
    const double dv = 1.0 / (r * std::numbers::ln2);
    if (i == 0) return {bump_ramp(v) / k, bump_ramp_prime(v) * dv / k};
    return {-sign * (1.0 - 2.0 * bump_ramp(v)) / k, sign * 2.0 * bump_ramp_prime(v) * dv / k};
  }
};

}  // namespace

std::optional<double> choose_R_k(const MetricProfile& m, double k) {
  const RadialGrid& g = m.grid();
  std::size_t j = g.size();
  while (j > 0 && std::abs(m.xi[j - 1] - 1.0) <= 1.0 / k) --j;
  if (j == g.size()) return std::nullopt;
  while (j < g.size() && !(g.r(j) > k)) ++j;
  if (j >= g.size()) return std::nullopt;
  return g.r(j);
}

BumpSequence build_bump_sequence(const MetricProfile& m, double k, double R_k) {
  if (!(k >= 2.0)) fail(ErrorCode::InvalidK, "bump construction needs k >= 2");
  if (!(R_k > k)) fail(ErrorCode::InvalidParams, "R_k must exceed k");
  const RadialGrid& g = m.grid();
  const std::size_t j0 = g.first_at_or_above(R_k * (1.0 - 1e-12));
  if (j0 >= g.size() || std::abs(g.r(j0) - R_k) > 1e-9 * R_k)
    fail(ErrorCode::InvalidParams, "R_k must be a grid node");
  for (std::size_t j = j0; j < g.size(); ++j)
    if (std::abs(m.xi[j] - 1.0) > 1.0 / k)
      fail(ErrorCode::HypothesisViolated, "xi leaves [1 - 1/k, 1 + 1/k] beyond R_k");

  auto too_short = [&](double needed) {
    std::ostringstream os;
    os << "first sign change does not fit: needs r_max >= " << needed << " (have " << g.r_max() << ")";
    fail(ErrorCode::DomainTooShort, os.str());
  };
  if (2.0 * R_k >= g.r_max()) too_short(4.0 * R_k);

  BumpSequence out;
  out.r_seq.push_back(R_k);
  const BumpShape shape{k, out.r_seq};

  // Locate r_1, r_2, ... as the first nodes past 2 r_i where the running
  // integral from 2 R_k reaches +1, -1, +1, ...
  double J = 0.0, target = 1.0;
  std::size_t j = g.first_at_or_above(2.0 * R_k);
  double prev_g = 1.0 + shape.at(g.r(j)).first - m.xi[j];
  J = prev_g * (g.x(j) - std::log(2.0 * R_k));
  for (++j; j < g.size(); ++j) {
    const double gj = 1.0 + shape.at(g.r(j)).first - m.xi[j];
    J += 0.5 * g.dx() * (prev_g + gj);
    prev_g = gj;
    if (g.r(j) > 2.0 * out.r_seq.back() && (target > 0 ? J >= target : J <= target)) {
      out.r_seq.push_back(g.r(j));
      target = -target;
    }
  }
  if (out.r_seq.size() < 2) {
    const double rate = std::max(prev_g, 1e-300);
    too_short(g.r_max() * std::exp((1.0 - J) / rate));
  }

  std::vector<double> o(g.size(), 0.0), op(g.size(), 0.0), integrand(g.size() - j0), I(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) std::tie(o[i], op[i]) = shape.at(g.r(i));
  for (std::size_t i = j0; i < g.size(); ++i) integrand[i - j0] = 1.0 + o[i] - m.xi[i];
  if (integrand.size() >= 4) {
    const std::vector<double> c = numeric::cumulative_integral(integrand, g.dx());
    std::copy(c.begin(), c.end(), I.begin() + static_cast<std::ptrdiff_t>(j0));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.max_abs_o = std::max(out.max_abs_o, std::abs(o[i]));
    out.max_kr_o_prime = std::max(out.max_kr_o_prime, k * g.r(i) * std::abs(op[i]));
    out.max_abs_I = std::max(out.max_abs_I, std::abs(I[i]));
  }
  out.o = Profile(m.grid_ptr(), std::move(o));
  out.o_prime = Profile(m.grid_ptr(), std::move(op));
  out.I = Profile(m.grid_ptr(), std::move(I));
  return out;
}

ComparisonResult assemble_comparison_metric(const MetricProfile& m, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
  ComparisonResult res;
  res.epsilon = epsilon;

  const C1Record c1 = check_c1(m);
  if (c1.holds) {
    res.route = "c1";
    const double kk = std::ceil(std::pow(std::exp(c1.gamma) / epsilon, 1.0 / (1.0 - c1.beta)));
    const double k = std::max(1.0, std::min(kk, kMaxK));
    res.k = static_cast<std::uint64_t>(k);
    res.metric = pullback_rescale(m, k);
    res.lower_bound = 1.0 / epsilon;
  } else {
    if (!check_c2(m).holds) fail(ErrorCode::NotC1OrC2, "metric satisfies neither tail condition");
    const C2Record c2 = check_c2(m);
    res.route = "c2";
    const MetricProfile aux = auxiliary_metric(m.grid_ptr(), m.n);
    const double k = static_cast<double>(std::max<std::uint64_t>(select_k_for_epsilon(m, aux, epsilon), 2));
    res.k = static_cast<std::uint64_t>(k);
    const std::optional<double> R = choose_R_k(m, k);
    if (!R) {
      std::ostringstream os;
      os << "|xi - 1| <= 1/" << k << " is not reached beyond r = " << k << " on the grid";
      fail(ErrorCode::DomainTooShort, os.str());
    }
    res.R_k = *R;
    BumpSequence b = build_bump_sequence(m, k, *R);
    res.r_seq = b.r_seq;
    const XiSource aux_src = auxiliary_source();
    const RadialGrid& g = m.grid();
    std::vector<double> xt(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) xt[i] = aux_src.xi(g.r(i) / k) + b.o[i];
    res.metric = make_metric(m.n, Profile(m.grid_ptr(), std::move(xt)), 1.0 / k, 0.0);
    res.bumps = std::move(b);
    res.lower_bound = 1.0 / (4.0 * std::numbers::e * epsilon);
    const double h_aux_one = MetricInterpolant(aux).h(1.0);
    res.curvature_bound = 16.0 * std::exp(1.0 + c2.delta) / h_aux_one;
  }
  res.xi_tilde = res.metric.xi;
  const auto [lo, hi] = equivalence_bounds(m.h, res.metric.h);
  res.lower = lo;
  res.upper = hi;
  res.curvature_sup = curvature_sup(res.metric);
  res.lower_holds = res.lower >= res.lower_bound;
  if (res.curvature_bound) res.curvature_holds = res.curvature_sup <= *res.curvature_bound;
  return res;
}

Truncation truncate_xi(const MetricProfile& m, double r_k, int blend_cells) {
  const RadialGrid& g = m.grid();
  if (blend_cells < 1) fail(ErrorCode::InvalidParams, "blend width must be at least one cell");
  const std::size_t j = g.first_at_or_above(r_k * (1.0 - 1e-12));
  if (j >= g.size() || std::abs(g.r(j) - r_k) > 1e-9 * r_k) fail(ErrorCode::InvalidParams, "r_k must be a grid node");
  if (j < static_cast<std::size_t>(blend_cells)) fail(ErrorCode::OutOfDomain, "r_k too close to r_min");
  const double xi_k = m.xi[j];
  if (!(xi_k < 1.0)) fail(ErrorCode::XiAtOne, "xi(r_k) must be below 1");

  const double w = blend_cells * g.dx();
  const double x_k = g.x(j);
  std::vector<double> xi = m.xi.values;
  std::vector<double> gap(g.size(), 0.0);
  for (std::size_t i = j - static_cast<std::size_t>(blend_cells); i < g.size(); ++i) {
    const double s = i >= j ? 1.0 : smootherstep((g.x(i) - (x_k - w)) / w);
    xi[i] = m.xi[i] + (xi_k - m.xi[i]) * s;
    if (i <= j) gap[i] = std::abs(m.xi[i] - xi[i]);
  }
  Truncation t;
  t.r_k = r_k;
  t.delta = r_k * (1.0 - std::exp(-w));
  t.distortion = std::exp(numeric::cumulative_trapezoid(gap, g.dx()).back());
  t.metric = make_metric(m.n, Profile(m.grid_ptr(), std::move(xi)), m.c0, m.xi_origin_slope);
  return t;
}

MetricProfile scale_to_unit_curvature(const MetricProfile& m) {
  const double K = curvature_max(m);
  if (!(K > 0.0)) return m;
  MetricProfile out = m;
  for (double& v : out.h.values) v *= K;
  for (double& v : out.f.values) v *= K;
  out.c0 *= K;
  return out;
}

std::vector<MetricProfile> conoid_candidates(const GridPtr& grid, int n, int count, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::InvalidParams, "candidate count must be positive");
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  struct Draw {
    double beta, scale, c0;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(count));
  for (Draw& d : draws) {
    d.beta = 0.05 + 0.9 * unit();
    d.scale = std::pow(10.0, 2.0 * unit() - 1.0);
    d.c0 = std::pow(10.0, 2.0 * unit() - 1.0);
  }
  std::vector<MetricProfile> out(draws.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(draws.size()); ++i) {
    const Draw d = draws[static_cast<std::size_t>(i)];
    XiSource s;
    s.name = "conoid_candidate";
    s.xi = [d](double r) { return d.beta * r / (d.scale + r); };
    s.slope0 = d.beta / d.scale;
    s.c0 = d.c0;
    out[static_cast<std::size_t>(i)] = scale_to_unit_curvature(build_metric(s, grid, n));
  }
  return out;
}

ObstructionReport cigar_obstruction_bound(const MetricProfile& m, const std::vector<MetricProfile>& candidates,
                                          double slack) {
  if (!check_c3(m).holds) fail(ErrorCode::HypothesisViolated, "int_1^r (1 - xi)/s ds is not bounded");
  ObstructionReport rep;
  rep.slack = slack;
  rep.h_at_one = MetricInterpolant(m).h(1.0);
  double sup_rh = 0.0;
  for (std::size_t i = 0; i < m.h.size(); ++i) sup_rh = std::max(sup_rh, m.grid().r(i) * m.h[i]);
  rep.e_sup_rh = std::numbers::e * sup_rh;
  rep.alphas.resize(candidates.size());
  for (const MetricProfile& c : candidates) {
    require_same_grid(m.h, c.h);
    if (curvature_max(c) > 1.0 + 1e-6)
      fail(ErrorCode::CandidateCurvatureTooLarge, "candidate curvature exceeds 1; rescale first");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(candidates.size()); ++i)
    rep.alphas[static_cast<std::size_t>(i)] = inf_ratio(m.h, candidates[static_cast<std::size_t>(i)].h);
  for (double a : rep.alphas) rep.max_alpha = std::max(rep.max_alpha, a);
  rep.within_h1 = rep.max_alpha <= rep.h_at_one * (1.0 + slack);
  rep.within_e_sup = rep.max_alpha <= rep.e_sup_rh * (1.0 + 1e-9);
  return rep;
}

}  // namespace krf
