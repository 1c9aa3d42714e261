#include "krf/radial_metric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "krf/error.hpp"
#include "krf/kernels.hpp"
#include "krf/quadrature.hpp"

namespace krf {

namespace {

void require_positive(const Profile& p, const char* what) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] > 0.0)) {
      std::ostringstream os;
      os << what << " must be positive, got " << p[i] << " at r=" << p.r(i);
      fail(ErrorCode::NonPositiveH, os.str());
    }
}

std::vector<double> log_values(const Profile& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::log(p[i]);
  return out;
}

}  // namespace

std::size_t tail_start(const RadialGrid& grid, double decades) {
  double r0 = grid.r_max() * std::pow(10.0, -decades);
  std::size_t i = grid.first_at_or_above(r0 * (1.0 - 1e-12));
  return std::min(i, grid.size() - 3);
}

Profile h_from_xi(const Profile& xi, double c0, double slope0, double slope_cap) {
  if (!(c0 > 0.0)) fail(ErrorCode::NonPositiveC0, "h(0) must be positive");
  const RadialGrid& g = *xi.grid;
  const double r0 = g.r_min();
  if (std::abs(xi[0] / r0) > slope_cap || std::abs(slope0) > slope_cap) {
    std::ostringstream os;
    os << "xi(r_min)/r_min = " << xi[0] / r0 << " exceeds the slope cap " << slope_cap;
    fail(ErrorCode::DivergentIntegrand, os.str());
  }
  // origin piece: trapezoid on [0, r_min] of xi/s, which tends to slope0 at s = 0
  const double origin = 0.5 * (slope0 * r0 + xi[0]);
  std::vector<double> I = numeric::cumulative_integral(xi.values, g.dx());
  std::vector<double> h(xi.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = c0 * std::exp(-(origin + I[i]));
  return Profile(xi.grid, std::move(h));
}

Profile f_from_h(const Profile& h, double c0) {
  require_positive(h, "h");
  const RadialGrid& g = *h.grid;
  std::vector<double> I = numeric::cumulative_integral_exp(h.values, g.nodes(), g.dx());
  const double origin = 0.5 * g.r_min() * (c0 + h[0]);
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = (origin + I[i]) / g.r(i);
  return Profile(h.grid, std::move(f));
}

Profile xi_from_h(const Profile& h) {
  require_positive(h, "h");
  std::vector<double> d = numeric::derivative(log_values(h), h.grid->dx());
  for (double& v : d) v = -v;
  return Profile(h.grid, std::move(d));
}

MetricProfile make_metric(int n, const Profile& xi, double c0, double slope0) {
  if (n < 1) fail(ErrorCode::InvalidParams, "complex dimension must be at least 1");
  MetricProfile m;
  m.n = n;
  m.xi = xi;
  m.h = h_from_xi(xi, c0, slope0);
  m.f = f_from_h(m.h, c0);
  m.c0 = c0;
  m.xi_origin_slope = slope0;
  return m;
}

MetricProfile metric_from_f(int n, const Profile& f) {
  if (n < 1) fail(ErrorCode::InvalidParams, "complex dimension must be at least 1");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(f[i] > 0.0)) fail(ErrorCode::NonPositiveH, "f must be positive");
  const RadialGrid& g = *f.grid;
  std::vector<double> h(f.size()), xi(f.size());
  kernels::h_xi_from_f(f.values, g.nodes(), g.dx(), h, xi);
  kernels::Ghosts gh = kernels::ghosts(f.values, g.nodes(), g.dx());
  MetricProfile m;
  m.n = n;
  m.f = f;
  m.h = Profile(f.grid, std::move(h));
  require_positive(m.h, "h");
  m.xi = Profile(f.grid, std::move(xi));
  m.c0 = gh.c0;
  m.xi_origin_slope = gh.slope0;
  return m;
}

MetricInterpolant::MetricInterpolant(const MetricProfile& m)
    : n_(m.n), r_min_(m.grid().r_min()), r_max_(m.grid().r_max()), c0_(m.c0),
      slope0_(m.xi_origin_slope),
      log_h_(log_values(m.h), m.grid().x_min(), m.grid().dx()),
      log_f_(log_values(m.f), m.grid().x_min(), m.grid().dx()) {}

double MetricInterpolant::h(double r) const {
  if (r < r_min_) return c0_ * (1.0 - slope0_ * r);
  return std::exp(log_h_(std::log(r)));
}

double MetricInterpolant::f(double r) const {
  if (r < r_min_) return c0_ * (1.0 - 0.5 * slope0_ * r);
  return std::exp(log_f_(std::log(r)));
}

double MetricInterpolant::dh(double r) const {
  if (r < r_min_) return -c0_ * slope0_;
  return h(r) * log_h_.prime(std::log(r)) / r;
}

double MetricInterpolant::df(double r) const {
  if (r < r_min_) return -0.5 * c0_ * slope0_;
  return (h(r) - f(r)) / r;
}

double MetricInterpolant::xi(double r) const {
  if (r < r_min_) return slope0_ * r;
  return -log_h_.prime(std::log(r));
}

HermitianMatrix metric_at_point(const MetricInterpolant& mi,
                                std::span<const std::complex<double>> z) {
  const int n = static_cast<int>(z.size());
  if (n != mi.n()) fail(ErrorCode::InvalidParams, "point dimension does not match metric dimension");
  double r = 0.0;
  for (auto c : z) r += std::norm(c);
  if (r > mi.r_max() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|z|^2 = " << r << " exceeds r_max = " << mi.r_max();
    fail(ErrorCode::OutOfDomain, os.str());
  }
  const double f = mi.f(r), fp = mi.df(r);
  HermitianMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = fp * std::conj(z[i]) * z[j] + (i == j ? f : 0.0);
  return g;
}

HermitianMatrix metric_at_point(const MetricProfile& m, std::span<const std::complex<double>> z) {
  return metric_at_point(MetricInterpolant(m), z);
}

std::pair<double, double> equivalence_bounds(const Profile& h1, const Profile& h2) {
  require_same_grid(h1, h2);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    double q = h1[i] / h2[i];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {lo, hi};
}

std::pair<double, double> equivalence_bounds(const MetricProfile& m1, const MetricProfile& m2) {
  if (m1.n != m2.n) fail(ErrorCode::GridMismatch, "metrics have different dimensions");
  return equivalence_bounds(m1.h, m2.h);
}

Profile geodesic_radius_profile(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  std::vector<double> integrand(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) integrand[i] = 0.5 * std::sqrt(m.h[i] * g.r(i));
  std::vector<double> rho = numeric::cumulative_integral(integrand, g.dx());
  const double origin = std::sqrt(m.c0 * g.r_min()) * (1.0 - m.xi_origin_slope * g.r_min() / 6.0);
  for (double& v : rho) v += origin;
  return Profile(m.grid_ptr(), std::move(rho));
}

double geodesic_radius(const MetricProfile& m, double r) {
  const RadialGrid& g = m.grid();
  if (r < 0.0 || r > g.r_max() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "radius " << r << " outside [0, " << g.r_max() << "]";
    fail(ErrorCode::OutOfDomain, os.str());
  }
  if (r == 0.0) return 0.0;
  if (r < g.r_min()) return std::sqrt(m.c0 * r) * (1.0 - m.xi_origin_slope * r / 6.0);
  Profile rho = geodesic_radius_profile(m);
  std::size_t i = g.locate(r);
  if (r == g.r(i)) return rho[i];
  MetricInterpolant mi(m);
  auto integrand = [&](double x) {
    double s = std::exp(x);
    return 0.5 * std::sqrt(mi.h(s) * s);
  };
  return rho[i] + boost::math::quadrature::gauss<double, 10>::integrate(integrand, g.x(i), std::log(r));
}

double ball_volume(const MetricProfile& m, double r) {
  const RadialGrid& g = m.grid();
  if (!(r > 0.0) || r > g.r_max() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "radius " << r << " outside (0, " << g.r_max() << "]";
    fail(ErrorCode::OutOfDomain, os.str());
  }
  std::size_t i = g.first_at_or_above(r);
  double f = (i < g.size() && g.r(i) == r) ? m.f[i] : MetricInterpolant(m).f(r);
  return std::pow(r * f, m.n);
}

Profile ball_volume_profile(const MetricProfile& m) {
  std::vector<double> v(m.f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(m.f.r(i) * m.f[i], m.n);
  return Profile(m.grid_ptr(), std::move(v));
}

const char* to_string(Completeness c) {
  switch (c) {
    case Completeness::Complete: return "Complete";
    case Completeness::Incomplete: return "Incomplete";
    case Completeness::Inconclusive: return "Inconclusive";
  }
  return "?";
}

CompletenessReport completeness_test(const MetricProfile& m, double eps_fit) {
  const RadialGrid& g = m.grid();
  CompletenessReport rep;
  std::size_t i0 = tail_start(g, 1.0);
  std::vector<double> xs, ys;
  for (std::size_t i = i0; i < g.size(); ++i) {
    xs.push_back(g.x(i));
    ys.push_back(std::log(m.h[i]));
  }
  rep.tail_exponent = -numeric::fit_slope(xs, ys);
  Profile rho = geodesic_radius_profile(m);
  rep.truncated_integral = 2.0 * rho.values.back();
  std::size_t i1 = tail_start(g, 2.0);
  // increments per decade, normalized by the node span actually covered
  const double ln10 = std::log(10.0);
  const std::size_t L = g.size() - 1;
  rep.growth_last_decade = 2.0 * (rho[L] - rho[i0]) * ln10 / (g.x(L) - g.x(i0));
  rep.growth_prev_decade = 2.0 * (rho[i0] - rho[i1]) * ln10 / (g.x(i0) - g.x(i1));
  const double q = rep.tail_exponent;
  const bool divergent = rep.growth_last_decade >= 0.1 &&
                         rep.growth_last_decade >= 0.99 * rep.growth_prev_decade;
  if (q <= 1.0 - eps_fit) {
    rep.verdict = Completeness::Complete;
  } else if (q >= 1.0 + eps_fit) {
    rep.verdict = Completeness::Incomplete;
  } else if (divergent && q <= 1.0) {
    rep.verdict = Completeness::Complete;
  } else if (!divergent && q > 1.0) {
    rep.verdict = Completeness::Incomplete;
  } else {
    rep.verdict = Completeness::Inconclusive;
  }
  return rep;
}

}  // namespace krf
