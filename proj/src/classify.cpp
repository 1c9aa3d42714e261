#include "krf/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "krf/error.hpp"
#include "krf/interp.hpp"
#include "krf/quadrature.hpp"

namespace krf {

namespace {

const double kLn10 = std::log(10.0);

struct Fit {
  bool ok = false;
  double limit = 0.0, q = 0.0;
  std::function<double(double)> model;  // value at position s (Aitken) or x (inverse-log)
};

// xi = L + K q^s through s = 0, 1, 2
Fit aitken(double a, double b, double c) {
  Fit fit;
  const double d1 = b - a, d2 = c - b;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
  if (std::abs(d1) <= 1e-14 * scale && std::abs(d2) <= 1e-14 * scale) {
    fit.ok = true;
    fit.limit = c;
    fit.model = [c](double) { return c; };
    return fit;
  }
  if (d1 == 0.0) return fit;
  const double q = d2 / d1;
  if (!(q > 0.0 && q < 1.0)) return fit;
  const double L = c + d2 * q / (1.0 - q), K = a - L;
  fit.ok = true;
  fit.limit = L;
  fit.q = q;
  fit.model = [L, K, q](double s) { return L + K * std::pow(q, s); };
  return fit;
}

// xi = L + K/(x + c) through three points
Fit inverse_log(double xa, double xb, double xc, double a, double b, double c) {
  Fit fit;
  const double d1 = a - b, d2 = b - c;
  const double A = d1 * (xc - xb) - d2 * (xb - xa);
  if (A == 0.0 || d2 == 0.0) return fit;
  const double shift = -(d1 * (xc - xb) * xa - d2 * (xb - xa) * xc) / A;
  if (!(xa + shift > 0.0)) return fit;
  const double K = d2 * (xb + shift) * (xc + shift) / (xc - xb);
  const double L = c - K / (xc + shift);
  if (!std::isfinite(L)) return fit;
  fit.ok = true;
  fit.limit = L;
  fit.model = [L, K, shift](double x) { return L + K / (x + shift); };
  return fit;
}

// rise: sup over a < r of C(r) - C(a)
double max_rise(const std::vector<double>& C, std::size_t end) {
  double lo = C[0], best = 0.0;
  for (std::size_t i = 1; i < end; ++i) {
    best = std::max(best, C[i] - lo);
    lo = std::min(lo, C[i]);
  }
  return best;
}

std::vector<double> cumulative(const MetricProfile& m, double shift, double sign) {
  std::vector<double> g(m.xi.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = sign * (m.xi[i] - shift);
  return numeric::cumulative_integral(g, m.grid().dx());
}

bool tends_to_one(const TailLimit& L, const ClassifyTolerances& tol) {
  return L.value && std::abs(*L.value - 1.0) <= tol.limit_tol;
}

}  // namespace

TailLimit estimate_xi_limit(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  numeric::UniformSpline s(m.xi.values, g.x_min(), g.dx());
  const double xm = g.x(g.size() - 1);
  TailLimit out;
  // Geometric convergence in r, checked by extrapolating one decade ahead.
  if (xm - 3.0 * kLn10 >= g.x_min()) {
    Fit early = aitken(s(xm - 3 * kLn10), s(xm - 2 * kLn10), s(xm - kLn10));
    Fit late = aitken(s(xm - 2 * kLn10), s(xm - kLn10), s(xm));
    if (early.ok && late.ok && late.q < 0.5) {
      out.value = late.limit;
      out.model = late.q == 0.0 ? "constant" : "power";
      out.residual = std::abs(early.model(3.0) - s(xm));
      return out;
    }
  }
  // Slow convergence: models in log r, fitted on [xm/8, xm/2] and judged by
  // how well they predict xi(r_max).
  if (!(xm > 0.0 && xm / 8.0 >= g.x_min() + g.dx())) return out;
  const double x1 = xm / 8.0, x2 = xm / 4.0, x3 = xm / 2.0;
  const double target = s(xm);
  double best = std::numeric_limits<double>::infinity();
  Fit e_log = aitken(s(x1), s(x2), s(x3));
  if (e_log.ok) {
    Fit f = aitken(s(x2), s(x3), s(xm));
    double err = std::abs(e_log.model(3.0) - target);
    if (f.ok && err < best) {
      best = err;
      out.value = f.limit;
      out.model = "log";
    }
  }
  Fit e_inv = inverse_log(x1, x2, x3, s(x1), s(x2), s(x3));
  if (e_inv.ok) {
    Fit f = inverse_log(x2, x3, xm, s(x2), s(x3), target);
    double err = std::abs(e_inv.model(xm) - target);
    if (f.ok && err < best) {
      best = err;
      out.value = f.limit;
      out.model = "inverse-log";
    }
  }
  if (out.value && best > 0.25 * std::abs(target - s(x2)) + 1e-9) out.value.reset();
  out.residual = out.value ? best : 0.0;
  return out;
}

TailIntegral tail_integral(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  std::vector<double> C = cumulative(m, 1.0, -1.0);
  TailIntegral t;
  const std::size_t L = g.size() - 1;
  std::size_t i0 = tail_start(g, 1.0), i1 = tail_start(g, 2.0);
  t.last_decade = (C[L] - C[i0]) * kLn10 / (g.x(L) - g.x(i0));
  t.prev_decade = (C[i0] - C[i1]) * kLn10 / (g.x(i0) - g.x(i1));
  if (g.r_min() < 1.0 && g.r_max() > 1.0) {
    numeric::UniformSpline cs(C, g.x_min(), g.dx());
    t.from_one = C[L] - cs(0.0);
  }
  double hi = C[0];
  for (std::size_t i = 1; i <= L; ++i) {
    t.max_drop = std::max(t.max_drop, hi - C[i]);
    hi = std::max(hi, C[i]);
  }
  return t;
}

C1Record check_c1(const MetricProfile& m, const ClassifyTolerances& tol) {
  C1Record rec;
  TailLimit L = estimate_xi_limit(m);
  if (!L.value) {
    rec.note = "xi has no detectable limit";
    return rec;
  }
  if (*L.value > 1.0 - tol.limit_tol) {
    rec.note = "xi tends to 1 or beyond; no band below 1";
    return rec;
  }
  const RadialGrid& g = m.grid();
  const std::size_t i0 = tail_start(g, 1.0);
  double tail_max = *std::max_element(m.xi.values.begin() + static_cast<std::ptrdiff_t>(i0), m.xi.values.end());
  rec.alpha = 0.0;
  rec.beta = std::max(0.0, std::max(*L.value, tail_max));
  if (rec.beta >= 1.0) {
    rec.note = "tail of xi reaches 1";
    return rec;
  }
  std::vector<double> below = cumulative(m, rec.alpha, -1.0);
  std::vector<double> above = cumulative(m, rec.beta, 1.0);
  const std::size_t N = g.size();
  rec.gamma = std::max(max_rise(below, N), max_rise(above, N));
  const double truncated = std::max(max_rise(below, i0 + 1), max_rise(above, i0 + 1));
  if (rec.gamma - truncated > tol.stability) {
    rec.note = "inconclusive: gamma still growing in the last decade";
    return rec;
  }
  rec.holds = true;
  return rec;
}

C2Record check_c2(const MetricProfile& m, const ClassifyTolerances& tol) {
  C2Record rec;
  TailLimit L = estimate_xi_limit(m);
  if (!tends_to_one(L, tol)) {
    rec.note = "xi does not tend to 1";
    return rec;
  }
  TailIntegral t = tail_integral(m);
  rec.delta = t.max_drop;
  const bool divergent = t.prev_decade >= tol.divergence_step && t.last_decade >= tol.divergence_step;
  const bool convergent = t.last_decade < tol.divergence_step && t.last_decade <= t.prev_decade;
  if (divergent) {
    rec.holds = true;
  } else if (convergent) {
    rec.note = "partial integrals saturate";
  } else {
    rec.note = "inconclusive: partial integrals neither clearly divergent nor saturating";
  }
  return rec;
}

C3Record check_c3(const MetricProfile& m, const ClassifyTolerances& tol) {
  C3Record rec;
  TailLimit L = estimate_xi_limit(m);
  if (!tends_to_one(L, tol)) {
    rec.note = "xi does not tend to 1";
    return rec;
  }
  const RadialGrid& g = m.grid();
  if (!(g.r_max() > 1.0 && g.r_min() < 1.0)) {
    rec.note = "grid does not contain r = 1";
    return rec;
  }
  TailIntegral t = tail_integral(m);
  const bool divergent = t.prev_decade >= tol.divergence_step && t.last_decade >= tol.divergence_step;
  const bool convergent = t.last_decade < tol.divergence_step && t.last_decade <= t.prev_decade;
  if (divergent) {
    rec.note = "partial integrals diverge";
    return rec;
  }
  if (!convergent) {
    rec.note = "inconclusive: partial integrals neither clearly divergent nor saturating";
    return rec;
  }
  rec.b = t.from_one;
  if (t.prev_decade != 0.0) {
    const double q = t.last_decade / t.prev_decade;
    if (q > 0.0 && q < 1.0) rec.b += t.last_decade * q / (1.0 - q);
  }
  rec.holds = true;
  return rec;
}

GrowthRecord volume_growth_class(const MetricProfile& m, const ClassifyTolerances& tol) {
  CompletenessReport cr = completeness_test(m);
  if (cr.verdict == Completeness::Incomplete)
    fail(ErrorCode::IncompleteMetric, "volume growth needs a complete metric");
  const RadialGrid& g = m.grid();
  Profile rho = geodesic_radius_profile(m);
  Profile v = ball_volume_profile(m);
  const double n = m.n;
  const std::size_t L = g.size() - 1, i0 = tail_start(g, 1.0);
  GrowthRecord rec;
  rec.exponent = (std::log(v[L]) - std::log(v[i0])) / (std::log(rho[L]) - std::log(rho[i0]));
  for (std::size_t i = i0; i <= L; ++i) {
    rec.limsup_2n = std::max(rec.limsup_2n, v[i] / std::pow(rho[i], 2 * n));
    rec.limsup_n = std::max(rec.limsup_n, v[i] / std::pow(rho[i], n));
  }
  rec.conoid = std::abs(rec.exponent - 2 * n) <= tol.growth_band * n;
  rec.cigar = std::abs(rec.exponent - n) <= tol.growth_band * n;
  if (!rec.conoid && !rec.cigar) {
    std::ostringstream os;
    os << "volume exponent " << rec.exponent << " sits between n and 2n";
    rec.note = os.str();
  }
  BisectionalSign s = bisectional_sign(m);
  if (s == BisectionalSign::Positive || s == BisectionalSign::NonNegative ||
      s == BisectionalSign::Flat) {
    rec.chen_zhu_checked = true;
    double c = 0.0;
    for (std::size_t i = g.first_at_or_above(1.0); i <= L; ++i)
      c = std::max({c, std::pow(rho[i], n) / v[i], v[i] / std::pow(rho[i], 2 * n)});
    rec.chen_zhu_constant = c;
    rec.chen_zhu_holds = std::isfinite(c) && rec.exponent >= n * (1.0 - tol.growth_band) &&
                         rec.exponent <= n * (2.0 + tol.growth_band);
  }
  return rec;
}

ClassificationReport classify(const MetricProfile& m, const ClassifyTolerances& tol) {
  ClassificationReport rep;
  rep.c1 = check_c1(m, tol);
  rep.c2 = check_c2(m, tol);
  rep.c3 = check_c3(m, tol);
  rep.xi_limit = estimate_xi_limit(m).value;
  rep.completeness = completeness_test(m).verdict;
  rep.sign = bisectional_sign(m);
  if (rep.completeness == Completeness::Incomplete) {
    rep.growth.note = "metric is incomplete";
  } else {
    rep.growth = volume_growth_class(m, tol);
  }
  return rep;
}

}  // namespace krf
