#include "krf/kernels.hpp"

#include <cmath>
#include <limits>

namespace krf::kernels {

namespace {

struct NodeTerms {
  double value, d_minus, d_center, d_plus;
};

inline double node_rhs(double fm, double f0, double fp, double r, double inv2dx, double invdx2,
                       int n) {
  const double fx = (fp - fm) * inv2dx;
  const double fxx = (fp - 2.0 * f0 + fm) * invdx2;
  return ((fx + fxx) / (f0 + fx) + (n - 1) * fx / f0) / r;
}

inline NodeTerms node_partials(double fm, double f0, double fp, double r, double inv2dx,
                               double invdx2, int n) {
  const double fx = (fp - fm) * inv2dx;
  const double fxx = (fp - 2.0 * f0 + fm) * invdx2;
  const double u = fx + fxx;
  const double h = f0 + fx;
  const double inv_h2 = 1.0 / (h * h);
  auto partial = [&](double dfx, double dfxx, double df0) {
    const double du = dfx + dfxx;
    const double dh = df0 + dfx;
    return ((du * h - u * dh) * inv_h2 + (n - 1) * (dfx / f0 - fx * df0 / (f0 * f0))) / r;
  };
  return {(u / h + (n - 1) * fx / f0) / r, partial(-inv2dx, invdx2, 0.0),
          partial(0.0, -2.0 * invdx2, 1.0), partial(inv2dx, invdx2, 0.0)};
}

struct OuterGhostPartials {
  double d_last, d_prev, d_prev2;
};

OuterGhostPartials outer_partials(std::span<const double> f, std::span<const double> r,
                                  double dx) {
  const std::size_t L = f.size() - 1;
  const double wL = r[L] * f[L], wL1 = r[L - 1] * f[L - 1], wL2 = r[L - 2] * f[L - 2];
  const double A = wL - wL1, P = wL1 - wL2;
  const double q = A / P;
  const double r_ghost = r[L] * std::exp(dx);
  return {(1.0 + 2.0 * q) * r[L] / r_ghost, (-2.0 * q - q * q) * r[L - 1] / r_ghost,
          (q * q) * r[L - 2] / r_ghost};
}

template <bool Parallel>
void rhs_impl(std::span<const double> f, std::span<const double> r, double dx, int n,
              std::span<double> out) {
  const std::size_t N = f.size();
  const Ghosts g = ghosts(f, r, dx);
  const double inv2dx = 0.5 / dx, invdx2 = 1.0 / (dx * dx);
  out[0] = node_rhs(g.lo, f[0], f[1], r[0], inv2dx, invdx2, n);
  out[N - 1] = node_rhs(f[N - 2], f[N - 1], g.hi, r[N - 1], inv2dx, invdx2, n);
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(N) - 1;
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < last; ++i)
      out[i] = node_rhs(f[i - 1], f[i], f[i + 1], r[i], inv2dx, invdx2, n);
  } else {
    for (std::ptrdiff_t i = 1; i < last; ++i)
      out[i] = node_rhs(f[i - 1], f[i], f[i + 1], r[i], inv2dx, invdx2, n);
  }
}

template <bool Parallel>
void jacobian_impl(std::span<const double> f, std::span<const double> r, double dx, int n,
                   TriJacobian& jac) {
  const std::size_t N = f.size();
  jac.lower.assign(N, 0.0);
  jac.diag.assign(N, 0.0);
  jac.upper.assign(N, 0.0);
  const Ghosts g = ghosts(f, r, dx);
  const double inv2dx = 0.5 / dx, invdx2 = 1.0 / (dx * dx);
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(N) - 1;
  auto row = [&](std::ptrdiff_t i) {
    NodeTerms t = node_partials(f[i - 1], f[i], f[i + 1], r[i], inv2dx, invdx2, n);
    jac.lower[i] = t.d_minus;
    jac.diag[i] = t.d_center;
    jac.upper[i] = t.d_plus;
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < last; ++i) row(i);
  } else {
    for (std::ptrdiff_t i = 1; i < last; ++i) row(i);
  }
  // inner ghost: f_{-1} = f0 + (f0 - f1) e^{-dx}
  const double e = std::exp(-dx);
  NodeTerms t0 = node_partials(g.lo, f[0], f[1], r[0], inv2dx, invdx2, n);
  jac.diag[0] = t0.d_center + t0.d_minus * (1.0 + e);
  jac.upper[0] = t0.d_plus - t0.d_minus * e;
  NodeTerms tL = node_partials(f[N - 2], f[N - 1], g.hi, r[N - 1], inv2dx, invdx2, n);
  OuterGhostPartials og = outer_partials(f, r, dx);
  jac.diag[N - 1] = tL.d_center + tL.d_plus * og.d_last;
  jac.lower[N - 1] = tL.d_minus + tL.d_plus * og.d_prev;
  jac.corner = tL.d_plus * og.d_prev2;
}

}  // namespace

Ghosts ghosts(std::span<const double> f, std::span<const double> r, double dx) {
  const std::size_t L = f.size() - 1;
  Ghosts g{};
  g.lo = f[0] + (f[0] - f[1]) * std::exp(-dx);
  const double b = (f[1] - f[0]) / (r[1] - r[0]);
  g.c0 = f[0] - b * r[0];
  g.slope0 = -2.0 * b / g.c0;
  const double wL = r[L] * f[L], wL1 = r[L - 1] * f[L - 1], wL2 = r[L - 2] * f[L - 2];
  const double A = wL - wL1, P = wL1 - wL2;
  if (!(A > 0.0) || !(P > 0.0)) {
    g.hi = std::numeric_limits<double>::quiet_NaN();
  } else {
    g.hi = (wL + A * (A / P)) / (r[L] * std::exp(dx));
  }
  return g;
}

void h_xi_from_f(std::span<const double> f, std::span<const double> r, double dx,
                 std::span<double> h, std::span<double> xi) {
  const std::size_t N = f.size();
  const Ghosts g = ghosts(f, r, dx);
  const double inv2dx = 0.5 / dx, invdx2 = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < N; ++i) {
    const double fm = i == 0 ? g.lo : f[i - 1];
    const double fp = i + 1 == N ? g.hi : f[i + 1];
    const double fx = (fp - fm) * inv2dx;
    const double fxx = (fp - 2.0 * f[i] + fm) * invdx2;
    h[i] = f[i] + fx;
    xi[i] = -(fx + fxx) / h[i];
  }
}

namespace serial {
void flow_rhs(std::span<const double> f, std::span<const double> r, double dx, int n,
              std::span<double> out) {
  rhs_impl<false>(f, r, dx, n, out);
}
void flow_jacobian(std::span<const double> f, std::span<const double> r, double dx, int n,
                   TriJacobian& jac) {
  jacobian_impl<false>(f, r, dx, n, jac);
}
}  // namespace serial

namespace parallel {
void flow_rhs(std::span<const double> f, std::span<const double> r, double dx, int n,
              std::span<double> out) {
  rhs_impl<true>(f, r, dx, n, out);
}
void flow_jacobian(std::span<const double> f, std::span<const double> r, double dx, int n,
                   TriJacobian& jac) {
  jacobian_impl<true>(f, r, dx, n, jac);
}
}  // namespace parallel

void solve_shifted(const TriJacobian& jac, double s, std::span<double> b) {
  const std::size_t N = b.size();
  std::vector<double> a(N), d(N), c(N);
  for (std::size_t i = 0; i < N; ++i) {
    a[i] = -s * jac.lower[i];
    d[i] = 1.0 - s * jac.diag[i];
    c[i] = -s * jac.upper[i];
  }
  const double corner = -s * jac.corner;
  if (corner != 0.0) {
    const std::size_t L = N - 1;
    const double factor = corner / a[L - 1];
    a[L] -= factor * d[L - 1];
    d[L] -= factor * c[L - 1];
    b[L] -= factor * b[L - 1];
  }
  for (std::size_t i = 1; i < N; ++i) {
    const double m = a[i] / d[i - 1];
    d[i] -= m * c[i - 1];
    b[i] -= m * b[i - 1];
  }
  b[N - 1] /= d[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) b[i] = (b[i] - c[i] * b[i + 1]) / d[i];
}

}  // namespace krf::kernels
