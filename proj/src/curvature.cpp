#include "krf/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krf/error.hpp"
#include "krf/quadrature.hpp"

namespace krf {

const Profile& CurvatureProfile::B() const {
  if (!B_) fail(ErrorCode::DimensionTooSmall, "B is defined only for n >= 2");
  return *B_;
}

const Profile& CurvatureProfile::Cc() const {
  if (!Cc_) fail(ErrorCode::DimensionTooSmall, "C is defined only for n >= 2");
  return *Cc_;
}

Profile xi_prime(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  std::vector<double> d = numeric::derivative(m.xi.values, g.dx());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= g.r(i);
  return Profile(m.grid_ptr(), std::move(d));
}

CurvatureProfile curvature_components(const MetricProfile& m) {
  const RadialGrid& g = m.grid();
  const std::size_t N = g.size();
  std::vector<double> xi_x = numeric::derivative(m.xi.values, g.dx());
  std::vector<double> A(N);
  for (std::size_t i = 0; i < N; ++i) A[i] = xi_x[i] / g.r(i) / m.h[i];

  CurvatureProfile cp;
  cp.A = Profile(m.grid_ptr(), A);
  if (m.n == 1) {
    cp.scalar = cp.A;
    return cp;
  }

  std::vector<double> gb(N), gc(N);
  for (std::size_t i = 0; i < N; ++i) {
    gb[i] = xi_x[i] * g.r(i) * m.f[i];
    gc[i] = m.h[i] * m.xi[i] * g.r(i);
  }
  std::vector<double> Ib = numeric::cumulative_integral(gb, g.dx());
  std::vector<double> Ic = numeric::cumulative_integral(gc, g.dx());
  const double r0 = g.r_min();
  const double origin = 0.5 * m.c0 * m.xi_origin_slope * r0 * r0;
  std::vector<double> B(N), C(N), R(N);
  double discrepancy = 0.0;
  const double nn = m.n;
  for (std::size_t i = 0; i < N; ++i) {
    const double rf = g.r(i) * m.f[i];
    B[i] = (origin + Ib[i]) / (rf * rf);
    C[i] = 2.0 * (origin + Ic[i]) / (rf * rf);
    const double q_closed = g.r(i) * (m.f[i] - m.h[i]);
    discrepancy = std::max(discrepancy, std::abs(q_closed - (origin + Ic[i])) / rf);
    R[i] = A[i] + 2.0 * (nn - 1.0) * B[i] + 0.5 * nn * (nn - 1.0) * C[i];
  }
  cp.B_ = Profile(m.grid_ptr(), std::move(B));
  cp.Cc_ = Profile(m.grid_ptr(), std::move(C));
  cp.scalar = Profile(m.grid_ptr(), std::move(R));
  cp.c_route_discrepancy = discrepancy;
  return cp;
}

Profile scalar_curvature(const MetricProfile& m) { return curvature_components(m).scalar; }

const char* to_string(BisectionalSign s) {
  switch (s) {
    case BisectionalSign::Positive: return "Positive";
    case BisectionalSign::NonNegative: return "NonNegative";
    case BisectionalSign::NonPositive: return "NonPositive";
    case BisectionalSign::Indefinite: return "Indefinite";
    case BisectionalSign::Flat: return "Flat";
  }
  return "?";
}

BisectionalSign bisectional_sign(const MetricProfile& m, double tol) {
  std::vector<double> d = numeric::derivative(m.xi.values, m.grid().dx());
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  if (*lo >= -tol && *hi <= tol) return BisectionalSign::Flat;
  if (*lo > tol) return BisectionalSign::Positive;
  if (*lo >= -tol) return BisectionalSign::NonNegative;
  if (*hi <= tol) return BisectionalSign::NonPositive;
  return BisectionalSign::Indefinite;
}

BoundedCurvatureReport bounded_curvature_test(const MetricProfile& m, int decades) {
  const RadialGrid& g = m.grid();
  Profile A = curvature_components(m).A;
  BoundedCurvatureReport rep;
  for (std::size_t i = 0; i < A.size(); ++i) rep.sup_ratio = std::max(rep.sup_ratio, std::abs(A[i]));
  const double span = std::log10(g.r_max() / g.r_min());
  decades = std::min(decades, static_cast<int>(span));
  std::vector<double> centers, logs;
  for (int d = decades; d >= 1; --d) {
    std::size_t a = tail_start(g, d), b = tail_start(g, d - 1);
    if (d == 1) b = g.size() - 1;
    double mx = 0.0;
    for (std::size_t i = a; i <= b; ++i) mx = std::max(mx, std::abs(A[i]));
    rep.decade_maxima.push_back(mx);
    centers.push_back(0.5 * (g.x(a) + g.x(b)));
    logs.push_back(std::log(std::max(mx, 1e-300)));
  }
  if (rep.sup_ratio < 1e-300 || rep.decade_maxima.size() < 3) return rep;
  rep.tail_exponent = numeric::fit_slope(centers, logs);
  const std::size_t K = rep.decade_maxima.size();
  const bool rising = rep.decade_maxima[K - 1] > rep.decade_maxima[K - 2] &&
                      rep.decade_maxima[K - 2] > rep.decade_maxima[K - 3];
  rep.bounded = !(rising && rep.tail_exponent > 0.05);
  return rep;
}

double curvature_sup(const MetricProfile& m) {
  CurvatureProfile c = curvature_components(m);
  double s = 0.0;
  for (std::size_t i = 0; i < c.A.size(); ++i) {
    s = std::max(s, std::abs(c.A[i]));
    if (m.n >= 2) s = std::max({s, std::abs(c.B()[i]), std::abs(c.Cc()[i])});
  }
  return s;
}

double curvature_max(const MetricProfile& m) {
  CurvatureProfile c = curvature_components(m);
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.A.size(); ++i) {
    s = std::max(s, c.A[i]);
    if (m.n >= 2) s = std::max({s, c.B()[i], c.Cc()[i]});
  }
  return s;
}

namespace {

using Matrix = Eigen::MatrixXcd;
using cd = std::complex<double>;

// Orthonormal frame adapted to z: first column along z, the rest spanning z^perp.
Matrix unitary_frame(std::span<const cd> z) {
  const int n = static_cast<int>(z.size());
  Matrix U = Matrix::Zero(n, n);
  std::vector<Eigen::VectorXcd> basis;
  Eigen::VectorXcd v0(n);
  for (int i = 0; i < n; ++i) v0(i) = z[i];
  basis.push_back(v0.normalized());
  for (int e = 0; e < n && static_cast<int>(basis.size()) < n; ++e) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, e);
    for (const auto& b : basis) v -= b.dot(v) * b;
    if (v.norm() > 1e-8) basis.push_back(v.normalized());
  }
  for (int a = 0; a < n; ++a) U.col(a) = basis[static_cast<std::size_t>(a)];
  return U;
}

}  // namespace

OracleResult fd_curvature_oracle(const MetricInterpolant& mi, std::span<const cd> z,
                                 double step_factor) {
  const int n = static_cast<int>(z.size());
  double r = 0.0;
  for (auto c : z) r += std::norm(c);
  if (r < 10.0 * mi.r_min() || r > mi.r_max() / 10.0) {
    std::ostringstream os;
    os << "|z|^2 = " << r << " leaves no room for the stencil in [" << 10.0 * mi.r_min() << ", "
       << mi.r_max() / 10.0 << "]";
    fail(ErrorCode::StencilOutOfDomain, os.str());
  }
  const double delta = step_factor * std::sqrt(r);
  const int D = 2 * n;
  std::vector<double> y0(static_cast<std::size_t>(D));
  for (int k = 0; k < n; ++k) {
    y0[2 * k] = z[k].real();
    y0[2 * k + 1] = z[k].imag();
  }
  auto metric = [&](const std::vector<double>& y) {
    std::vector<cd> w(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) w[k] = cd(y[2 * k], y[2 * k + 1]);
    return metric_at_point(mi, w);
  };
  auto shifted = [&](int a, int p, int b, int q) {
    std::vector<double> y = y0;
    y[a] += p * delta;
    if (b >= 0) y[b] += q * delta;
    return metric(y);
  };
  const int offs[4] = {-2, -1, 1, 2};
  const double w1[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};

  const Matrix G0 = metric(y0);
  std::vector<Matrix> d1(static_cast<std::size_t>(D));
  std::vector<std::vector<Matrix>> d2(static_cast<std::size_t>(D), std::vector<Matrix>(static_cast<std::size_t>(D)));
  for (int a = 0; a < D; ++a) {
    Matrix gm2 = shifted(a, -2, -1, 0), gm1 = shifted(a, -1, -1, 0);
    Matrix gp1 = shifted(a, 1, -1, 0), gp2 = shifted(a, 2, -1, 0);
    d1[a] = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * delta);
    d2[a][a] = (-gp2 + 16.0 * gp1 - 30.0 * G0 + 16.0 * gm1 - gm2) / (12.0 * delta * delta);
  }
  for (int a = 0; a < D; ++a)
    for (int b = a + 1; b < D; ++b) {
      Matrix acc = Matrix::Zero(n, n);
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) acc += (w1[p] * w1[q]) * shifted(a, offs[p], b, offs[q]);
      d2[a][b] = acc / (delta * delta);
      d2[b][a] = d2[a][b];
    }

  const cd I(0.0, 1.0);
  const Matrix Ginv = G0.inverse();
  // R[i][j][k][l] with i, k holomorphic and j, l anti-holomorphic
  std::vector<cd> R(static_cast<std::size_t>(n * n * n * n));
  auto idx = [n](int i, int j, int k, int l) {
    return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
  };
  for (int k = 0; k < n; ++k) {
    Matrix dk = 0.5 * (d1[2 * k] - I * d1[2 * k + 1]);
    for (int l = 0; l < n; ++l) {
      Matrix dl = 0.5 * (d1[2 * l] + I * d1[2 * l + 1]);
      Matrix mixed = 0.25 * (d2[2 * k][2 * l] + d2[2 * k + 1][2 * l + 1] +
                             I * (d2[2 * k][2 * l + 1] - d2[2 * k + 1][2 * l]));
      Matrix Rkl = -mixed + dk * Ginv * dl;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R[idx(i, j, k, l)] = Rkl(i, j);
    }
  }

  Matrix U = unitary_frame(z);
  const double h = mi.h(r), f = mi.f(r);
  for (int a = 0; a < n; ++a) U.col(a) /= std::sqrt(a == 0 ? h : f);

  OracleResult out;
  out.n = n;
  out.frame.assign(R.size(), cd(0.0));
  // transform one index at a time
  std::vector<cd> T1(R.size()), T2(R.size()), T3(R.size());
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = 0;
          for (int i = 0; i < n; ++i) s += R[idx(i, j, k, l)] * U(i, a);
          T1[idx(a, j, k, l)] = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = 0;
          for (int j = 0; j < n; ++j) s += T1[idx(a, j, k, l)] * std::conj(U(j, b));
          T2[idx(a, b, k, l)] = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int l = 0; l < n; ++l) {
          cd s = 0;
          for (int k = 0; k < n; ++k) s += T2[idx(a, b, k, l)] * U(k, c);
          T3[idx(a, b, c, l)] = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd s = 0;
          for (int l = 0; l < n; ++l) s += T3[idx(a, b, c, l)] * std::conj(U(l, d));
          out.frame[idx(a, b, c, d)] = s;
        }

  out.A = out.at(0, 0, 0, 0).real();
  if (n >= 2) {
    out.B = out.at(0, 0, 1, 1).real();
    out.Cc = out.at(1, 1, 1, 1).real();
  }
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) out.scalar += out.at(a, a, c, c).real();

  auto expected = [&](int a, int b, int c, int d) -> double {
    if (a == 0 && b == 0 && c == 0 && d == 0) return out.A;
    if ((a == b && c == d && (a == 0) != (c == 0)) || (a == d && b == c && (a == 0) != (b == 0)))
      return out.B;
    if (a > 0 && b > 0 && c > 0 && d > 0) {
      if (a == b && b == c && c == d) return out.Cc;
      if ((a == b && c == d) || (a == d && b == c)) return 0.5 * out.Cc;
    }
    return 0.0;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd v = out.at(a, b, c, d);
          out.magnitude = std::max(out.magnitude, std::abs(v));
          const double e = expected(a, b, c, d);
          out.pattern_residual = std::max(out.pattern_residual, std::abs(v - e));
          if (e == 0.0) out.off_pattern = std::max(out.off_pattern, std::abs(v));
        }
  return out;
}

OracleResult fd_curvature_oracle(const MetricProfile& m, std::span<const cd> z) {
  return fd_curvature_oracle(MetricInterpolant(m), z);
}

}  // namespace krf
