#include "krf/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

#include "krf/error.hpp"

namespace krf::numeric {

std::vector<double> cumulative_integral(std::span<const double> g, double dx) {
  const std::size_t n = g.size();
  if (n < 4) fail(ErrorCode::InvalidProfile, "cumulative_integral needs at least 4 samples");
  std::vector<double> out(n, 0.0);
  const double w = dx / 24.0;
  out[1] = w * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
  for (std::size_t i = 1; i + 2 < n; ++i)
    out[i + 1] = out[i] + w * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
  out[n - 1] = out[n - 2] + w * (9.0 * g[n - 1] + 19.0 * g[n - 2] - 5.0 * g[n - 3] + g[n - 4]);
  return out;
}

namespace {

// dx * int_0^1 L_j(u) e^{u dx} du for the Lagrange basis on the given offsets.
std::array<double, 4> exp_weights(double dx, const std::array<double, 4>& nodes) {
  std::array<double, 4> w{};
  for (int j = 0; j < 4; ++j) {
    auto basis = [&](double u) {
      double v = std::exp(u * dx);
      for (int k = 0; k < 4; ++k)
        if (k != j) v *= (u - nodes[k]) / (nodes[j] - nodes[k]);
      return v;
    };
    w[j] = dx * boost::math::quadrature::gauss<double, 10>::integrate(basis, 0.0, 1.0);
  }
  return w;
}

}  // namespace

std::vector<double> cumulative_integral_exp(std::span<const double> g, std::span<const double> r,
                                            double dx) {
  const std::size_t n = g.size();
  if (n < 4 || r.size() != n) fail(ErrorCode::InvalidProfile, "cumulative_integral_exp needs at least 4 samples");
  const auto first = exp_weights(dx, {0.0, 1.0, 2.0, 3.0});
  const auto mid = exp_weights(dx, {-1.0, 0.0, 1.0, 2.0});
  const auto last = exp_weights(dx, {-2.0, -1.0, 0.0, 1.0});
  std::vector<double> out(n, 0.0);
  out[1] = r[0] * (first[0] * g[0] + first[1] * g[1] + first[2] * g[2] + first[3] * g[3]);
  for (std::size_t i = 1; i + 2 < n; ++i)
    out[i + 1] = out[i] + r[i] * (mid[0] * g[i - 1] + mid[1] * g[i] + mid[2] * g[i + 1] + mid[3] * g[i + 2]);
  const std::size_t i = n - 2;
  out[n - 1] = out[i] + r[i] * (last[0] * g[i - 2] + last[1] * g[i - 1] + last[2] * g[i] + last[3] * g[i + 1]);
  return out;
}

std::vector<double> cumulative_trapezoid(std::span<const double> g, double dx) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) out[i] = out[i - 1] + 0.5 * dx * (g[i - 1] + g[i]);
  return out;
}

std::vector<double> derivative(std::span<const double> y, double dx) {
  const std::size_t n = y.size();
  if (n < 3) fail(ErrorCode::InvalidProfile, "derivative needs at least 3 samples");
  std::vector<double> d(n);
  const double inv = 1.0 / (2.0 * dx);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) * inv;
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) * inv;
  return d;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope needs matching samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace krf::numeric
