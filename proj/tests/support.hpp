#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

#include "krf/grid.hpp"

namespace krf::test {

inline GridPtr grid(std::size_t count = 1024) { return make_grid(1e-6, 1e6, count); }

// Adaptive Gauss-Kronrod on [a, b]; used as an independent reference for
// integrals the library computes on its own grid.
inline double integrate(const std::function<double(double)>& g, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-14);
}

// h(r) = c0 exp(-int_0^r xi(s)/s ds), integrated in log s from far below r_min.
inline double h_reference(const std::function<double(double)>& xi, double c0, double r) {
  auto g = [&](double x) { return xi(std::exp(x)); };
  return c0 * std::exp(-integrate(g, std::log(r) - 60.0, std::log(r)));
}

inline double f_reference(const std::function<double(double)>& xi, double c0, double r) {
  auto h = [&](double s) { return h_reference(xi, c0, s); };
  return integrate(h, 0.0, r) / r;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace krf::test
