#pragma once

#include <span>
#include <vector>

namespace krf::numeric {

// Running integral of samples g on a uniform grid of spacing dx, out[0] = 0.
// Fourth-order: four-point Lagrange rule per interval, one-sided at the ends.
std::vector<double> cumulative_integral(std::span<const double> g, double dx);

// Running integral of g(x) e^x where e^{x_i} = r_i: g is interpolated by the
// same four-point cubics and the exponential is integrated exactly, so
// constant g is reproduced to rounding.
std::vector<double> cumulative_integral_exp(std::span<const double> g, std::span<const double> r,
                                            double dx);

// Trapezoid version, kept as the low-order reference in refinement tests.
std::vector<double> cumulative_trapezoid(std::span<const double> g, double dx);

// dy/dx on a uniform grid: centered inside, second-order one-sided at the ends.
std::vector<double> derivative(std::span<const double> y, double dx);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace krf::numeric
