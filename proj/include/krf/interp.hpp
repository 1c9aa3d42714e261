#pragma once

#include <memory>
#include <span>
#include <vector>

namespace boost::math::interpolators {
template <class Real>
class cardinal_cubic_b_spline;
template <class RandomAccessContainer>
class pchip;
}  // namespace boost::math::interpolators

namespace krf::numeric {

// Cubic B-spline through samples on a uniform grid x0 + i*dx.
class UniformSpline {
 public:
  UniformSpline(std::span<const double> y, double x0, double dx);
  ~UniformSpline();
  UniformSpline(UniformSpline&&) noexcept;
  UniformSpline& operator=(UniformSpline&&) noexcept;

  double operator()(double x) const;
  double prime(double x) const;
  double double_prime(double x) const;
  double x_begin() const noexcept { return x0_; }
  double x_end() const noexcept { return x1_; }

 private:
  double clamp(double x) const;
  double x0_, x1_;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

// Monotone piecewise cubic through arbitrary increasing knots; returns knot
// values exactly at the knots.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  ~MonotoneCubic();
  MonotoneCubic(MonotoneCubic&&) noexcept;
  MonotoneCubic& operator=(MonotoneCubic&&) noexcept;

  double operator()(double x) const;
  double x_begin() const { return xs_.front(); }
  double x_end() const { return xs_.back(); }

 private:
  std::vector<double> xs_, ys_;
  std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> impl_;
};

}  // namespace krf::numeric
