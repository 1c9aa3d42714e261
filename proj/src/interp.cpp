#include "krf/interp.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "krf/error.hpp"

namespace krf::numeric {

using boost::math::interpolators::cardinal_cubic_b_spline;

UniformSpline::UniformSpline(std::span<const double> y, double x0, double dx)
    : x0_(x0), x1_(x0 + dx * static_cast<double>(y.size() - 1)),
      spline_(std::make_unique<cardinal_cubic_b_spline<double>>(y.data(), y.size(), x0, dx)) {}

UniformSpline::~UniformSpline() = default;
UniformSpline::UniformSpline(UniformSpline&&) noexcept = default;
UniformSpline& UniformSpline::operator=(UniformSpline&&) noexcept = default;

double UniformSpline::clamp(double x) const { return std::clamp(x, x0_, x1_); }
double UniformSpline::operator()(double x) const { return (*spline_)(clamp(x)); }
double UniformSpline::prime(double x) const { return spline_->prime(clamp(x)); }
double UniformSpline::double_prime(double x) const { return spline_->double_prime(clamp(x)); }

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : xs_(x), ys_(y) {
  if (x.size() < 2 || x.size() != y.size())
    fail(ErrorCode::InvalidParams, "table needs at least two (r, xi) pairs");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) fail(ErrorCode::InvalidParams, "table radii must be strictly increasing");
  if (x.size() >= 4)
    impl_ = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x),
                                                                                     std::move(y));
}

MonotoneCubic::~MonotoneCubic() = default;
MonotoneCubic::MonotoneCubic(MonotoneCubic&&) noexcept = default;
MonotoneCubic& MonotoneCubic::operator=(MonotoneCubic&&) noexcept = default;

double MonotoneCubic::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  if (*it == x) return ys_[static_cast<std::size_t>(it - xs_.begin())];
  if (impl_) return (*impl_)(x);
  std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
}

}  // namespace krf::numeric
