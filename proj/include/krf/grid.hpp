#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace krf {

// Log-uniform radial grid in r = |z|^2. Node i sits at x_i = log r_min + i*dx.
class RadialGrid {
 public:
  RadialGrid(double r_min, double r_max, std::size_t count);

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double dx() const noexcept { return dx_; }
  double x_min() const noexcept { return x_min_; }
  double r(std::size_t i) const { return nodes_[i]; }
  double x(std::size_t i) const { return x_min_ + dx_ * static_cast<double>(i); }
  std::span<const double> nodes() const noexcept { return nodes_; }

  // Node index with r(i) <= r < r(i+1), clamped to [0, size-2].
  std::size_t locate(double r) const;
  // Smallest node index with r(i) >= r (size() if none).
  std::size_t first_at_or_above(double r) const;

  bool same_as(const RadialGrid& other) const noexcept;

 private:
  double r_min_, r_max_, x_min_, dx_;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double r_min, double r_max, std::size_t count);
// Nested refinement: (count-1)*2^level + 1 nodes over the same range.
GridPtr refine_grid(const RadialGrid& grid, int level);

struct Profile {
  GridPtr grid;
  std::vector<double> values;

  Profile() = default;
  Profile(GridPtr g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double r(std::size_t i) const { return grid->r(i); }
};

void require_same_grid(const Profile& a, const Profile& b);

}  // namespace krf
