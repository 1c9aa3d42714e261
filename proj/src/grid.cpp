#include "krf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krf/error.hpp"

namespace krf {

RadialGrid::RadialGrid(double r_min, double r_max, std::size_t count)
    : r_min_(r_min), r_max_(r_max) {
  if (!(r_min > 0.0) || !std::isfinite(r_max) || !(r_max > r_min)) {
    std::ostringstream os;
    os << "grid needs 0 < r_min < r_max, got r_min=" << r_min << " r_max=" << r_max;
    fail(ErrorCode::InvalidGrid, os.str());
  }
  if (count < 16) fail(ErrorCode::InvalidGrid, "grid count must be at least 16");
  if (r_min > 1e-6 * r_max * (1.0 + 1e-12))
    fail(ErrorCode::InvalidGrid, "grid must span at least six decades (r_min <= 1e-6 r_max)");
  x_min_ = std::log(r_min);
  dx_ = (std::log(r_max) - x_min_) / static_cast<double>(count - 1);
  nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) nodes_[i] = std::exp(x(i));
  nodes_.front() = r_min;
  nodes_.back() = r_max;
}

std::size_t RadialGrid::locate(double r) const {
  if (r <= nodes_.front()) return 0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(i, nodes_.size() - 2);
}

std::size_t RadialGrid::first_at_or_above(double r) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool RadialGrid::same_as(const RadialGrid& other) const noexcept {
  return this == &other ||
         (r_min_ == other.r_min_ && r_max_ == other.r_max_ && size() == other.size());
}

GridPtr make_grid(double r_min, double r_max, std::size_t count) {
  return std::make_shared<const RadialGrid>(r_min, r_max, count);
}

GridPtr refine_grid(const RadialGrid& grid, int level) {
  std::size_t count = (grid.size() - 1) * (std::size_t{1} << level) + 1;
  return make_grid(grid.r_min(), grid.r_max(), count);
}

Profile::Profile(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) fail(ErrorCode::InvalidProfile, "profile without grid");
  if (values.size() != grid->size())
    fail(ErrorCode::InvalidProfile, "profile length " + std::to_string(values.size()) +
                                        " does not match grid count " + std::to_string(grid->size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      fail(ErrorCode::InvalidProfile, "non-finite profile value at node " + std::to_string(i));
}

void require_same_grid(const Profile& a, const Profile& b) {
  if (!a.grid || !b.grid || !a.grid->same_as(*b.grid))
    fail(ErrorCode::GridMismatch, "profiles live on different grids");
}

}  // namespace krf
