#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "krf/grid.hpp"
#include "krf/radial_metric.hpp"

namespace krf {

// A generating function given analytically, with its slope at the origin and
// the normalization h(0).
struct XiSource {
  std::string name;
  std::function<double(double)> xi;
  double slope0 = 0.0;
  double c0 = 1.0;
  std::string description;
};

struct PresetParams {
  double beta = 0.5;
  double c0 = 1.0;
  std::vector<std::pair<double, double>> table;  // (r, xi) for custom_table
};

XiSource make_preset(const std::string& name, const PresetParams& params = {});
Profile preset_xi(const std::string& name, const PresetParams& params, const GridPtr& grid);

Profile sample(const XiSource& src, const GridPtr& grid);
MetricProfile build_metric(const XiSource& src, const GridPtr& grid, int n);

// Source of the pullback by z -> z/sqrt(k): xi(r/k), h(0)/k.
XiSource rescaled(const XiSource& src, double k);

// Families used by tests and demonstrations; not reachable through preset names.
namespace families {
XiSource log_growth();                  // xi = log(1+r)
XiSource steep(double p);               // xi = p r/(1+r)
XiSource indefinite(double amplitude);  // r/(1+r) - a r^2/(1+r^2)
XiSource inverse_cube();                // h = (1+r)^-3
// cigar plus Gaussian-in-log-r bumps of height `amplitude` centered at r = 10^j,
// j = 1..decades, widths shrinking by 2^(-1/3) per decade
XiSource spiked_cigar(double amplitude, int decades, double width0);
}  // namespace families

}  // namespace krf
