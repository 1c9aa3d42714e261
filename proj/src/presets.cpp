#include "krf/presets.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "krf/error.hpp"
#include "krf/interp.hpp"

namespace krf {

XiSource make_preset(const std::string& name, const PresetParams& params) {
  if (!(params.c0 > 0.0)) fail(ErrorCode::InvalidParams, "metric.c0 must be positive");
  XiSource s;
  s.name = name;
  s.c0 = params.c0;
  if (name == "euclidean") {
    s.xi = [](double) { return 0.0; };
    s.slope0 = 0.0;
    s.description = "euclidean: xi = 0";
  } else if (name == "cigar") {
    s.xi = [](double r) { return r / (1.0 + r); };
    s.slope0 = 1.0;
    s.description = "cigar: xi = r/(1+r)";
  } else if (name == "conoid") {
    const double b = params.beta;
    if (!(b > 0.0 && b < 1.0)) {
      std::ostringstream os;
      os << "conoid needs 0 < beta < 1, got " << b;
      fail(ErrorCode::InvalidParams, os.str());
    }
    s.xi = [b](double r) { return b * r / (1.0 + r); };
    s.slope0 = b;
    std::ostringstream os;
    os << "conoid: xi = " << b << " r/(1+r)";
    s.description = os.str();
  } else if (name == "c2_log") {
    s.xi = [](double r) { return 1.0 - 1.0 / (1.0 + std::log1p(r)); };
    s.slope0 = 1.0;
    s.description = "c2_log: xi = 1 - 1/(1+log(1+r))";
  } else if (name == "custom_table") {
    std::vector<double> rs, xs;
    for (auto [r, x] : params.table) {
      if (r < 0.0) fail(ErrorCode::InvalidParams, "table radius must be non-negative");
      if (r == 0.0 && x != 0.0) fail(ErrorCode::InvalidParams, "table must have xi(0) = 0");
      if (!std::isfinite(x)) fail(ErrorCode::InvalidParams, "table xi must be finite");
      if (r == 0.0) continue;
      rs.push_back(r);
      xs.push_back(x);
    }
    if (rs.empty()) fail(ErrorCode::InvalidParams, "custom_table needs at least one pair with r > 0");
    rs.insert(rs.begin(), 0.0);
    xs.insert(xs.begin(), 0.0);
    s.slope0 = xs[1] / rs[1];
    auto interp = std::make_shared<numeric::MonotoneCubic>(rs, xs);
    s.xi = [interp](double r) { return (*interp)(r); };
    s.description = "custom_table: " + std::to_string(rs.size() - 1) + " pairs";
  } else {
    fail(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
  }
  return s;
}

Profile sample(const XiSource& src, const GridPtr& grid) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = src.xi(grid->r(i));
  return Profile(grid, std::move(v));
}

Profile preset_xi(const std::string& name, const PresetParams& params, const GridPtr& grid) {
  return sample(make_preset(name, params), grid);
}

MetricProfile build_metric(const XiSource& src, const GridPtr& grid, int n) {
  return make_metric(n, sample(src, grid), src.c0, src.slope0);
}

XiSource rescaled(const XiSource& src, double k) {
  if (!(k >= 1.0)) fail(ErrorCode::InvalidK, "rescaling factor must be >= 1");
  XiSource out = src;
  auto base = src.xi;
  out.xi = [base, k](double r) { return base(r / k); };
  out.slope0 = src.slope0 / k;
  out.c0 = src.c0 / k;
  std::ostringstream os;
  os << src.description << ", pulled back by k=" << k;
  out.description = os.str();
  return out;
}

namespace families {

XiSource log_growth() {
  return {"log_growth", [](double r) { return std::log1p(r); }, 1.0, 1.0, "xi = log(1+r)"};
}

XiSource steep(double p) {
  std::ostringstream os;
  os << "xi = " << p << " r/(1+r)";
  return {"steep", [p](double r) { return p * r / (1.0 + r); }, p, 1.0, os.str()};
}

XiSource indefinite(double a) {
  std::ostringstream os;
  os << "xi = r/(1+r) - " << a << " r^2/(1+r^2)";
  return {"indefinite", [a](double r) { return r / (1.0 + r) - a * r * r / (1.0 + r * r); }, 1.0,
          1.0, os.str()};
}

XiSource inverse_cube() { return steep(3.0); }

XiSource spiked_cigar(double amplitude, int decades, double width0) {
  auto fn = [=](double r) {
    double x = std::log(r);
    double v = r / (1.0 + r);
    for (int j = 1; j <= decades; ++j) {
      double w = width0 * std::pow(2.0, -j / 3.0);
      double d = (x - j * std::log(10.0)) / w;
      v += amplitude * std::exp(-0.5 * d * d);
    }
    return v;
  };
  std::ostringstream os;
  os << "cigar with " << decades << " bumps of height " << amplitude;
  return {"spiked_cigar", fn, 1.0, 1.0, os.str()};
}

}  // namespace families

}  // namespace krf
