#include "krf/acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "krf/classify.hpp"
#include "krf/comparison.hpp"
#include "krf/curvature.hpp"
#include "krf/error.hpp"
#include "krf/flow.hpp"
#include "krf/io.hpp"
#include "krf/presets.hpp"

namespace krf {

namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kReconstructionTol = 1e-8;
constexpr double kMinOrder = 1.9;
constexpr double kOracleRelTol = 1e-3;
constexpr double kOracleFloor = 1e-6;
constexpr double kOffPatternTol = 1e-6;
constexpr double kExactFlowTol = 1e-4;
constexpr double kExactH11 = 0.268941;
constexpr double kFlatTol = 1e-10;
constexpr double kXiRTol = -1e-6;
constexpr double kFTol = 1e-8;
constexpr double kTailVariation = 0.2;
constexpr double kLyhTol = 1e-4;
constexpr double kRescaledBelow = 0.2;
constexpr double kUniquenessOrder = 1.5;
constexpr double kCurvatureSpread = 2.0;
constexpr double kClaimIBound = 1.0 + 2.0 * std::numbers::ln2;
constexpr double kObstructionSlack = 0.1;
constexpr double kC3Log2Tol = 1e-3;
constexpr double kEquivarianceFactor = 10.0;
constexpr double kResumeTol = 1e-12;

GridPtr standard_grid(std::size_t count) { return make_grid(1e-6, 1e6, count); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

struct Builder {
  CriterionResult r;
  std::ostringstream detail;
  bool ok = true;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "FAILED " << what << "; ";
    }
  }
  void note(const std::string& s) { detail << s << "; "; }
  CriterionResult done() {
    r.passed = ok;
    r.detail = detail.str();
    if (r.detail.size() >= 2) r.detail.resize(r.detail.size() - 2);
    return r;
  }
};

double max_rel_error(const Profile& p, double (*exact)(double)) {
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e = std::max(e, std::abs(p[i] / exact(p.r(i)) - 1.0));
  return e;
}

double cigar_h(double r) { return 1.0 / (1.0 + r); }
double cigar_f(double r) { return r < 1e-8 ? 1.0 - r / 2.0 + r * r / 3.0 : std::log1p(r) / r; }

CriterionResult c01() {
  Builder b;
  const MetricProfile m = build_metric(make_preset("cigar"), standard_grid(2048), 2);
  const double eh = max_rel_error(m.h, cigar_h), ef = max_rel_error(m.f, cigar_f);
  b.note("2048 nodes: max rel err h " + fmt(eh) + ", f " + fmt(ef));
  b.check(eh <= kReconstructionTol && ef <= kReconstructionTol, "max rel error <= 1e-8");
  std::vector<double> errs;
  const GridPtr base = standard_grid(512);
  for (int l = 0; l < 3; ++l) {
    const MetricProfile ml = build_metric(make_preset("cigar"), refine_grid(*base, l), 2);
    errs.push_back(std::max(max_rel_error(ml.h, cigar_h), max_rel_error(ml.f, cigar_f)));
  }
  const double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
  b.note("refinement orders " + fmt(o1, 3) + ", " + fmt(o2, 3));
  b.check(std::min(o1, o2) >= kMinOrder, "refinement order >= 1.9");
  return b.done();
}

CriterionResult c02(std::uint64_t seed) {
  Builder b;
  const GridPtr grid = standard_grid(2048);
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double worst_rel = 0.0, worst_off = 0.0;
  for (const char* name : {"cigar", "conoid"}) {
    const MetricProfile m = build_metric(make_preset(name), grid, 2);
    const CurvatureProfile c = curvature_components(m);
    const MetricInterpolant mi(m);
    const std::size_t lo = grid->first_at_or_above(1e-2), hi = grid->first_at_or_above(1e3);
    for (int k = 0; k < 10; ++k) {
      const std::size_t i = lo + static_cast<std::size_t>(unit() * static_cast<double>(hi - lo));
      const double r = grid->r(i);
      // random direction in C^2 with |z|^2 = r
      std::complex<double> z[2];
      double norm = 0.0;
      for (auto& zj : z) {
        zj = {2.0 * unit() - 1.0, 2.0 * unit() - 1.0};
        norm += std::norm(zj);
      }
      for (auto& zj : z) zj *= std::sqrt(r / norm);
      const OracleResult o = fd_curvature_oracle(mi, z);
      const double scale = std::max(o.magnitude, kOracleFloor);
      const double rel = std::max({std::abs(c.A[i] - o.A), std::abs(c.B()[i] - o.B), std::abs(c.Cc()[i] - o.Cc)}) / scale;
      worst_rel = std::max(worst_rel, rel);
      worst_off = std::max(worst_off, o.off_pattern);
    }
  }
  b.note("20 points: worst relative mismatch " + fmt(worst_rel) + ", worst off-pattern " + fmt(worst_off));
  b.check(worst_rel <= kOracleRelTol, "A/B/C agreement <= 1e-3");
  b.check(worst_off <= kOffPatternTol, "off-pattern components <= 1e-6");
  return b.done();
}

double exact_n1_error(const GridPtr& grid, double* h11 = nullptr) {
  FlowConfig c;
  c.n = 1;
  c.grid = grid;
  c.t_end = 1.0;
  const Trajectory tr = run_flow(make_preset("cigar"), c);
  const MetricProfile& m = tr.states.back().metric;
  double e = 0.0;
  for (std::size_t i = 0; i < m.h.size(); ++i) e = std::max(e, std::abs(m.h[i] - 1.0 / (std::numbers::e + m.h.r(i))));
  if (h11) *h11 = MetricInterpolant(m).h(1.0);
  return e;
}

CriterionResult c03() {
  Builder b;
  double h11 = 0.0;
  const double e = exact_n1_error(standard_grid(1024), &h11);
  b.note("1024 nodes: sup err " + fmt(e) + ", h(1,1) = " + fmt(h11, 8));
  b.check(e <= kExactFlowTol, "sup error <= 1e-4");
  b.check(std::abs(h11 - kExactH11) <= kExactFlowTol, "h(1,1) = 0.268941 +- 1e-4");
  const GridPtr base = standard_grid(257);
  const double e0 = exact_n1_error(base), e1 = exact_n1_error(refine_grid(*base, 1)),
               e2 = exact_n1_error(refine_grid(*base, 2));
  const double o = std::min(std::log2(e0 / e1), std::log2(e1 / e2));
  b.note("order " + fmt(o, 3));
  b.check(o >= kMinOrder, "order >= 1.9");
  return b.done();
}

CriterionResult c04() {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(1024);
  c.t_end = 10.0;
  for (int t = 1; t < 10; ++t) c.output_times.push_back(t);
  const Trajectory tr = run_flow(make_preset("euclidean"), c);
  double e = 0.0;
  for (const FlowState& s : tr.states)
    for (std::size_t i = 0; i < s.metric.h.size(); ++i)
      e = std::max({e, std::abs(s.metric.h[i] - 1.0), std::abs(s.metric.f[i] - 1.0)});
  b.note("sup |h - 1|, |f - 1| over t in [0, 10]: " + fmt(e));
  b.check(e <= kFlatTol, "stationary to 1e-10");
  return b.done();
}

FlowConfig positivity_config() {
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(1024);
  c.t_end = 5.0;
  for (int k = 1; k < 20; ++k) c.output_times.push_back(0.25 * k);
  return c;
}

CriterionResult c05() {
  Builder b;
  for (const char* name : {"cigar", "conoid"}) {
    const Trajectory tr = run_flow(make_preset(name), positivity_config());
    double min_xr = INFINITY, max_F = -INFINITY;
    bool decreasing = true;
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
      for (double v : xi_prime(tr.states[s].metric).values) min_xr = std::min(min_xr, v);
      for (double v : log_det_ratio(tr, tr.states[s].t).values) max_F = std::max(max_F, v);
      if (s > 0 && !(tr.states[s].metric.c0 < tr.states[s - 1].metric.c0)) decreasing = false;
    }
    b.note(std::string(name) + ": min xi_r " + fmt(min_xr) + ", max F " + fmt(max_F) +
           (decreasing ? ", h(0,t) decreasing" : ", h(0,t) NOT decreasing"));
    b.check(min_xr >= kXiRTol, std::string(name) + " xi_r >= -1e-6");
    b.check(max_F <= kFTol, std::string(name) + " F <= 1e-8");
    b.check(decreasing, std::string(name) + " h(0,t) strictly decreasing");
  }
  return b.done();
}

double variation(const std::vector<double>& v) {
  const double hi = *std::max_element(v.begin(), v.end()), lo = *std::min_element(v.begin(), v.end());
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

CriterionResult c06() {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(1024);
  c.t_end = 4.0;
  c.output_times = {1.0, 2.0};
  const Trajectory cigar = run_flow(make_preset("cigar"), c);
  const Trajectory conoid = run_flow(make_preset("conoid"), c);
  std::vector<double> second, first;
  for (double t : {1.0, 2.0, 4.0}) {
    second.push_back(f_tail_constants(cigar, t).second);
    first.push_back(f_tail_constants(conoid, t).first);
  }
  b.note("cigar c(t) for F - nF(1): " + fmt(second[0]) + ", " + fmt(second[1]) + ", " + fmt(second[2]));
  b.note("conoid c(t) for F + n log r - F(1): " + fmt(first[0]) + ", " + fmt(first[1]) + ", " + fmt(first[2]));
  b.check(variation(second) <= kTailVariation, "cigar constant varies <= 20%");
  b.check(variation(first) <= kTailVariation, "conoid constant varies <= 20%");
  return b.done();
}

CriterionResult c07() {
  Builder b;
  std::vector<double> radii;
  for (int i = 0; i < 20; ++i) radii.push_back(std::pow(10.0, -3.0 + 6.0 * i / 19.0));
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(1024);
  c.t_end = 4.0;
  c.output_times = {0.5, 1.0, 2.0};
  const std::vector<std::string> names = {"euclidean", "cigar", "conoid", "c2_log"};
  const std::vector<double> times = {0.5, 1.0, 2.0, 4.0};
  std::vector<Trajectory> runs;
  double scale = 0.0;
  for (const auto& name : names) {
    runs.push_back(run_flow(make_preset(name), c));
    for (double t : times)
      for (double v : scalar_curvature(runs.back().at(t).metric).values) scale = std::max(scale, std::abs(v));
  }
  b.note("max R over the sweep " + fmt(scale));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const LyhReport rep = lyh_monotonicity(runs[i], radii, times, kLyhTol, scale);
    b.note(names[i] + ": worst margin " + fmt(rep.worst_margin));
    b.check(rep.passed, names[i] + " t R non-decreasing");
  }
  return b.done();
}

CriterionResult c08() {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(1024);
  c.t_end = 40.0;
  c.output_times = {10.0, 20.0};
  const Trajectory tr = run_flow(make_preset("conoid"), c);
  const double d10 = rescaled_deviation(tr, 10, 10), d20 = rescaled_deviation(tr, 20, 10), d40 = rescaled_deviation(tr, 40, 10);
  b.note("deviation on r <= 10 at t = 10, 20, 40: " + fmt(d10) + ", " + fmt(d20) + ", " + fmt(d40));
  b.check(d10 > d20 && d20 > d40, "strictly decreasing");
  b.check(d40 < kRescaledBelow, "below 0.2 at t = 40");
  return b.done();
}

CriterionResult c09() {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(257);
  c.t_end = 1.0;
  const RefinementReport rep = refinement_uniqueness(make_preset("cigar"), c, 3);
  b.note("differences " + fmt(rep.differences[0]) + ", " + fmt(rep.differences[1]) + "; order " + fmt(rep.orders[0], 3));
  b.check(rep.contracting, "pairwise differences contract");
  b.check(rep.orders[0] >= kUniquenessOrder, "order >= 1.5");
  return b.done();
}

CriterionResult c10() {
  Builder b;
  const MetricProfile m = build_metric(make_preset("c2_log"), standard_grid(1024), 2);
  std::vector<double> sups;
  for (double eps : {0.1, 0.01, 0.001}) {
    try {
      const ComparisonResult res = assemble_comparison_metric(m, eps);
      sups.push_back(res.curvature_sup);
      b.note("eps " + fmt(eps) + ": k " + std::to_string(res.k) + ", min h/h~ " + fmt(res.lower) + " vs " + fmt(res.lower_bound));
      b.check(res.lower_holds, "h/h~ >= 1/(4 e eps) at eps " + fmt(eps));
      if (res.bumps) {
        const BumpSequence& s = *res.bumps;
        const double k = static_cast<double>(res.k);
        bool zero_below = true;
        for (std::size_t i = 0; i < s.o.size(); ++i)
          if (s.o.r(i) < res.R_k && s.o[i] != 0.0) zero_below = false;
        b.check(zero_below, "o_k = 0 below R_k");
        b.check(s.max_abs_o <= 1.0 / k, "|o_k| <= 1/k");
        b.check(s.max_kr_o_prime <= 4.0, "|o_k'| <= 4/(k r)");
        b.check(s.max_abs_I <= kClaimIBound, "|I| <= 1 + 2 log 2");
      }
    } catch (const Error& e) {
      b.check(false, "construction at eps " + fmt(eps) + " (" + e.what() + ")");
    }
  }
  if (sups.size() == 3) {
    const double spread = *std::max_element(sups.begin(), sups.end()) / *std::min_element(sups.begin(), sups.end());
    b.note("curvature sup spread " + fmt(spread));
    b.check(spread <= kCurvatureSpread, "curvature sup within 2x across eps");
  }
  return b.done();
}

CriterionResult c11(std::uint64_t seed) {
  Builder b;
  const GridPtr grid = standard_grid(1024);
  const MetricProfile m = build_metric(make_preset("cigar"), grid, 2);
  const ObstructionReport rep = cigar_obstruction_bound(m, conoid_candidates(grid, 2, 20, seed), kObstructionSlack);
  b.note("20 candidates: max alpha " + fmt(rep.max_alpha) + ", h(1) " + fmt(rep.h_at_one) + ", bound " +
         fmt(rep.h_at_one * (1.0 + kObstructionSlack)));
  b.check(rep.within_h1, "max alpha <= 1.1 h(1)");
  return b.done();
}

CriterionResult c12() {
  Builder b;
  const double T = existence_horizon(1.0, 1.0, 2);
  const auto [lo, hi] = c1_equivalence_bounds(0.0, 0.0, 0.5, 4.0);
  const C3Record c3 = check_c3(build_metric(make_preset("cigar"), standard_grid(2048), 2));
  b.note("horizon " + fmt(T, 17) + ", bounds (" + fmt(lo, 17) + ", " + fmt(hi, 17) + "), c3 b " + fmt(c3.b, 8));
  b.check(T == 0.25, "existence_horizon(1, 1, 2) == 0.25");
  b.check(lo == 0.25 && hi == 0.5, "c1 bounds == (0.25, 0.5)");
  b.check(c3.holds && std::abs(c3.b - std::numbers::ln2) <= kC3Log2Tol, "c3 b = log 2 +- 1e-3");
  return b.done();
}

CriterionResult c13() {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(512);
  c.t_end = 1.0;
  for (const char* name : {"cigar", "conoid"}) {
    for (double k : {2.0, 5.0}) {
      const EquivarianceReport rep = equivariance_defect(make_preset(name), c, k);
      b.note(std::string(name) + " k=" + fmt(k) + ": defect " + fmt(rep.defect) + ", estimate " + fmt(rep.error_estimate));
      b.check(rep.defect <= kEquivarianceFactor * rep.error_estimate, std::string(name) + " k=" + fmt(k));
    }
  }
  return b.done();
}

std::string file_bytes(const std::vector<std::string>& paths) {
  std::string all;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    all += ss.str();
  }
  return all;
}

bool bit_identical(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) return false;
  for (std::size_t s = 0; s < a.states.size(); ++s) {
    const auto& x = a.states[s].metric;
    const auto& y = b.states[s].metric;
    if (a.states[s].t != b.states[s].t) return false;
    if (std::memcmp(x.f.values.data(), y.f.values.data(), x.f.size() * sizeof(double)) != 0 ||
        std::memcmp(x.h.values.data(), y.h.values.data(), x.h.size() * sizeof(double)) != 0 ||
        std::memcmp(x.xi.values.data(), y.xi.values.data(), x.xi.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

CriterionResult c14(const std::string& work_dir) {
  Builder b;
  FlowConfig c;
  c.n = 2;
  c.grid = standard_grid(512);
  c.t_end = 2.0;
  c.output_times = {1.0};
  const Trajectory a = run_flow(make_preset("cigar"), c);
  const Trajectory a2 = run_flow(make_preset("cigar"), c);
  b.check(bit_identical(a, a2), "repeated runs bit-identical in memory");

  const fs::path dir = fs::path(work_dir);
  const auto files1 = export_records(a, (dir / "run1").string());
  const auto files2 = export_records(a2, (dir / "run2").string());
  b.check(file_bytes(files1) == file_bytes(files2), "exported files identical");

  const std::string snap = (dir / "t1.snap").string();
  save_snapshot(a.at(1.0), snap, "cigar");
  const FlowState loaded = load_snapshot(snap).state;
  const MetricProfile& orig = a.at(1.0).metric;
  b.check(loaded.t == 1.0 && std::memcmp(loaded.metric.f.values.data(), orig.f.values.data(),
                                         orig.f.size() * sizeof(double)) == 0,
          "snapshot roundtrip bit-identical");
  FlowConfig rc = c;
  rc.output_times.clear();
  const Trajectory resumed = resume_flow(loaded, rc, "resume");
  double diff = 0.0;
  const MetricProfile& x = resumed.states.back().metric;
  const MetricProfile& y = a.states.back().metric;
  for (std::size_t i = 0; i < x.h.size(); ++i)
    diff = std::max({diff, std::abs(x.h[i] - y.h[i]), std::abs(x.f[i] - y.f[i])});
  b.note("resume at t = 1 vs uninterrupted at t = 2: max diff " + fmt(diff));
  b.check(diff <= kResumeTol, "resume matches within 1e-12");
  return b.done();
}

}  // namespace

std::string criterion_name(int id) {
  static const char* names[] = {"closed-form reconstruction",
                                "curvature oracle agreement",
                                "exact flow solution (n = 1)",
                                "flat fixed point",
                                "preserved positivity",
                                "determinant tail bounds",
                                "Li-Yau-Hamilton monotonicity",
                                "convergence after rescaling",
                                "uniqueness surrogate",
                                "comparison metric construction",
                                "cigar obstruction",
                                "formula checks",
                                "equivariance",
                                "determinism and persistence"};
  if (id < 1 || id > kCriterionCount) fail(ErrorCode::InvalidParams, "criterion id out of range");
  return names[id - 1];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  CriterionResult r;
  const std::string name = criterion_name(id);
  try {
    switch (id) {
      case 1: r = c01(); break;
      case 2: r = c02(opts.seed); break;
      case 3: r = c03(); break;
      case 4: r = c04(); break;
      case 5: r = c05(); break;
      case 6: r = c06(); break;
      case 7: r = c07(); break;
      case 8: r = c08(); break;
      case 9: r = c09(); break;
      case 10: r = c10(); break;
      case 11: r = c11(opts.seed); break;
      case 12: r = c12(); break;
      case 13: r = c13(); break;
      case 14: {
        fs::path dir = opts.work_dir.empty()
                           ? fs::temp_directory_path() / ("krf_acceptance_" + std::to_string(::getpid()))
                           : fs::path(opts.work_dir);
        fs::create_directories(dir);
        r = c14(dir.string());
        if (opts.work_dir.empty()) fs::remove_all(dir);
        break;
      }
    }
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = name;
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << std::setfill('0') << r.id << " " << r.name << ": "
     << r.detail;
  return os.str();
}

}  // namespace krf
