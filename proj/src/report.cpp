#include "krf/report.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>

#include "krf/acceptance.hpp"
#include "krf/classify.hpp"
#include "krf/comparison.hpp"
#include "krf/curvature.hpp"
#include "krf/error.hpp"
#include "krf/io.hpp"

namespace krf {

namespace fs = std::filesystem;

namespace {

struct ModuleError {
  std::string module;
  std::string message;
};

template <class F>
auto in_module(const std::string& module, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw ModuleError{module, e.what()};
  }
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.output_dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int do_classify(const RunConfig& cfg, std::ostream& out) {
  const MetricProfile m = in_module("radial_metric", [&] { return build_metric(source_of(cfg), grid_of(cfg), cfg.n); });
  const ClassificationReport rep = in_module("classify", [&] { return classify(m); });
  in_module("cli_io", [&] {
    export_records(m, path_in(cfg, "metric.csv"));
    export_records(rep, path_in(cfg, "classification.csv"));
    return 0;
  });
  out << "preset " << cfg.preset << ", n = " << cfg.n << "\n";
  out << "xi limit: " << (rep.xi_limit ? format_double(*rep.xi_limit) : "none") << "\n";
  out << "c1: " << (rep.c1.holds ? "holds" : "fails") << " (alpha " << rep.c1.alpha << ", beta " << rep.c1.beta
      << ", gamma " << rep.c1.gamma << ")\n";
  out << "c2: " << (rep.c2.holds ? "holds" : "fails") << " (delta " << rep.c2.delta << ")\n";
  out << "c3: " << (rep.c3.holds ? "holds" : "fails") << " (b " << rep.c3.b << ")\n";
  out << "growth: " << (rep.growth.cigar ? "cigar" : rep.growth.conoid ? "conoid" : "neither") << " (exponent "
      << rep.growth.exponent << ")\n";
  out << "completeness: " << to_string(rep.completeness) << "\n";
  out << "bisectional sign: " << to_string(rep.sign) << "\n";
  return 0;
}

int do_curvature(const RunConfig& cfg, std::ostream& out) {
  const GridPtr grid = grid_of(cfg);
  const MetricProfile m = in_module("radial_metric", [&] { return build_metric(source_of(cfg), grid, cfg.n); });
  const CurvatureProfile c = in_module("curvature", [&] { return curvature_components(m); });
  in_module("cli_io", [&] {
    export_records(m, c, path_in(cfg, "curvature.csv"));
    return 0;
  });

  const std::size_t lo = grid->first_at_or_above(std::max(1e-2, 10.0 * grid->r_min()));
  const std::size_t hi = grid->first_at_or_above(std::min(1e3, grid->r_max() / 10.0));
  Table t{{"r", "A", "A_oracle", "off_pattern"}, {{}, {}, {}, {}}};
  if (cfg.n >= 2) {
    t.header.insert(t.header.end(), {"B", "B_oracle", "C", "C_oracle"});
    t.columns.resize(8);
  }
  double worst = 0.0;
  if (cfg.oracle_points > 0 && hi > lo) {
    const MetricInterpolant mi(m);
    std::mt19937_64 rng(cfg.seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int k = 0; k < cfg.oracle_points; ++k) {
      const std::size_t i = lo + static_cast<std::size_t>(unit() * static_cast<double>(hi - lo));
      std::vector<std::complex<double>> z(static_cast<std::size_t>(cfg.n));
      double norm = 0.0;
      for (auto& zj : z) {
        zj = {2.0 * unit() - 1.0, 2.0 * unit() - 1.0};
        norm += std::norm(zj);
      }
      for (auto& zj : z) zj *= std::sqrt(grid->r(i) / norm);
      const OracleResult o = in_module("curvature", [&] { return fd_curvature_oracle(mi, z); });
      const double scale = std::max(o.magnitude, 1e-6);
      t.columns[0].push_back(grid->r(i));
      t.columns[1].push_back(c.A[i]);
      t.columns[2].push_back(o.A);
      t.columns[3].push_back(o.off_pattern);
      worst = std::max(worst, std::abs(c.A[i] - o.A) / scale);
      if (cfg.n >= 2) {
        t.columns[4].push_back(c.B()[i]);
        t.columns[5].push_back(o.B);
        t.columns[6].push_back(c.Cc()[i]);
        t.columns[7].push_back(o.Cc);
        worst = std::max({worst, std::abs(c.B()[i] - o.B) / scale, std::abs(c.Cc()[i] - o.Cc) / scale});
      }
    }
  }
  in_module("cli_io", [&] {
    write_csv(path_in(cfg, "oracle.csv"), t);
    return 0;
  });
  out << "curvature sup " << curvature_sup(m) << ", sign " << to_string(bisectional_sign(m)) << "\n";
  out << "oracle points " << t.columns[0].size() << ", worst relative mismatch " << worst << "\n";
  return 0;
}

int do_flow(const RunConfig& cfg, std::ostream& out) {
  const FlowConfig fc = in_module("cli_io", [&] { return flow_config_of(cfg); });
  const Trajectory tr = in_module("flow", [&] { return run_flow(source_of(cfg), fc); });
  in_module("cli_io", [&] {
    export_records(tr, path_in(cfg, "trajectory"));
    Table s{{"t", "h_origin", "ratio_lower", "ratio_upper", "deviation"}, {{}, {}, {}, {}, {}}};
    const Profile& h0 = tr.states.front().metric.h;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      const Profile& h = tr.states[k].metric.h;
      double dev = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) dev = std::max(dev, std::abs(h[i] / h0[i] - 1.0));
      s.columns[0].push_back(tr.states[k].t);
      s.columns[1].push_back(tr.states[k].metric.c0);
      s.columns[2].push_back(tr.equivalence[k].first);
      s.columns[3].push_back(tr.equivalence[k].second);
      s.columns[4].push_back(dev);
    }
    write_csv(path_in(cfg, "flow.csv"), s);
    save_snapshot(tr.states.back(), path_in(cfg, "final.snap"), cfg.preset);
    return 0;
  });
  out << "flow " << cfg.preset << " n = " << cfg.n << " to t = " << cfg.t_end << ": " << tr.steps << " steps, "
      << tr.halvings << " halvings, " << tr.states.size() << " stored states\n";
  out << "h(0, t_end) = " << tr.states.back().metric.c0 << ", h ratio range [" << tr.equivalence.back().first << ", "
      << tr.equivalence.back().second << "]\n";
  return 0;
}

int do_compare(const RunConfig& cfg, std::ostream& out) {
  const GridPtr grid = grid_of(cfg);
  const MetricProfile m = in_module("radial_metric", [&] { return build_metric(source_of(cfg), grid, cfg.n); });
  if (in_module("classify", [&] { return check_c3(m).holds; })) {
    const ObstructionReport rep = in_module("comparison", [&] {
      return cigar_obstruction_bound(m, conoid_candidates(grid, cfg.n, cfg.candidates, cfg.seed), cfg.slack);
    });
    in_module("cli_io", [&] {
      std::vector<double> idx;
      for (std::size_t i = 0; i < rep.alphas.size(); ++i) idx.push_back(static_cast<double>(i));
      write_csv(path_in(cfg, "obstruction.csv"), {{"candidate", "alpha"}, {idx, rep.alphas}});
      return 0;
    });
    out << "obstruction sweep: " << rep.alphas.size() << " candidates, max alpha " << rep.max_alpha << ", h(1) "
        << rep.h_at_one << ", e sup(r h) " << rep.e_sup_rh << "\n";
    out << "max alpha <= (1 + " << rep.slack << ") h(1): " << (rep.within_h1 ? "yes" : "no") << "\n";
    return rep.within_h1 ? 0 : 1;
  }
  const ComparisonResult res = in_module("comparison", [&] { return assemble_comparison_metric(m, cfg.epsilon); });
  in_module("cli_io", [&] {
    const auto nodes = grid->nodes();
    std::vector<double> ratio(m.h.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = m.h[i] / res.metric.h[i];
    Table t{{"r", "xi", "xi_tilde", "h", "h_tilde", "ratio"},
            {std::vector<double>(nodes.begin(), nodes.end()), m.xi.values, res.xi_tilde.values, m.h.values,
             res.metric.h.values, ratio}};
    if (res.bumps) {
      t.header.insert(t.header.end(), {"o", "I"});
      t.columns.push_back(res.bumps->o.values);
      t.columns.push_back(res.bumps->I.values);
    }
    write_csv(path_in(cfg, "comparison.csv"), t);
    return 0;
  });
  out << "route " << res.route << ", k = " << res.k << ", epsilon " << res.epsilon << "\n";
  out << "h/h_tilde in [" << res.lower << ", " << res.upper << "], required lower bound " << res.lower_bound << ": "
      << (res.lower_holds ? "holds" : "violated") << "\n";
  out << "curvature sup " << res.curvature_sup;
  if (res.curvature_bound) out << " (bound " << *res.curvature_bound << ")";
  out << "\n";
  return res.lower_holds && res.curvature_holds ? 0 : 1;
}

int do_check(const RunConfig& cfg, std::ostream& out) {
  AcceptanceOptions opts;
  opts.seed = cfg.seed;
  const std::string work = path_in(cfg, "acceptance_work");
  opts.work_dir = work;
  const std::vector<CriterionResult> results = run_acceptance(opts);
  std::error_code ec;
  fs::remove_all(work, ec);
  std::string csv = "id,name,passed,detail\n";
  bool all = true;
  for (const CriterionResult& r : results) {
    out << format_result(r) << "\n";
    csv += std::to_string(r.id) + "," + csv_field(r.name) + "," + (r.passed ? "true" : "false") + "," +
           csv_field(r.detail) + "\n";
    all = all && r.passed;
  }
  in_module("cli_io", [&] {
    write_text(path_in(cfg, "acceptance.csv"), csv);
    return 0;
  });
  out << (all ? "all criteria passed" : "some criteria failed") << "\n";
  return all ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"classify", "curvature", "flow", "compare", "check-theorems"};
  return c;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::vector<std::pair<std::string, std::function<int(const RunConfig&, std::ostream&)>>> table = {
      {"classify", do_classify}, {"curvature", do_curvature}, {"flow", do_flow},
      {"compare", do_compare},   {"check-theorems", do_check}};
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == command; });
  if (it == table.end()) {
    err << "cli_io: unknown command '" << command << "'\n";
    return 2;
  }
  try {
    DirectoryLock lock(cfg.output_dir);
    write_text(path_in(cfg, "config.cfg"), to_text(cfg));
    return it->second(cfg, out);
  } catch (const ModuleError& e) {
    err << e.module << ": " << e.message << "\n";
  } catch (const Error& e) {
    err << "cli_io: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace krf
