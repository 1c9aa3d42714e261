#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "krf/error.hpp"
#include "krf/presets.hpp"
#include "krf/radial_metric.hpp"
#include "support.hpp"

using namespace krf;
using cd = std::complex<double>;

namespace {

// Frozen from test::h_reference / test::f_reference (Gauss-Kronrod), cross-checked
// against the closed forms 1/(1+r), (1+r)^-1/2, log(1+r)/r, asinh(1).
constexpr double kCigarH1 = 0.5;
constexpr double kConoidH3 = 0.5;
constexpr double kCigarF1 = 0.6931471805599453;
constexpr double kCigarRho1 = 0.8813735870195430;

MetricProfile preset(const std::string& name, int n, std::size_t count = 1024, double beta = 0.5) {
  PresetParams p;
  p.beta = beta;
  return build_metric(make_preset(name, p), test::grid(count), n);
}

double at(const Profile& p, double r) {
  std::size_t i = p.grid->first_at_or_above(r * (1 - 1e-12));
  REQUIRE(std::abs(p.r(i) / r - 1.0) < 1e-9);
  return p[i];
}

// grids whose nodes include r = 1 and r = 3 exactly enough for point checks
GridPtr decade_grid(std::size_t per_decade) { return make_grid(1e-6, 1e6, 12 * per_decade + 1); }

}  // namespace

TEST_CASE("oracle values match frozen constants") {
  auto cigar = [](double r) { return r / (1 + r); };
  auto conoid = [](double r) { return 0.5 * r / (1 + r); };
  CHECK(test::h_reference(cigar, 1.0, 1.0) == doctest::Approx(kCigarH1).epsilon(1e-12));
  CHECK(test::h_reference(conoid, 1.0, 3.0) == doctest::Approx(kConoidH3).epsilon(1e-12));
  CHECK(test::f_reference(cigar, 1.0, 1.0) == doctest::Approx(kCigarF1).epsilon(1e-10));
  // s = u^2 removes the endpoint singularity
  auto rho_integrand = [&](double u) { return 1.0 / std::sqrt(1 + u * u); };
  CHECK(test::integrate(rho_integrand, 0.0, 1.0) == doctest::Approx(kCigarRho1).epsilon(1e-10));
}

TEST_CASE("grid shape and validation") {
  auto g = test::grid(257);
  CHECK(g->size() == 257);
  CHECK(g->r(0) == 1e-6);
  CHECK(g->r(256) == 1e6);
  for (std::size_t i = 1; i < g->size(); ++i) {
    CHECK(g->r(i) > g->r(i - 1));
    CHECK(std::abs(std::log(g->r(i) / g->r(i - 1)) - g->dx()) < 1e-9 * g->dx());
  }
  CHECK_THROWS_AS(make_grid(1e-6, 1e6, 8), Error);
  CHECK_THROWS_AS(make_grid(1e-3, 1.0, 64), Error);
  CHECK_THROWS_AS(make_grid(-1.0, 1.0, 64), Error);
  CHECK(refine_grid(*g, 2)->size() == 1025);
}

TEST_CASE("h_from_xi") {
  auto g = decade_grid(64);
  SUBCASE("zero xi gives constant h") {
    Profile xi(g, std::vector<double>(g->size(), 0.0));
    auto h = h_from_xi(xi, 1.0, 0.0);
    for (double v : h.values) CHECK(v == 1.0);
  }
  SUBCASE("cigar and conoid point values") {
    auto hc = h_from_xi(sample(make_preset("cigar"), g), 1.0, 1.0);
    CHECK(at(hc, 1.0) == doctest::Approx(kCigarH1).epsilon(1e-8));
    auto conoid = build_metric(make_preset("conoid"), g, 2);
    CHECK(MetricInterpolant(conoid).h(3.0) == doctest::Approx(kConoidH3).epsilon(1e-7));
  }
  SUBCASE("errors") {
    auto xi = sample(make_preset("cigar"), g);
    CHECK_THROWS_AS(h_from_xi(xi, 0.0, 1.0), Error);
    try {
      h_from_xi(xi, -1.0, 1.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveC0);
    }
    Profile steep(g, std::vector<double>(g->size(), 1.0));
    try {
      h_from_xi(steep, 1.0, 0.0);
      FAIL("expected DivergentIntegrand");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DivergentIntegrand);
    }
  }
}

TEST_CASE("f_from_h") {
  auto g = decade_grid(64);
  Profile one(g, std::vector<double>(g->size(), 1.0));
  auto f1 = f_from_h(one, 1.0);
  for (double v : f1.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<double> hv(g->size());
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = 1.0 / (1.0 + g->r(i));
  auto f = f_from_h(Profile(g, hv), 1.0);
  CHECK(at(f, 1.0) == doctest::Approx(kCigarF1).epsilon(1e-8));
  // origin limit f(0) = h(0)
  MetricInterpolant mi(preset("cigar", 2));
  CHECK(mi.f(0.0) == 1.0);
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-5));

  hv[7] = 0.0;
  try {
    f_from_h(Profile(g, hv), 1.0);
    FAIL("expected NonPositiveH");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveH);
  }
}

TEST_CASE("xi_from_h") {
  auto g = decade_grid(64);
  Profile c(g, std::vector<double>(g->size(), 2.5));
  for (double v : xi_from_h(c).values) CHECK(std::abs(v) < 1e-14);

  std::vector<double> hv(g->size());
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = 1.0 / std::sqrt(1.0 + g->r(i));
  CHECK(at(xi_from_h(Profile(g, hv)), 1.0) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("xi roundtrip converges at second order for every preset") {
  PresetParams table;
  table.table = {{0.0, 0.0}, {0.1, 0.05}, {1.0, 0.4}, {10.0, 0.7}, {1e3, 0.8}, {1e6, 0.85}};
  for (auto name : {"cigar", "conoid", "c2_log", "custom_table"}) {
    CAPTURE(name);
    PresetParams p = std::string(name) == "custom_table" ? table : PresetParams{};
    XiSource src = make_preset(name, p);
    std::vector<double> err;
    for (std::size_t count : {385, 769, 1537}) {
      auto g = test::grid(count);
      auto xi = sample(src, g);
      auto back = xi_from_h(h_from_xi(xi, src.c0, src.slope0));
      double e = 0.0;
      // one-sided end stencils are first order in their own right; compare the interior
      for (std::size_t i = 1; i + 1 < g->size(); ++i) e = std::max(e, std::abs(back[i] - xi[i]));
      err.push_back(e);
    }
    CHECK(err[1] < err[0]);
    CHECK(std::log2(err[1] / err[2]) >= 1.8);
  }
}

TEST_CASE("metric_at_point") {
  auto m = preset("cigar", 2, 1201);
  SUBCASE("origin is c0 times identity") {
    std::vector<cd> z{0.0, 0.0};
    auto g = metric_at_point(m, z);
    CHECK(std::abs(g(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(g(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(g(0, 1)) < 1e-15);
  }
  SUBCASE("cigar at (1, 0) has eigenvalues h(1), f(1)") {
    std::vector<cd> z{1.0, 0.0};
    auto g = metric_at_point(m, z);
    CHECK(g(0, 0).real() == doctest::Approx(kCigarH1).epsilon(1e-6));
    CHECK(g(1, 1).real() == doctest::Approx(kCigarF1).epsilon(1e-6));
  }
  SUBCASE("out of domain") {
    std::vector<cd> z{2e3, 0.0};
    CHECK_THROWS_AS(metric_at_point(m, z), Error);
  }
}

TEST_CASE("determinant identity at random points") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  for (int n : {2, 3}) {
    auto m = preset("conoid", n);
    MetricInterpolant mi(m);
    for (int k = 0; k < 50; ++k) {
      std::vector<cd> z(static_cast<std::size_t>(n));
      double norm = 0.0;
      for (auto& c : z) {
        c = {N(rng), N(rng)};
        norm += std::norm(c);
      }
      const double r = std::pow(10.0, U(rng));
      for (auto& c : z) c *= std::sqrt(r / norm);
      auto g = metric_at_point(mi, z);
      const double det = g.determinant().real();
      const double expect = mi.h(r) * std::pow(mi.f(r), n - 1);
      CHECK(std::abs(det / expect - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("equivalence_bounds") {
  auto m = preset("cigar", 2);
  auto [lo, hi] = equivalence_bounds(m, m);
  CHECK(lo == 1.0);
  CHECK(hi == 1.0);

  auto g = make_grid(9e-6, 9.0, 400);
  std::vector<double> a(g->size()), b(g->size(), 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 1.0 / (1.0 + g->r(i));
  auto [l2, h2] = equivalence_bounds(Profile(g, a), Profile(g, b));
  CHECK(l2 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(h2 == doctest::Approx(1.0).epsilon(1e-5));

  auto other = preset("cigar", 2, 512);
  try {
    equivalence_bounds(m, other);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}

TEST_CASE("pointwise larger h gives larger eigenvalues") {
  // conoid(beta) has h = (1+r)^-beta, decreasing in beta
  auto big = preset("conoid", 2, 1024, 0.3);
  auto small = preset("conoid", 2, 1024, 0.7);
  REQUIRE(equivalence_bounds(big, small).first >= 1.0);
  MetricInterpolant a(big), b(small);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<cd> z{{N(rng), N(rng)}, {N(rng), N(rng)}};
    double s = std::norm(z[0]) + std::norm(z[1]);
    double r = std::pow(10.0, U(rng));
    for (auto& c : z) c *= std::sqrt(r / s);
    Eigen::SelfAdjointEigenSolver<HermitianMatrix> ea(metric_at_point(a, z)), eb(metric_at_point(b, z));
    for (int j = 0; j < 2; ++j) CHECK(ea.eigenvalues()[j] >= eb.eigenvalues()[j] * (1 - 1e-12));
  }
}

TEST_CASE("geodesic_radius") {
  auto g = decade_grid(256);
  auto flat = build_metric(make_preset("euclidean"), g, 2);
  CHECK(geodesic_radius(flat, 4.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(geodesic_radius(flat, 0.0) == 0.0);
  auto cigar = build_metric(make_preset("cigar"), g, 2);
  CHECK(geodesic_radius(cigar, 1.0) == doctest::Approx(kCigarRho1).epsilon(1e-7));
  auto rho = geodesic_radius_profile(cigar);
  for (std::size_t i = 1; i < rho.size(); ++i) CHECK(rho[i] > rho[i - 1]);
  CHECK_THROWS_AS(geodesic_radius(cigar, 2e6), Error);
}

TEST_CASE("ball_volume") {
  auto g = decade_grid(64);
  auto flat = build_metric(make_preset("euclidean"), g, 3);
  CHECK(ball_volume(flat, 10.0) == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(ball_volume(flat, 4.0) == doctest::Approx(std::pow(geodesic_radius(flat, 4.0), 6)).epsilon(1e-8));

  auto cigar = build_metric(make_preset("cigar"), g, 1);
  CHECK(ball_volume(cigar, std::numbers::e - 1.0) == doctest::Approx(1.0).epsilon(1e-7));

  // d(rf)^n/dr = n r^(n-1) f^(n-1) h on conoid(0.5)
  auto fine = test::grid(8193);
  auto m = build_metric(make_preset("conoid"), fine, 2);
  MetricInterpolant mi(m);
  for (double r : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e3, 1e4}) {
    const double step = 1e-4 * r;
    const double dv = (ball_volume(m, r + step) - ball_volume(m, r - step)) / (2 * step);
    const double expect = 2.0 * r * mi.f(r) * mi.h(r);
    CHECK(std::abs(dv / expect - 1.0) < 1e-6);
  }
  CHECK_THROWS_AS(ball_volume(m, 0.0), Error);
}

TEST_CASE("completeness_test") {
  auto g = test::grid(1024);
  CHECK(completeness_test(build_metric(make_preset("euclidean"), g, 2)).verdict == Completeness::Complete);
  auto cig = completeness_test(build_metric(make_preset("cigar"), g, 2));
  CHECK(cig.verdict == Completeness::Complete);
  CHECK(cig.tail_exponent == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(completeness_test(build_metric(families::inverse_cube(), g, 2)).verdict ==
        Completeness::Incomplete);
}

TEST_CASE("constructed metrics satisfy h = (r f)' and monotonicity") {
  for (auto name : {"euclidean", "cigar", "conoid", "c2_log"}) {
    CAPTURE(name);
    auto m = preset(name, 2, 2049);
    const auto& g = m.grid();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      const double d = (g.r(i + 1) * m.f[i + 1] - g.r(i - 1) * m.f[i - 1]) / (2.0 * g.dx() * g.r(i));
      CHECK(std::abs(d / m.h[i] - 1.0) < 1e-4);
      // xi >= 0 here, so h and f are non-increasing
      CHECK(m.h[i + 1] <= m.h[i]);
      CHECK(m.f[i + 1] <= m.f[i] * (1 + 1e-14));
      CHECK(m.h[i] > 0.0);
    }
    // complete with xi' >= 0 forces xi <= 1
    CHECK(completeness_test(m).verdict == Completeness::Complete);
    for (double v : m.xi.values) CHECK(v <= 1.0);
  }
}
