#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "krf/curvature.hpp"
#include "krf/error.hpp"
#include "krf/presets.hpp"
#include "support.hpp"

using namespace krf;
using cd = std::complex<double>;

namespace {

MetricProfile metric(const XiSource& src, int n, std::size_t count = 1024) {
  return build_metric(src, test::grid(count), n);
}

// Random unit direction scaled to |z|^2 = r.
std::vector<cd> point(std::mt19937_64& rng, int n, double r) {
  std::normal_distribution<double> N;
  std::vector<cd> z(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& c : z) {
    c = {N(rng), N(rng)};
    s += std::norm(c);
  }
  for (auto& c : z) c *= std::sqrt(r / s);
  return z;
}

double tol(double magnitude) { return std::max(1e-3, 1e-2 * magnitude); }

}  // namespace

TEST_CASE("flat metric has zero curvature") {
  auto m = metric(make_preset("euclidean"), 3);
  auto c = curvature_components(m);
  CHECK(test::max_abs(c.A.values) == 0.0);
  CHECK(test::max_abs(c.B().values) == 0.0);
  CHECK(test::max_abs(c.Cc().values) < 1e-12);
  CHECK(test::max_abs(scalar_curvature(m).values) < 1e-12);
  CHECK(bisectional_sign(m) == BisectionalSign::Flat);
  auto b = bounded_curvature_test(m);
  CHECK(b.bounded);
  CHECK(b.sup_ratio == 0.0);

  std::vector<cd> z{{0.3, -0.2}, {1.1, 0.4}, {0.0, 0.7}};
  auto o = fd_curvature_oracle(m, z);
  CHECK(o.magnitude < 1e-10);
}

TEST_CASE("cigar closed forms") {
  auto g = make_grid(1e-6, 1e6, 12 * 64 + 1);
  auto m = build_metric(make_preset("cigar"), g, 2);
  auto c = curvature_components(m);
  const std::size_t i1 = g->first_at_or_above(1.0 - 1e-9);
  CHECK(c.A[i1] == doctest::Approx(0.5).epsilon(1e-4));
  for (std::size_t i = 0; i < g->size(); i += 37)
    CHECK(c.A[i] == doctest::Approx(1.0 / (1.0 + g->r(i))).epsilon(2e-3));

  auto fine = make_grid(1e-6, 1e6, 12 * 512 + 1);
  auto m1 = build_metric(make_preset("cigar"), fine, 1);
  CHECK(scalar_curvature(m1)[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(bisectional_sign(m) == BisectionalSign::Positive);
  auto b = bounded_curvature_test(build_metric(make_preset("cigar"), fine, 2));
  CHECK(b.bounded);
  CHECK(b.sup_ratio == doctest::Approx(1.0).epsilon(1e-4));

  std::vector<cd> z{1.0, 0.0};
  CHECK(fd_curvature_oracle(m, z).A == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("one-dimensional metrics have no B or C") {
  auto m = metric(make_preset("cigar"), 1);
  auto c = curvature_components(m);
  try {
    (void)c.B();
    FAIL("expected DimensionTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooSmall);
  }
  CHECK_THROWS_AS((void)c.Cc(), Error);
  // scalar = A when n = 1
  for (std::size_t i = 0; i < c.A.size(); ++i) CHECK(c.scalar[i] == c.A[i]);
}

TEST_CASE("scalar curvature is the frame sum") {
  for (int n : {2, 3, 4}) {
    auto m = metric(make_preset("conoid"), n);
    auto c = curvature_components(m);
    for (std::size_t i = 0; i < c.A.size(); i += 11) {
      const double sum = c.A[i] + 2.0 * (n - 1) * c.B()[i] + 0.5 * n * (n - 1) * c.Cc()[i];
      CHECK(c.scalar[i] == doctest::Approx(sum).epsilon(1e-14));
    }
  }
}

TEST_CASE("spherical component agrees with -2 f'/f^2 on every preset") {
  for (auto src : {make_preset("cigar"), make_preset("conoid"), make_preset("c2_log"), families::indefinite(0.9)}) {
    CAPTURE(src.name);
    auto m = metric(src, 2, 4097);
    auto c = curvature_components(m);
    CHECK(c.c_route_discrepancy < 1e-6);
    MetricInterpolant mi(m);
    for (std::size_t i = 200; i < m.grid().size() - 200; i += 97) {
      const double r = m.grid().r(i);
      const double closed = -2.0 * mi.df(r) / (mi.f(r) * mi.f(r));
      CHECK(std::abs(c.Cc()[i] - closed) <= 1e-6 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("bisectional sign classification") {
  CHECK(bisectional_sign(metric(make_preset("conoid"), 2)) == BisectionalSign::Positive);
  CHECK(bisectional_sign(metric(families::indefinite(0.9), 2)) == BisectionalSign::Indefinite);
  // a = 0.3 is a small enough dent that xi stays increasing
  CHECK(bisectional_sign(metric(families::indefinite(0.3), 2)) == BisectionalSign::Positive);
}

TEST_CASE("spiked family has unbounded curvature") {
  auto m = metric(families::spiked_cigar(1.0, 6, 0.5), 2, 4097);
  auto b = bounded_curvature_test(m);
  CHECK_FALSE(b.bounded);
  CHECK(b.tail_exponent > 0.05);
}

TEST_CASE("oracle agrees with the closed-form components") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  for (auto src : {make_preset("cigar"), make_preset("conoid"), make_preset("c2_log"), families::indefinite(0.9)}) {
    CAPTURE(src.name);
    auto m = metric(src, 2, 2049);
    auto c = curvature_components(m);
    const auto& g = m.grid();
    for (int k = 0; k < 10; ++k) {
      std::size_t i = g.first_at_or_above(std::pow(10.0, U(rng)));
      auto o = fd_curvature_oracle(m, point(rng, 2, g.r(i)));
      CHECK(std::abs(o.A - c.A[i]) <= tol(std::abs(c.A[i])));
      CHECK(std::abs(o.B - c.B()[i]) <= tol(std::abs(c.B()[i])));
      CHECK(std::abs(o.Cc - c.Cc()[i]) <= tol(std::abs(c.Cc()[i])));
      CHECK(std::abs(o.scalar - c.scalar[i]) <= 1e-3 * std::max(1e-3, std::abs(c.scalar[i])));
    }
  }
}

TEST_CASE("components outside the invariant pattern vanish") {
  auto m = metric(make_preset("cigar"), 3, 2049);
  std::mt19937_64 rng(5);
  for (double r : {0.01, 0.3, 1.0, 7.0, 50.0}) {
    auto o = fd_curvature_oracle(m, point(rng, 3, r));
    CHECK(o.off_pattern < 1e-6);
    CHECK(o.pattern_residual < 1e-3 * std::max(1.0, o.magnitude));
  }
}

TEST_CASE("oracle stencil must stay in the domain") {
  auto m = metric(make_preset("cigar"), 2);
  std::vector<cd> z{std::sqrt(5e5), 0.0};
  try {
    fd_curvature_oracle(m, z);
    FAIL("expected StencilOutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StencilOutOfDomain);
  }
}

TEST_CASE("sign verdict matches oracle minima") {
  std::vector<XiSource> sources{make_preset("euclidean"), make_preset("cigar"), make_preset("conoid"),
                                make_preset("c2_log"), families::indefinite(0.9),
                                families::steep(0.2)};
  std::mt19937_64 rng(99);
  for (const auto& src : sources) {
    CAPTURE(src.name);
    auto m = metric(src, 2, 2049);
    double lo = std::numeric_limits<double>::infinity();
    for (double r : {1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
      auto o = fd_curvature_oracle(m, point(rng, 2, r));
      lo = std::min({lo, o.A, o.B, o.Cc});
    }
    const bool positive = bisectional_sign(m) == BisectionalSign::Positive;
    CHECK(positive == (lo > 1e-6));
  }
}

TEST_CASE("bounded verdict matches oracle tail behaviour") {
  std::mt19937_64 rng(3);
  auto tail_sup = [&](const MetricProfile& m) {
    double s = 0.0;
    for (double r : {1e3, 1e4, 5e4}) s = std::max(s, fd_curvature_oracle(m, point(rng, 2, r)).magnitude);
    return s;
  };
  for (auto src : {make_preset("cigar"), make_preset("conoid"), make_preset("c2_log")}) {
    auto m = metric(src, 2, 2049);
    CHECK(bounded_curvature_test(m).bounded);
    CHECK(tail_sup(m) < 1.0);
  }
  for (double amp : {0.5, 1.0, 2.0}) {
    auto m = metric(families::spiked_cigar(amp, 6, 0.5), 2, 4097);
    CHECK_FALSE(bounded_curvature_test(m).bounded);
  }
}
