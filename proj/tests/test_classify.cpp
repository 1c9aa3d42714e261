#include <doctest.h>

#include <cmath>
#include <numbers>

#include "krf/classify.hpp"
#include "krf/comparison.hpp"
#include "krf/error.hpp"
#include "krf/presets.hpp"
#include "support.hpp"

using namespace krf;

namespace {

MetricProfile metric(const std::string& name, int n = 2, double beta = 0.5) {
  PresetParams p;
  p.beta = beta;
  return build_metric(make_preset(name, p), test::grid(1024), n);
}

// int_1^inf ds / (s (1+s)), frozen from test::integrate
constexpr double kCigarTail = 0.6931471805599453;

}  // namespace

TEST_CASE("cigar tail integral oracle") {
  auto g = [](double x) { return 1.0 / (1.0 + std::exp(x)); };
  CHECK(test::integrate(g, 0.0, 60.0) == doctest::Approx(kCigarTail).epsilon(1e-12));
  CHECK(kCigarTail == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
}

TEST_CASE("condition c1") {
  auto flat = check_c1(metric("euclidean"));
  CHECK(flat.holds);
  CHECK(flat.alpha == 0.0);
  CHECK(flat.beta == 0.0);
  CHECK(flat.gamma == 0.0);

  auto conoid = check_c1(metric("conoid"));
  CHECK(conoid.holds);
  CHECK(conoid.alpha == 0.0);
  CHECK(conoid.beta == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(std::isfinite(conoid.gamma));
  CHECK(conoid.gamma < 1.0);

  CHECK_FALSE(check_c1(metric("cigar")).holds);
}

TEST_CASE("condition c2") {
  auto log = check_c2(metric("c2_log"));
  CHECK(log.holds);
  CHECK(log.delta == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(check_c2(metric("cigar")).holds);
  CHECK_FALSE(check_c2(metric("euclidean")).holds);
}

TEST_CASE("condition c3") {
  auto cig = check_c3(metric("cigar"));
  CHECK(cig.holds);
  CHECK(std::abs(cig.b - kCigarTail) <= 1e-3);
  CHECK_FALSE(check_c3(metric("c2_log")).holds);
  CHECK_FALSE(check_c3(metric("euclidean")).holds);
}

TEST_CASE("volume growth") {
  auto flat = volume_growth_class(metric("euclidean"));
  CHECK(flat.conoid);
  CHECK_FALSE(flat.cigar);
  CHECK(flat.limsup_2n == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(volume_growth_class(metric("cigar")).cigar);
  auto conoid = volume_growth_class(metric("conoid"));
  CHECK(conoid.conoid);
  CHECK(conoid.limsup_2n > 0.0);

  auto incomplete = build_metric(families::inverse_cube(), test::grid(1024), 2);
  try {
    volume_growth_class(incomplete);
    FAIL("expected IncompleteMetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteMetric);
  }
}

TEST_CASE("c2 and c3 are exclusive and c1 excludes both") {
  for (auto name : {"cigar", "c2_log"}) {
    CAPTURE(name);
    auto r = classify(metric(name));
    CHECK(r.c2.holds != r.c3.holds);
  }
  for (double beta : {0.1, 0.5, 0.9}) {
    CAPTURE(beta);
    auto r = classify(metric("conoid", 2, beta));
    CHECK(r.c1.holds);
    CHECK(r.c1.alpha <= r.c1.beta);
    CHECK(r.c1.beta < 1.0);
    CHECK_FALSE(r.c2.holds);
    CHECK_FALSE(r.c3.holds);
  }
}

TEST_CASE("c3 with nonnegative curvature is a cigar") {
  for (int n : {1, 2, 3}) {
    auto r = classify(metric("cigar", n));
    REQUIRE(r.c3.holds);
    CHECK(r.sign == BisectionalSign::Positive);
    CHECK(r.growth.cigar);
    CHECK(std::isfinite(r.growth.limsup_n));
  }
}

TEST_CASE("verdicts survive pullback rescaling") {
  for (auto name : {"euclidean", "cigar", "conoid", "c2_log"}) {
    auto m = metric(name);
    auto base = classify(m);
    for (double k : {2.0, 10.0}) {
      CAPTURE(name);
      CAPTURE(k);
      auto r = classify(pullback_rescale(m, k));
      CHECK(r.c1.holds == base.c1.holds);
      CHECK(r.c2.holds == base.c2.holds);
      CHECK(r.c3.holds == base.c3.holds);
      CHECK(r.growth.cigar == base.growth.cigar);
      CHECK(r.growth.conoid == base.growth.conoid);
      CHECK(r.completeness == base.completeness);
    }
  }
}

TEST_CASE("tail limit of xi") {
  CHECK(estimate_xi_limit(metric("cigar")).value.value() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(estimate_xi_limit(metric("conoid", 2, 0.3)).value.value() == doctest::Approx(0.3).epsilon(1e-4));
  auto c2 = estimate_xi_limit(metric("c2_log"));
  REQUIRE(c2.value);
  CHECK(std::abs(*c2.value - 1.0) < 0.05);
}
