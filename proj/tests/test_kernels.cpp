#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "krf/kernels.hpp"
#include "krf/presets.hpp"
#include "krf/quadrature.hpp"
#include "support.hpp"

using namespace krf;

namespace {

std::vector<double> cigar_f(const RadialGrid& g) {
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::log1p(g.r(i)) / g.r(i);
  f[0] = 1.0 - 0.5 * g.r(0);
  return f;
}

}  // namespace

TEST_CASE("cumulative quadrature is fourth order") {
  std::vector<double> err;
  for (std::size_t n : {65, 129, 257}) {
    const double dx = 3.0 / static_cast<double>(n - 1);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::cos(dx * static_cast<double>(i));
    auto I = numeric::cumulative_integral(g, dx);
    CHECK(I[0] == 0.0);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(I[i] - std::sin(dx * static_cast<double>(i))));
    err.push_back(e);
  }
  CHECK(std::log2(err[0] / err[1]) > 3.7);
  CHECK(std::log2(err[1] / err[2]) > 3.7);

  std::vector<double> t(129, 1.0);
  auto T = numeric::cumulative_trapezoid(t, 0.5);
  CHECK(T.back() == doctest::Approx(64.0).epsilon(1e-15));
}

TEST_CASE("product integration reproduces constants exactly") {
  auto g = test::grid(300);
  std::vector<double> one(g->size(), 1.0);
  auto I = numeric::cumulative_integral_exp(one, g->nodes(), g->dx());
  for (std::size_t i = 0; i < I.size(); ++i)
    CHECK(std::abs(I[i] - (g->r(i) - g->r(0))) <= 1e-14 * g->r(i));
}

TEST_CASE("derivative and slope fit") {
  std::vector<double> y(50), x(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = 0.1 * static_cast<double>(i);
    y[i] = 3.0 * x[i] * x[i] - x[i];
  }
  auto d = numeric::derivative(y, 0.1);
  for (std::size_t i = 0; i < 50; ++i) CHECK(d[i] == doctest::Approx(6.0 * x[i] - 1.0).epsilon(1e-12));
  std::vector<double> lin(50);
  for (std::size_t i = 0; i < 50; ++i) lin[i] = 2.5 * x[i] + 1.0;
  CHECK(numeric::fit_slope(x, lin) == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  auto g = test::grid(4097);
  auto f = cigar_f(*g);
  for (int n : {1, 2, 5}) {
    std::vector<double> a(f.size()), b(f.size());
    kernels::serial::flow_rhs(f, g->nodes(), g->dx(), n, a);
    kernels::parallel::flow_rhs(f, g->nodes(), g->dx(), n, b);
    CHECK(a == b);
    kernels::TriJacobian ja, jb;
    kernels::serial::flow_jacobian(f, g->nodes(), g->dx(), n, ja);
    kernels::parallel::flow_jacobian(f, g->nodes(), g->dx(), n, jb);
    CHECK(ja.lower == jb.lower);
    CHECK(ja.diag == jb.diag);
    CHECK(ja.upper == jb.upper);
    CHECK(ja.corner == jb.corner);
  }
}

TEST_CASE("flat profile is a fixed point of the right-hand side") {
  auto g = test::grid(257);
  std::vector<double> f(g->size(), 2.0), out(g->size());
  kernels::serial::flow_rhs(f, g->nodes(), g->dx(), 3, out);
  // the outer ghost extrapolates r f, so only the last node sees rounding
  for (std::size_t i = 0; i + 1 < out.size(); ++i) CHECK(out[i] == 0.0);
  CHECK(std::abs(out.back()) * g->r(g->size() - 1) < 1e-11);
}

TEST_CASE("analytic Jacobian matches finite differences") {
  auto g = test::grid(129);
  auto f = cigar_f(*g);
  const std::size_t N = f.size();
  kernels::TriJacobian J;
  kernels::serial::flow_jacobian(f, g->nodes(), g->dx(), 2, J);
  std::vector<double> base(N), pert(N);
  kernels::serial::flow_rhs(f, g->nodes(), g->dx(), 2, base);
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{60}, N - 3, N - 2, N - 1}) {
    auto fp = f, fm = f;
    const double step = 1e-6 * f[j];
    fp[j] += step;
    fm[j] -= step;
    std::vector<double> up(N), dn(N);
    kernels::serial::flow_rhs(fp, g->nodes(), g->dx(), 2, up);
    kernels::serial::flow_rhs(fm, g->nodes(), g->dx(), 2, dn);
    for (std::size_t i = 0; i < N; ++i) {
      const double fd = (up[i] - dn[i]) / (2 * step);
      double an = 0.0;
      if (i == j) an = J.diag[i];
      else if (i + 1 == j) an = J.upper[i];
      else if (i == j + 1) an = J.lower[i];
      else if (i == N - 1 && j == N - 3) an = J.corner;
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("shifted solve matches a dense solve") {
  auto g = test::grid(64);
  auto f = cigar_f(*g);
  const std::size_t N = f.size();
  kernels::TriJacobian J;
  kernels::serial::flow_jacobian(f, g->nodes(), g->dx(), 2, J);
  const double s = 0.37 * g->r(0);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    auto ii = static_cast<Eigen::Index>(i);
    M(ii, ii) -= s * J.diag[i];
    if (i + 1 < N) M(ii, ii + 1) -= s * J.upper[i];
    if (i > 0) M(ii, ii - 1) -= s * J.lower[i];
  }
  M(static_cast<Eigen::Index>(N - 1), static_cast<Eigen::Index>(N - 3)) -= s * J.corner;
  Eigen::VectorXd b(static_cast<Eigen::Index>(N));
  std::vector<double> bv(N);
  for (std::size_t i = 0; i < N; ++i) b(static_cast<Eigen::Index>(i)) = bv[i] = std::sin(0.3 * static_cast<double>(i));
  Eigen::VectorXd x = M.partialPivLu().solve(b);
  kernels::solve_shifted(J, s, bv);
  for (std::size_t i = 0; i < N; ++i) CHECK(bv[i] == doctest::Approx(x(static_cast<Eigen::Index>(i))).epsilon(1e-10));
}

TEST_CASE("ghost closure recovers h and xi of the cigar") {
  auto g = test::grid(2049);
  auto f = cigar_f(*g);
  std::vector<double> h(f.size()), xi(f.size());
  kernels::h_xi_from_f(f, g->nodes(), g->dx(), h, xi);
  for (std::size_t i = 0; i < f.size(); i += 64) {
    CHECK(h[i] == doctest::Approx(1.0 / (1.0 + g->r(i))).epsilon(1e-3));
    CHECK(std::abs(xi[i] - g->r(i) / (1.0 + g->r(i))) < 2e-3);
  }
  auto gh = kernels::ghosts(f, g->nodes(), g->dx());
  CHECK(gh.c0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(gh.slope0 == doctest::Approx(1.0).epsilon(1e-3));
}
