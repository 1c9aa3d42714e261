#pragma once

#include <span>
#include <vector>

namespace krf::kernels {

// Ghost values of f one cell beyond each end of the grid. Inside: the linear
// model f = a + b r through the first two nodes. Outside: r f extended as a
// geometric series, which holds xi fixed at the tail.
struct Ghosts {
  double lo, hi;
  double c0, slope0;
};
Ghosts ghosts(std::span<const double> f, std::span<const double> r, double dx);

// h = f + f_x and xi = -(f_x + f_xx)/h on the nodes, using the ghost closure.
void h_xi_from_f(std::span<const double> f, std::span<const double> r, double dx,
                 std::span<double> h, std::span<double> xi);

// Tridiagonal Jacobian of the right-hand side plus the one extra entry
// J(N-1, N-3) coupling through the outer ghost.
struct TriJacobian {
  std::vector<double> lower, diag, upper;
  double corner = 0.0;
};

// f_t = [(f_x + f_xx)/(f + f_x) + (n-1) f_x/f] / r
namespace serial {
void flow_rhs(std::span<const double> f, std::span<const double> r, double dx, int n,
              std::span<double> out);
void flow_jacobian(std::span<const double> f, std::span<const double> r, double dx, int n,
                   TriJacobian& jac);
}  // namespace serial

namespace parallel {
void flow_rhs(std::span<const double> f, std::span<const double> r, double dx, int n,
              std::span<double> out);
void flow_jacobian(std::span<const double> f, std::span<const double> r, double dx, int n,
                   TriJacobian& jac);
}  // namespace parallel

// Solves (I - s J) y = b in place for the tridiagonal-plus-corner Jacobian.
void solve_shifted(const TriJacobian& jac, double s, std::span<double> b);

}  // namespace krf::kernels
