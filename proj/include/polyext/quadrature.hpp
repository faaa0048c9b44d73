#pragma once

#include <functional>
#include <vector>

namespace polyext::quad {

// Nodes and weights on the reference interval [-1,1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule, cached per n.
const Rule& gauss_legendre(int n);

// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
Rule gauss_jacobi(int n, double alpha, double beta);

// Fixed-order Gauss-Legendre quadrature of f over [a,b].
double integrate(const std::function<double(double)>& f, double a, double b, int n = 10);

// Composite rule: [a,b] split into `panels` equal panels of n-point Gauss.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int n = 10);

// Adaptive bisection with a 10-point Gauss error estimate.
double adaptive(const std::function<double(double)>& f, double a, double b,
                double rel_tol = 1e-12, int max_depth = 48);

// Integral over [a, infinity) by doubling segment widths until the
// contribution falls below rel_tol of the accumulated value.
double adaptive_to_infinity(const std::function<double(double)>& f, double a,
                            double rel_tol = 1e-12);

} // namespace polyext::quad
