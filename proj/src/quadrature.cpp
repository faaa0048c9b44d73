#include "polyext/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace polyext::quad {

namespace {

// Legendre nodes by Newton iteration on P_n, weights 2/((1-x^2) P_n'(x)^2).
Rule make_gauss_legendre(int n)
{
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = 3.141592653589793238462643383279502884;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

} // namespace

const Rule& gauss_legendre(int n)
{
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    static std::map<int, Rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

Rule gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1) throw std::domain_error("gauss_jacobi: n must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::domain_error("gauss_jacobi: weight exponents must exceed -1");

    // Golub-Welsch: recurrence coefficients of the Jacobi polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        double ak;
        if (k == 0)
            ak = (beta - alpha) / (ab + 2.0);
        else
            ak = (beta * beta - alpha * alpha) /
                 ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
        J(k, k) = ak;
        if (k + 1 < n) {
            double bk;
            if (k == 0)
                bk = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                     ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
            else {
                const double kk = k + 1.0;
                const double den = 2.0 * kk + ab;
                bk = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
                     (den * den * (den + 1.0) * (den - 1.0));
            }
            J(k, k + 1) = J(k + 1, k) = std::sqrt(bk);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) *
                       std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n)
{
    const Rule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
    return acc * half;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int n)
{
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) acc += integrate(f, a + p * h, a + (p + 1) * h, n);
    return acc;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double whole, double abs_tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double left = integrate(f, a, m, 10);
    const double right = integrate(f, m, b, 10);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= abs_tol) return left + right;
    return adaptive_rec(f, a, m, left, 0.5 * abs_tol, depth - 1) +
           adaptive_rec(f, m, b, right, 0.5 * abs_tol, depth - 1);
}

} // namespace

double adaptive(const std::function<double(double)>& f, double a, double b,
                double rel_tol, int max_depth)
{
    const double coarse = integrate(f, a, b, 10);
    // Scale the tolerance by the L^1 size, not the (possibly cancelling)
    // signed integral, so near-zero integrals stay reachable.
    const double mass = integrate([&](double x) { return std::abs(f(x)); }, a, b, 10);
    const double scale = std::max({std::abs(coarse), std::abs(mass), 1e-300});
    return adaptive_rec(f, a, b, coarse, rel_tol * scale, max_depth);
}

double adaptive_to_infinity(const std::function<double(double)>& f, double a,
                            double rel_tol)
{
    double acc = 0.0;
    double lo = a;
    double width = std::max(1.0, std::abs(a));
    for (int seg = 0; seg < 80; ++seg) {
        const double part = adaptive(f, lo, lo + width, rel_tol);
        acc += part;
        if (std::abs(part) <= rel_tol * std::max(std::abs(acc), 1e-300) && seg > 1)
            break;
        lo += width;
        width *= 2.0;
    }
    return acc;
}

} // namespace polyext::quad
