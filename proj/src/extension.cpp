#include "polyext/extension.hpp"
#include "polyext/quadrature.hpp"
#include "polyext/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace polyext {

namespace {

// Linear combinations  sum_i  a_i z^{p_i} K_{q_i}(z), closed under d/dz via
// d/dz [a z^p K_q] = a p z^{p-1} K_q - (a/2) z^p (K_{q-1} + K_{q+1}).
struct KTerm {
    double a;
    double p;
    double q;
};
using KSeries = std::vector<KTerm>;

KSeries derivative(const KSeries& f)
{
    KSeries out;
    out.reserve(3 * f.size());
    for (const auto& t : f) {
        if (t.p != 0.0) out.push_back({t.a * t.p, t.p - 1.0, t.q});
        out.push_back({-0.5 * t.a, t.p, t.q - 1.0});
        out.push_back({-0.5 * t.a, t.p, t.q + 1.0});
    }
    return out;
}

double eval(const KSeries& f, double z)
{
    // Factor e^{-z} once; scaled K keeps intermediate values sane for large z.
    const double damp = std::exp(-z);
    double acc = 0.0;
    for (const auto& t : f)
        acc += t.a * std::pow(z, t.p) * special::detail::kv_scaled_any(t.q, z);
    return acc * damp;
}

KSeries psi_series(const FracOrder& ord) { return {{ord.c_s, ord.s, ord.s}}; }

// (D_b + 1)psi as a term list: -psi'' - b z^{-1} psi' + psi.
KSeries kernel_ode_lhs_series(const FracOrder& ord)
{
    const KSeries p0 = psi_series(ord);
    const KSeries p1 = derivative(p0);
    const KSeries p2 = derivative(p1);
    KSeries out;
    for (const auto& t : p2) out.push_back({-t.a, t.p, t.q});
    for (const auto& t : p1) out.push_back({-ord.b * t.a, t.p - 1.0, t.q});
    for (const auto& t : p0) out.push_back(t);
    return out;
}

// Reduction of a KSeries to the basis {K_{s-1}, K_s} via the recurrence
// K_{q+1} = K_{q-1} + (2q/z) K_q.  Every term generated from psi has
// p = s + integer and q = s + integer, so equal powers combine exactly and
// the large cancellations between high-order terms happen once, in the
// coefficients, instead of at every evaluation point.
struct BasisSeries {
    std::map<int, double> lo; // z^{s+d} coefficients of K_{s-1}
    std::map<int, double> hi; // z^{s+d} coefficients of K_s
};

BasisSeries reduce_to_basis(const KSeries& f, double s)
{
    BasisSeries out;
    std::vector<KTerm> work(f.begin(), f.end());
    while (!work.empty()) {
        const KTerm t = work.back();
        work.pop_back();
        const int m = static_cast<int>(std::lround(t.q - s));
        const int d = static_cast<int>(std::lround(t.p - s));
        if (m == 0)
            out.hi[d] += t.a;
        else if (m == -1)
            out.lo[d] += t.a;
        else if (m >= 1) {
            work.push_back({t.a, t.p, t.q - 2.0});
            work.push_back({2.0 * t.a * (t.q - 1.0), t.p - 1.0, t.q - 1.0});
        } else { // m <= -2
            work.push_back({t.a, t.p, t.q + 2.0});
            work.push_back({-2.0 * t.a * (t.q + 1.0), t.p - 1.0, t.q + 1.0});
        }
    }
    // Exact cancellations leave coefficient round-off ~1e-16 on low powers,
    // which z^{s+d} K amplifies without bound as z -> 0; prune it.
    double top = 0.0;
    for (const auto& [d, a] : out.lo) top = std::max(top, std::abs(a));
    for (const auto& [d, a] : out.hi) top = std::max(top, std::abs(a));
    const double cut = 1e-10 * top;
    std::erase_if(out.lo, [&](const auto& e) { return std::abs(e.second) < cut; });
    std::erase_if(out.hi, [&](const auto& e) { return std::abs(e.second) < cut; });
    return out;
}

double eval(const BasisSeries& f, double s, double z)
{
    const double damp = std::exp(-z);
    const double klo = special::detail::kv_scaled_any(s - 1.0, z);
    const double khi = special::detail::kv_scaled_any(s, z);
    double acc = 0.0;
    for (const auto& [d, a] : f.lo) acc += a * std::pow(z, s + d) * klo;
    for (const auto& [d, a] : f.hi) acc += a * std::pow(z, s + d) * khi;
    return acc * damp;
}

void require_positive(double z, const char* who)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error(std::string(who) + ": argument must be positive");
}

} // namespace

double psi(const FracOrder& ord, double z)
{
    if (z < 0.0 || !std::isfinite(z))
        throw std::domain_error("psi: argument must be nonnegative");
    if (z == 0.0) return 1.0; // analytic limit, avoids 0 * inf
    bool underflow = false;
    const double k = special::bessel_k(ord.s, z, &underflow);
    if (underflow) return 0.0;
    return ord.c_s * std::pow(z, ord.s) * k;
}

double psi_derivative(const FracOrder& ord, double z, int m)
{
    require_positive(z, "psi_derivative");
    if (m < 0 || m > 3) throw std::domain_error("psi_derivative: order must be 0..3");
    KSeries f = psi_series(ord);
    for (int i = 0; i < m; ++i) f = derivative(f);
    return eval(f, z);
}

double kernel_ode_residual(const FracOrder& ord, double z)
{
    require_positive(z, "kernel_ode_residual");
    const double lhs = std::abs(eval(kernel_ode_lhs_series(ord), z));
    const double rhs = 2.0 * ord.c_s * std::pow(z, ord.s - 1.0) *
                       special::detail::kv_scaled_any(ord.s - 1.0, z) * std::exp(-z);
    return lhs - rhs;
}

double flux_check(const FracOrder& ord, double lambda)
{
    require_positive(lambda, "flux_check");
    const double sl = std::sqrt(lambda);
    // g(y) = -y^b d/dy [(D_b + lambda) psi(sl y)] = lambda^s (-z^b sigma'(z)),
    // z = sl y, with sigma = (D~_b + 1)psi in the scaled variable.
    const BasisSeries dsigma =
        reduce_to_basis(derivative(kernel_ode_lhs_series(ord)), ord.s);
    const double ls = std::pow(lambda, ord.s);

    const double y0 = 1e-2 / sl;
    constexpr int kLevels = 7;
    std::vector<double> v(kLevels);
    for (int j = 0; j < kLevels; ++j) {
        const double z = sl * y0 * std::pow(2.0, -j);
        v[j] = ls * (-std::pow(z, ord.b) * eval(dsigma, ord.s, z));
    }

    // Error expansion in z has exponents 2(2-s), 2, 2(2-s)+2, 4, ...
    std::vector<double> exps = {2.0 * (2.0 - ord.s), 2.0, 2.0 * (2.0 - ord.s) + 2.0, 4.0};
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               exps.end());
    for (double p : exps) {
        const double fac = std::pow(2.0, p);
        for (std::size_t j = 0; j + 1 < v.size(); ++j)
            v[j] = (fac * v[j + 1] - v[j]) / (fac - 1.0);
        v.pop_back();
    }
    const double limit = v.front();
    if (v.size() >= 2) {
        const double last_step = std::abs(v[0] - v[1]);
        if (!(last_step <= 1e-6 * std::max(std::abs(limit), 1e-300)))
            throw std::runtime_error("flux_check: Richardson extrapolation did not converge");
    }
    return limit / (ord.d_s * ls);
}

double decay_integral(const FracOrder& ord, double lo, double hi)
{
    require_positive(lo, "decay_integral");
    if (!(lo < hi)) throw std::domain_error("decay_integral: requires lo < hi");
    const double c2 = 4.0 * ord.c_s * ord.c_s;
    const auto integrand = [&](double z) {
        const double ks = special::detail::kv_scaled_any(ord.s - 1.0, z);
        const double damp = std::exp(-2.0 * z);
        const double val = c2 * z * ks * ks * damp;
        return std::max(val, 1e-300); // keep the accumulator out of denormals
    };
    double raw;
    if (std::isinf(hi))
        raw = quad::adaptive_to_infinity(integrand, lo, 1e-12);
    else
        raw = quad::adaptive(integrand, lo, hi, 1e-12);
    return std::sqrt(raw);
}

SpectralFunction extension_solution(const SpectralFunction& f, const FracOrder& ord,
                                    double y)
{
    if (y < 0.0) throw std::domain_error("extension_solution: y must be nonnegative");
    auto coeffs = f.coeffs();
    for (auto& [k, c] : coeffs) {
        const double lam = f.basis().lambda(k);
        c *= std::pow(lam, -ord.s) * psi(ord, std::sqrt(lam) * y);
    }
    return SpectralFunction(f.basis(), std::move(coeffs));
}

DecayTable truncation_report(const SpectralFunction& f, const FracOrder& ord, double Y)
{
    require_positive(Y, "truncation_report");
    DecayTable table;
    const double lambda1 = f.basis().lambda(1);
    table.small_y_warning = Y < 1.0 / std::sqrt(lambda1);
    double sum = 0.0;
    for (const auto& [k, F] : f.coeffs()) {
        const double lam = f.basis().lambda(k);
        const double a = std::sqrt(lam) * Y;
        const double i_tail =
            decay_integral(ord, a, std::numeric_limits<double>::infinity());
        const double u = std::pow(lam, -ord.s) * F;
        const double contribution = std::pow(lam, ord.s) * u * u * i_tail * i_tail;
        table.rows.push_back({k, lam, i_tail, contribution});
        table.sup_i_tail = std::max(table.sup_i_tail, i_tail);
        sum += contribution;
    }
    table.tail_norm = std::sqrt(sum);
    table.bound = std::exp(-0.5 * std::sqrt(lambda1) * Y) * hs_norm(f, -ord.s);
    return table;
}

void write_decay_csv(std::ostream& os, const DecayTable& table)
{
    os << "k,lambda,I_tail,contribution\n";
    char buf[160];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.k, r.lambda,
                      r.i_tail, r.contribution);
        os << buf;
    }
}

} // namespace polyext
