#include "polyext/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polyext::special {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(1+x) around 0 (odd part only).
constexpr double kInvGammaA1 = 0.57721566490153286061;   // Euler gamma
constexpr double kInvGammaA3 = -0.04200263503409523553;

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continuous at mu = 0.
double temme_gam1(double mu)
{
    if (std::abs(mu) < 1e-3) {
        const double mu2 = mu * mu;
        return -(kInvGammaA1 + kInvGammaA3 * mu2);
    }
    const double gp = 1.0 / std::tgamma(1.0 + mu);
    const double gm = 1.0 / std::tgamma(1.0 - mu);
    return (gm - gp) / (2.0 * mu);
}

// Temme's series for K_mu(z), K_{mu+1}(z) with |mu| <= 1/2, 0 < z <= 2.
void k_temme_series(double mu, double z, double& kmu, double& kmu1)
{
    const double half = 0.5 * z;
    const double mu2 = mu * mu;
    const double pimu = kPi * mu;
    const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    const double dlog = -std::log(half);
    const double e0 = mu * dlog;
    const double fact2 = (std::abs(e0) < kEps) ? 1.0 : std::sinh(e0) / e0;

    const double gampl = 1.0 / std::tgamma(1.0 + mu);
    const double gammi = 1.0 / std::tgamma(1.0 - mu);
    const double gam1 = temme_gam1(mu);
    const double gam2 = 0.5 * (gampl + gammi);

    double ff = fact * (gam1 * std::cosh(e0) + gam2 * fact2 * dlog);
    double sum = ff;
    const double e = std::exp(e0);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    const double d = half * half;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter)
        throw std::runtime_error("bessel_k: series failed to converge");
    kmu = sum;
    kmu1 = sum1 * (2.0 / z);
}

// Thompson-Barnett CF2 for e^z K_mu(z), e^z K_{mu+1}(z), |mu| <= 1/2, z > 2.
void k_cf2_scaled(double mu, double z, double& kmu, double& kmu1)
{
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter)
        throw std::runtime_error("bessel_k: continued fraction failed to converge");
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * z)) / s;
    kmu1 = kmu * (mu + z + 0.5 - h) / z;
}

} // namespace

double gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("gamma: argument must be positive and finite, got " +
                                std::to_string(x));
    return std::tgamma(x);
}

namespace detail {

double kv_scaled_any(double nu, double z)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("bessel_k: argument must be positive, got " +
                                std::to_string(z));
    nu = std::abs(nu); // K_{-nu} = K_nu
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;

    double kmu, kmu1;
    if (z <= 2.0) {
        k_temme_series(mu, z, kmu, kmu1);
        const double ez = std::exp(z);
        kmu *= ez;
        kmu1 *= ez;
    } else {
        k_cf2_scaled(mu, z, kmu, kmu1);
    }
    // Upward recurrence K_{v+1} = K_{v-1} + (2v/z) K_v (scale-invariant).
    for (int j = 1; j <= nl; ++j) {
        const double knext = kmu + (2.0 * (mu + j) / z) * kmu1;
        kmu = kmu1;
        kmu1 = knext;
    }
    return kmu;
}

} // namespace detail

double bessel_k_scaled(double nu, double z)
{
    if (!(nu > 0.0 && nu < 3.0))
        throw std::domain_error("bessel_k_scaled: order must lie in (0,3), got " +
                                std::to_string(nu));
    return detail::kv_scaled_any(nu, z);
}

double bessel_k(double nu, double z, bool* underflow)
{
    if (underflow) *underflow = false;
    const double scaled = bessel_k_scaled(nu, z);
    const double damp = std::exp(-z);
    if (damp == 0.0 || scaled * damp == 0.0) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    return scaled * damp;
}

} // namespace polyext::special
