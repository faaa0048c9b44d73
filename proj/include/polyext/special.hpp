#pragma once

namespace polyext::special {

// Gamma function for x > 0.
double gamma(double x);

// Modified Bessel function of the second kind K_nu(z).
// Public surface restricted to nu in (0,3), z > 0.  For z large enough that
// e^{-z} underflows the result is 0 and *underflow (if given) is set.
double bessel_k(double nu, double z, bool* underflow = nullptr);

// e^z K_nu(z).  Never underflows for z <= 1e6.
double bessel_k_scaled(double nu, double z);

namespace detail {

// Scaled e^z K_nu(z) for arbitrary real order (K is even in nu).
// Internal: used by the kernel-derivative machinery, which walks the
// recurrence to orders outside (0,3).
double kv_scaled_any(double nu, double z);

} // namespace detail

} // namespace polyext::special
