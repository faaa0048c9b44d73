#pragma once

#include "polyext/spectral.hpp"

#include <cstddef>
#include <ostream>
#include <vector>

namespace polyext {

// psi(z) = c_s z^s K_s(z); psi(0) = 1 by the small-argument limit.
double psi(const FracOrder& ord, double z);

// m-th derivative of psi, m <= 3, via the K-recurrence (analytic, no FD).
double psi_derivative(const FracOrder& ord, double z, int m);

// |(D_b + 1)psi(z)| - 2 c_s z^{s-1} K_{s-1}(z), where
// (D_b + 1)psi = -psi'' - (b/z) psi' + psi.
double kernel_ode_residual(const FracOrder& ord, double z);

// Ratio of -lim_{y->0} y^b d/dy [(D_b + lambda) psi(sqrt(lambda) y)] to
// d_s lambda^s, by Richardson extrapolation over y = y0 2^{-j}, j = 0..6.
double flux_check(const FracOrder& ord, double lambda);

// I = (4 c_s^2 \int_lo^hi z K_{s-1}(z)^2 dz)^{1/2}; hi may be infinity.
double decay_integral(const FracOrder& ord, double lo, double hi);

// Coefficients of the extension at height y: lambda_k^{-s} F_k psi(sqrt(lambda_k) y).
SpectralFunction extension_solution(const SpectralFunction& f, const FracOrder& ord,
                                    double y);

struct DecayRow {
    std::size_t k;
    double lambda;
    double i_tail;       // I_k(sqrt(lambda_k) Y, infinity)
    double contribution; // lambda_k^s U_k^2 I_k^2
};

struct DecayTable {
    std::vector<DecayRow> rows;
    double tail_norm = 0.0;   // (sum_k contribution)^{1/2}
    double sup_i_tail = 0.0;  // sup over active modes
    double bound = 0.0;       // exp(-sqrt(lambda_1) Y / 2) * |f|_{H^{-s}}
    bool small_y_warning = false; // Y < 1/sqrt(lambda_1)
};

DecayTable truncation_report(const SpectralFunction& f, const FracOrder& ord, double Y);

// CSV form `k,lambda,I_tail,contribution`.
void write_decay_csv(std::ostream& os, const DecayTable& table);

} // namespace polyext
