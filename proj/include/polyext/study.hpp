#pragma once

#include "polyext/solve.hpp"

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace polyext {

// Sine coefficients c_k = int_0^1 tr(x) sqrt(2) sin(k pi x) dx, k = 1..K.
std::vector<double> trace_sine_coefficients(const TraceFunction& tr, std::size_t K);
std::vector<double> trace_sine_coefficients_serial(const TraceFunction& tr, std::size_t K);

struct TraceErrors {
    double err_hs = 0.0;  // (sum_{k<=K} lambda_k^s |U_k - c_k|^2)^{1/2}
    double err_l2 = 0.0;  // same with exponent 0
    double l2_tail = 0.0; // L^2 mass of the discrete trace beyond mode K
};

// K must cover every active mode of `exact`.
TraceErrors trace_hs_error(const TraceFunction& tr, const SpectralFunction& exact,
                           const FracOrder& ord, std::size_t K);

struct RunParams {
    double s = 1.5;
    double Y = 1.5;
    double gamma = 2.0;
    std::size_t Nx = 16;
    std::size_t M = 16;
    std::size_t K = 0; // 0: max(64, 4 * largest active mode)
    std::string fspec = "1:1";
};

struct ConvergenceRecord {
    RunParams params;
    bool ok = false;
    std::string error;
    double err_hs = 0.0;
    double err_l2 = 0.0;
    double energy = 0.0;
    double eoc_hs = 0.0; // NaN unless the previous record is a dyadic parent
    double wall_ms = 0.0;
};

// One full pipeline run: assemble, solve, trace, errors against the
// untruncated spectral oracle.
struct SolveOutcome {
    TensorSystem sys;
    CylinderSolution sol;
    TraceFunction tr;
    TraceErrors errors;
    double energy = 0.0;
};

SolveOutcome solve_problem(const RunParams& p);

// Runs every grid point (concurrently), then fills EOC between consecutive
// mesh-halving records.  Individual failures are recorded, the study goes on.
std::vector<ConvergenceRecord> run_study(const std::vector<RunParams>& plan);

// CSV `s,Y,gamma,Nx,M,err_hs,err_l2,energy,eoc_hs,wall_ms`.
// `with_timing = false` drops the wall_ms column (determinism checks).
void write_study_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records,
                     bool with_timing = true);

// Least-squares slope of log(err_hs) against Y; requires >= 2 valid records.
double fit_y_slope(const std::vector<ConvergenceRecord>& records);

} // namespace polyext
