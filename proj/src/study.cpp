#include "polyext/study.hpp"
#include "polyext/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polyext {

namespace {

double sine_coefficient(const TraceFunction& tr, std::size_t k)
{
    const auto& part = tr.x_space.partition();
    const double kpi = k * std::numbers::pi;
    double acc = 0.0;
    for (std::size_t m = 0; m < part.cells(); ++m) {
        const double a = part.nodes[m];
        const double b = part.nodes[m + 1];
        // Enough panels to resolve the oscillation of sin(k pi x) per cell.
        const int panels = std::max<int>(1, static_cast<int>(std::ceil(k * (b - a))) + 1);
        acc += quad::integrate_composite(
            [&](double x) { return tr.eval(x) * std::sqrt(2.0) * std::sin(kpi * x); }, a,
            b, panels, 10);
    }
    return acc;
}

std::vector<double> sine_coefficients_impl(const TraceFunction& tr, std::size_t K,
                                           bool parallel)
{
    std::vector<double> c(K);
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t k = 1; k <= static_cast<std::ptrdiff_t>(K); ++k)
            c[k - 1] = sine_coefficient(tr, static_cast<std::size_t>(k));
        return c;
    }
#else
    (void)parallel;
#endif
    for (std::size_t k = 1; k <= K; ++k) c[k - 1] = sine_coefficient(tr, k);
    return c;
}

} // namespace

std::vector<double> trace_sine_coefficients(const TraceFunction& tr, std::size_t K)
{
    return sine_coefficients_impl(tr, K, true);
}
std::vector<double> trace_sine_coefficients_serial(const TraceFunction& tr, std::size_t K)
{
    return sine_coefficients_impl(tr, K, false);
}

TraceErrors trace_hs_error(const TraceFunction& tr, const SpectralFunction& exact,
                           const FracOrder& ord, std::size_t K)
{
    if (exact.basis().domain() != Domain::Interval)
        throw std::domain_error("trace_hs_error: interval basis required");
    for (const auto& [k, c] : exact.coeffs())
        if (k > K)
            throw std::domain_error("trace_hs_error: K must cover every active mode");

    const auto c = trace_sine_coefficients(tr, K);
    std::vector<double> u(K, 0.0);
    for (const auto& [k, ck] : exact.coeffs()) u[k - 1] = ck;

    TraceErrors out;
    double hs = 0.0, l2 = 0.0, mass_k = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        const double lam = exact.basis().lambda(k);
        const double d = u[k - 1] - c[k - 1];
        hs += std::pow(lam, ord.s) * d * d;
        l2 += d * d;
        mass_k += c[k - 1] * c[k - 1];
    }
    out.err_hs = std::sqrt(hs);
    out.err_l2 = std::sqrt(l2);

    // Diagnostics: L^2 mass of the discrete trace beyond mode K.
    const auto& part = tr.x_space.partition();
    double mass = 0.0;
    for (std::size_t m = 0; m < part.cells(); ++m)
        mass += quad::integrate(
            [&](double x) { const double v = tr.eval(x); return v * v; },
            part.nodes[m], part.nodes[m + 1], 10);
    out.l2_tail = std::max(0.0, mass - mass_k);
    return out;
}

SolveOutcome solve_problem(const RunParams& p)
{
    const FracOrder ord = make_frac_order(p.s);
    const auto basis = EigenBasis::interval();
    const SpectralFunction f = parse_spectral(p.fspec, basis);

    std::size_t kmax = 1;
    for (const auto& [k, c] : f.coeffs()) kmax = std::max(kmax, k);
    const std::size_t K = p.K > 0 ? p.K : std::max<std::size_t>(64, 4 * kmax);

    TensorSystem sys = assemble(ord, HermiteSpace1D::dirichlet(uniform_partition(1.0, p.Nx)),
                                HermiteSpace1D::extension_profile(
                                    graded_partition(p.Y, p.M, p.gamma)));
    sys.load = load_vector(f, ord, sys.x_space, sys.y_space);
    CylinderSolution sol = solve_tensor(sys);
    TraceFunction tr = trace(sys, sol);
    TraceErrors errors = trace_hs_error(tr, oracle_solve(f, ord), ord, K);
    const double energy = sys.load.dot(sol.free_dofs);
    return SolveOutcome{std::move(sys), std::move(sol), std::move(tr), errors, energy};
}

std::vector<ConvergenceRecord> run_study(const std::vector<RunParams>& plan)
{
    std::vector<ConvergenceRecord> records(plan.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(plan.size()); ++i) {
        ConvergenceRecord rec;
        rec.params = plan[i];
        rec.eoc_hs = std::numeric_limits<double>::quiet_NaN();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const SolveOutcome o = solve_problem(plan[i]);
            rec.err_hs = o.errors.err_hs;
            rec.err_l2 = o.errors.err_l2;
            rec.energy = o.energy;
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
            rec.err_hs = rec.err_l2 = rec.energy =
                std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        records[i] = std::move(rec);
    }

    // EOC on consecutive halvings only (both directions doubled).
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1].params;
        const auto& b = records[i].params;
        if (records[i - 1].ok && records[i].ok && a.s == b.s && a.Y == b.Y &&
            a.gamma == b.gamma && a.fspec == b.fspec && b.Nx == 2 * a.Nx &&
            b.M == 2 * a.M && records[i].err_hs > 0.0)
            records[i].eoc_hs = std::log2(records[i - 1].err_hs / records[i].err_hs);
    }
    return records;
}

void write_study_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records,
                     bool with_timing)
{
    os << "s,Y,gamma,Nx,M,err_hs,err_l2,energy,eoc_hs";
    if (with_timing) os << ",wall_ms";
    os << '\n';
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g,",
                      r.params.s, r.params.Y, r.params.gamma, r.params.Nx, r.params.M,
                      r.err_hs, r.err_l2, r.energy);
        os << buf;
        if (std::isnan(r.eoc_hs))
            os << "";
        else {
            std::snprintf(buf, sizeof buf, "%.17g", r.eoc_hs);
            os << buf;
        }
        if (with_timing) {
            std::snprintf(buf, sizeof buf, ",%.17g", r.wall_ms);
            os << buf;
        }
        os << '\n';
    }
}

double fit_y_slope(const std::vector<ConvergenceRecord>& records)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records)
        if (r.ok && r.err_hs > 0.0) pts.emplace_back(r.params.Y, std::log(r.err_hs));
    if (pts.size() < 2)
        throw std::domain_error("fit_y_slope: need at least two valid records");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace polyext
