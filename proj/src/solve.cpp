#include "polyext/solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace polyext {

namespace {

constexpr std::size_t kDirectLimit = 200000;
constexpr int kIterationCap = 10000;

} // namespace

namespace {

// Normwise backward error ||Au - b|| / (||A||_F ||u|| + ||b||): the right
// acceptance test for ill-conditioned systems, where the plain relative
// residual ||Au - b|| / ||b|| can exceed any fixed tolerance even for a
// backward-stable solve.
double backward_error(const SparseMat& A, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& b)
{
    return (A * u - b).norm() / (A.norm() * u.norm() + b.norm());
}

} // namespace

Eigen::VectorXd solve_spd(const SparseMat& A, const Eigen::VectorXd& b)
{
    if (b.norm() == 0.0) return Eigen::VectorXd::Zero(b.size());
    if (static_cast<std::size_t>(A.rows()) <= kDirectLimit) {
        Eigen::SimplicialLLT<SparseMat> llt(A);
        if (llt.info() == Eigen::Success) {
            Eigen::VectorXd u = llt.solve(b);
            // A couple of iterative-refinement sweeps squeeze the residual
            // close to roundoff even when A is badly conditioned.
            for (int k = 0; k < 3; ++k) {
                const Eigen::VectorXd r = b - A * u;
                if (r.norm() <= kSolveTol * b.norm()) break;
                u += llt.solve(r);
            }
            if (backward_error(A, u, b) <= kSolveTol) return u;
        }
        // fall through to CG when the factorization is unusable
    }
    Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setMaxIterations(kIterationCap);
    cg.setTolerance(kSolveTol * 1e-2);
    cg.compute(A);
    Eigen::VectorXd u = cg.solveWithGuess(b, Eigen::VectorXd::Zero(b.size()));
    if (backward_error(A, u, b) > kSolveTol)
        throw std::runtime_error("solve_spd: no convergence, backward error " +
                                 std::to_string(backward_error(A, u, b)));
    return u;
}

CylinderSolution solve_tensor(const TensorSystem& sys)
{
    CylinderSolution sol;
    sol.free_dofs = solve_spd(sys.A, sys.load);
    const double bn = sys.load.norm();
    sol.residual = bn == 0.0 ? 0.0 : (sys.A * sol.free_dofs - sys.load).norm() / bn;
    return sol;
}

Eigen::VectorXd mode_solve(const FracOrder& ord, double lambda, double F,
                           const FactorMatricesY& fy, const HermiteSpace1D& y_space)
{
    const SparseMat op = mode_operator(fy, lambda);
    Eigen::VectorXd rhs = ord.d_s * F * fy.trace0;
    return y_space.to_full(solve_spd(op, rhs));
}

Eigen::VectorXd mode_solve(const FracOrder& ord, double lambda, double F,
                           const HermiteSpace1D& y_space)
{
    return mode_solve(ord, lambda, F, factor_matrices_y(y_space, ord), y_space);
}

TraceFunction trace(const TensorSystem& sys, const CylinderSolution& sol)
{
    // Only y-basis functions with Y_j(0) != 0 contribute: the value DOF at
    // the y = 0 node (its cardinal value there is 1).
    const int j0 = sys.y_space.free_index(0);
    Eigen::VectorXd x_free = Eigen::VectorXd::Zero(sys.x_space.n_free());
    if (j0 >= 0)
        for (std::size_t i = 0; i < sys.x_space.n_free(); ++i)
            x_free[i] = sol.free_dofs[sys.flat(i, static_cast<std::size_t>(j0))];
    return TraceFunction{sys.x_space, sys.x_space.to_full(x_free)};
}

double eval_solution(const TensorSystem& sys, const CylinderSolution& sol, double x,
                     double y)
{
    const auto& xs = sys.x_space;
    const auto& ys = sys.y_space;
    const auto& px = xs.partition();
    const auto& py = ys.partition();
    const std::size_t mx = px.locate(x);
    const std::size_t my = py.locate(y);
    const double lx = px.lengths[mx];
    const double ly = py.lengths[my];
    const auto hx = hermite_shape((x - px.nodes[mx]) / lx, 0);
    const auto hy = hermite_shape((y - py.nodes[my]) / ly, 0);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int ia = xs.free_index(2 * mx + a);
        if (ia < 0) continue;
        const double bx = ((a % 2 == 1) ? lx : 1.0) * hx[a];
        for (int b = 0; b < 4; ++b) {
            const int jb = ys.free_index(2 * my + b);
            if (jb < 0) continue;
            const double by = ((b % 2 == 1) ? ly : 1.0) * hy[b];
            acc += sol.free_dofs[sys.flat(ia, jb)] * bx * by;
        }
    }
    return acc;
}

void write_solution_csv(std::ostream& os, const TensorSystem& sys,
                        const CylinderSolution& sol, int nx, int ny)
{
    os << "x,y,value\n";
    const double Lx = sys.x_space.partition().length();
    const double Ly = sys.y_space.partition().length();
    char buf[96];
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            const double x = Lx * i / nx;
            const double y = Ly * j / ny;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y,
                          eval_solution(sys, sol, x, y));
            os << buf;
        }
}

void write_trace_csv(std::ostream& os, const TraceFunction& tr, int nx)
{
    os << "x,value,derivative\n";
    const double L = tr.x_space.partition().length();
    char buf[96];
    for (int i = 0; i <= nx; ++i) {
        const double x = L * i / nx;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, tr.eval(x, 0),
                      tr.eval(x, 1));
        os << buf;
    }
}

} // namespace polyext
