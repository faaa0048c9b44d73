#pragma once

#include "polyext/hermite.hpp"

#include <ostream>

namespace polyext {

struct CylinderSolution {
    Eigen::VectorXd free_dofs; // flat (x free) x (y free) layout of the system
    double residual = 0.0;     // ||A u - b|| / ||b||
    int iterations = 0;        // 0 for the direct path
};

// Relative residual contract for every solve.
inline constexpr double kSolveTol = 1e-10;

// Direct Cholesky up to 2e5 free DOFs, diagonally scaled CG beyond.
// Throws std::runtime_error (carrying the final residual) on non-convergence.
CylinderSolution solve_tensor(const TensorSystem& sys);

// Generic SPD solve with the same policy; used by the mode solver.
Eigen::VectorXd solve_spd(const SparseMat& A, const Eigen::VectorXd& b);

// 1D mode problem: find p in S(M_M) with
// int y^b (D_b p + lambda p)(D_b q + lambda q) dy = d_s F q(0).
// Returns the full y DOF vector (constrained entries zero).
Eigen::VectorXd mode_solve(const FracOrder& ord, double lambda, double F,
                           const HermiteSpace1D& y_space);
Eigen::VectorXd mode_solve(const FracOrder& ord, double lambda, double F,
                           const FactorMatricesY& fy, const HermiteSpace1D& y_space);

// Trace u(x, 0): x-direction DOF vector (full layout).
struct TraceFunction {
    HermiteSpace1D x_space;
    Eigen::VectorXd dofs; // full x DOFs

    double eval(double x, int deriv = 0) const { return x_space.eval(dofs, x, deriv); }
};

TraceFunction trace(const TensorSystem& sys, const CylinderSolution& sol);

// Pointwise evaluation of the discrete extension over the cylinder.
double eval_solution(const TensorSystem& sys, const CylinderSolution& sol, double x,
                     double y);

// CSV dumps: solution `x,y,value` on an (nx+1)x(ny+1) sampling grid,
// trace `x,value,derivative`.
void write_solution_csv(std::ostream& os, const TensorSystem& sys,
                        const CylinderSolution& sol, int nx = 64, int ny = 64);
void write_trace_csv(std::ostream& os, const TraceFunction& tr, int nx = 256);

} // namespace polyext
