#pragma once

#include "polyext/mesh.hpp"
#include "polyext/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

namespace polyext {

using SparseMat = Eigen::SparseMatrix<double>;

// C^1 piecewise-cubic Hermite space on a partition.  Global DOFs are
// (value, slope) per node: dof 2n = value at node n, dof 2n+1 = slope.
// Slope DOF coefficients are true derivative values (local basis scaled by
// the cell length).
class HermiteSpace1D {
public:
    HermiteSpace1D(Partition1D part, std::vector<std::size_t> constrained_dofs);

    // x-direction space W: v(0) = v(L) = 0, slopes free (H^2 ∩ H^1_0).
    static HermiteSpace1D dirichlet(Partition1D part);
    // y-direction space S: p'(0) = p(Y) = p'(Y) = 0.
    static HermiteSpace1D extension_profile(Partition1D part);

    const Partition1D& partition() const { return part_; }
    std::size_t num_nodes() const { return part_.nodes.size(); }
    std::size_t num_dofs() const { return 2 * num_nodes(); }
    std::size_t n_free() const { return n_free_; }

    bool is_constrained(std::size_t dof) const { return constrained_[dof]; }
    // Free index of a global DOF, or -1 if constrained.
    int free_index(std::size_t dof) const { return free_index_[dof]; }
    // Global DOF of a free index.
    std::size_t global_dof(std::size_t free) const { return free_to_global_[free]; }

    Eigen::VectorXd to_full(const Eigen::VectorXd& free_dofs) const;
    Eigen::VectorXd to_free(const Eigen::VectorXd& full_dofs) const;

    // Piecewise cubic (deriv = 0) or its first/second derivative at t,
    // from the full DOF vector.
    double eval(const Eigen::VectorXd& full_dofs, double t, int deriv) const;

private:
    Partition1D part_;
    std::vector<bool> constrained_;
    std::vector<int> free_index_;
    std::vector<std::size_t> free_to_global_;
    std::size_t n_free_;
};

// Reference-cell Hermite shape functions on [0,1] and derivatives.
std::array<double, 4> hermite_shape(double t, int deriv);

// x-direction factor matrices on free DOFs:
// M = int X_i X_k, K = int X_i' X_k', D = int X_i'' X_k''.
struct FactorMatricesX {
    SparseMat M, K, D;
};

// y-direction factor matrices with weight y^b, on free DOFs:
// M = int y^b Y_j Y_l, C = int y^b (D_b Y_j) Y_l, B = int y^b (D_b Y_j)(D_b Y_l),
// with D_b Y = -Y'' - (b/y) Y'.  trace0[j] = Y_j(0).
struct FactorMatricesY {
    SparseMat M, C, B;
    Eigen::VectorXd trace0;
};

FactorMatricesX factor_matrices_x(const HermiteSpace1D& space);
FactorMatricesY factor_matrices_y(const HermiteSpace1D& space, const FracOrder& ord);

// Serial reference implementations, kept for testing and benchmarking.
FactorMatricesX factor_matrices_x_serial(const HermiteSpace1D& space);
FactorMatricesY factor_matrices_y_serial(const HermiteSpace1D& space,
                                         const FracOrder& ord);

// A = M^x (x) B^y + K^x (x) (C^y + C^y^T) + D^x (x) M^y on free DOFs.
// Flat DOF index = (x free index) * n_free_y + (y free index).
struct TensorSystem {
    FracOrder ord;
    HermiteSpace1D x_space;
    HermiteSpace1D y_space;
    FactorMatricesX fx;
    FactorMatricesY fy;
    SparseMat A;
    Eigen::VectorXd load;

    std::size_t flat(std::size_t ix, std::size_t jy) const {
        return ix * y_space.n_free() + jy;
    }
    std::size_t n() const { return x_space.n_free() * y_space.n_free(); }
};

TensorSystem assemble(const FracOrder& ord, HermiteSpace1D x_space,
                      HermiteSpace1D y_space);
// Serial Kronecker expansion, kept for testing and benchmarking.
SparseMat kron_operator_serial(const FactorMatricesX& fx, const FactorMatricesY& fy);
SparseMat kron_operator(const FactorMatricesX& fx, const FactorMatricesY& fy);

// 1D mode operator B + lambda (C + C^T) + lambda^2 M on free y DOFs.
SparseMat mode_operator(const FactorMatricesY& fy, double lambda);

// Spectral-x substitution: M^x = I, K^x = diag(lambda_k), D^x = diag(lambda_k^2).
// Used by the block-diagonal consistency checks.
FactorMatricesX spectral_x_factors(const std::vector<double>& lambdas);

// Load entries (i,j) = d_s (int_Omega f X_i dx) Y_j(0).
Eigen::VectorXd load_vector(const SpectralFunction& f, const FracOrder& ord,
                            const HermiteSpace1D& x_space,
                            const HermiteSpace1D& y_space);
Eigen::VectorXd load_vector(const std::function<double(double)>& f, const FracOrder& ord,
                            const HermiteSpace1D& x_space,
                            const HermiteSpace1D& y_space);

// Moments int_0^1 f(x) X_i dx over free x DOFs.
Eigen::VectorXd x_moments(const SpectralFunction& f, const HermiteSpace1D& x_space);

// Coordinate-format dump `row col value`.
void write_coordinate(std::ostream& os, const SparseMat& m);

} // namespace polyext
