#include "polyext/hermite.hpp"
#include "polyext/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polyext {

std::array<double, 4> hermite_shape(double t, int deriv)
{
    switch (deriv) {
    case 0:
        return {1.0 - 3.0 * t * t + 2.0 * t * t * t, t - 2.0 * t * t + t * t * t,
                3.0 * t * t - 2.0 * t * t * t, -t * t + t * t * t};
    case 1:
        return {-6.0 * t + 6.0 * t * t, 1.0 - 4.0 * t + 3.0 * t * t,
                6.0 * t - 6.0 * t * t, -2.0 * t + 3.0 * t * t};
    case 2:
        return {-6.0 + 12.0 * t, -4.0 + 6.0 * t, 6.0 - 12.0 * t, -2.0 + 6.0 * t};
    case 3:
        return {12.0, 6.0, -12.0, 6.0};
    default:
        throw std::domain_error("hermite_shape: derivative order must be 0..3");
    }
}

HermiteSpace1D::HermiteSpace1D(Partition1D part, std::vector<std::size_t> constrained_dofs)
    : part_(std::move(part))
{
    const std::size_t n = num_dofs();
    constrained_.assign(n, false);
    for (std::size_t dof : constrained_dofs) {
        if (dof >= n) throw std::domain_error("HermiteSpace1D: constrained DOF out of range");
        constrained_[dof] = true;
    }
    free_index_.assign(n, -1);
    for (std::size_t dof = 0; dof < n; ++dof) {
        if (!constrained_[dof]) {
            free_index_[dof] = static_cast<int>(free_to_global_.size());
            free_to_global_.push_back(dof);
        }
    }
    n_free_ = free_to_global_.size();
    if (n_free_ == 0) throw std::domain_error("HermiteSpace1D: no free DOFs");
}

HermiteSpace1D HermiteSpace1D::dirichlet(Partition1D part)
{
    // Value DOFs at both endpoints are constrained; the endpoint slopes stay
    // free.  The x-direction trial space discretizes H^2 \cap H^1_0: pinning
    // the slopes as well would exclude the extension's lateral normal
    // derivative and shift the computed trace by an O(1) amount.
    const std::size_t last = part.nodes.size() - 1;
    return HermiteSpace1D(std::move(part), {0, 2 * last});
}

HermiteSpace1D HermiteSpace1D::extension_profile(Partition1D part)
{
    const std::size_t last = part.nodes.size() - 1;
    return HermiteSpace1D(std::move(part), {1, 2 * last, 2 * last + 1});
}

Eigen::VectorXd HermiteSpace1D::to_full(const Eigen::VectorXd& free_dofs) const
{
    if (static_cast<std::size_t>(free_dofs.size()) != n_free_)
        throw std::invalid_argument("HermiteSpace1D::to_full: size mismatch");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(num_dofs());
    for (std::size_t j = 0; j < n_free_; ++j) full[free_to_global_[j]] = free_dofs[j];
    return full;
}

Eigen::VectorXd HermiteSpace1D::to_free(const Eigen::VectorXd& full_dofs) const
{
    if (static_cast<std::size_t>(full_dofs.size()) != num_dofs())
        throw std::invalid_argument("HermiteSpace1D::to_free: size mismatch");
    Eigen::VectorXd fr(n_free_);
    for (std::size_t j = 0; j < n_free_; ++j) fr[j] = full_dofs[free_to_global_[j]];
    return fr;
}

double HermiteSpace1D::eval(const Eigen::VectorXd& full_dofs, double t, int deriv) const
{
    if (static_cast<std::size_t>(full_dofs.size()) != num_dofs())
        throw std::invalid_argument("HermiteSpace1D::eval: size mismatch");
    const std::size_t m = part_.locate(t);
    const double len = part_.lengths[m];
    const double tau = (t - part_.nodes[m]) / len;
    const auto h = hermite_shape(tau, deriv);
    const double inv = std::pow(len, -deriv);
    // Slope DOFs carry a factor len so coefficients are derivative values.
    return inv * (full_dofs[2 * m] * h[0] + full_dofs[2 * m + 1] * len * h[1] +
                  full_dofs[2 * m + 2] * h[2] + full_dofs[2 * m + 3] * len * h[3]);
}

namespace {

struct LocalTriplets {
    std::vector<Eigen::Triplet<double>> M, K_or_C, D_or_B;
};

// Scatter a 4x4 local block into free-DOF triplets.
void scatter(const HermiteSpace1D& space, std::size_t cell, const double loc[4][4],
             std::vector<Eigen::Triplet<double>>& out)
{
    const std::size_t g0 = 2 * cell;
    for (int a = 0; a < 4; ++a) {
        const int ia = space.free_index(g0 + a);
        if (ia < 0) continue;
        for (int b = 0; b < 4; ++b) {
            const int ib = space.free_index(g0 + b);
            if (ib < 0) continue;
            out.emplace_back(ia, ib, loc[a][b]);
        }
    }
}

void x_cell_blocks(const HermiteSpace1D& space, std::size_t m, LocalTriplets& trip)
{
    const double len = space.partition().lengths[m];
    const auto& rule = quad::gauss_legendre(6);
    double M[4][4] = {}, K[4][4] = {}, D[4][4] = {};
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double tau = 0.5 * (rule.x[q] + 1.0);
        const double w = 0.5 * rule.w[q] * len;
        const auto h0 = hermite_shape(tau, 0);
        const auto h1 = hermite_shape(tau, 1);
        const auto h2 = hermite_shape(tau, 2);
        double v0[4], v1[4], v2[4];
        for (int a = 0; a < 4; ++a) {
            const double scale = (a % 2 == 1) ? len : 1.0;
            v0[a] = scale * h0[a];
            v1[a] = scale * h1[a] / len;
            v2[a] = scale * h2[a] / (len * len);
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                M[a][b] += w * v0[a] * v0[b];
                K[a][b] += w * v1[a] * v1[b];
                D[a][b] += w * v2[a] * v2[b];
            }
    }
    scatter(space, m, M, trip.M);
    scatter(space, m, K, trip.K_or_C);
    scatter(space, m, D, trip.D_or_B);
}

void y_cell_blocks(const HermiteSpace1D& space, const FracOrder& ord, std::size_t m,
                   LocalTriplets& trip)
{
    const double y0 = space.partition().nodes[m];
    const double len = space.partition().lengths[m];
    const double b = ord.b;

    // Quadrature with the weight y^b folded into the weights.  On the first
    // cell the integrands are y^b times polynomials of degree <= 6 once the
    // y=0 slope DOF is eliminated, so a mapped Gauss-Jacobi rule is exact.
    std::vector<double> qy, qw;
    if (m == 0) {
        const auto rule = quad::gauss_jacobi(10, 0.0, b);
        const double scale = std::pow(0.5 * len, b + 1.0);
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            qy.push_back(0.5 * len * (rule.x[q] + 1.0));
            qw.push_back(scale * rule.w[q]);
        }
    } else {
        const auto& rule = quad::gauss_legendre(10);
        const int panels = 8;
        const double h = len / panels;
        for (int p = 0; p < panels; ++p) {
            const double a0 = y0 + p * h;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double y = a0 + 0.5 * h * (rule.x[q] + 1.0);
                qy.push_back(y);
                qw.push_back(0.5 * h * rule.w[q] * std::pow(y, b));
            }
        }
    }

    double M[4][4] = {}, C[4][4] = {}, B[4][4] = {};
    for (std::size_t q = 0; q < qy.size(); ++q) {
        const double y = qy[q];
        const double w = qw[q];
        const double tau = (y - y0) / len;
        const auto h0 = hermite_shape(tau, 0);
        const auto h1 = hermite_shape(tau, 1);
        const auto h2 = hermite_shape(tau, 2);
        double v0[4], db[4];
        for (int a = 0; a < 4; ++a) {
            const double scale = (a % 2 == 1) ? len : 1.0;
            const double d1 = scale * h1[a] / len;
            const double d2 = scale * h2[a] / (len * len);
            v0[a] = scale * h0[a];
            db[a] = -d2 - b * d1 / y;
        }
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                M[a][c] += w * v0[a] * v0[c];
                C[a][c] += w * db[a] * v0[c];
                B[a][c] += w * db[a] * db[c];
            }
    }
    scatter(space, m, M, trip.M);
    scatter(space, m, C, trip.K_or_C);
    scatter(space, m, B, trip.D_or_B);
}

SparseMat from_triplets(std::size_t n, const std::vector<Eigen::Triplet<double>>& t)
{
    SparseMat a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

template <typename CellFn>
LocalTriplets accumulate_cells(std::size_t n_cells, bool parallel, CellFn&& per_cell)
{
    LocalTriplets all;
#ifdef _OPENMP
    if (parallel && n_cells > 1) {
        std::vector<LocalTriplets> per_thread(omp_get_max_threads());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(n_cells); ++m)
            per_cell(static_cast<std::size_t>(m), per_thread[omp_get_thread_num()]);
        for (auto& t : per_thread) {
            all.M.insert(all.M.end(), t.M.begin(), t.M.end());
            all.K_or_C.insert(all.K_or_C.end(), t.K_or_C.begin(), t.K_or_C.end());
            all.D_or_B.insert(all.D_or_B.end(), t.D_or_B.begin(), t.D_or_B.end());
        }
        return all;
    }
#else
    (void)parallel;
#endif
    for (std::size_t m = 0; m < n_cells; ++m) per_cell(m, all);
    return all;
}

FactorMatricesX factor_x_impl(const HermiteSpace1D& space, bool parallel)
{
    auto trip = accumulate_cells(space.partition().cells(), parallel,
                                 [&](std::size_t m, LocalTriplets& t) {
                                     x_cell_blocks(space, m, t);
                                 });
    FactorMatricesX fx;
    fx.M = from_triplets(space.n_free(), trip.M);
    fx.K = from_triplets(space.n_free(), trip.K_or_C);
    fx.D = from_triplets(space.n_free(), trip.D_or_B);
    return fx;
}

FactorMatricesY factor_y_impl(const HermiteSpace1D& space, const FracOrder& ord,
                              bool parallel)
{
    // The (b/y) Y' parts are integrable on the first cell only because the
    // slope at y=0 is constrained; enforce that precondition.
    if (!space.is_constrained(1))
        throw std::logic_error(
            "factor_matrices_y: the y=0 slope DOF must be eliminated before assembly");
    auto trip = accumulate_cells(space.partition().cells(), parallel,
                                 [&](std::size_t m, LocalTriplets& t) {
                                     y_cell_blocks(space, ord, m, t);
                                 });
    FactorMatricesY fy;
    fy.M = from_triplets(space.n_free(), trip.M);
    fy.C = from_triplets(space.n_free(), trip.K_or_C);
    fy.B = from_triplets(space.n_free(), trip.D_or_B);
    fy.trace0 = Eigen::VectorXd::Zero(space.n_free());
    if (space.free_index(0) >= 0) fy.trace0[space.free_index(0)] = 1.0;
    return fy;
}

} // namespace

FactorMatricesX factor_matrices_x(const HermiteSpace1D& space)
{
    return factor_x_impl(space, true);
}
FactorMatricesX factor_matrices_x_serial(const HermiteSpace1D& space)
{
    return factor_x_impl(space, false);
}
FactorMatricesY factor_matrices_y(const HermiteSpace1D& space, const FracOrder& ord)
{
    return factor_y_impl(space, ord, true);
}
FactorMatricesY factor_matrices_y_serial(const HermiteSpace1D& space, const FracOrder& ord)
{
    return factor_y_impl(space, ord, false);
}

namespace {

SparseMat kron_impl(const FactorMatricesX& fx, const FactorMatricesY& fy, bool parallel)
{
    const std::size_t nx = fx.M.rows();
    const std::size_t ny = fy.M.rows();
    const std::size_t ncols = nx * ny;
    SparseMat Cs = SparseMat(fy.C) + SparseMat(fy.C.transpose());

    struct Pair {
        const SparseMat* X;
        const SparseMat* Y;
    };
    const Pair pairs[3] = {{&fx.M, &fy.B}, {&fx.K, &Cs}, {&fx.D, &fy.M}};

    // Columns of the operator are independent: column k*ny + l collects
    // X(i,k) * Y(r,l) products at rows i*ny + r.  Each column is built,
    // sorted, and deduplicated on its own, so the loop parallelizes without
    // any shared state and no global triplet sort is needed afterwards.
    std::vector<std::vector<std::pair<int, double>>> cols(ncols);
    const auto do_col = [&](std::size_t c) {
        const std::size_t k = c / ny;
        const std::size_t l = c % ny;
        auto& out = cols[c];
        for (const auto& pr : pairs)
            for (SparseMat::InnerIterator xit(*pr.X, k); xit; ++xit)
                for (SparseMat::InnerIterator yit(*pr.Y, l); yit; ++yit)
                    out.emplace_back(static_cast<int>(xit.row() * ny + yit.row()),
                                     xit.value() * yit.value());
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t w = 0;
        for (std::size_t r = 0; r < out.size(); ++r) {
            if (w > 0 && out[w - 1].first == out[r].first)
                out[w - 1].second += out[r].second;
            else
                out[w++] = out[r];
        }
        out.resize(w);
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(ncols); ++c)
            do_col(static_cast<std::size_t>(c));
    } else
#endif
    {
        (void)parallel;
        for (std::size_t c = 0; c < ncols; ++c) do_col(c);
    }

    // Assemble the compressed-column arrays directly.
    std::vector<int> outer(ncols + 1, 0);
    for (std::size_t c = 0; c < ncols; ++c)
        outer[c + 1] = outer[c] + static_cast<int>(cols[c].size());
    const std::size_t nnz = static_cast<std::size_t>(outer[ncols]);
    std::vector<int> inner(nnz);
    std::vector<double> vals(nnz);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(ncols); ++c) {
        std::size_t w = static_cast<std::size_t>(outer[c]);
        for (const auto& [row, val] : cols[c]) {
            inner[w] = row;
            vals[w++] = val;
        }
    }
    return Eigen::Map<const SparseMat>(static_cast<Eigen::Index>(ncols),
                                       static_cast<Eigen::Index>(ncols),
                                       static_cast<Eigen::Index>(nnz), outer.data(),
                                       inner.data(), vals.data());
}

} // namespace

SparseMat kron_operator(const FactorMatricesX& fx, const FactorMatricesY& fy)
{
    return kron_impl(fx, fy, true);
}
SparseMat kron_operator_serial(const FactorMatricesX& fx, const FactorMatricesY& fy)
{
    return kron_impl(fx, fy, false);
}

TensorSystem assemble(const FracOrder& ord, HermiteSpace1D x_space, HermiteSpace1D y_space)
{
    TensorSystem sys{ord, std::move(x_space), std::move(y_space),
                     FactorMatricesX{}, FactorMatricesY{}, SparseMat{}, {}};
    sys.fx = factor_matrices_x(sys.x_space);
    sys.fy = factor_matrices_y(sys.y_space, ord);
    sys.A = kron_operator(sys.fx, sys.fy);
    sys.load = Eigen::VectorXd::Zero(sys.n());
    return sys;
}

SparseMat mode_operator(const FactorMatricesY& fy, double lambda)
{
    if (!(lambda > 0.0)) throw std::domain_error("mode_operator: lambda must be positive");
    SparseMat op = SparseMat(fy.B) + lambda * (SparseMat(fy.C) + SparseMat(fy.C.transpose())) +
                   lambda * lambda * SparseMat(fy.M);
    op.makeCompressed();
    return op;
}

FactorMatricesX spectral_x_factors(const std::vector<double>& lambdas)
{
    const std::size_t n = lambdas.size();
    FactorMatricesX fx;
    fx.M.resize(n, n);
    fx.K.resize(n, n);
    fx.D.resize(n, n);
    fx.M.setIdentity();
    std::vector<Eigen::Triplet<double>> tk, td;
    for (std::size_t i = 0; i < n; ++i) {
        tk.emplace_back(i, i, lambdas[i]);
        td.emplace_back(i, i, lambdas[i] * lambdas[i]);
    }
    fx.K.setFromTriplets(tk.begin(), tk.end());
    fx.D.setFromTriplets(td.begin(), td.end());
    return fx;
}

namespace {

Eigen::VectorXd moments_impl(const std::function<double(double)>& f,
                             const HermiteSpace1D& space, int panels_per_cell)
{
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(space.n_free());
    const auto& part = space.partition();
    const auto& rule = quad::gauss_legendre(10);
    for (std::size_t m = 0; m < part.cells(); ++m) {
        const double len = part.lengths[m];
        const double h = len / panels_per_cell;
        double loc[4] = {};
        for (int p = 0; p < panels_per_cell; ++p) {
            const double a0 = part.nodes[m] + p * h;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double x = a0 + 0.5 * h * (rule.x[q] + 1.0);
                const double w = 0.5 * h * rule.w[q] * f(x);
                const double tau = (x - part.nodes[m]) / len;
                const auto h0 = hermite_shape(tau, 0);
                for (int a = 0; a < 4; ++a)
                    loc[a] += w * ((a % 2 == 1) ? len : 1.0) * h0[a];
            }
        }
        for (int a = 0; a < 4; ++a) {
            const int ia = space.free_index(2 * m + a);
            if (ia >= 0) mom[ia] += loc[a];
        }
    }
    return mom;
}

} // namespace

Eigen::VectorXd x_moments(const SpectralFunction& f, const HermiteSpace1D& x_space)
{
    std::size_t kmax = 1;
    for (const auto& [k, c] : f.coeffs()) kmax = std::max(kmax, k);
    const double hmax =
        *std::max_element(x_space.partition().lengths.begin(),
                          x_space.partition().lengths.end());
    const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * kmax * hmax)) + 1);
    return moments_impl([&](double x) { return f.eval(x); }, x_space, panels);
}

namespace {

Eigen::VectorXd load_from_moments(const Eigen::VectorXd& mom, const FracOrder& ord,
                                  const HermiteSpace1D& x_space,
                                  const HermiteSpace1D& y_space)
{
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(y_space.n_free());
    if (y_space.free_index(0) >= 0) e0[y_space.free_index(0)] = 1.0;
    Eigen::VectorXd load(x_space.n_free() * y_space.n_free());
    for (std::size_t i = 0; i < static_cast<std::size_t>(mom.size()); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(e0.size()); ++j)
            load[i * y_space.n_free() + j] = ord.d_s * mom[i] * e0[j];
    return load;
}

} // namespace

Eigen::VectorXd load_vector(const SpectralFunction& f, const FracOrder& ord,
                            const HermiteSpace1D& x_space, const HermiteSpace1D& y_space)
{
    if (f.basis().domain() != Domain::Interval)
        throw std::domain_error("load_vector: FEM load requires the interval basis");
    return load_from_moments(x_moments(f, x_space), ord, x_space, y_space);
}

Eigen::VectorXd load_vector(const std::function<double(double)>& f, const FracOrder& ord,
                            const HermiteSpace1D& x_space, const HermiteSpace1D& y_space)
{
    return load_from_moments(moments_impl(f, x_space, 8), ord, x_space, y_space);
}

void write_coordinate(std::ostream& os, const SparseMat& m)
{
    char buf[96];
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n",
                          static_cast<long>(it.row()), static_cast<long>(it.col()),
                          it.value());
            os << buf;
        }
}

} // namespace polyext
