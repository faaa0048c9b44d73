#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace polyext {

// The parameter pack (s, b, c_s, d_s) that governs every formula.
// b = 3 - 2s, c_s = 2^{1-s}/Gamma(s), d_s = 2^b Gamma(2-s)/Gamma(s).
struct FracOrder {
    double s;
    double b;
    double c_s;
    double d_s;
};

FracOrder make_frac_order(double s);

enum class Domain { Interval, Square };

// Dirichlet eigenpairs of -Laplace on (0,1) or (0,1)^2, flat-enumerated by
// ascending eigenvalue (lexicographic tie-break on the square).
class EigenBasis {
public:
    static EigenBasis interval();
    static EigenBasis square();

    Domain domain() const { return dom_; }

    // Eigenvalue of the k-th mode, k >= 1.
    double lambda(std::size_t k) const;

    // Mode multi-index for the square enumeration.
    std::array<std::size_t, 2> square_mode(std::size_t k) const;

    // Pointwise eigenfunction values.
    double eval(std::size_t k, double x) const;             // interval
    double eval(std::size_t k, double x1, double x2) const; // square

    std::size_t max_modes() const;

    bool operator==(const EigenBasis& o) const { return dom_ == o.dom_; }

private:
    explicit EigenBasis(Domain d);
    Domain dom_;
    std::vector<std::array<std::size_t, 2>> modes_; // square enumeration
};

// Finite expansion sum_k c_k phi_k; indices distinct, sorted ascending.
class SpectralFunction {
public:
    SpectralFunction() : basis_(EigenBasis::interval()) {}
    SpectralFunction(EigenBasis basis,
                     std::vector<std::pair<std::size_t, double>> coeffs);

    const EigenBasis& basis() const { return basis_; }
    const std::vector<std::pair<std::size_t, double>>& coeffs() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }

    double eval(double x) const;

private:
    EigenBasis basis_;
    std::vector<std::pair<std::size_t, double>> coeffs_;
};

// w -> sum lambda_k^sigma W_k phi_k.
SpectralFunction apply_power(const SpectralFunction& w, double sigma);

// Exact solution oracle u = L^{-s} f.
SpectralFunction oracle_solve(const SpectralFunction& f, const FracOrder& ord);

// (sum_k lambda_k^sigma |W_k|^2)^{1/2}; sigma may be negative (dual norm).
double hs_norm(const SpectralFunction& w, double sigma);

// Text form used by the CLI: comma-separated `k:coeff` (interval) or
// `k,l:coeff` (square) entries.  Throws std::invalid_argument with the
// offending position on malformed input.
SpectralFunction parse_spectral(const std::string& text, const EigenBasis& basis);

} // namespace polyext
