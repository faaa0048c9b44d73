#include "polyext/spectral.hpp"
#include "polyext/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyext {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kSquareCap = 4096;
constexpr std::size_t kSquareGen = 96; // covers the first kSquareCap modes

} // namespace

FracOrder make_frac_order(double s)
{
    if (!(s > 1.0 && s < 2.0))
        throw std::domain_error("make_frac_order: s must lie in (1,2), got " +
                                std::to_string(s));
    FracOrder ord;
    ord.s = s;
    ord.b = 3.0 - 2.0 * s;
    ord.c_s = std::pow(2.0, 1.0 - s) / special::gamma(s);
    ord.d_s = std::pow(2.0, ord.b) * special::gamma(2.0 - s) / special::gamma(s);
    return ord;
}

EigenBasis::EigenBasis(Domain d) : dom_(d)
{
    if (dom_ == Domain::Square) {
        modes_.reserve(kSquareGen * kSquareGen);
        for (std::size_t k = 1; k <= kSquareGen; ++k)
            for (std::size_t l = 1; l <= kSquareGen; ++l)
                modes_.push_back({k, l});
        std::sort(modes_.begin(), modes_.end(),
                  [](const auto& a, const auto& b) {
                      const auto ea = a[0] * a[0] + a[1] * a[1];
                      const auto eb = b[0] * b[0] + b[1] * b[1];
                      if (ea != eb) return ea < eb;
                      return a < b;
                  });
        modes_.resize(kSquareCap);
    }
}

EigenBasis EigenBasis::interval() { return EigenBasis(Domain::Interval); }
EigenBasis EigenBasis::square() { return EigenBasis(Domain::Square); }

std::size_t EigenBasis::max_modes() const
{
    return dom_ == Domain::Interval ? static_cast<std::size_t>(1) << 40 : kSquareCap;
}

double EigenBasis::lambda(std::size_t k) const
{
    if (k < 1 || k > max_modes())
        throw std::domain_error("EigenBasis: mode index out of range");
    if (dom_ == Domain::Interval)
        return (kPi * k) * (kPi * k);
    const auto m = modes_[k - 1];
    return kPi * kPi * static_cast<double>(m[0] * m[0] + m[1] * m[1]);
}

std::array<std::size_t, 2> EigenBasis::square_mode(std::size_t k) const
{
    if (dom_ != Domain::Square)
        throw std::logic_error("EigenBasis: square_mode on interval basis");
    if (k < 1 || k > kSquareCap)
        throw std::domain_error("EigenBasis: mode index out of range");
    return modes_[k - 1];
}

double EigenBasis::eval(std::size_t k, double x) const
{
    if (dom_ != Domain::Interval)
        throw std::logic_error("EigenBasis: 1-argument eval on square basis");
    return std::sqrt(2.0) * std::sin(k * kPi * x);
}

double EigenBasis::eval(std::size_t k, double x1, double x2) const
{
    if (dom_ != Domain::Square)
        throw std::logic_error("EigenBasis: 2-argument eval on interval basis");
    const auto m = square_mode(k);
    return 2.0 * std::sin(m[0] * kPi * x1) * std::sin(m[1] * kPi * x2);
}

SpectralFunction::SpectralFunction(EigenBasis basis,
                                   std::vector<std::pair<std::size_t, double>> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs))
{
    std::sort(coeffs_.begin(), coeffs_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i)
        if (coeffs_[i].first == coeffs_[i + 1].first)
            throw std::invalid_argument("SpectralFunction: duplicate mode index " +
                                        std::to_string(coeffs_[i].first));
    for (const auto& [k, c] : coeffs_)
        (void)basis_.lambda(k); // validates index range
}

double SpectralFunction::eval(double x) const
{
    double acc = 0.0;
    for (const auto& [k, c] : coeffs_) acc += c * basis_.eval(k, x);
    return acc;
}

SpectralFunction apply_power(const SpectralFunction& w, double sigma)
{
    auto coeffs = w.coeffs();
    for (auto& [k, c] : coeffs) c *= std::pow(w.basis().lambda(k), sigma);
    return SpectralFunction(w.basis(), std::move(coeffs));
}

SpectralFunction oracle_solve(const SpectralFunction& f, const FracOrder& ord)
{
    return apply_power(f, -ord.s);
}

double hs_norm(const SpectralFunction& w, double sigma)
{
    double acc = 0.0;
    for (const auto& [k, c] : w.coeffs())
        acc += std::pow(w.basis().lambda(k), sigma) * c * c;
    return std::sqrt(acc);
}

namespace {

[[noreturn]] void parse_fail(const std::string& text, std::size_t pos,
                             const std::string& what)
{
    throw std::invalid_argument("spectral data parse error at position " +
                                std::to_string(pos) + ": " + what + " in '" + text + "'");
}

} // namespace

SpectralFunction parse_spectral(const std::string& text, const EigenBasis& basis)
{
    std::vector<std::pair<std::size_t, double>> coeffs;
    std::size_t pos = 0;
    const auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    skip_ws();
    while (pos < text.size()) {
        const std::size_t entry_pos = pos;
        std::size_t end;
        unsigned long k1 = 0;
        try {
            k1 = std::stoul(text.substr(pos), &end);
        } catch (const std::exception&) {
            parse_fail(text, pos, "expected mode index");
        }
        pos += end;
        skip_ws();
        std::size_t flat;
        if (basis.domain() == Domain::Square && pos < text.size() && text[pos] == ',') {
            ++pos;
            skip_ws();
            unsigned long k2 = 0;
            try {
                k2 = std::stoul(text.substr(pos), &end);
            } catch (const std::exception&) {
                parse_fail(text, pos, "expected second mode index");
            }
            pos += end;
            if (k1 < 1 || k2 < 1) parse_fail(text, entry_pos, "mode indices start at 1");
            // Locate the flat index of (k1,k2) in the declared enumeration.
            flat = 0;
            for (std::size_t k = 1; k <= basis.max_modes(); ++k) {
                const auto m = basis.square_mode(k);
                if (m[0] == k1 && m[1] == k2) {
                    flat = k;
                    break;
                }
            }
            if (flat == 0) parse_fail(text, entry_pos, "square mode out of supported range");
        } else {
            // Interval mode index, or a flat index into the square enumeration.
            if (k1 < 1) parse_fail(text, entry_pos, "mode indices start at 1");
            if (k1 > basis.max_modes())
                parse_fail(text, entry_pos, "mode index out of supported range");
            flat = k1;
        }
        skip_ws();
        if (pos >= text.size() || text[pos] != ':')
            parse_fail(text, pos, "expected ':' before coefficient");
        ++pos;
        skip_ws();
        double c;
        try {
            c = std::stod(text.substr(pos), &end);
        } catch (const std::exception&) {
            parse_fail(text, pos, "expected coefficient");
        }
        pos += end;
        coeffs.emplace_back(flat, c);
        skip_ws();
        if (pos < text.size()) {
            if (text[pos] != ',') parse_fail(text, pos, "expected ',' between entries");
            ++pos;
            skip_ws();
        }
    }
    return SpectralFunction(basis, std::move(coeffs));
}

} // namespace polyext
