#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polyext/quadrature.hpp"
#include "polyext/special.hpp"
#include "polyext/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace polyext;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("make_frac_order constants")
{
    const auto ord = make_frac_order(1.5);
    CHECK(ord.b == 0.0);
    CHECK(ord.c_s == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
    CHECK(ord.d_s == doctest::Approx(2.0).epsilon(1e-14));

    const auto ord2 = make_frac_order(1.25);
    CHECK(ord2.b == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ord2.d_s ==
          doctest::Approx(std::sqrt(2.0) * special::gamma(0.75) / special::gamma(1.25))
              .epsilon(1e-14));

    // b -> 1^- as s -> 1^+
    CHECK(make_frac_order(1.0 + 1e-9).b == doctest::Approx(1.0).epsilon(1e-8));

    // mutual consistency of the pack
    for (double s : {1.1, 1.33, 1.5, 1.77, 1.9}) {
        const auto o = make_frac_order(s);
        CHECK(o.b == doctest::Approx(3.0 - 2.0 * s).epsilon(1e-14));
        CHECK(o.c_s == doctest::Approx(std::pow(2.0, 1.0 - s) / std::tgamma(s)).epsilon(1e-14));
        CHECK(o.d_s ==
              doctest::Approx(std::pow(2.0, o.b) * std::tgamma(2.0 - s) / std::tgamma(s))
                  .epsilon(1e-14));
    }
}

TEST_CASE("make_frac_order domain errors")
{
    CHECK_THROWS_AS(make_frac_order(1.0), std::domain_error);
    CHECK_THROWS_AS(make_frac_order(2.0), std::domain_error);
    CHECK_THROWS_AS(make_frac_order(0.5), std::domain_error);
}

TEST_CASE("interval eigenbasis")
{
    const auto basis = EigenBasis::interval();
    CHECK(basis.lambda(1) == doctest::Approx(kPi * kPi).epsilon(1e-15));
    CHECK(basis.eval(1, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // lambda nondecreasing
    for (std::size_t k = 1; k < 20; ++k) CHECK(basis.lambda(k + 1) > basis.lambda(k));
}

TEST_CASE("interval eigenbasis: orthonormality and eigenrelation samples")
{
    const auto basis = EigenBasis::interval();
    for (std::size_t j : {1, 2, 5})
        for (std::size_t k : {1, 3, 5}) {
            const double ip = quad::integrate_composite(
                [&](double x) { return basis.eval(j, x) * basis.eval(k, x); }, 0.0, 1.0,
                16, 10);
            CHECK(ip == doctest::Approx(j == k ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
        }
    // -phi'' = lambda phi by central differences
    const double h = 1e-5;
    for (std::size_t k : {1, 2, 4}) {
        const double x = 0.37;
        const double lap =
            -(basis.eval(k, x + h) - 2.0 * basis.eval(k, x) + basis.eval(k, x - h)) /
            (h * h);
        CHECK(lap == doctest::Approx(basis.lambda(k) * basis.eval(k, x)).epsilon(1e-5));
    }
}

TEST_CASE("square eigenbasis enumeration and tie-break")
{
    const auto basis = EigenBasis::square();
    CHECK(basis.square_mode(1) == std::array<std::size_t, 2>{1, 1});
    CHECK(basis.lambda(1) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    // (1,2) and (2,1) share 5 pi^2; lexicographic order puts (1,2) first
    CHECK(basis.square_mode(2) == std::array<std::size_t, 2>{1, 2});
    CHECK(basis.square_mode(3) == std::array<std::size_t, 2>{2, 1});
    CHECK(basis.lambda(2) == doctest::Approx(5.0 * kPi * kPi).epsilon(1e-14));
    CHECK(basis.lambda(3) == doctest::Approx(5.0 * kPi * kPi).epsilon(1e-14));
    for (std::size_t k = 1; k < 200; ++k) CHECK(basis.lambda(k + 1) >= basis.lambda(k));
    // orthonormality sample by tensor quadrature
    const double ip = quad::integrate_composite(
        [&](double x1) {
            return quad::integrate_composite(
                [&](double x2) { return basis.eval(2, x1, x2) * basis.eval(3, x1, x2); },
                0.0, 1.0, 8, 10);
        },
        0.0, 1.0, 8, 10);
    CHECK(ip == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("oracle_solve")
{
    const auto basis = EigenBasis::interval();
    const auto ord = make_frac_order(1.5);
    const SpectralFunction f(basis, {{1, 1.0}});
    const auto u = oracle_solve(f, ord);
    CHECK(u.coeffs().size() == 1);
    CHECK(u.coeffs()[0].second == doctest::Approx(std::pow(kPi, -3.0)).epsilon(1e-14));

    // zero data
    const SpectralFunction zero(basis, {});
    CHECK(oracle_solve(zero, ord).empty());

    // ratio law for two modes: U_2 / U_1 = (lambda_1 / lambda_2)^s = 4^{-s}
    for (double s : {1.2, 1.5, 1.8}) {
        const auto o = make_frac_order(s);
        const SpectralFunction f2(basis, {{1, 1.0}, {2, 1.0}});
        const auto u2 = oracle_solve(f2, o);
        CHECK(u2.coeffs()[1].second / u2.coeffs()[0].second ==
              doctest::Approx(std::pow(4.0, -s)).epsilon(1e-13));
    }
}

TEST_CASE("hs_norm examples")
{
    const auto basis = EigenBasis::interval();
    const SpectralFunction w(basis, {{1, 1.0}});
    CHECK(hs_norm(w, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hs_norm(w, 2.0) == doctest::Approx(kPi * kPi).epsilon(1e-14));
    CHECK(hs_norm(SpectralFunction(basis, {}), 1.3) == 0.0);
}

TEST_CASE("spectral isometry and oracle inversion on random expansions")
{
    const auto basis = EigenBasis::interval();
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> mode(1, 40);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::pair<std::size_t, double>> cs;
        for (std::size_t k = 1; k <= 40; ++k)
            if (mode(rng) < 8) cs.emplace_back(k, coef(rng));
        if (cs.empty()) cs.emplace_back(1, 1.0);
        const SpectralFunction w(basis, cs);
        const double s = 1.0 + 0.8 * std::generate_canonical<double, 53>(rng) + 0.1;
        CHECK(hs_norm(apply_power(w, s), -s) == doctest::Approx(hs_norm(w, s)).epsilon(1e-13));

        const auto ord = make_frac_order(s);
        const auto back = apply_power(oracle_solve(w, ord), ord.s);
        REQUIRE(back.coeffs().size() == w.coeffs().size());
        for (std::size_t i = 0; i < back.coeffs().size(); ++i)
            CHECK(back.coeffs()[i].second ==
                  doctest::Approx(w.coeffs()[i].second).epsilon(1e-14));
    }
}

TEST_CASE("spectral text form parsing")
{
    const auto basis = EigenBasis::interval();
    const auto f = parse_spectral("1:1, 3:-0.5", basis);
    REQUIRE(f.coeffs().size() == 2);
    CHECK(f.coeffs()[0] == std::pair<std::size_t, double>{1, 1.0});
    CHECK(f.coeffs()[1] == std::pair<std::size_t, double>{3, -0.5});

    CHECK(parse_spectral("", basis).empty());

    const auto sq = EigenBasis::square();
    const auto g = parse_spectral("1,2:1.5", sq);
    REQUIRE(g.coeffs().size() == 1);
    CHECK(g.coeffs()[0].first == 2); // flat index of mode (1,2)

    CHECK_THROWS_AS(parse_spectral("0:1", basis), std::invalid_argument);
    CHECK_THROWS_AS(parse_spectral("1:", basis), std::invalid_argument);
    CHECK_THROWS_AS(parse_spectral("x:1", basis), std::invalid_argument);
    CHECK_THROWS_AS(parse_spectral("1:1 2:1", basis), std::invalid_argument);
    CHECK_THROWS_AS(parse_spectral("1:1,1:2", basis), std::invalid_argument);
}
