#include "fixtures.hpp"

#include <doctest.h>

using namespace cfaging;

TEST_CASE("bessel_j0 at reference points")
{
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(std::abs(bessel_j0(2.404826)) <= 1e-5);
    CHECK(bessel_j0(1.0) == doctest::Approx(fixtures::j0_series(1.0)).epsilon(1e-12));
    CHECK(bessel_j0(1.0) == doctest::Approx(0.765198).epsilon(1e-6));
    CHECK(std::abs(bessel_j0(2.404825557695772768)) < 1e-15);
}

TEST_CASE("bessel_j0 matches the series on [0, 8]")
{
    double worst = 0.0;
    for (int i = 0; i <= 8000; ++i) {
        const double x = i * 1e-3;
        worst = std::max(worst, std::abs(bessel_j0(x) - fixtures::j0_series(x)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("bessel_j0 large arguments")
{
    // High-precision reference values.
    const std::pair<double, double> ref[] = {{10.0, -0.2459357644513483352},
                                             {12.0, 0.047689310796833536624},
                                             {20.0, 0.16702466434058315473},
                                             {100.0, 0.019985850304223122424},
                                             {500.0, -0.034100556880731998265},
                                             {1000.0, 0.024786686152420174561}};
    for (auto [x, v] : ref) CHECK(std::abs(bessel_j0(x) - v) < 1e-13);
}

TEST_CASE("bessel_j0 is even and rejects non-finite input")
{
    CHECK(bessel_j0(-3.7) == bessel_j0(3.7));
    CHECK_THROWS_AS(bessel_j0(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(bessel_j0(INFINITY), std::domain_error);
}

TEST_CASE("complex gaussian statistics")
{
    RngStream rng(42, 3);
    const CVector x = sample_complex_gaussian(rng, 100000);
    const double var = x.squaredNorm() / static_cast<double>(x.size());
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(x.real().mean()) <= 0.01);
    CHECK(std::abs(x.imag().mean()) <= 0.01);
    CHECK(x.real().squaredNorm() / x.size() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("complex gaussian determinism")
{
    RngStream a(9, 77), b(9, 77), c(9, 78);
    const CVector xa = sample_complex_gaussian(a, 64);
    CHECK(xa == sample_complex_gaussian(b, 64));
    CHECK(xa != sample_complex_gaussian(c, 64));
    RngStream d(9, 77);
    CHECK_THROWS_AS(sample_complex_gaussian(d, 0), std::invalid_argument);
}

TEST_CASE("solve_hermitian small systems")
{
    const CVector b = CVector::Random(4);
    CHECK((solve_hermitian(CMatrix::Identity(4, 4), b) - b).norm() == 0.0);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    CVector rhs(2);
    rhs << 2.0, 8.0;
    const CVector x = solve_hermitian(d, rhs);
    CHECK(std::abs(x(0) - 1.0) < 1e-15);
    CHECK(std::abs(x(1) - 2.0) < 1e-15);
}

TEST_CASE("solve_hermitian random positive definite instances")
{
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        RngStream rng(1234, static_cast<std::uint64_t>(i));
        CMatrix g(16, 16);
        fill_complex_gaussian(rng, g);
        const CMatrix a = g * g.adjoint() + CMatrix::Identity(16, 16);
        const CVector b = sample_complex_gaussian(rng, 16);
        const CVector x = solve_hermitian(a, b);
        worst = std::max(worst, (a * x - b).norm() / b.norm());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("solve_hermitian rejects indefinite input")
{
    CMatrix a = CMatrix::Identity(3, 3);
    a(2, 2) = -1.0;
    CHECK_THROWS_AS(solve_hermitian(a, CVector::Ones(3)), NumericalError);
}

TEST_CASE("solve_general")
{
    RMatrix a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    RVector b(2);
    b << 5.0, 11.0;
    const RVector x = solve_general(a, b);
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(2.0));
    RMatrix s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    CHECK_THROWS_AS(solve_general(s, b), NumericalError);
}

TEST_CASE("decibel helpers and complement")
{
    CHECK(to_db(100.0) == doctest::Approx(20.0));
    CHECK(from_db(to_db(3.7)) == doctest::Approx(3.7));
    CHECK(complement(0.6) == doctest::Approx(0.8));
    CHECK(complement(1.0 + 1e-15) == 0.0);
}
