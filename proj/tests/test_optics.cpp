#include "cbw/optics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cbw;

namespace {

constexpr ComplexAmp kI{0.0, 1.0};

// Truncated power series of exp(i theta sigma_x), independent of the
// closed-form constructor.
TransferMatrix exp_i_sigma_x_series(double theta)
{
    TransferMatrix term = identity();
    TransferMatrix sum = identity();
    const TransferMatrix gen = (kI * theta) * pauli_x();
    for (int k = 1; k < 40; ++k) {
        term = (1.0 / k) * (term * gen);
        sum = {sum.m00 + term.m00, sum.m01 + term.m01, sum.m10 + term.m10, sum.m11 + term.m11};
    }
    return sum;
}

TransferMatrix random_unitary(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    return phase_plate(u(rng)) * beam_splitter() * phase_plate(u(rng)) * beam_splitter() *
           phase_plate(u(rng));
}

} // namespace

TEST_CASE("beam splitter equals exp(i pi sigma_x / 4)")
{
    const TransferMatrix b = beam_splitter();
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(max_abs_diff(b, TransferMatrix{s, kI * s, kI * s, s}) < 1e-15);
    CHECK(max_abs_diff(b, exp_i_sigma_x_series(std::numbers::pi / 4)) < 1e-15);
    CHECK(unitarity_error(b) < 1e-15);
    CHECK(max_abs_diff(b * b, kI * pauli_x()) < 1e-15);
}

TEST_CASE("phase plate")
{
    CHECK(max_abs_diff(phase_plate(0.0), identity()) == 0.0);
    CHECK(max_abs_diff(phase_plate(std::numbers::pi), TransferMatrix{kI, 0.0, 0.0, -kI}) < 1e-15);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double a = u(rng), b = u(rng);
        CHECK(max_abs_diff(phase_plate(a) * phase_plate(b), phase_plate(a + b)) < 1e-12);
    }
    CHECK_THROWS_AS(phase_plate(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(phase_plate(INFINITY), std::domain_error);
}

TEST_CASE("matmul basics")
{
    const TransferMatrix m = beam_splitter() * phase_plate(0.3);
    CHECK(max_abs_diff(matmul(identity(), m), m) == 0.0);
    CHECK(max_abs_diff(matmul(pauli_x(), pauli_x()), identity()) == 0.0);
    CHECK(max_abs_diff(matmul(beam_splitter(), beam_splitter()), kI * pauli_x()) < 1e-15);
}

TEST_CASE("apply and intensities")
{
    const FieldPair e0{1.0, 0.0};
    const FieldPair x = apply(pauli_x(), e0);
    CHECK(x.upper == ComplexAmp{0.0, 0.0});
    CHECK(x.lower == ComplexAmp{1.0, 0.0});
    CHECK(apply(identity(), e0).upper == ComplexAmp{1.0, 0.0});

    const FieldPair split = apply(beam_splitter(), e0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(split.upper - ComplexAmp{s, 0.0}) < 1e-15);
    CHECK(std::abs(split.lower - ComplexAmp{0.0, s}) < 1e-15);
    const auto [ia, ib] = intensities(split);
    CHECK(ia.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ib.value == doctest::Approx(0.5).epsilon(1e-15));

    const auto [ua, ub] = intensities(e0);
    CHECK(ua.value == 1.0);
    CHECK(ub.value == 0.0);
}

TEST_CASE("property: unitarity, norm conservation, associativity")
{
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const TransferMatrix a = random_unitary(rng);
        const TransferMatrix b = random_unitary(rng);
        const TransferMatrix c = random_unitary(rng);
        CHECK(unitarity_error(a) < 1e-12);
        CHECK(max_abs_diff((a * b) * c, a * (b * c)) < 1e-12);

        const FieldPair v{{g(rng), g(rng)}, {g(rng), g(rng)}};
        const FieldPair w = apply(a, v);
        CHECK(std::abs(w.norm2() - v.norm2()) <= 1e-12 * v.norm2());
        const auto [ia, ib] = intensities(w);
        CHECK(std::isfinite(ia.value));
        CHECK(ia.value + ib.value == doctest::Approx(v.norm2()).epsilon(1e-12));
    }
}
