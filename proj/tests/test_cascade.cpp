#include "cbw/analytic.hpp"
#include "cbw/cascade.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cbw;

namespace {

constexpr ComplexAmp kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

CascadeSpec chain(int n, double psi = 0.0)
{
    CascadeSpec s;
    s.order = n;
    s.dummy_phase = psi;
    return s;
}

// Stage template written out element by element, independent of stage_matrix.
TransferMatrix template_stage(bool plus, double phi)
{
    const ComplexAmp e = std::exp(kI * phi);
    const ComplexAmp d = 1.0 - e, o = kI * (1.0 + e);
    return plus ? TransferMatrix{0.5 * d, 0.5 * o, 0.5 * o, -0.5 * d}
                : TransferMatrix{-0.5 * d, 0.5 * o, 0.5 * o, 0.5 * d};
}

// The two constructions use different phase references for the vacuum input
// port and for output B: sigma_z on the input (odd N) or on both sides (even N).
TransferMatrix closed_form_convention(const TransferMatrix& ex, int n)
{
    return n % 2 == 1 ? ex * pauli_z() : pauli_z() * ex * pauli_z();
}

} // namespace

TEST_CASE("unit MZI")
{
    CHECK(max_abs_diff(unit_mzi(0.0), identity()) < 1e-15);
    CHECK(max_abs_diff(unit_mzi(kPi), TransferMatrix{0.0, -1.0, -1.0, 0.0}) < 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int k = 0; k < 100; ++k) {
        const TransferMatrix m = unit_mzi(u(rng));
        CHECK(std::abs(std::abs(m.det()) - 1.0) < 1e-12);
        CHECK(unitarity_error(m) < 1e-12);
    }
    CHECK_THROWS_AS(unit_mzi(NAN), std::domain_error);
}

TEST_CASE("B P(phi) B is a different convention from the displayed unit MZI")
{
    // |entries|^2 of B P B are port-swapped relative to unit_mzi: documented
    // so nobody "fixes" unit_mzi to the product form.
    const double phi = 0.9;
    const TransferMatrix bpb = beam_splitter() * phase_plate(phi) * beam_splitter();
    const TransferMatrix u = unit_mzi(phi);
    CHECK(std::norm(bpb.m00) == doctest::Approx(std::norm(u.m01)));
    CHECK_FALSE(equal_up_to_global_phase(bpb, u, 1e-6));
}

TEST_CASE("mzi_power")
{
    CHECK(max_abs_diff(mzi_power(0.4, 1), unit_mzi(0.4)) < 1e-15);
    CHECK(max_abs_diff(mzi_power(kPi / 2, 2), TransferMatrix{0.0, -1.0, -1.0, 0.0}) < 1e-15);

    // Second and third powers written out, plus brute-force repeated products.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int k = 0; k < 100; ++k) {
        const double phi = u(rng);
        const TransferMatrix eq2 =
            std::exp(kI * phi) * TransferMatrix{std::cos(phi), kI * std::sin(phi),
                                                kI * std::sin(phi), std::cos(phi)};
        CHECK(max_abs_diff(mzi_power(phi, 2), eq2) < 1e-12);
        const double h = 1.5 * phi;
        const TransferMatrix eq3 = std::exp(kI * h) * TransferMatrix{std::cos(h), kI * std::sin(h),
                                                                     kI * std::sin(h), std::cos(h)};
        CHECK(max_abs_diff(mzi_power(phi, 3), eq3) < 1e-12);
        const TransferMatrix u1 = unit_mzi(phi);
        CHECK(max_abs_diff(mzi_power(phi, 3), u1 * u1 * u1) < 1e-12);
        TransferMatrix brute = identity();
        for (int n = 1; n <= 10; ++n) {
            brute = brute * u1;
            CHECK(max_abs_diff(mzi_power(phi, n), brute) < 1e-12);
        }
    }
    CHECK_THROWS_AS(mzi_power(0.1, 0), std::domain_error);
}

TEST_CASE("stage matrices")
{
    CHECK(max_abs_diff(stage_matrix(Polarity::plus, 0.0), TransferMatrix{0.0, kI, kI, 0.0}) < 1e-15);
    CHECK(max_abs_diff(stage_matrix(Polarity::minus, kPi), TransferMatrix{-1.0, 0.0, 0.0, 1.0}) <
          1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double phi = u(rng);
        CHECK(unitarity_error(stage_matrix(Polarity::plus, phi)) < 1e-12);
        CHECK(unitarity_error(stage_matrix(Polarity::minus, phi)) < 1e-12);
    }
    CHECK(stage_polarity(1) == Polarity::plus);
    CHECK(stage_polarity(2) == Polarity::minus);
    CHECK(stage_polarity(3) == Polarity::plus);
    CHECK(max_abs_diff(coupler_matrix(Polarity::plus, 0.0), identity()) == 0.0);
    CHECK(max_abs_diff(coupler_matrix(Polarity::minus, 0.0), identity()) == 0.0);
}

TEST_CASE("explicit cascade reproduces the first three orders")
{
    const double phis[] = {0.0, 0.3, 1.1, kPi / 2, kPi / 3, 2.5, -0.7};
    for (double phi : phis) {
        const FieldPair o1 = cascade_output(chain(1), phi);
        CHECK(std::norm(o1.upper) == doctest::Approx((1 - std::cos(phi)) / 2).epsilon(1e-12));
        CHECK(std::norm(o1.lower) == doctest::Approx((1 + std::cos(phi)) / 2).epsilon(1e-12));

        const FieldPair o2 = cascade_output(chain(2), phi);
        CHECK(std::abs(std::norm(o2.upper) - (1 + std::cos(2 * phi)) / 2) < 1e-12);
        CHECK(std::abs(std::norm(o2.lower) - (1 - std::cos(2 * phi)) / 2) < 1e-12);

        const FieldPair o3 = cascade_output(chain(3), phi);
        CHECK(std::abs(std::norm(o3.upper) - (1 - std::cos(3 * phi)) / 2) < 1e-12);
        CHECK(std::abs(std::norm(o3.lower) - (1 + std::cos(3 * phi)) / 2) < 1e-12);

        const TransferMatrix brute = template_stage(true, phi) * template_stage(false, phi) *
                                     template_stage(true, phi);
        CHECK(max_abs_diff(explicit_cascade(chain(3), phi), brute) < 1e-14);
    }
    CHECK(std::norm(cascade_output(chain(2), kPi / 2).upper) < 1e-24);
    CHECK(std::norm(cascade_output(chain(2), kPi / 2).lower) == doctest::Approx(1.0));
    CHECK(std::norm(cascade_output(chain(3), kPi / 3).upper) == doctest::Approx(1.0));
}

TEST_CASE("closed form")
{
    CHECK(max_abs_diff(closed_form(chain(1), 0.0), TransferMatrix{0.0, kI, -kI, 0.0}) < 1e-15);
    CHECK(max_abs_diff(closed_form(chain(2), 0.0), identity()) < 1e-15);
    CHECK_THROWS_AS(closed_form(chain(2, 0.1), 0.3), UnsupportedConfiguration);
    CHECK_THROWS_AS(closed_form(chain(0), 0.3), std::domain_error);

    for (int n = 1; n <= 10; ++n)
        for (double phi = -3.0; phi < 3.0; phi += 0.173) {
            const FieldPair out = apply(closed_form(chain(n), phi), FieldPair{});
            CHECK(std::abs(std::norm(out.upper) - fringe_intensity(n, Port::A, phi)) < 1e-12);
            CHECK(std::abs(std::norm(out.lower) - fringe_intensity(n, Port::B, phi)) < 1e-12);
            CHECK(unitarity_error(closed_form(chain(n), phi)) < 1e-12);
        }
}

TEST_CASE("equal_up_to_global_phase")
{
    const TransferMatrix m = unit_mzi(0.8) * beam_splitter();
    CHECK(equal_up_to_global_phase(m, -1.0 * m, 1e-12));
    CHECK(equal_up_to_global_phase(m, std::exp(kI * 0.7) * m, 1e-12));
    CHECK_FALSE(equal_up_to_global_phase(beam_splitter(), pauli_x(), 1e-6));
    CHECK_FALSE(equal_up_to_global_phase(m, 2.0 * m, 1e-6));
    CHECK_THROWS_AS(equal_up_to_global_phase(m, TransferMatrix{0.0, 0.0, 0.0, 0.0}, 1e-6),
                    std::domain_error);
    CHECK_THROWS_AS(equal_up_to_global_phase(m, m, 0.0), std::domain_error);
}

TEST_CASE("property: explicit cascade, closed form and power law agree")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int n = 1; n <= 10; ++n) {
        for (int k = 0; k < 1000; ++k) {
            const double phi = u(rng);
            const TransferMatrix ex = explicit_cascade(chain(n), phi);
            const TransferMatrix cf = closed_form(chain(n), phi);
            const FieldPair out_ex = apply(ex, FieldPair{});
            const FieldPair out_cf = apply(cf, FieldPair{});
            REQUIRE(equal_up_to_global_phase(closed_form_convention(ex, n), cf, 1e-10));
            if (n % 2 == 1)
                REQUIRE(equal_up_to_global_phase(out_ex, out_cf, 1e-10));
            REQUIRE(std::abs(std::norm(out_ex.upper) - std::norm(out_cf.upper)) < 1e-12);
            REQUIRE(std::abs(std::norm(out_ex.lower) - std::norm(out_cf.lower)) < 1e-12);
            REQUIRE(unitarity_error(ex) < 1e-12);

            // Power law: the unit-MZI power's bright-at-zero upper port is the
            // parity port of the chain.
            const FieldPair pw = apply(mzi_power(phi, n), FieldPair{});
            const double bright = parity_port(n) == Port::A ? std::norm(out_cf.upper)
                                                             : std::norm(out_cf.lower);
            REQUIRE(std::abs(std::norm(pw.upper) - bright) < 1e-12);

            // Period property.
            REQUIRE(std::abs(fringe_intensity(n, Port::A, phi + 2 * kPi / n) -
                             std::norm(out_cf.upper)) < 1e-12);
        }
    }
}

TEST_CASE("full matrices differ beyond the input column")
{
    // The closed form's second column is not the explicit product's; only the
    // column driven by the lit input port is physical here.
    for (int n = 1; n <= 4; ++n)
        CHECK_FALSE(equal_up_to_global_phase(explicit_cascade(chain(n), 0.37),
                                             closed_form(chain(n), 0.37), 1e-6));
    // Even N: output B carries the opposite sign even for the lit column.
    CHECK_FALSE(equal_up_to_global_phase(cascade_output(chain(2), 0.37),
                                         apply(closed_form(chain(2), 0.37), FieldPair{}), 1e-6));
    // For odd N the literal power law swaps ports.
    const FieldPair pw = apply(mzi_power(0.37, 3), FieldPair{});
    const FieldPair cf = apply(closed_form(chain(3), 0.37), FieldPair{});
    CHECK(std::abs(std::norm(pw.upper) - std::norm(cf.upper)) > 0.1);
}

TEST_CASE("nonzero dummy phase stays unitary")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int k = 0; k < 200; ++k) {
        const CascadeSpec s = chain(1 + k % 7, u(rng));
        CHECK(unitarity_error(explicit_cascade(s, u(rng))) < 1e-12);
    }
    CHECK(max_abs_diff(explicit_cascade(chain(4, 0.0), 0.2),
                       explicit_cascade(chain(4, 1e-300), 0.2)) < 1e-15);
}

TEST_CASE("large orders")
{
    const double phi = 0.0123;
    const FieldPair out = apply(closed_form(chain(1000), phi), FieldPair{});
    CHECK(std::abs(std::norm(out.upper) - fringe_intensity(1000, Port::A, phi)) < 1e-12);
    const FieldPair ex = cascade_output(chain(1000), phi);
    CHECK(std::abs(std::norm(ex.upper) - std::norm(out.upper)) < 1e-10);
}
