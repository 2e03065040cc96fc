#include "cbw/cascade.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace cbw {

namespace {

constexpr ComplexAmp kI{0.0, 1.0};

void require_finite(double phi, const char* what)
{
    if (!std::isfinite(phi))
        throw std::domain_error(std::string(what) + ": phase must be finite");
}

// Shared by the matrix and field-pair comparators.
template <std::size_t K>
bool same_up_to_phase(const std::array<ComplexAmp, K>& a, const std::array<ComplexAmp, K>& b,
                      double tol)
{
    if (!(tol > 0))
        throw std::domain_error("equal_up_to_global_phase: tol must be positive");
    std::size_t pivot = 0;
    for (std::size_t k = 1; k < K; ++k)
        if (std::abs(b[k]) > std::abs(b[pivot]))
            pivot = k;
    if (std::abs(b[pivot]) == 0.0)
        throw std::domain_error("equal_up_to_global_phase: reference is identically zero");
    const ComplexAmp ratio = a[pivot] / b[pivot];
    if (std::abs(ratio) == 0.0)
        return false;
    const ComplexAmp c = ratio / std::abs(ratio);
    for (std::size_t k = 0; k < K; ++k)
        if (std::abs(a[k] - c * b[k]) > tol)
            return false;
    return true;
}

} // namespace

void CascadeSpec::validate() const
{
    if (order < 1)
        throw std::domain_error("order: must be >= 1");
    if (!std::isfinite(dummy_phase))
        throw std::domain_error("dummy_phase: must be finite");
}

TransferMatrix unit_mzi(double phi)
{
    require_finite(phi, "unit_mzi");
    const ComplexAmp g = std::polar(1.0, phi / 2);
    const double c = std::cos(phi / 2);
    const double s = std::sin(phi / 2);
    return g * TransferMatrix{c, kI * s, kI * s, c};
}

TransferMatrix mzi_power(double phi, int n)
{
    if (n < 1)
        throw std::domain_error("mzi_power: n must be >= 1");
    require_finite(phi, "mzi_power");
    const double half = 0.5 * n * phi;
    const ComplexAmp g = std::polar(1.0, half);
    const double c = std::cos(half);
    const double s = std::sin(half);
    return g * TransferMatrix{c, kI * s, kI * s, c};
}

TransferMatrix stage_matrix(Polarity kind, double scan_phase)
{
    require_finite(scan_phase, "stage_matrix");
    const ComplexAmp e = std::polar(1.0, scan_phase);
    const ComplexAmp d = 0.5 * (1.0 - e);
    const ComplexAmp o = 0.5 * kI * (1.0 + e);
    if (kind == Polarity::plus)
        return {d, o, o, -d};
    return {-d, o, o, d};
}

TransferMatrix coupler_matrix(Polarity kind, double dummy_phase)
{
    require_finite(dummy_phase, "coupler_matrix");
    const ComplexAmp e = std::polar(1.0, dummy_phase);
    if (kind == Polarity::plus)
        return {1.0, 0.0, 0.0, e};
    return {e, 0.0, 0.0, 1.0};
}

TransferMatrix explicit_cascade(const CascadeSpec& spec, double scan_phase)
{
    spec.validate();
    // Only two distinct stages exist; build them once.
    const TransferMatrix plus =
        coupler_matrix(Polarity::plus, spec.dummy_phase) * stage_matrix(Polarity::plus, scan_phase);
    const TransferMatrix minus = coupler_matrix(Polarity::minus, spec.dummy_phase) *
                                 stage_matrix(Polarity::minus, scan_phase);
    TransferMatrix total = identity();
    for (int k = 1; k <= spec.order; ++k)
        total = (stage_polarity(k) == Polarity::plus ? plus : minus) * total;
    return total;
}

TransferMatrix closed_form(const CascadeSpec& spec, double scan_phase)
{
    spec.validate();
    if (spec.dummy_phase != 0.0)
        throw UnsupportedConfiguration("closed_form: only valid for dummy_phase = 0");
    require_finite(scan_phase, "closed_form");
    const double parity = spec.order % 2 == 0 ? 1.0 : -1.0;
    // Reduce N*phi before exponentiating so large orders keep full precision.
    const double arg = std::remainder(static_cast<double>(spec.order) * scan_phase, 2.0 * std::numbers::pi);
    const ComplexAmp se = parity * std::polar(1.0, arg);
    const ComplexAmp diag = 1.0 + se;
    const ComplexAmp off = 1.0 - se;
    return (0.5 * parity) * TransferMatrix{diag, -kI * off, kI * off, diag};
}

FieldPair cascade_output(const CascadeSpec& spec, double scan_phase)
{
    return apply(explicit_cascade(spec, scan_phase), spec.input);
}

bool equal_up_to_global_phase(const TransferMatrix& a, const TransferMatrix& b, double tol)
{
    return same_up_to_phase<4>({a.m00, a.m01, a.m10, a.m11}, {b.m00, b.m01, b.m10, b.m11}, tol);
}

bool equal_up_to_global_phase(const FieldPair& a, const FieldPair& b, double tol)
{
    return same_up_to_phase<2>({a.upper, a.lower}, {b.upper, b.lower}, tol);
}

} // namespace cbw
