#include "cbw/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cbw {

namespace {

void require_order(int order)
{
    if (order < 1)
        throw std::domain_error("order: must be >= 1");
}

double parity_sign(int order) { return order % 2 == 0 ? 1.0 : -1.0; }

} // namespace

const char* to_string(Port p) { return p == Port::A ? "A" : "B"; }

double fringe_intensity(int order, Port port, double phi)
{
    require_order(order);
    const double term = parity_sign(order) * std::cos(order * phi);
    return port == Port::A ? 0.5 * (1.0 + term) : 0.5 * (1.0 - term);
}

double coincidence_product(int order, double phi)
{
    require_order(order);
    const double s = std::sin(order * phi);
    return 0.25 * s * s;
}

PhaseBasis phase_basis(int order)
{
    require_order(order);
    PhaseBasis basis{order, {}};
    basis.nodes.reserve(order + 1);
    for (int m = 0; m <= order; ++m)
        basis.nodes.push_back(m * std::numbers::pi / order);
    return basis;
}

Port parity_port(int order)
{
    require_order(order);
    return order % 2 == 0 ? Port::A : Port::B;
}

double normal_mode_frequency(const NormalModeSpec& spec)
{
    if (!(spec.mass > 0))
        throw std::domain_error("mass: must be > 0");
    if (!(spec.spring_constant > 0))
        throw std::domain_error("spring_constant: must be > 0");
    if (spec.chain_size < 1)
        throw std::domain_error("chain_size: must be >= 1");
    if (spec.mode_index < 1 || spec.mode_index > spec.chain_size)
        throw std::domain_error("mode_index: must be in 1..chain_size");
    const double arg = spec.mode_index * std::numbers::pi / (2.0 * (spec.chain_size + 1));
    return 2.0 * std::sqrt(spec.spring_constant / spec.mass) * std::sin(arg);
}

FringeSamples evaluate_fringes(int order, std::span<const double> phases)
{
    require_order(order);
    const auto n = static_cast<std::ptrdiff_t>(phases.size());
    FringeSamples out{std::vector<double>(phases.size()), std::vector<double>(phases.size()),
                      std::vector<double>(phases.size())};
    const double sign = parity_sign(order);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double term = sign * std::cos(order * phases[i]);
        const double a = 0.5 * (1.0 + term);
        const double b = 0.5 * (1.0 - term);
        out.intensity_a[i] = a;
        out.intensity_b[i] = b;
        out.product[i] = a * b;
    }
    return out;
}

namespace serial {

FringeSamples evaluate_fringes(int order, std::span<const double> phases)
{
    FringeSamples out;
    out.intensity_a.reserve(phases.size());
    out.intensity_b.reserve(phases.size());
    out.product.reserve(phases.size());
    for (double phi : phases) {
        const double a = fringe_intensity(order, Port::A, phi);
        const double b = fringe_intensity(order, Port::B, phi);
        out.intensity_a.push_back(a);
        out.intensity_b.push_back(b);
        out.product.push_back(a * b);
    }
    return out;
}

} // namespace serial

} // namespace cbw
