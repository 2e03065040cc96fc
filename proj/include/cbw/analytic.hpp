#pragma once

// Closed-form observables of the Nth-order chain.

#include <span>
#include <vector>

namespace cbw {

enum class Port { A, B };

const char* to_string(Port p);

/// I_A = (1 + (-1)^N cos(N phi)) / 2, I_B = 1 - I_A.
double fringe_intensity(int order, Port port, double phi);

/// I_A * I_B = sin^2(N phi) / 4.
double coincidence_product(int order, double phi);

struct PhaseBasis
{
    int order = 1;
    std::vector<double> nodes; ///< m pi / N for m = 0..N
};

PhaseBasis phase_basis(int order);

/// Port that is fully bright at phi = 0: A for even N, B for odd N.
Port parity_port(int order);

struct NormalModeSpec
{
    double mass = 1.0;
    double spring_constant = 1.0;
    int chain_size = 1;
    int mode_index = 1;
};

/// omega_p = 2 sqrt(k/m) sin(p pi / (2 (N + 1))) for a uniform spring-mass chain.
double normal_mode_frequency(const NormalModeSpec& spec);

/// Port A, port B and coincidence curves on a phase grid.
struct FringeSamples
{
    std::vector<double> intensity_a;
    std::vector<double> intensity_b;
    std::vector<double> product;
};

/// OpenMP-parallel grid evaluation.
FringeSamples evaluate_fringes(int order, std::span<const double> phases);

namespace serial {
FringeSamples evaluate_fringes(int order, std::span<const double> phases);
}

} // namespace cbw
