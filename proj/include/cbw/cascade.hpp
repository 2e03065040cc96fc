#pragma once

// Asymmetrically coupled chain of N phase-scanned MZIs.
//
// Two constructions are provided: the explicit stage-by-stage product of
// alternating-polarity stage matrices, and the closed-form Nth-order matrix.
// Inside the stage templates the exponential argument is the scanned phase;
// the dummy phase only enters through the diagonal coupler matrices, which
// are the identity at the default dummy_phase = 0.

#include "cbw/optics.hpp"

#include <stdexcept>

namespace cbw {

/// Raised for configurations a construction does not support.
class UnsupportedConfiguration : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

struct CascadeSpec
{
    int order = 1;            ///< number of phase-scanned MZI building blocks
    double dummy_phase = 0.0; ///< radians; nonzero values are experimental
    FieldPair input{};        ///< defaults to [1, 0]: one port lit, other vacuum

    void validate() const;
};

enum class Polarity { plus, minus };

/// Polarity of 1-based stage k: odd stages plus, even stages minus.
constexpr Polarity stage_polarity(int k) { return k % 2 == 1 ? Polarity::plus : Polarity::minus; }

/// exp(i phi/2) [[cos(phi/2), i sin(phi/2)], [i sin(phi/2), cos(phi/2)]]
TransferMatrix unit_mzi(double phi);

/// unit_mzi(phi)^n, evaluated in closed form as exp(i n phi/2) exp(i (n phi/2) sigma_x).
TransferMatrix mzi_power(double phi, int n);

/// [M+] or [M-] with the exponential argument set to scan_phase.
TransferMatrix stage_matrix(Polarity kind, double scan_phase);

/// [phi+] = diag(1, e^{i psi}), [phi-] = diag(e^{i psi}, 1).
TransferMatrix coupler_matrix(Polarity kind, double dummy_phase);

/// Product of spec.order stages, stage 1 applied first, each stage being
/// coupler_matrix(k) * stage_matrix(k).
TransferMatrix explicit_cascade(const CascadeSpec& spec, double scan_phase);

/// (-1)^N (1/2) [[1 + s e, -i(1 - s e)], [i(1 - s e), 1 + s e]], s = (-1)^N,
/// e = exp(i N phi). Only defined for dummy_phase == 0.
TransferMatrix closed_form(const CascadeSpec& spec, double scan_phase);

/// Output field of the chain for spec.input.
FieldPair cascade_output(const CascadeSpec& spec, double scan_phase);

/// True iff a = c b entrywise within tol for a unit complex c, where c is
/// taken from the largest-magnitude entry of b.
bool equal_up_to_global_phase(const TransferMatrix& a, const TransferMatrix& b, double tol);
bool equal_up_to_global_phase(const FieldPair& a, const FieldPair& b, double tol);

} // namespace cbw
