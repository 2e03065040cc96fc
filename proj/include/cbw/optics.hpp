#pragma once

// Two-path optics: complex 2x2 transfer matrices and the elementary elements
// (beam splitter, phase plate) that every interferometer chain is built from.

#include <complex>
#include <utility>

namespace cbw {

using ComplexAmp = std::complex<double>;

/// Amplitudes on the two spatial paths of one interferometer stage.
struct FieldPair
{
    ComplexAmp upper{1.0, 0.0};
    ComplexAmp lower{0.0, 0.0};

    double norm2() const { return std::norm(upper) + std::norm(lower); }
};

/// Normalized intensity |E|^2 (input intensity I0 = 1).
struct Intensity
{
    double value = 0.0;
};

struct TransferMatrix
{
    ComplexAmp m00, m01, m10, m11;

    TransferMatrix dagger() const;
    ComplexAmp det() const { return m00 * m11 - m01 * m10; }

    friend TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b);
    friend TransferMatrix operator*(ComplexAmp c, const TransferMatrix& m);
};

TransferMatrix identity();
TransferMatrix pauli_x();
TransferMatrix pauli_z();

/// B = exp(i pi sigma_x / 4) = (1/sqrt2) [[1, i], [i, 1]].
TransferMatrix beam_splitter();

/// P(phi) = exp(i phi sigma_z / 2) = diag(e^{i phi/2}, e^{-i phi/2}).
/// Throws std::domain_error for non-finite phi.
TransferMatrix phase_plate(double phi);

TransferMatrix matmul(const TransferMatrix& a, const TransferMatrix& b);
FieldPair apply(const TransferMatrix& m, const FieldPair& v);

/// (|upper|^2, |lower|^2)
std::pair<Intensity, Intensity> intensities(const FieldPair& v);

/// Largest entrywise |(M M^dagger - I)|.
double unitarity_error(const TransferMatrix& m);

/// Largest entrywise |a - b|.
double max_abs_diff(const TransferMatrix& a, const TransferMatrix& b);

} // namespace cbw
