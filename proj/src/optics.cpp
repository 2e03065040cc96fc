#include "cbw/optics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbw {

namespace {
constexpr ComplexAmp kI{0.0, 1.0};
}

TransferMatrix TransferMatrix::dagger() const
{
    return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
}

TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b)
{
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

TransferMatrix operator*(ComplexAmp c, const TransferMatrix& m)
{
    return {c * m.m00, c * m.m01, c * m.m10, c * m.m11};
}

TransferMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
TransferMatrix pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
TransferMatrix pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

TransferMatrix beam_splitter()
{
    const double s = 1.0 / std::sqrt(2.0);
    return {s, kI * s, kI * s, s};
}

TransferMatrix phase_plate(double phi)
{
    if (!std::isfinite(phi))
        throw std::domain_error("phase_plate: phase must be finite");
    return {std::polar(1.0, phi / 2), 0.0, 0.0, std::polar(1.0, -phi / 2)};
}

TransferMatrix matmul(const TransferMatrix& a, const TransferMatrix& b) { return a * b; }

FieldPair apply(const TransferMatrix& m, const FieldPair& v)
{
    return {m.m00 * v.upper + m.m01 * v.lower, m.m10 * v.upper + m.m11 * v.lower};
}

std::pair<Intensity, Intensity> intensities(const FieldPair& v)
{
    return {Intensity{std::norm(v.upper)}, Intensity{std::norm(v.lower)}};
}

double max_abs_diff(const TransferMatrix& a, const TransferMatrix& b)
{
    return std::max({std::abs(a.m00 - b.m00), std::abs(a.m01 - b.m01),
                     std::abs(a.m10 - b.m10), std::abs(a.m11 - b.m11)});
}

double unitarity_error(const TransferMatrix& m)
{
    return max_abs_diff(m * m.dagger(), identity());
}

} // namespace cbw
