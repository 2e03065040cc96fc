#pragma once

// Fringe estimators: cosine-model fit, visibility with per-period standard
// error, FFT period estimate, extrema, and the photon-loss comparison.

#include "cbw/montecarlo.hpp"
#include "cbw/trace.hpp"

#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace cbw {

class EstimationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// y = offset + amplitude * cos(N phi + phase0), amplitude >= 0.
struct FringeFit
{
    double offset = 0.0;
    double amplitude = 0.0;
    double phase0 = 0.0;
    double residual = 0.0; ///< RMS of y - model
};

/// Least-squares cosine fit at the hinted order. Intensity traces use
/// ordinary least squares; count traces use Poisson-weighted least squares
/// (iteratively reweighted by the model). Requires >= 2 periods and
/// >= 8 samples per period.
FringeFit fit_fringe(const ScanTrace& trace, int order_hint);

enum class VisibilityMethod { fit, extrema };

const char* to_string(VisibilityMethod m);

struct VisibilityReport
{
    double visibility_percent = 0.0;
    double uncertainty_percent = 0.0; ///< standard error over unclamped per-period estimates
    int n_periods_used = 0;
    VisibilityMethod method = VisibilityMethod::fit;
    bool clamped = false; ///< raw estimate exceeded 100 and was clamped
};

VisibilityReport visibility(const ScanTrace& trace, int order_hint,
                            VisibilityMethod method = VisibilityMethod::fit);

struct PeriodReport
{
    double fundamental_period = 0.0; ///< radians
    double order_estimate = 0.0;     ///< reference_period / fundamental_period
};

/// Dominant nonzero spectral component of a uniformly sampled trace
/// (Hann window, zero padding, quadratic peak interpolation on log magnitude).
PeriodReport estimate_period(const ScanTrace& trace,
                             double reference_period = 2.0 * std::numbers::pi);

/// Extrema of the fitted cosine model within the sampled span. Needs only
/// half a period of data.
std::vector<double> locate_extrema(const ScanTrace& trace, int order_hint);

struct MonteCarloSettings
{
    SourceConfig source{};
    DetectorConfig detector_a{};
    DetectorConfig detector_b{};
    ScanConfig scan{};
    std::size_t bins = 500;
};

struct LossStudyRow
{
    double transmission = 1.0;
    VisibilityReport visibility_a;
    VisibilityReport visibility_b;
    double mean_count_rate = 0.0;     ///< (clicks A + clicks B) per window
    double expected_count_rate = 0.0; ///< Poisson-thinning prediction
};

struct LossStudy
{
    std::vector<LossStudyRow> rows;
    double visibility_spread_pp = 0.0; ///< max - min port-A visibility across rows
};

LossStudy loss_invariance_study(const CascadeSpec& cascade, std::span<const double> transmissions,
                                const MonteCarloSettings& settings);

} // namespace cbw
