#include "cbw/analysis.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace cbw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinSamplesPerPeriod = 8;

// The FFTW planner is not reentrant.
std::mutex fftw_planner_mutex;

double mean_spacing(const ScanTrace& t)
{
    return (t.phase.back() - t.phase.front()) / static_cast<double>(t.size() - 1);
}

/// Phase range represented by the samples, each sample owning one spacing.
double coverage(const ScanTrace& t) { return mean_spacing(t) * static_cast<double>(t.size()); }

void check_fit_preconditions(const ScanTrace& t, int order, double min_periods)
{
    if (order < 1)
        throw EstimationError("order hint must be >= 1");
    if (t.size() < 4)
        throw EstimationError("trace has fewer than 4 samples");
    t.validate();
    const double periods = coverage(t) * order / kTwoPi;
    if (periods < min_periods * (1.0 - 1e-9))
        throw EstimationError("trace spans " + std::to_string(periods) + " periods; need " +
                              std::to_string(min_periods));
    const double per_period = static_cast<double>(t.size()) / periods;
    if (per_period < kMinSamplesPerPeriod)
        throw EstimationError("trace has " + std::to_string(per_period) +
                              " samples per period; need " +
                              std::to_string(kMinSamplesPerPeriod));
}

FringeFit solve_fit(std::span<const double> phase, std::span<const double> value, int order,
                    bool poisson_weighted)
{
    const auto n = static_cast<Eigen::Index>(phase.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(order * phase[i]);
        design(i, 2) = std::sin(order * phase[i]);
        y(i) = value[i];
    }
    Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);

    if (poisson_weighted && coef(0) > 0.0) {
        // Weights 1/model with a floor so empty bins at the fringe minima
        // do not dominate.
        for (int iter = 0; iter < 50; ++iter) {
            const Eigen::VectorXd model = design * coef;
            const double floor = 1e-3 * std::max(coef(0), 1e-300);
            const Eigen::VectorXd w = model.cwiseMax(floor).cwiseInverse().cwiseSqrt();
            const Eigen::Vector3d next =
                (w.asDiagonal() * design).colPivHouseholderQr().solve(w.asDiagonal() * y);
            const double change = (next - coef).norm();
            coef = next;
            if (change <= 1e-13 * coef.norm())
                break;
        }
    }

    FringeFit fit;
    fit.offset = coef(0);
    fit.amplitude = std::hypot(coef(1), coef(2));
    fit.phase0 = std::atan2(-coef(2), coef(1));
    fit.residual = std::sqrt((y - design * coef).squaredNorm() / static_cast<double>(n));
    return fit;
}

FringeFit fit_with(const ScanTrace& t, int order, double min_periods)
{
    check_fit_preconditions(t, order, min_periods);
    return solve_fit(t.phase, t.value, order, t.kind != TraceKind::intensity);
}

struct Segment
{
    std::size_t first;
    std::size_t last; // exclusive
};

/// Whole periods of the trace, counted from the first sample's lower edge.
std::vector<Segment> period_segments(const ScanTrace& t, int order)
{
    const double period = kTwoPi / order;
    const double edge = t.phase.front() - 0.5 * mean_spacing(t);
    const auto whole = static_cast<std::size_t>(std::floor(coverage(t) / period + 1e-9));
    std::vector<Segment> segs;
    std::size_t i = 0;
    for (std::size_t k = 0; k < whole; ++k) {
        const double hi = edge + static_cast<double>(k + 1) * period;
        const std::size_t first = i;
        while (i < t.size() && t.phase[i] < hi)
            ++i;
        segs.push_back({first, i});
    }
    return segs;
}

double fit_visibility(const FringeFit& f)
{
    if (!(f.offset > 0.0))
        throw EstimationError("degenerate trace: fitted offset <= 0");
    return 100.0 * f.amplitude / f.offset;
}

double extrema_visibility(std::span<const double> v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (!(*hi + *lo > 0.0))
        throw EstimationError("degenerate trace: max + min <= 0");
    return 100.0 * (*hi - *lo) / (*hi + *lo);
}

} // namespace

const char* to_string(VisibilityMethod m) { return m == VisibilityMethod::fit ? "fit" : "extrema"; }

FringeFit fit_fringe(const ScanTrace& trace, int order_hint)
{
    return fit_with(trace, order_hint, 2.0);
}

VisibilityReport visibility(const ScanTrace& trace, int order_hint, VisibilityMethod method)
{
    const FringeFit global = fit_fringe(trace, order_hint);
    const std::vector<Segment> segs = period_segments(trace, order_hint);
    const bool weighted = trace.kind != TraceKind::intensity;

    std::vector<double> per_period;
    per_period.reserve(segs.size());
    for (const Segment& s : segs) {
        const std::size_t len = s.last - s.first;
        if (len < static_cast<std::size_t>(kMinSamplesPerPeriod))
            throw EstimationError("period segment with too few samples");
        std::span<const double> ph(trace.phase.data() + s.first, len);
        std::span<const double> val(trace.value.data() + s.first, len);
        const double v = method == VisibilityMethod::fit
                             ? fit_visibility(solve_fit(ph, val, order_hint, weighted))
                             : extrema_visibility(val);
        per_period.push_back(v);
    }

    VisibilityReport report;
    report.method = method;
    report.n_periods_used = static_cast<int>(per_period.size());
    double raw = 0.0;
    if (method == VisibilityMethod::fit) {
        raw = fit_visibility(global);
    } else {
        raw = std::accumulate(per_period.begin(), per_period.end(), 0.0) /
              static_cast<double>(per_period.size());
    }
    report.clamped = raw > 100.0;
    report.visibility_percent = std::clamp(raw, 0.0, 100.0);

    const double k = static_cast<double>(per_period.size());
    const double mean = std::accumulate(per_period.begin(), per_period.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : per_period)
        ss += (v - mean) * (v - mean);
    report.uncertainty_percent = per_period.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    return report;
}

PeriodReport estimate_period(const ScanTrace& trace, double reference_period)
{
    if (trace.size() < 8)
        throw EstimationError("trace has fewer than 8 samples");
    trace.validate();
    if (!(reference_period > 0.0))
        throw EstimationError("reference period must be > 0");

    const std::size_t n = trace.size();
    const double dphi = mean_spacing(trace);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((trace.phase[i] - trace.phase[i - 1]) - dphi) > 1e-6 * dphi)
            throw EstimationError("phase sampling is not uniform");

    const double mean = std::accumulate(trace.value.begin(), trace.value.end(), 0.0) / n;
    double var = 0.0;
    for (double v : trace.value)
        var += (v - mean) * (v - mean);
    const double rms = std::sqrt(var / n);
    if (rms <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw EstimationError("flat trace: no nonzero-frequency component");

    constexpr std::size_t kPad = 16;
    std::size_t m = 1;
    while (m < n)
        m <<= 1;
    m *= kPad;

    std::vector<double> in(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(kTwoPi * (i + 0.5) / n);
        in[i] = (trace.value[i] - mean) * hann;
    }
    const std::size_t bins = m / 2 + 1;
    std::vector<std::complex<double>> out(bins);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }

    // Skip everything below one cycle per record.
    const std::size_t k_min = std::max<std::size_t>(2, (m + n - 1) / n);
    std::vector<double> power(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k)
        power[k] = std::norm(out[k]);
    if (k_min + 2 >= bins)
        throw EstimationError("trace too short for spectral analysis");
    std::size_t peak = k_min;
    for (std::size_t k = k_min; k + 1 < bins; ++k)
        if (power[k] > power[peak])
            peak = k;

    std::vector<double> band(power.begin() + static_cast<std::ptrdiff_t>(k_min), power.end());
    std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
    const double median = band[band.size() / 2];
    if (!(power[peak] > 50.0 * median))
        throw EstimationError("no significant spectral peak");

    double delta = 0.0;
    if (peak > k_min) {
        const double l = std::log(power[peak - 1]);
        const double c = std::log(power[peak]);
        const double r = std::log(power[peak + 1]);
        const double denom = l - 2.0 * c + r;
        if (denom < 0.0)
            delta = 0.5 * (l - r) / denom;
    }
    const double cycles_per_sample = (static_cast<double>(peak) + delta) / static_cast<double>(m);
    PeriodReport report;
    report.fundamental_period = dphi / cycles_per_sample;
    if (coverage(trace) < 2.0 * report.fundamental_period * (1.0 - 2e-2))
        throw EstimationError("trace spans fewer than 2 fundamental periods");
    report.order_estimate = reference_period / report.fundamental_period;
    return report;
}

std::vector<double> locate_extrema(const ScanTrace& trace, int order_hint)
{
    const FringeFit fit = fit_with(trace, order_hint, 0.5);
    if (!(fit.amplitude > 0.0))
        throw EstimationError("flat trace: no extrema");
    const double lo = trace.phase.front();
    const double hi = trace.phase.back();
    const double tol = 1e-9 * std::max(1.0, hi - lo);
    // Extrema where order * phi + phase0 = k pi.
    const auto k_first = static_cast<long long>(std::ceil((order_hint * lo + fit.phase0) / std::numbers::pi - 1e-6));
    std::vector<double> out;
    for (long long k = k_first - 1;; ++k) {
        const double phi = (k * std::numbers::pi - fit.phase0) / order_hint;
        if (phi > hi + tol)
            break;
        if (phi >= lo - tol)
            out.push_back(phi);
    }
    return out;
}

LossStudy loss_invariance_study(const CascadeSpec& cascade, std::span<const double> transmissions,
                                const MonteCarloSettings& settings)
{
    if (transmissions.empty())
        throw ConfigError("transmissions", "must not be empty");
    for (double t : transmissions)
        if (!std::isfinite(t) || t <= 0.0 || t > 1.0)
            throw ConfigError("transmissions", "each value must be in (0, 1]");

    LossStudy study;
    for (double t : transmissions) {
        const LossChannel loss = LossChannel::uniform(t);
        const CountTrace trace = simulate_scan(cascade, settings.source, settings.detector_a,
                                               settings.detector_b, loss, settings.scan);
        const BinnedCounts binned = bin_counts(trace, settings.bins);

        LossStudyRow row;
        row.transmission = t;
        row.visibility_a = visibility(count_channel(binned, CountChannel::A), cascade.order);
        row.visibility_b = visibility(count_channel(binned, CountChannel::B), cascade.order);

        double clicks = 0.0;
        double expected = 0.0;
        const double mu = settings.source.mean_photons_per_window;
        const double span = settings.scan.span();
        const auto w = static_cast<double>(trace.records.size());
        for (std::size_t i = 0; i < trace.records.size(); ++i) {
            clicks += trace.records[i].clicks_a + trace.records[i].clicks_b;
            const double mid = settings.scan.phase_start + span * (i + 0.5) / w;
            const auto [pa, pb] = port_probabilities(cascade, mid);
            const double qa = click_probability_expectation(mu, pa, settings.detector_a.efficiency, t);
            const double qb = click_probability_expectation(mu, pb, settings.detector_b.efficiency, t);
            const double da = settings.detector_a.dark_count_prob_per_window;
            const double db = settings.detector_b.dark_count_prob_per_window;
            expected += 1.0 - (1.0 - qa) * (1.0 - da) + 1.0 - (1.0 - qb) * (1.0 - db);
        }
        row.mean_count_rate = clicks / w;
        row.expected_count_rate = expected / w;
        study.rows.push_back(row);
    }
    const auto [lo, hi] = std::minmax_element(
        study.rows.begin(), study.rows.end(), [](const LossStudyRow& a, const LossStudyRow& b) {
            return a.visibility_a.visibility_percent < b.visibility_a.visibility_percent;
        });
    study.visibility_spread_pp =
        hi->visibility_a.visibility_percent - lo->visibility_a.visibility_percent;
    return study;
}

} // namespace cbw
