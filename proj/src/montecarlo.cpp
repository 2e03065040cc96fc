#include "cbw/montecarlo.hpp"

#include "cbw/analytic.hpp"
#include "cbw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbw {

namespace {

constexpr std::uint64_t kPhotonDomain = 1;
constexpr std::uint64_t kCwNoiseDomain = 2;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

std::uint8_t saturate8(unsigned v) { return static_cast<std::uint8_t>(std::min(v, 255u)); }

} // namespace

void SourceConfig::validate() const
{
    if (!std::isfinite(mean_photons_per_window) || mean_photons_per_window <= 0.0)
        throw ConfigError("mean_photons_per_window", "must be finite and > 0");
    if (!std::isfinite(window_duration) || window_duration <= 0.0)
        throw ConfigError("window_duration", "must be finite and > 0");
}

void DetectorConfig::validate(const std::string& prefix) const
{
    if (!is_probability(efficiency))
        throw ConfigError(prefix + "efficiency", "must be a probability in [0, 1]");
    if (!is_probability(dark_count_prob_per_window))
        throw ConfigError(prefix + "dark_count_prob_per_window",
                          "must be a probability in [0, 1]");
    if (dead_time_windows < 0)
        throw ConfigError(prefix + "dead_time_windows", "must be >= 0");
}

void LossChannel::validate() const
{
    if (!std::isfinite(transmission_a) || transmission_a <= 0.0 || transmission_a > 1.0)
        throw ConfigError("transmission_a", "must be in (0, 1]");
    if (!std::isfinite(transmission_b) || transmission_b <= 0.0 || transmission_b > 1.0)
        throw ConfigError("transmission_b", "must be in (0, 1]");
}

void ScanConfig::validate() const
{
    if (!std::isfinite(total_duration) || total_duration <= 0.0)
        throw ConfigError("total_duration", "must be finite and > 0");
    if (!std::isfinite(phase_start))
        throw ConfigError("phase_start", "must be finite");
    if (!std::isfinite(phase_end) || phase_end <= phase_start)
        throw ConfigError("phase_end", "must be finite and > phase_start");
}

std::uint64_t ScanConfig::window_count(const SourceConfig& source) const
{
    const double w = std::round(total_duration / source.window_duration);
    if (!(w >= 1.0) || w > 1e12)
        throw ConfigError("total_duration", "must cover between 1 and 1e12 windows");
    return static_cast<std::uint64_t>(w);
}

std::pair<double, double> port_probabilities(const CascadeSpec& cascade, double phase)
{
    const bool canonical_input = cascade.input.upper == ComplexAmp{1.0, 0.0} &&
                                 cascade.input.lower == ComplexAmp{0.0, 0.0};
    if (cascade.dummy_phase == 0.0 && canonical_input)
        return {fringe_intensity(cascade.order, Port::A, phase),
                fringe_intensity(cascade.order, Port::B, phase)};
    const auto [ia, ib] = intensities(cascade_output(cascade, phase));
    return {ia.value, ib.value};
}

double click_probability_expectation(double mean, double p, double efficiency,
                                     double transmission)
{
    return -std::expm1(-mean * efficiency * transmission * p);
}

double coincidence_rate_expectation(double mean, double p_a, double p_b, double efficiency,
                                    double transmission)
{
    return click_probability_expectation(mean, p_a, efficiency, transmission) *
           click_probability_expectation(mean, p_b, efficiency, transmission);
}

double multiphoton_fraction_expectation(double mean)
{
    const double occupied = -std::expm1(-mean);
    const double single = mean * std::exp(-mean);
    return (occupied - single) / occupied;
}

namespace detail {

ScanPlan make_plan(const CascadeSpec& cascade, const SourceConfig& source,
                   const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                   const LossChannel& loss, const ScanConfig& scan)
{
    try {
        cascade.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError("order", e.what());
    }
    if (!(cascade.input.norm2() > 0.0))
        throw ConfigError("input", "must have nonzero amplitude");
    source.validate();
    detector_a.validate("detector_a.");
    detector_b.validate("detector_b.");
    loss.validate();
    scan.validate();
    return {cascade, source, detector_a, detector_b, loss, scan, scan.window_count(source)};
}

void simulate_block(const ScanPlan& plan, std::uint64_t block, WindowRecord* records)
{
    const std::uint64_t first = block * kBlockWindows;
    const std::uint64_t last = std::min(plan.windows, first + kBlockWindows);
    Engine rng = substream(plan.scan.rng_seed, kPhotonDomain, block);
    std::poisson_distribution<unsigned> photons(plan.source.mean_photons_per_window);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const double start = plan.scan.phase_start;
    const double span = plan.scan.span();
    const double total = static_cast<double>(plan.windows);
    const double keep_a = plan.detector_a.efficiency * plan.loss.transmission_a;
    const double keep_b = plan.detector_b.efficiency * plan.loss.transmission_b;
    const double dark_a = plan.detector_a.dark_count_prob_per_window;
    const double dark_b = plan.detector_b.dark_count_prob_per_window;

    for (std::uint64_t i = first; i < last; ++i) {
        const double mid = start + span * (static_cast<double>(i) + 0.5) / total;
        const auto [p_a, p_b] = port_probabilities(plan.cascade, mid);
        const double to_a = p_a / (p_a + p_b);

        const unsigned n = photons(rng);
        unsigned arrivals_a = 0;
        unsigned arrivals_b = 0;
        for (unsigned k = 0; k < n; ++k) {
            if (uniform(rng) < to_a) {
                if (uniform(rng) < keep_a)
                    ++arrivals_a;
            } else if (uniform(rng) < keep_b) {
                ++arrivals_b;
            }
        }
        if (dark_a > 0.0 && uniform(rng) < dark_a)
            ++arrivals_a;
        if (dark_b > 0.0 && uniform(rng) < dark_b)
            ++arrivals_b;

        WindowRecord& r = records[i];
        r.window_index = i;
        r.phase = start + span * static_cast<double>(i) / total;
        r.photons = static_cast<std::uint16_t>(std::min(n, 65535u));
        r.clicks_a = saturate8(arrivals_a);
        r.clicks_b = saturate8(arrivals_b);
        r.coincidences = 0;
    }
}

void apply_detection(const ScanPlan& plan, std::vector<WindowRecord>& records)
{
    const std::int64_t dead_a = plan.detector_a.dead_time_windows;
    const std::int64_t dead_b = plan.detector_b.dead_time_windows;
    const auto n = static_cast<std::int64_t>(records.size());

    if (dead_a == 0 && dead_b == 0) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            WindowRecord& r = records[i];
            r.clicks_a = r.clicks_a > 0 ? 1 : 0;
            r.clicks_b = r.clicks_b > 0 ? 1 : 0;
            r.coincidences = r.clicks_a & r.clicks_b;
        }
        return;
    }

    // Paralyzable: every arrival, counted or not, restarts the dead interval.
    constexpr std::int64_t never = std::numeric_limits<std::int64_t>::min() / 2;
    std::int64_t last_a = never;
    std::int64_t last_b = never;
    for (std::int64_t i = 0; i < n; ++i) {
        WindowRecord& r = records[i];
        const bool arrived_a = r.clicks_a > 0;
        const bool arrived_b = r.clicks_b > 0;
        r.clicks_a = arrived_a && i - last_a > dead_a ? 1 : 0;
        r.clicks_b = arrived_b && i - last_b > dead_b ? 1 : 0;
        if (arrived_a)
            last_a = i;
        if (arrived_b)
            last_b = i;
        r.coincidences = r.clicks_a & r.clicks_b;
    }
}

} // namespace detail

CountTrace simulate_scan(const CascadeSpec& cascade, const SourceConfig& source,
                         const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                         const LossChannel& loss, const ScanConfig& scan)
{
    const detail::ScanPlan plan =
        detail::make_plan(cascade, source, detector_a, detector_b, loss, scan);
    CountTrace trace{std::vector<WindowRecord>(plan.windows), scan.phase_start, scan.phase_end};
    const auto blocks = static_cast<std::int64_t>((plan.windows + kBlockWindows - 1) / kBlockWindows);
    WindowRecord* out = trace.records.data();
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < blocks; ++b)
        detail::simulate_block(plan, static_cast<std::uint64_t>(b), out);
    detail::apply_detection(plan, trace.records);
    return trace;
}

CwTrace simulate_cw_scan(const CascadeSpec& cascade, const LossChannel& loss,
                         const ScanConfig& scan, double noise_rel_sigma, std::size_t samples)
{
    try {
        cascade.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError("order", e.what());
    }
    loss.validate();
    scan.validate();
    if (!std::isfinite(noise_rel_sigma) || noise_rel_sigma < 0.0)
        throw ConfigError("noise_rel_sigma", "must be finite and >= 0");
    if (samples < 1)
        throw ConfigError("samples", "must be >= 1");

    CwTrace trace{std::vector<double>(samples), std::vector<double>(samples),
                  std::vector<double>(samples), std::vector<double>(samples)};
    const double span = scan.span();
    const auto n = static_cast<std::int64_t>(samples);
    const auto blocks = (n + static_cast<std::int64_t>(kBlockWindows) - 1) /
                        static_cast<std::int64_t>(kBlockWindows);

#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        Engine rng = substream(scan.rng_seed, kCwNoiseDomain, static_cast<std::uint64_t>(b));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::int64_t first = b * static_cast<std::int64_t>(kBlockWindows);
        const std::int64_t last = std::min(n, first + static_cast<std::int64_t>(kBlockWindows));
        for (std::int64_t i = first; i < last; ++i) {
            const double phi =
                scan.phase_start + span * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            auto [ia, ib] = port_probabilities(cascade, phi);
            ia *= loss.transmission_a;
            ib *= loss.transmission_b;
            if (noise_rel_sigma > 0.0) {
                ia = std::max(0.0, ia * (1.0 + noise_rel_sigma * gauss(rng)));
                ib = std::max(0.0, ib * (1.0 + noise_rel_sigma * gauss(rng)));
            }
            trace.phase[i] = phi;
            trace.intensity_a[i] = ia;
            trace.intensity_b[i] = ib;
            trace.product[i] = ia * ib;
        }
    }
    return trace;
}

} // namespace cbw
