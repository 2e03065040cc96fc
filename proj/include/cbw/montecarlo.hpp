#pragma once

// Stochastic emulation of the photon-counting fringe scan.
//
// Each detection window draws a Poisson photon number, routes every photon to
// port A or B with the Born-rule probability at that window's phase, thins it
// by arm transmission and detector efficiency, adds dark counts, and then a
// serial pass applies paralyzable dead time. A coincidence is a window in
// which both detectors click.
//
// Windows are grouped into fixed-size blocks; each block owns an RNG
// substream derived from the master seed, so the parallel kernel and the
// serial reference produce bit-identical traces regardless of thread count.

#include "cbw/cascade.hpp"

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbw {

/// Invalid configuration; field() names the offending parameter.
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct SourceConfig
{
    double mean_photons_per_window = 0.04;
    double window_duration = 80e-6; ///< seconds

    void validate() const;
};

struct DetectorConfig
{
    double efficiency = 1.0;
    double dark_count_prob_per_window = 0.0;
    int dead_time_windows = 0;

    void validate(const std::string& prefix) const;
};

/// Per-arm transmission applied before detection.
struct LossChannel
{
    double transmission_a = 1.0;
    double transmission_b = 1.0;

    static LossChannel uniform(double t) { return {t, t}; }
    void validate() const;
};

struct ScanConfig
{
    double total_duration = 200.0; ///< seconds
    double phase_start = 0.0;
    double phase_end = 6.0 * std::numbers::pi;
    std::uint64_t rng_seed = 0;

    void validate() const;
    /// round(total_duration / window_duration)
    std::uint64_t window_count(const SourceConfig& source) const;
    double span() const { return phase_end - phase_start; }
};

struct WindowRecord
{
    std::uint64_t window_index = 0;
    double phase = 0.0;           ///< phase at window start
    std::uint16_t photons = 0;    ///< source photons emitted in the window
    std::uint8_t clicks_a = 0;
    std::uint8_t clicks_b = 0;
    std::uint8_t coincidences = 0;

    friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

struct CountTrace
{
    std::vector<WindowRecord> records;
    double phase_start = 0.0;
    double phase_end = 0.0;
};

/// Windows per RNG substream.
inline constexpr std::uint64_t kBlockWindows = 4096;

/// Port probabilities (p_A, p_B) at a scan phase for this cascade.
std::pair<double, double> port_probabilities(const CascadeSpec& cascade, double phase);

CountTrace simulate_scan(const CascadeSpec& cascade, const SourceConfig& source,
                         const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                         const LossChannel& loss, const ScanConfig& scan);

struct CwTrace
{
    std::vector<double> phase;
    std::vector<double> intensity_a;
    std::vector<double> intensity_b;
    std::vector<double> product;
};

/// Deterministic intensities on `samples` evenly spaced scan points (the
/// midpoints of equal sub-intervals), scaled by arm transmission, with
/// optional multiplicative Gaussian noise of relative width noise_rel_sigma.
CwTrace simulate_cw_scan(const CascadeSpec& cascade, const LossChannel& loss,
                         const ScanConfig& scan, double noise_rel_sigma, std::size_t samples);

/// Per-window probability that a detector with the given port probability
/// clicks: 1 - exp(-mean * efficiency * transmission * p).
double click_probability_expectation(double mean, double p, double efficiency,
                                     double transmission);

/// Per-window probability that both detectors click under independent
/// Poisson thinning.
double coincidence_rate_expectation(double mean, double p_a, double p_b, double efficiency,
                                    double transmission);

/// P(n >= 2) / P(n >= 1) for n ~ Poisson(mean).
double multiphoton_fraction_expectation(double mean);

namespace serial {
CountTrace simulate_scan(const CascadeSpec& cascade, const SourceConfig& source,
                         const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                         const LossChannel& loss, const ScanConfig& scan);
}

namespace detail {

struct ScanPlan
{
    CascadeSpec cascade;
    SourceConfig source;
    DetectorConfig detector_a;
    DetectorConfig detector_b;
    LossChannel loss;
    ScanConfig scan;
    std::uint64_t windows = 0;
};

ScanPlan make_plan(const CascadeSpec& cascade, const SourceConfig& source,
                   const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                   const LossChannel& loss, const ScanConfig& scan);

/// Fills records[first, last) with photon numbers and raw arrivals
/// (clicks_a/b hold saturated arrival counts until detection is applied).
void simulate_block(const ScanPlan& plan, std::uint64_t block, WindowRecord* records);

/// Converts arrivals to clicks (dead time, coincidences) over the whole trace.
void apply_detection(const ScanPlan& plan, std::vector<WindowRecord>& records);

} // namespace detail

} // namespace cbw
