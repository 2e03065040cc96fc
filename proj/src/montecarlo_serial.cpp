// Single-threaded reference for the photon-counting kernel. Kept for
// testing: the OpenMP kernel must reproduce it bit-for-bit.

#include "cbw/montecarlo.hpp"

namespace cbw::serial {

CountTrace simulate_scan(const CascadeSpec& cascade, const SourceConfig& source,
                         const DetectorConfig& detector_a, const DetectorConfig& detector_b,
                         const LossChannel& loss, const ScanConfig& scan)
{
    const detail::ScanPlan plan =
        detail::make_plan(cascade, source, detector_a, detector_b, loss, scan);
    CountTrace trace{std::vector<WindowRecord>(plan.windows), scan.phase_start, scan.phase_end};
    const std::uint64_t blocks = (plan.windows + kBlockWindows - 1) / kBlockWindows;
    for (std::uint64_t b = 0; b < blocks; ++b)
        detail::simulate_block(plan, b, trace.records.data());

    // Reference detection pass: always the sequential dead-time walk.
    std::int64_t last_a = -(plan.detector_a.dead_time_windows + 1);
    std::int64_t last_b = -(plan.detector_b.dead_time_windows + 1);
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto i = static_cast<std::int64_t>(k);
        WindowRecord& r = trace.records[k];
        const bool arrived_a = r.clicks_a > 0;
        const bool arrived_b = r.clicks_b > 0;
        r.clicks_a = arrived_a && i - last_a > plan.detector_a.dead_time_windows ? 1 : 0;
        r.clicks_b = arrived_b && i - last_b > plan.detector_b.dead_time_windows ? 1 : 0;
        if (arrived_a)
            last_a = i;
        if (arrived_b)
            last_b = i;
        r.coincidences = r.clicks_a & r.clicks_b;
    }
    return trace;
}

} // namespace cbw::serial
