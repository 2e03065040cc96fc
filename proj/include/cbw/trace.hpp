#pragma once

// Sampled fringe records and the binning that turns per-window counts into
// display/analysis traces.

#include "cbw/montecarlo.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cbw {

enum class TraceKind { intensity, count_rate, coincidence };

const char* to_string(TraceKind kind);

/// (phase, value) samples with strictly increasing phase.
struct ScanTrace
{
    std::vector<double> phase;
    std::vector<double> value;
    TraceKind kind = TraceKind::intensity;

    void validate() const;
    std::size_t size() const { return phase.size(); }
};

ScanTrace scaled(const ScanTrace& trace, double factor);

/// Per-window counts aggregated into contiguous phase bins.
struct BinnedCounts
{
    std::vector<double> start_phase;
    std::vector<std::uint64_t> windows;
    std::vector<std::uint64_t> counts_a;
    std::vector<std::uint64_t> counts_b;
    std::vector<std::uint64_t> coincidences;

    std::size_t size() const { return start_phase.size(); }
};

/// Bin b covers windows [b W / bins, (b + 1) W / bins).
BinnedCounts bin_counts(const CountTrace& trace, std::size_t bins);

namespace serial {
BinnedCounts bin_counts(const CountTrace& trace, std::size_t bins);
}

/// Bin centres from bin start phases: halfway to the next start, and the
/// last bin extended by the preceding spacing. Used identically for
/// in-process traces and traces read back from CSV.
std::vector<double> midpoints_from_starts(std::span<const double> starts);

enum class CountChannel { A, B, coincidence };

ScanTrace count_channel(const BinnedCounts& binned, CountChannel channel);

ScanTrace cw_channel(const CwTrace& trace, CountChannel channel);

} // namespace cbw
