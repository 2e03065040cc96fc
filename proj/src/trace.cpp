#include "cbw/trace.hpp"

#include <cmath>
#include <stdexcept>

namespace cbw {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t bin_edge(std::uint64_t b, std::uint64_t windows, std::uint64_t bins)
{
    return static_cast<std::uint64_t>((static_cast<u128>(b) * windows) / bins);
}

void check_bins(const CountTrace& trace, std::size_t bins)
{
    if (bins < 1 || bins > trace.records.size())
        throw ConfigError("bins", "must be between 1 and the number of windows");
}

} // namespace

const char* to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::intensity: return "intensity";
    case TraceKind::count_rate: return "count-rate";
    case TraceKind::coincidence: return "coincidence";
    }
    return "unknown";
}

void ScanTrace::validate() const
{
    if (phase.size() != value.size())
        throw std::invalid_argument("trace: phase and value lengths differ");
    for (std::size_t i = 0; i < phase.size(); ++i) {
        if (!std::isfinite(phase[i]) || !std::isfinite(value[i]))
            throw std::invalid_argument("trace: non-finite sample at index " + std::to_string(i));
        if (value[i] < 0.0)
            throw std::invalid_argument("trace: negative value at index " + std::to_string(i));
        if (i > 0 && !(phase[i] > phase[i - 1]))
            throw std::invalid_argument("trace: phases not strictly increasing at index " +
                                        std::to_string(i));
    }
}

ScanTrace scaled(const ScanTrace& trace, double factor)
{
    ScanTrace out = trace;
    for (double& v : out.value)
        v *= factor;
    return out;
}

BinnedCounts bin_counts(const CountTrace& trace, std::size_t bins)
{
    check_bins(trace, bins);
    const std::uint64_t windows = trace.records.size();
    BinnedCounts out{std::vector<double>(bins), std::vector<std::uint64_t>(bins),
                     std::vector<std::uint64_t>(bins), std::vector<std::uint64_t>(bins),
                     std::vector<std::uint64_t>(bins)};
    const auto n = static_cast<std::int64_t>(bins);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
        const std::uint64_t first = bin_edge(b, windows, bins);
        const std::uint64_t last = bin_edge(b + 1, windows, bins);
        std::uint64_t a = 0, c = 0, k = 0;
        for (std::uint64_t i = first; i < last; ++i) {
            a += trace.records[i].clicks_a;
            c += trace.records[i].clicks_b;
            k += trace.records[i].coincidences;
        }
        out.start_phase[b] = trace.records[first].phase;
        out.windows[b] = last - first;
        out.counts_a[b] = a;
        out.counts_b[b] = c;
        out.coincidences[b] = k;
    }
    return out;
}

namespace serial {

BinnedCounts bin_counts(const CountTrace& trace, std::size_t bins)
{
    check_bins(trace, bins);
    const std::uint64_t windows = trace.records.size();
    BinnedCounts out;
    std::uint64_t bin = 0;
    std::uint64_t next_edge = 0;
    for (std::uint64_t i = 0; i < windows; ++i) {
        while (i == next_edge) {
            out.start_phase.push_back(trace.records[i].phase);
            out.windows.push_back(0);
            out.counts_a.push_back(0);
            out.counts_b.push_back(0);
            out.coincidences.push_back(0);
            ++bin;
            next_edge = bin_edge(bin, windows, bins);
        }
        out.windows.back() += 1;
        out.counts_a.back() += trace.records[i].clicks_a;
        out.counts_b.back() += trace.records[i].clicks_b;
        out.coincidences.back() += trace.records[i].coincidences;
    }
    return out;
}

} // namespace serial

std::vector<double> midpoints_from_starts(std::span<const double> starts)
{
    const std::size_t n = starts.size();
    std::vector<double> mid(n);
    if (n == 1) {
        mid[0] = starts[0];
        return mid;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        mid[i] = 0.5 * (starts[i] + starts[i + 1]);
    if (n > 0)
        mid[n - 1] = starts[n - 1] + 0.5 * (starts[n - 1] - starts[n - 2]);
    return mid;
}

ScanTrace count_channel(const BinnedCounts& binned, CountChannel channel)
{
    const auto& src = channel == CountChannel::A   ? binned.counts_a
                      : channel == CountChannel::B ? binned.counts_b
                                                   : binned.coincidences;
    ScanTrace out;
    out.phase = midpoints_from_starts(binned.start_phase);
    out.value.assign(src.begin(), src.end());
    out.kind = channel == CountChannel::coincidence ? TraceKind::coincidence
                                                    : TraceKind::count_rate;
    return out;
}

ScanTrace cw_channel(const CwTrace& trace, CountChannel channel)
{
    ScanTrace out;
    out.phase = trace.phase;
    out.value = channel == CountChannel::A   ? trace.intensity_a
                : channel == CountChannel::B ? trace.intensity_b
                                             : trace.product;
    out.kind = TraceKind::intensity;
    return out;
}

} // namespace cbw
