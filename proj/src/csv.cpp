#include "cbw/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbw::io {

namespace {

const char* kCountHeader = "window_start_phase_rad,counts_A,counts_B,coincidences";
const char* kCwHeader = "phase_rad,intensity_A,intensity_B,product";
const char* kAnalyticHeader = "phase,I_A,I_B,R_AB";

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + file.string());
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("failed writing output file " + file.string());
}

void write_analytic_csv(const std::filesystem::path& file, std::span<const double> phases,
                        const FringeSamples& samples)
{
    std::string text = std::string(kAnalyticHeader) + "\n";
    for (std::size_t i = 0; i < phases.size(); ++i)
        text += format_real(phases[i]) + "," + format_real(samples.intensity_a[i]) + "," +
                format_real(samples.intensity_b[i]) + "," + format_real(samples.product[i]) + "\n";
    write_text(file, text);
}

void write_count_csv(const std::filesystem::path& file, const BinnedCounts& binned)
{
    std::string text = std::string(kCountHeader) + "\n";
    for (std::size_t i = 0; i < binned.size(); ++i)
        text += format_real(binned.start_phase[i]) + "," + std::to_string(binned.counts_a[i]) +
                "," + std::to_string(binned.counts_b[i]) + "," +
                std::to_string(binned.coincidences[i]) + "\n";
    write_text(file, text);
}

void write_cw_csv(const std::filesystem::path& file, const CwTrace& trace)
{
    std::string text = std::string(kCwHeader) + "\n";
    for (std::size_t i = 0; i < trace.phase.size(); ++i)
        text += format_real(trace.phase[i]) + "," + format_real(trace.intensity_a[i]) + "," +
                format_real(trace.intensity_b[i]) + "," + format_real(trace.product[i]) + "\n";
    write_text(file, text);
}

const char* to_string(TraceFormat f)
{
    switch (f) {
    case TraceFormat::counts: return "single-photon";
    case TraceFormat::cw: return "cw";
    case TraceFormat::analytic: return "analytic";
    }
    return "unknown";
}

LoadedTrace read_trace_csv(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw CsvError(file, 0, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    LoadedTrace out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        const bool terminated = end != std::string::npos;
        if (!terminated)
            end = text.size();
        std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty())
            continue;

        if (!header_seen) {
            if (line == kCountHeader)
                out.format = TraceFormat::counts;
            else if (line == kCwHeader)
                out.format = TraceFormat::cw;
            else if (line == kAnalyticHeader)
                out.format = TraceFormat::analytic;
            else
                throw CsvError(file, line_no, "unrecognized header '" + std::string(line) + "'");
            header_seen = true;
            continue;
        }

        if (!terminated)
            throw CsvError(file, line_no, "truncated row (missing end of line)");
        const auto fields = split(line);
        if (fields.size() != 4)
            throw CsvError(file, line_no,
                           "expected 4 columns, found " + std::to_string(fields.size()));
        double v[4];
        for (std::size_t c = 0; c < 4; ++c) {
            const std::string_view f = trim(fields[c]);
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[c]);
            if (ec != std::errc() || ptr != f.data() + f.size() || f.empty())
                throw CsvError(file, line_no,
                               "column " + std::to_string(c + 1) + ": not a number '" +
                                   std::string(f) + "'");
        }
        out.phase.push_back(v[0]);
        out.a.push_back(v[1]);
        out.b.push_back(v[2]);
        out.joint.push_back(v[3]);
    }
    if (!header_seen)
        throw CsvError(file, line_no, "empty file");
    if (out.phase.empty())
        throw CsvError(file, line_no, "no data rows");
    return out;
}

ScanTrace to_scan_trace(const LoadedTrace& loaded, CountChannel channel)
{
    ScanTrace t;
    t.phase = loaded.format == TraceFormat::counts ? midpoints_from_starts(loaded.phase)
                                                   : loaded.phase;
    t.value = channel == CountChannel::A   ? loaded.a
              : channel == CountChannel::B ? loaded.b
                                           : loaded.joint;
    if (loaded.format == TraceFormat::counts)
        t.kind = channel == CountChannel::coincidence ? TraceKind::coincidence
                                                      : TraceKind::count_rate;
    else
        t.kind = TraceKind::intensity;
    return t;
}

} // namespace cbw::io
