#pragma once

// Trace CSV files and SVG line plots.
//
// CSV dialect: comma separated, header row, '.' decimal point, reals
// written with 17 significant digits so doubles round-trip exactly.

#include "cbw/analytic.hpp"
#include "cbw/montecarlo.hpp"
#include "cbw/trace.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbw::io {

class CsvError : public std::runtime_error
{
public:
    CsvError(const std::filesystem::path& file, std::size_t line, const std::string& what)
        : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// "%.17g"
std::string format_real(double v);

void write_analytic_csv(const std::filesystem::path& file, std::span<const double> phases,
                        const FringeSamples& samples);
void write_count_csv(const std::filesystem::path& file, const BinnedCounts& binned);
void write_cw_csv(const std::filesystem::path& file, const CwTrace& trace);

enum class TraceFormat { counts, cw, analytic };

const char* to_string(TraceFormat f);

/// Columns of any trace CSV this tool writes, detected from the header.
struct LoadedTrace
{
    TraceFormat format = TraceFormat::counts;
    std::vector<double> phase; ///< as stored (window start phase for counts)
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> joint; ///< coincidences, product or R_AB
};

LoadedTrace read_trace_csv(const std::filesystem::path& file);

/// Port A, port B or joint column as an analysis trace. Count traces use
/// bin midpoints.
ScanTrace to_scan_trace(const LoadedTrace& loaded, CountChannel channel);

struct PlotSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct PlotMarkers
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::vector<PlotMarkers> markers; ///< drawn as open circles
};

std::string render_svg(const Plot& plot);
void write_svg(const std::filesystem::path& file, const Plot& plot);

/// Writes text, throwing std::runtime_error naming the path on failure.
void write_text(const std::filesystem::path& file, const std::string& text);

} // namespace cbw::io
