#include "cbw/cli.hpp"

#include "cbw/analysis.hpp"
#include "cbw/analytic.hpp"
#include "cbw/io.hpp"
#include "cbw/trace.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

namespace cbw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;
constexpr int kMaxOrder = 1000;
constexpr double kLossSpreadLimitPp = 1.0;

const std::set<std::string> kCommands{"analytic", "simulate", "analyze", "loss-study",
                                      "normal-mode"};

// ---------------------------------------------------------------- config json

json detector_json(const DetectorConfig& d)
{
    return {{"efficiency", d.efficiency},
            {"dark_count_prob_per_window", d.dark_count_prob_per_window},
            {"dead_time_windows", d.dead_time_windows}};
}

template <class T>
void take(const json& j, const std::string& key, T& dst)
{
    try {
        dst = j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key, "wrong type in config file");
    }
}

void merge_detector(DetectorConfig& d, const json& j, const std::string& prefix)
{
    if (!j.is_object())
        throw ConfigError(prefix, "must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "efficiency")
            take(value, prefix + ".efficiency", d.efficiency);
        else if (key == "dark_count_prob_per_window")
            take(value, prefix + ".dark_count_prob_per_window", d.dark_count_prob_per_window);
        else if (key == "dead_time_windows")
            take(value, prefix + ".dead_time_windows", d.dead_time_windows);
        else
            throw ConfigError(prefix + "." + key, "unknown config key");
    }
}

// ------------------------------------------------------------------ helpers

bool wants(const RunConfig& cfg, const std::string& format)
{
    return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

RunConfig with_default_formats(RunConfig cfg)
{
    if (!cfg.formats.empty())
        return cfg;
    if (cfg.command == "analyze")
        cfg.formats = {"json"};
    else if (cfg.command == "loss-study")
        cfg.formats = {"csv", "json"};
    else
        cfg.formats = {"csv"};
    return cfg;
}

void validate_common(const RunConfig& cfg)
{
    for (const auto& f : cfg.formats)
        if (f != "csv" && f != "json" && f != "svg")
            throw ConfigError("format", "must be one of csv, json, svg (got '" + f + "')");
    if (cfg.bins < 1)
        throw ConfigError("bins", "must be >= 1");
}

void validate_order(int order)
{
    if (order < 1 || order > kMaxOrder)
        throw ConfigError("order", "must be in 1.." + std::to_string(kMaxOrder));
}

CascadeSpec cascade_of(const RunConfig& cfg)
{
    validate_order(cfg.order);
    if (!std::isfinite(cfg.dummy_phase))
        throw ConfigError("dummy_phase", "must be finite");
    CascadeSpec spec;
    spec.order = cfg.order;
    spec.dummy_phase = cfg.dummy_phase;
    return spec;
}

SourceConfig source_of(const RunConfig& cfg)
{
    SourceConfig s{cfg.mean_photons_per_window, cfg.window_duration};
    s.validate();
    return s;
}

ScanConfig scan_of(const RunConfig& cfg)
{
    ScanConfig s{cfg.total_duration, cfg.phase_start, cfg.phase_end, cfg.seed};
    s.validate();
    return s;
}

fs::path prepare_out_dir(const RunConfig& cfg)
{
    const fs::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());
    return dir;
}

void write_manifest(const fs::path& file, const RunConfig& cfg)
{
    json j = to_json(cfg);
    j["version"] = kVersion;
    io::write_text(file, j.dump(2) + "\n");
}

std::string fixed(double v, int digits)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string order_tag(int order) { return "N" + std::to_string(order); }

// ------------------------------------------------------------------ commands

int cmd_analytic(const RunConfig& cfg, std::ostream& out)
{
    validate_order(cfg.order);
    if (!std::isfinite(cfg.step) || cfg.step <= 0.0)
        throw ConfigError("step", "must be finite and > 0");
    if (!std::isfinite(cfg.start))
        throw ConfigError("start", "must be finite");
    if (!std::isfinite(cfg.end) || cfg.end < cfg.start)
        throw ConfigError("end", "must be finite and >= start");
    const double count = std::floor((cfg.end - cfg.start) / cfg.step + 1e-9) + 1.0;
    if (count > 1e8)
        throw ConfigError("step", "grid would exceed 1e8 points");

    std::vector<double> phases(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < phases.size(); ++i)
        phases[i] = cfg.start + static_cast<double>(i) * cfg.step;
    const FringeSamples samples = evaluate_fringes(cfg.order, phases);

    const fs::path dir = prepare_out_dir(cfg);
    const std::string stem = "analytic_" + order_tag(cfg.order);
    if (wants(cfg, "csv"))
        io::write_analytic_csv(dir / (stem + ".csv"), phases, samples);
    if (wants(cfg, "svg")) {
        io::Plot plot;
        plot.title = "Order " + std::to_string(cfg.order) + " fringes";
        plot.x_label = "phase (rad)";
        plot.y_label = "normalized intensity";
        std::vector<double> r_norm(samples.product.size());
        std::transform(samples.product.begin(), samples.product.end(), r_norm.begin(),
                       [](double r) { return 4.0 * r; });
        plot.series.push_back({"I_A", phases, samples.intensity_a, "#d62728", false});
        plot.series.push_back({"I_B", phases, samples.intensity_b, "#1f77b4", false});
        plot.series.push_back({"R_AB (normalized)", phases, r_norm, "#2ca02c", true});
        io::PlotMarkers nodes{"phase basis", {}, {}};
        const double spacing = std::numbers::pi / cfg.order;
        for (long long m = static_cast<long long>(std::ceil(cfg.start / spacing - 1e-9));
             m * spacing <= cfg.end + 1e-9; ++m) {
            nodes.x.push_back(m * spacing);
            nodes.y.push_back(fringe_intensity(cfg.order, Port::A, m * spacing));
        }
        plot.markers.push_back(nodes);
        io::write_svg(dir / (stem + ".svg"), plot);
    }
    write_manifest(dir / (stem + ".manifest.json"), cfg);
    if (!cfg.quiet)
        out << "analytic: order " << cfg.order << ", " << phases.size() << " grid points\n";
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    const CascadeSpec cascade = cascade_of(cfg);
    const ScanConfig scan = scan_of(cfg);
    const LossChannel loss{cfg.transmission_a, cfg.transmission_b};
    loss.validate();
    if (cfg.mode != "single-photon" && cfg.mode != "cw")
        throw ConfigError("mode", "must be single-photon or cw");

    const fs::path dir = prepare_out_dir(cfg);
    const std::string stem = "trace_" + cfg.mode + "_" + order_tag(cfg.order);
    io::Plot plot;
    plot.x_label = "phase (rad)";

    if (cfg.mode == "single-photon") {
        const SourceConfig source = source_of(cfg);
        cfg.detector_a.validate("detector_a.");
        cfg.detector_b.validate("detector_b.");
        const std::uint64_t windows = scan.window_count(source);
        if (!cfg.raw && cfg.bins > windows)
            throw ConfigError("bins", "must not exceed the number of windows");
        const CountTrace trace =
            simulate_scan(cascade, source, cfg.detector_a, cfg.detector_b, loss, scan);
        const BinnedCounts binned = bin_counts(trace, cfg.raw ? trace.records.size() : cfg.bins);
        if (wants(cfg, "csv"))
            io::write_count_csv(dir / (stem + ".csv"), binned);
        if (wants(cfg, "svg")) {
            plot.title = "Single-photon scan, order " + std::to_string(cfg.order);
            plot.y_label = "counts per bin";
            const auto mid = midpoints_from_starts(binned.start_phase);
            auto as_double = [](const std::vector<std::uint64_t>& v) {
                return std::vector<double>(v.begin(), v.end());
            };
            plot.series.push_back({"counts A", mid, as_double(binned.counts_a), "#d62728", false});
            plot.series.push_back({"counts B", mid, as_double(binned.counts_b), "#1f77b4", false});
            plot.series.push_back(
                {"coincidences", mid, as_double(binned.coincidences), "#2ca02c", true});
            io::write_svg(dir / (stem + ".svg"), plot);
        }
        if (!cfg.quiet) {
            std::uint64_t a = 0, b = 0, c = 0;
            for (std::size_t i = 0; i < binned.size(); ++i) {
                a += binned.counts_a[i];
                b += binned.counts_b[i];
                c += binned.coincidences[i];
            }
            out << "simulate: " << trace.records.size() << " windows, " << binned.size()
                << " bins, clicks A=" << a << " B=" << b << " coincidences=" << c << "\n";
        }
    } else {
        const std::uint64_t windows = scan.window_count(SourceConfig{1.0, cfg.window_duration});
        const std::size_t samples = cfg.raw ? windows : cfg.bins;
        const CwTrace trace = simulate_cw_scan(cascade, loss, scan, cfg.noise_rel_sigma, samples);
        if (wants(cfg, "csv"))
            io::write_cw_csv(dir / (stem + ".csv"), trace);
        if (wants(cfg, "svg")) {
            plot.title = "CW scan, order " + std::to_string(cfg.order);
            plot.y_label = "normalized intensity";
            plot.series.push_back({"intensity A", trace.phase, trace.intensity_a, "#d62728", false});
            plot.series.push_back({"intensity B", trace.phase, trace.intensity_b, "#1f77b4", false});
            plot.series.push_back({"product", trace.phase, trace.product, "#2ca02c", true});
            io::write_svg(dir / (stem + ".svg"), plot);
        }
        if (!cfg.quiet)
            out << "simulate: cw, " << samples << " samples\n";
    }
    write_manifest(dir / (stem + ".manifest.json"), cfg);
    return kExitOk;
}

struct TraceReport
{
    std::string trace;
    io::TraceFormat format;
    int order;
    Port channel;
    VisibilityReport vis;
    PeriodReport period;
    std::vector<double> extrema;
};

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.traces.empty())
        throw ConfigError("traces", "at least one trace file is required");
    if (!cfg.orders.empty() && cfg.orders.size() != 1 && cfg.orders.size() != cfg.traces.size())
        throw ConfigError("orders", "give one order for all traces or one per trace");
    for (int o : cfg.orders)
        validate_order(o);
    if (cfg.method != "fit" && cfg.method != "extrema")
        throw ConfigError("method", "must be fit or extrema");
    const VisibilityMethod method =
        cfg.method == "fit" ? VisibilityMethod::fit : VisibilityMethod::extrema;

    double reference_period = 2.0 * std::numbers::pi;
    if (!cfg.reference.empty()) {
        const io::LoadedTrace ref = io::read_trace_csv(cfg.reference);
        reference_period = estimate_period(io::to_scan_trace(ref, CountChannel::A)).fundamental_period;
    }

    std::vector<TraceReport> reports;
    json errors = json::array();
    int status = kExitOk;
    for (std::size_t t = 0; t < cfg.traces.size(); ++t) {
        const std::string& path = cfg.traces[t];
        try {
            const io::LoadedTrace loaded = io::read_trace_csv(path);
            for (Port port : {Port::A, Port::B}) {
                const ScanTrace trace = io::to_scan_trace(
                    loaded, port == Port::A ? CountChannel::A : CountChannel::B);
                TraceReport r{path, loaded.format, 0, port, {}, {}, {}};
                r.period = estimate_period(trace, reference_period);
                if (cfg.orders.empty())
                    r.order = std::max(1, static_cast<int>(std::lround(r.period.order_estimate)));
                else
                    r.order = cfg.orders.size() == 1 ? cfg.orders[0] : cfg.orders[t];
                r.vis = visibility(trace, r.order, method);
                r.extrema = locate_extrema(trace, r.order);
                reports.push_back(std::move(r));
            }
        } catch (const io::CsvError& e) {
            errors.push_back({{"trace", path}, {"error", e.what()}, {"line", e.line()}});
            err << "error: " << e.what() << "\n";
            status = std::max(status, kExitValidation);
        } catch (const std::exception& e) {
            errors.push_back({{"trace", path}, {"error", e.what()}});
            err << "error: " << path << ": " << e.what() << "\n";
            status = std::max(status, kExitEstimation);
        }
    }

    json j;
    j["estimator"] = cfg.method == "fit"
                         ? "least-squares cosine fit (Poisson-weighted for counts); uncertainty = "
                           "standard error over per-period re-fits; clamped at 100"
                         : "per-period (max-min)/(max+min); uncertainty = standard error over periods";
    j["reports"] = json::array();
    for (const auto& r : reports) {
        j["reports"].push_back({{"trace", r.trace},
                                {"format", io::to_string(r.format)},
                                {"order", r.order},
                                {"channel", to_string(r.channel)},
                                {"visibility_percent", r.vis.visibility_percent},
                                {"uncertainty_percent", r.vis.uncertainty_percent},
                                {"method", to_string(r.vis.method)},
                                {"n_periods_used", r.vis.n_periods_used},
                                {"fundamental_period_rad", r.period.fundamental_period},
                                {"order_estimate", r.period.order_estimate},
                                {"extrema_rad", r.extrema},
                                {"clamped", r.vis.clamped}});
    }
    j["errors"] = errors;

    // Rows: regime x channel (A = red, B = blue); columns: order.
    std::set<int> orders;
    std::map<std::pair<std::string, std::string>, std::map<int, std::string>> cells;
    std::vector<std::pair<std::string, std::string>> row_order;
    for (const auto& r : reports) {
        orders.insert(r.order);
        const std::string regime = r.format == io::TraceFormat::counts ? "Single photon"
                                   : r.format == io::TraceFormat::cw   ? "CW"
                                                                       : "Analytic";
        const std::pair<std::string, std::string> key{regime, r.channel == Port::A ? "Red (A)"
                                                                                   : "Blue (B)"};
        if (std::find(row_order.begin(), row_order.end(), key) == row_order.end())
            row_order.push_back(key);
        cells[key][r.order] =
            fixed(r.vis.visibility_percent, 2) + " ± " + fixed(r.vis.uncertainty_percent, 2);
    }
    std::ostringstream table;
    table << std::left << std::setw(16) << "Case" << std::setw(10) << "Channel";
    for (int o : orders)
        table << std::setw(18) << ("N = " + std::to_string(o));
    table << "\n";
    for (const auto& key : row_order) {
        table << std::setw(16) << key.first << std::setw(10) << key.second;
        for (int o : orders) {
            const auto it = cells[key].find(o);
            const std::string cell = it == cells[key].end() ? "-" : it->second;
            // setw counts bytes; the plus-minus sign is two.
            const int pad = cell.find("±") != std::string::npos ? 19 : 18;
            table << std::setw(pad) << cell;
        }
        table << "\n";
    }

    const fs::path dir = prepare_out_dir(cfg);
    if (wants(cfg, "json"))
        io::write_text(dir / "report.json", j.dump(2) + "\n");
    io::write_text(dir / "report.txt", table.str());
    write_manifest(dir / "report.manifest.json", cfg);
    if (!cfg.quiet)
        out << table.str();
    return status;
}

int cmd_loss_study(const RunConfig& cfg, std::ostream& out)
{
    const CascadeSpec cascade = cascade_of(cfg);
    if (cfg.transmissions.empty())
        throw ConfigError("transmissions", "must not be empty");
    for (double t : cfg.transmissions)
        if (!std::isfinite(t) || t <= 0.0 || t > 1.0)
            throw ConfigError("transmissions", "each value must be in (0, 1]");
    MonteCarloSettings settings;
    settings.source = source_of(cfg);
    settings.detector_a = cfg.detector_a;
    settings.detector_b = cfg.detector_b;
    settings.detector_a.validate("detector_a.");
    settings.detector_b.validate("detector_b.");
    settings.scan = scan_of(cfg);
    settings.bins = cfg.bins;
    if (cfg.bins > settings.scan.window_count(settings.source))
        throw ConfigError("bins", "must not exceed the number of windows");

    const LossStudy study = loss_invariance_study(cascade, cfg.transmissions, settings);

    const fs::path dir = prepare_out_dir(cfg);
    const std::string stem = "loss_study_" + order_tag(cfg.order);
    const double base_rate = study.rows.front().mean_count_rate;
    const double base_t = study.rows.front().transmission;
    if (wants(cfg, "csv")) {
        std::string text = "transmission,visibility_A_percent,uncertainty_A_percent,"
                           "visibility_B_percent,uncertainty_B_percent,mean_count_rate,"
                           "expected_count_rate,rate_ratio,transmission_ratio\n";
        for (const auto& r : study.rows)
            text += io::format_real(r.transmission) + "," +
                    io::format_real(r.visibility_a.visibility_percent) + "," +
                    io::format_real(r.visibility_a.uncertainty_percent) + "," +
                    io::format_real(r.visibility_b.visibility_percent) + "," +
                    io::format_real(r.visibility_b.uncertainty_percent) + "," +
                    io::format_real(r.mean_count_rate) + "," +
                    io::format_real(r.expected_count_rate) + "," +
                    io::format_real(r.mean_count_rate / base_rate) + "," +
                    io::format_real(r.transmission / base_t) + "\n";
        io::write_text(dir / (stem + ".csv"), text);
    }
    if (wants(cfg, "json")) {
        json j;
        j["order"] = cfg.order;
        j["rows"] = json::array();
        for (const auto& r : study.rows)
            j["rows"].push_back({{"transmission", r.transmission},
                                 {"visibility_A_percent", r.visibility_a.visibility_percent},
                                 {"uncertainty_A_percent", r.visibility_a.uncertainty_percent},
                                 {"visibility_B_percent", r.visibility_b.visibility_percent},
                                 {"uncertainty_B_percent", r.visibility_b.uncertainty_percent},
                                 {"mean_count_rate", r.mean_count_rate},
                                 {"expected_count_rate", r.expected_count_rate}});
        j["visibility_spread_pp"] = study.visibility_spread_pp;
        j["spread_limit_pp"] = kLossSpreadLimitPp;
        j["within_limit"] = study.visibility_spread_pp < kLossSpreadLimitPp;
        io::write_text(dir / (stem + ".json"), j.dump(2) + "\n");
    }
    write_manifest(dir / (stem + ".manifest.json"), cfg);
    if (!cfg.quiet) {
        out << "T         visibility A (%)    rate/window\n";
        for (const auto& r : study.rows)
            out << std::left << std::setw(10) << fixed(r.transmission, 3) << std::setw(20)
                << (fixed(r.visibility_a.visibility_percent, 2) + " ± " +
                    fixed(r.visibility_a.uncertainty_percent, 2))
                << fixed(r.mean_count_rate, 6) << "\n";
        out << "visibility spread: " << fixed(study.visibility_spread_pp, 3) << " pp\n";
    }
    return kExitOk;
}

int cmd_normal_mode(const RunConfig& cfg, std::ostream& out)
{
    if (!std::isfinite(cfg.spring_constant) || cfg.spring_constant <= 0.0)
        throw ConfigError("spring_constant", "must be finite and > 0");
    if (!std::isfinite(cfg.mass) || cfg.mass <= 0.0)
        throw ConfigError("mass", "must be finite and > 0");
    if (cfg.chain_size < 1)
        throw ConfigError("chain_size", "must be >= 1");

    const double base = normal_mode_frequency({cfg.mass, cfg.spring_constant, 1, 1});
    const fs::path dir = prepare_out_dir(cfg);
    const std::string stem = "normal_mode_" + order_tag(cfg.chain_size);
    std::string text = "p,omega_p,ratio_to_base,deviation_from_linear\n";
    std::vector<double> ps, omegas;
    for (int p = 1; p <= cfg.chain_size; ++p) {
        const double w = normal_mode_frequency({cfg.mass, cfg.spring_constant, cfg.chain_size, p});
        ps.push_back(p);
        omegas.push_back(w);
        text += std::to_string(p) + "," + io::format_real(w) + "," + io::format_real(w / base) +
                "," + io::format_real(w - p * base) + "\n";
    }
    if (wants(cfg, "csv"))
        io::write_text(dir / (stem + ".csv"), text);
    if (wants(cfg, "svg")) {
        io::Plot plot;
        plot.title = "Spring-mass chain normal modes, N = " + std::to_string(cfg.chain_size);
        plot.x_label = "mode index p";
        plot.y_label = "angular frequency";
        std::vector<double> linear;
        for (double p : ps)
            linear.push_back(p * base);
        plot.series.push_back({"omega_p", ps, omegas, "#d62728", false});
        plot.series.push_back({"p * omega_1(N=1)", ps, linear, "#7f7f7f", true});
        io::write_svg(dir / (stem + ".svg"), plot);
    }
    write_manifest(dir / (stem + ".manifest.json"), cfg);
    if (!cfg.quiet)
        out << "normal-mode: chain of " << cfg.chain_size << ", omega_N = "
            << io::format_real(omegas.back()) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ parsing

/// Records a flag so it can be overlaid on the merged config after parsing.
class Overlay
{
public:
    template <class T>
    CLI::Option* add(CLI::App& app, const std::string& flags, const std::string& desc,
                     std::function<void(RunConfig&, const T&)> assign)
    {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app.add_option(flags, *value, desc);
        apply_.push_back([opt, value, assign](RunConfig& cfg) {
            if (opt->count() > 0)
                assign(cfg, *value);
        });
        return opt;
    }

    CLI::Option* flag(CLI::App& app, const std::string& flags, const std::string& desc,
                      std::function<void(RunConfig&)> assign)
    {
        CLI::Option* opt = app.add_flag(flags, desc);
        apply_.push_back([opt, assign](RunConfig& cfg) {
            if (opt->count() > 0)
                assign(cfg);
        });
        return opt;
    }

    void apply(RunConfig& cfg) const
    {
        for (const auto& f : apply_)
            f(cfg);
    }

private:
    std::vector<std::function<void(RunConfig&)>> apply_;
};

#define CBW_FIELD(type, name) \
    std::function<void(RunConfig&, const type&)>([](RunConfig& c, const type& v) { c.name = v; })

} // namespace

json to_json(const RunConfig& cfg)
{
    return {{"command", cfg.command},
            {"seed", cfg.seed},
            {"formats", cfg.formats},
            {"bins", cfg.bins},
            {"order", cfg.order},
            {"dummy_phase", cfg.dummy_phase},
            {"start", cfg.start},
            {"end", cfg.end},
            {"step", cfg.step},
            {"mode", cfg.mode},
            {"mean_photons_per_window", cfg.mean_photons_per_window},
            {"window_duration", cfg.window_duration},
            {"total_duration", cfg.total_duration},
            {"phase_start", cfg.phase_start},
            {"phase_end", cfg.phase_end},
            {"detector_a", detector_json(cfg.detector_a)},
            {"detector_b", detector_json(cfg.detector_b)},
            {"transmission_a", cfg.transmission_a},
            {"transmission_b", cfg.transmission_b},
            {"noise_rel_sigma", cfg.noise_rel_sigma},
            {"raw", cfg.raw},
            {"transmissions", cfg.transmissions},
            {"traces", cfg.traces},
            {"orders", cfg.orders},
            {"reference", cfg.reference},
            {"method", cfg.method},
            {"spring_constant", cfg.spring_constant},
            {"mass", cfg.mass},
            {"chain_size", cfg.chain_size}};
}

void merge_json(RunConfig& cfg, const json& j)
{
    if (!j.is_object())
        throw ConfigError("config", "top level must be a JSON object");
    static const std::map<std::string, std::function<void(RunConfig&, const json&)>> setters{
        {"command", [](RunConfig& c, const json& v) { take(v, "command", c.command); }},
        {"seed", [](RunConfig& c, const json& v) { take(v, "seed", c.seed); }},
        {"out_dir", [](RunConfig& c, const json& v) { take(v, "out_dir", c.out_dir); }},
        {"formats", [](RunConfig& c, const json& v) { take(v, "formats", c.formats); }},
        {"bins", [](RunConfig& c, const json& v) { take(v, "bins", c.bins); }},
        {"quiet", [](RunConfig& c, const json& v) { take(v, "quiet", c.quiet); }},
        {"order", [](RunConfig& c, const json& v) { take(v, "order", c.order); }},
        {"dummy_phase", [](RunConfig& c, const json& v) { take(v, "dummy_phase", c.dummy_phase); }},
        {"start", [](RunConfig& c, const json& v) { take(v, "start", c.start); }},
        {"end", [](RunConfig& c, const json& v) { take(v, "end", c.end); }},
        {"step", [](RunConfig& c, const json& v) { take(v, "step", c.step); }},
        {"mode", [](RunConfig& c, const json& v) { take(v, "mode", c.mode); }},
        {"mean_photons_per_window",
         [](RunConfig& c, const json& v) {
             take(v, "mean_photons_per_window", c.mean_photons_per_window);
         }},
        {"window_duration",
         [](RunConfig& c, const json& v) { take(v, "window_duration", c.window_duration); }},
        {"total_duration",
         [](RunConfig& c, const json& v) { take(v, "total_duration", c.total_duration); }},
        {"phase_start", [](RunConfig& c, const json& v) { take(v, "phase_start", c.phase_start); }},
        {"phase_end", [](RunConfig& c, const json& v) { take(v, "phase_end", c.phase_end); }},
        {"detector_a",
         [](RunConfig& c, const json& v) { merge_detector(c.detector_a, v, "detector_a"); }},
        {"detector_b",
         [](RunConfig& c, const json& v) { merge_detector(c.detector_b, v, "detector_b"); }},
        {"transmission_a",
         [](RunConfig& c, const json& v) { take(v, "transmission_a", c.transmission_a); }},
        {"transmission_b",
         [](RunConfig& c, const json& v) { take(v, "transmission_b", c.transmission_b); }},
        {"noise_rel_sigma",
         [](RunConfig& c, const json& v) { take(v, "noise_rel_sigma", c.noise_rel_sigma); }},
        {"raw", [](RunConfig& c, const json& v) { take(v, "raw", c.raw); }},
        {"transmissions",
         [](RunConfig& c, const json& v) { take(v, "transmissions", c.transmissions); }},
        {"traces", [](RunConfig& c, const json& v) { take(v, "traces", c.traces); }},
        {"orders", [](RunConfig& c, const json& v) { take(v, "orders", c.orders); }},
        {"reference", [](RunConfig& c, const json& v) { take(v, "reference", c.reference); }},
        {"method", [](RunConfig& c, const json& v) { take(v, "method", c.method); }},
        {"spring_constant",
         [](RunConfig& c, const json& v) { take(v, "spring_constant", c.spring_constant); }},
        {"mass", [](RunConfig& c, const json& v) { take(v, "mass", c.mass); }},
        {"chain_size", [](RunConfig& c, const json& v) { take(v, "chain_size", c.chain_size); }},
        {"version", [](RunConfig&, const json&) {}},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError(key, "unknown config key");
        it->second(cfg, value);
    }
}

int execute(const RunConfig& merged, std::ostream& out, std::ostream& err)
{
    try {
        const RunConfig cfg = with_default_formats(merged);
        if (!kCommands.count(cfg.command))
            throw ConfigError("command", "unknown or missing command '" + cfg.command + "'");
        validate_common(cfg);
        if (cfg.command == "analytic")
            return cmd_analytic(cfg, out);
        if (cfg.command == "simulate")
            return cmd_simulate(cfg, out);
        if (cfg.command == "analyze")
            return cmd_analyze(cfg, out, err);
        if (cfg.command == "loss-study")
            return cmd_loss_study(cfg, out);
        return cmd_normal_mode(cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const io::CsvError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Coherence de Broglie wavelength fringe simulator"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", kVersion);

    Overlay ov;
    std::string config_file;
    app.add_option("--config", config_file, "JSON config file (flags override it)");

    ov.add<std::uint64_t>(app, "--seed", "RNG master seed", CBW_FIELD(std::uint64_t, seed));
    ov.add<std::string>(app, "--out-dir", "Output directory", CBW_FIELD(std::string, out_dir));
    ov.add<std::vector<std::string>>(app, "--format", "Output format: csv|json|svg (repeatable)",
                                     CBW_FIELD(std::vector<std::string>, formats));
    ov.add<std::size_t>(app, "--bins", "Phase bins for display traces", CBW_FIELD(std::size_t, bins));
    ov.flag(app, "--quiet", "Suppress console summaries", [](RunConfig& c) { c.quiet = true; });

    CLI::App* analytic = app.add_subcommand("analytic", "Closed-form fringes on a phase grid");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo or CW fringe scan");
    CLI::App* analyze = app.add_subcommand("analyze", "Visibility, period and extrema of traces");
    CLI::App* loss = app.add_subcommand("loss-study", "Visibility versus uniform transmission");
    CLI::App* normal = app.add_subcommand("normal-mode", "Spring-mass chain normal modes");

    for (CLI::App* sub : {analytic, simulate, loss})
        ov.add<int>(*sub, "--order,-N", "Number of phase-scanned MZIs", CBW_FIELD(int, order));
    for (CLI::App* sub : {simulate, loss})
        ov.add<double>(*sub, "--dummy-phase", "Dummy MZI phase (experimental)",
                       CBW_FIELD(double, dummy_phase));

    ov.add<double>(*analytic, "--start", "Grid start (rad)", CBW_FIELD(double, start));
    ov.add<double>(*analytic, "--end", "Grid end (rad)", CBW_FIELD(double, end));
    ov.add<double>(*analytic, "--step", "Grid step (rad)", CBW_FIELD(double, step));

    ov.add<std::string>(*simulate, "--mode", "single-photon | cw", CBW_FIELD(std::string, mode));
    ov.add<double>(*simulate, "--noise", "CW relative Gaussian noise",
                   CBW_FIELD(double, noise_rel_sigma));
    ov.flag(*simulate, "--raw", "Write unbinned per-window records", [](RunConfig& c) { c.raw = true; });
    ov.add<double>(*simulate, "--transmission", "Uniform transmission before detection",
                   std::function<void(RunConfig&, const double&)>([](RunConfig& c, const double& v) {
                       c.transmission_a = v;
                       c.transmission_b = v;
                   }));
    ov.add<double>(*simulate, "--transmission-a", "Arm A transmission",
                   CBW_FIELD(double, transmission_a));
    ov.add<double>(*simulate, "--transmission-b", "Arm B transmission",
                   CBW_FIELD(double, transmission_b));
    ov.add<std::vector<double>>(*loss, "--transmissions", "Transmissions to compare",
                                CBW_FIELD(std::vector<double>, transmissions))
        ->delimiter(',')
        ->allow_extra_args(false);

    for (CLI::App* sub : {simulate, loss}) {
        ov.add<double>(*sub, "--mean-photons", "Mean photons per window",
                       CBW_FIELD(double, mean_photons_per_window));
        ov.add<double>(*sub, "--window", "Window duration (s)", CBW_FIELD(double, window_duration));
        ov.add<double>(*sub, "--duration", "Scan duration (s)", CBW_FIELD(double, total_duration));
        ov.add<double>(*sub, "--phase-start", "Scan start phase (rad)", CBW_FIELD(double, phase_start));
        ov.add<double>(*sub, "--phase-end", "Scan end phase (rad)", CBW_FIELD(double, phase_end));
        ov.add<double>(*sub, "--efficiency-a", "Detector A efficiency",
                       CBW_FIELD(double, detector_a.efficiency));
        ov.add<double>(*sub, "--efficiency-b", "Detector B efficiency",
                       CBW_FIELD(double, detector_b.efficiency));
        ov.add<double>(*sub, "--dark-a", "Detector A dark-count probability per window",
                       CBW_FIELD(double, detector_a.dark_count_prob_per_window));
        ov.add<double>(*sub, "--dark-b", "Detector B dark-count probability per window",
                       CBW_FIELD(double, detector_b.dark_count_prob_per_window));
        ov.add<int>(*sub, "--dead-time-a", "Detector A dead time (windows)",
                    CBW_FIELD(int, detector_a.dead_time_windows));
        ov.add<int>(*sub, "--dead-time-b", "Detector B dead time (windows)",
                    CBW_FIELD(int, detector_b.dead_time_windows));
    }

    ov.add<std::vector<std::string>>(*analyze, "traces", "Trace CSV files",
                                     CBW_FIELD(std::vector<std::string>, traces));
    ov.add<std::vector<int>>(*analyze, "--order,-N",
                             "Order hint: one for all traces, or one per trace (comma list)",
                             CBW_FIELD(std::vector<int>, orders))
        ->delimiter(',')
        ->allow_extra_args(false);
    ov.add<std::string>(*analyze, "--reference", "Reference trace defining the order-1 period",
                        CBW_FIELD(std::string, reference));
    ov.add<std::string>(*analyze, "--method", "fit | extrema", CBW_FIELD(std::string, method));

    ov.add<double>(*normal, "--k", "Spring constant", CBW_FIELD(double, spring_constant));
    ov.add<double>(*normal, "--m", "Mass", CBW_FIELD(double, mass));
    ov.add<int>(*normal, "--chain-size,-N", "Number of masses", CBW_FIELD(int, chain_size));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
    }

    RunConfig cfg;
    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in)
                throw ConfigError("config", "cannot open " + config_file);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("config", std::string("invalid JSON: ") + e.what());
            }
            merge_json(cfg, j);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    ov.apply(cfg);
    for (CLI::App* sub : app.get_subcommands())
        cfg.command = sub->get_name();
    return execute(cfg, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"cbw"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace cbw::cli
