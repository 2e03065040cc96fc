#pragma once

// Command-line front end: analytic, simulate, analyze, loss-study,
// normal-mode. Values resolve as flag > config file > default, and every
// command writes a manifest of the merged configuration that can be fed
// back with --config to reproduce its outputs byte-for-byte.

#include "cbw/montecarlo.hpp"

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

namespace cbw::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig
{
    std::string command;

    // global
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::vector<std::string> formats;
    std::size_t bins = 500;
    bool quiet = false;

    // cascade
    int order = 1;
    double dummy_phase = 0.0;

    // analytic grid
    double start = 0.0;
    double end = 2.0 * std::numbers::pi;
    double step = 2.0 * std::numbers::pi / 1024.0;

    // simulate / loss-study
    std::string mode = "single-photon";
    double mean_photons_per_window = 0.04;
    double window_duration = 80e-6;
    double total_duration = 200.0;
    double phase_start = 0.0;
    double phase_end = 6.0 * std::numbers::pi;
    DetectorConfig detector_a{};
    DetectorConfig detector_b{};
    double transmission_a = 1.0;
    double transmission_b = 1.0;
    double noise_rel_sigma = 0.0;
    bool raw = false;
    std::vector<double> transmissions{1.0, 0.5, 0.1};

    // analyze
    std::vector<std::string> traces;
    std::vector<int> orders;
    std::string reference;
    std::string method = "fit";

    // normal-mode
    double spring_constant = 1.0;
    double mass = 1.0;
    int chain_size = 1;
};

/// Manifest form: every semantic field; out_dir and quiet are omitted.
nlohmann::json to_json(const RunConfig& cfg);

/// Overlays keys present in j onto cfg. Unknown keys or wrong types throw
/// ConfigError naming the key.
void merge_json(RunConfig& cfg, const nlohmann::json& j);

/// Runs a fully merged configuration. Returns the process exit code:
/// 0 success, 2 validation error, 3 estimation error, 1 other failure.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and executes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cbw::cli
