#pragma once

#include "cfaging/baselines.hpp"
#include "cfaging/detequiv.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cfaging {

enum class Scale { Desk, Paper };

Scale parse_scale(const std::string& name);
std::string to_string(Scale scale);

/// Physical configuration plus the averaging plan for one scale.
struct Preset {
    ScenarioConfig cfg;
    MonteCarloPlan plan;
};

/// desk:  M=32, N=1, K=8, T=256, P=8, 10 drops x 20 trials,
///        probes {9, 16, 32, 64, 128, 256}.
/// paper: M=256, N=1, K=16, T=1024, P=16, 100 drops x 100 trials,
///        probes {17, 32, 64, ..., 1024}.
Preset make_preset(Scale scale);

/// Flat JSON config. Every key is optional except the path-loss table
/// (pathloss_exponents, pathloss_thresholds); unknown keys are rejected.
/// Experiment keys (drops, trials, probe_times) are read by load_plan.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Reads the optional experiment keys from a config file on top of `base`.
MonteCarloPlan plan_from_json(const nlohmann::json& j, MonteCarloPlan base);
MonteCarloPlan load_plan(const std::filesystem::path& path, MonteCarloPlan base);
nlohmann::json read_config_json(const std::filesystem::path& path);

DeOptions de_options_from_json(const nlohmann::json& j);
nlohmann::json de_options_to_json(const DeOptions& options);

/// Named results produced by one experiment; names become file stems.
struct ResultBundle {
    std::string experiment;
    std::vector<std::pair<std::string, ExperimentResult>> results;

    const ExperimentResult& at(const std::string& name) const;
};

/// Tags the result with system, config, plan and solver options.
void attach_provenance(ExperimentResult& result, const std::string& system, const ScenarioConfig& cfg,
                       const MonteCarloPlan& plan, const DeOptions& options);

ExperimentResult run_system(const std::string& system, const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                            const DeOptions& options = {});

/// Velocities in km/h used by the time-sweep figure.
inline const std::vector<double> kFig1SpeedsKmh{30.0, 100.0, 300.0};
inline const std::vector<double> kFig2Deltas{0.0, 0.25, 0.5};
inline constexpr double kFig2SpeedKmh = 300.0;

/// CF (Monte Carlo and deterministic equivalent), cellular and small cell
/// against time, one result per (system, speed). Requires delta = 0.
ResultBundle experiment_fig1(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             const std::vector<double>& speeds_kmh = kFig1SpeedsKmh,
                             const DeOptions& options = {});

/// CF at 300 km/h against time for each delta and AP count.
/// An empty ap_counts list means {M/4, M/2, M}.
ResultBundle experiment_fig2(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             std::vector<int> ap_counts = {}, const std::vector<double>& deltas = kFig2Deltas,
                             const DeOptions& options = {});

/// SINR at n = T against speed for every system; CF for several deltas.
std::vector<double> fig3_speed_grid();
ResultBundle experiment_fig3(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             const std::vector<double>& speeds_kmh = fig3_speed_grid(),
                             const std::vector<double>& deltas = kFig2Deltas, const DeOptions& options = {});

/// Reruns the experiment described by an emitted JSON sidecar.
ExperimentResult regenerate(const nlohmann::json& sidecar, int threads = 1);

/// CSV text for one result: axis, per-UE SINR in dB, mean SINR in dB,
/// 17 significant digits, LF line endings.
std::string to_csv(const ExperimentResult& result);

/// Writes <name>.csv and <name>.json for every result; returns the paths.
std::vector<std::filesystem::path> emit(const ResultBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace cfaging
