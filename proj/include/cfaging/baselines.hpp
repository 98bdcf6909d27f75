#pragma once

#include "cfaging/uplink.hpp"

#include <vector>

namespace cfaging {

enum class BaselineMode { Cellular, SmallCell };

/// Cellular: one BS at the area center with the whole antenna budget.
/// Small cell: the M single-antenna APs of the cell-free layout, each UE
/// decoded only at its nearest AP.
struct BaselineConfig {
    BaselineMode mode = BaselineMode::Cellular;
    int antennas = 0;  // total antenna budget
};

BaselineConfig baseline_config(const ScenarioConfig& cfg, BaselineMode mode);

/// The cell-free config rewritten for a single centered BS with M N
/// antennas. The relative speed spread collapses to the mean speed.
ScenarioConfig cellular_config(const ScenarioConfig& cfg);

ExperimentResult run_cellular_mc(const ScenarioConfig& cfg, const MonteCarloPlan& plan);

/// Nearest AP per UE; ties go to the lowest AP index.
std::vector<int> serving_aps(const Deployment& dep);

/// Per-UE SINR at its serving AP. Users served by the same AP are known
/// through their estimates; all other users are interference at their
/// average received power.
std::vector<double> smallcell_conditional_sinr(const Deployment& dep, const EstimateSet& est,
                                               const CorrelationProfile& profile, const ScenarioConfig& cfg, int n);

RMatrix small_cell_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                         RngStream& rng, const std::vector<int>& probe_times);

/// Requires single-antenna APs.
ExperimentResult run_smallcell_mc(const ScenarioConfig& cfg, const MonteCarloPlan& plan);

}  // namespace cfaging
