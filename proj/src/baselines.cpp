#include "cfaging/baselines.hpp"

#include <cmath>

namespace cfaging {

BaselineConfig baseline_config(const ScenarioConfig& cfg, BaselineMode mode)
{
    return {mode, cfg.num_aps * cfg.antennas_per_ap};
}

ScenarioConfig cellular_config(const ScenarioConfig& cfg)
{
    ScenarioConfig out = cfg;
    out.antennas_per_ap = baseline_config(cfg, BaselineMode::Cellular).antennas;
    out.num_aps = 1;
    out.ap_layout = ApLayout::Center;
    out.delta = 0.0;
    return out;
}

ExperimentResult run_cellular_mc(const ScenarioConfig& cfg, const MonteCarloPlan& plan)
{
    return monte_carlo_average(cellular_config(cfg), plan, cell_free_trial, "cellular");
}

std::vector<int> serving_aps(const Deployment& dep)
{
    std::vector<int> out(static_cast<std::size_t>(dep.num_ues()), 0);
    for (int k = 0; k < dep.num_ues(); ++k) {
        double best = std::abs(dep.ap_pos[0] - dep.ue_pos[static_cast<std::size_t>(k)]);
        for (int m = 1; m < dep.num_aps(); ++m) {
            const double d = std::abs(dep.ap_pos[static_cast<std::size_t>(m)] - dep.ue_pos[static_cast<std::size_t>(k)]);
            if (d < best) {
                best = d;
                out[static_cast<std::size_t>(k)] = m;
            }
        }
    }
    return out;
}

std::vector<double> smallcell_conditional_sinr(const Deployment& dep, const EstimateSet& est,
                                               const CorrelationProfile& profile, const ScenarioConfig& cfg, int n)
{
    if (cfg.antennas_per_ap != 1) {
        throw std::invalid_argument("small cells require single-antenna APs");
    }
    if (n <= cfg.pilot_len || n > cfg.frame_len) {
        throw std::out_of_range("smallcell_conditional_sinr: time index must lie in (P, T]");
    }
    const std::vector<int> serving = serving_aps(dep);
    const int k_count = dep.num_ues();
    const RMatrix rho = profile.rho_matrix(n - cfg.pilot_len);

    std::vector<double> out(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) {
        const int s = serving[static_cast<std::size_t>(k)];
        double signal = 0.0;
        double interference = cfg.noise_power;
        for (int l = 0; l < k_count; ++l) {
            const double power = cfg.data_energy[static_cast<std::size_t>(l)] * dep.beta(s, l);
            if (serving[static_cast<std::size_t>(l)] != s) {
                interference += power;
                continue;
            }
            const double known_fraction = est.a(s, l) * est.a(s, l) * rho(s, l) * rho(s, l);
            const double known = power * known_fraction * std::norm(est.h_hat(s, l));
            interference += power * (1.0 - known_fraction);
            if (l == k) {
                signal = known;
            } else {
                interference += known;
            }
        }
        out[static_cast<std::size_t>(k)] = signal / interference;
    }
    return out;
}

RMatrix small_cell_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                         RngStream& rng, const std::vector<int>& probe_times)
{
    const TrialRealization trial = realize_trial(cfg, dep, profile, rng);
    RMatrix out(static_cast<Eigen::Index>(probe_times.size()), dep.num_ues());
    for (std::size_t i = 0; i < probe_times.size(); ++i) {
        const auto sinr = smallcell_conditional_sinr(dep, trial.est, profile, cfg, probe_times[i]);
        for (int k = 0; k < dep.num_ues(); ++k) {
            out(static_cast<Eigen::Index>(i), k) = sinr[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

ExperimentResult run_smallcell_mc(const ScenarioConfig& cfg, const MonteCarloPlan& plan)
{
    if (cfg.antennas_per_ap != 1) {
        throw std::invalid_argument("run_smallcell_mc: small cells require single-antenna APs");
    }
    return monte_carlo_average(cfg, plan, small_cell_trial, "smallcell");
}

}  // namespace cfaging
