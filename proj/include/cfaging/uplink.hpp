#pragma once

#include "cfaging/channel.hpp"
#include "cfaging/result.hpp"

#include <functional>

namespace cfaging {

/// Effective channels seen by the CPU at data time n.
///
/// Column k of g_hat stacks rho_mk a_mk sqrt(E_us,k beta_mk) h_hat_mk over
/// APs. psi_m = est_error_power_m + aging_power_m + N0 is the per-AP power
/// of everything the estimate does not explain.
struct EffectiveChannels {
    int time = 0;
    int antennas = 1;
    CMatrix g_hat;            // (M N) x K
    RVector est_error_power;  // M: sum_l E_l beta_ml a_bar^2 rho^2
    RVector aging_power;      // M: sum_l E_l beta_ml rho_bar^2
    RVector psi;              // M

    int num_aps() const { return static_cast<int>(psi.size()); }
    int num_ues() const { return static_cast<int>(g_hat.cols()); }
    /// Length-MN diagonal of Psi kron I_N.
    RVector psi_diagonal() const { return expand(psi); }
    RVector expand(const RVector& per_ap) const
    {
        return per_ap.replicate(1, antennas).transpose().reshaped();
    }
};

EffectiveChannels effective_channels(const Deployment& dep, const EstimateSet& est, const CorrelationProfile& profile,
                                     const ScenarioConfig& cfg, int n);

/// R = G_hat G_hat^H + Psi kron I_N.
CMatrix conditional_covariance(const EffectiveChannels& eff);

struct SinrBreakdown {
    double eta_s = 0.0;
    double eta_1 = 0.0;
    double eta_2 = 0.0;
    double eta_3 = 0.0;
    double eta_w = 0.0;

    double interference() const { return eta_1 + eta_2 + eta_3 + eta_w; }
    double sinr() const { return eta_s / interference(); }
};

/// Conditional power decomposition for UE k with combiner c = R^{-1} g_hat_k.
SinrBreakdown compute_conditional_sinr(const EffectiveChannels& eff, const HermitianSolver& r, double noise_power,
                                       int k);

/// Same, for every UE, reusing one factorization of R.
std::vector<SinrBreakdown> compute_conditional_sinr_all(const EffectiveChannels& eff, double noise_power);

/// Realized data-phase quantities for one channel use.
struct DataPhaseRealization {
    CVector symbols;  // K
    CMatrix g_tilde;  // (M N) x K
    CMatrix xi;       // (M N) x K
    CVector w;        // M N, unit variance
};

/// Builds the realized estimation-error and aging components from a block
/// that contains time n, and draws symbols (CN(0,1)) and noise.
DataPhaseRealization realize_data_phase(const Deployment& dep, const TrialRealization& trial,
                                        const CorrelationProfile& profile, const ScenarioConfig& cfg, int n,
                                        RngStream& rng);

/// The five components of the decoded sample r_k[n].
struct DecodedSample {
    Complex desired;
    Complex multiuser;
    Complex estimation_error;
    Complex aging;
    Complex noise;

    Complex total() const { return desired + multiuser + estimation_error + aging + noise; }
};

DecodedSample mmse_combine_and_decode(const EffectiveChannels& eff, const HermitianSolver& r,
                                      const DataPhaseRealization& data, double noise_power, int k);

/// Evaluates one trial; returns a probes x K matrix of linear SINRs.
using TrialEvaluator = std::function<RMatrix(const ScenarioConfig&, const Deployment&, const CorrelationProfile&,
                                             RngStream&, const std::vector<int>&)>;

/// Shared drop/trial loop: trials averaged within a drop, then drops
/// averaged, all in linear scale and in fixed (drop, trial) order.
ExperimentResult monte_carlo_average(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                                     const TrialEvaluator& evaluate, const std::string& engine);

/// Cell-free MMSE engine.
RMatrix cell_free_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                        RngStream& rng, const std::vector<int>& probe_times);

ExperimentResult run_monte_carlo(const ScenarioConfig& cfg, const MonteCarloPlan& plan);

}  // namespace cfaging
