#pragma once

#include "cfaging/scenario.hpp"

#include <map>
#include <vector>

namespace cfaging {

/// Fast-fading channel sampled at a set of time indices.
///
/// h.at(n) is an (M N) x K matrix; column k stacks h_mk[n] over APs, with
/// AP m occupying rows [m N, (m + 1) N). Every index is generated from the
/// anchor through the lag form h[n] = rho[|n - anchor|] h[anchor] + rho_bar z,
/// which keeps the pairwise law with the anchor exact for a non-Markov
/// (Jakes) correlation.
struct ChannelBlock {
    int num_aps = 0;
    int antennas = 0;
    int anchor = 0;
    std::map<int, CMatrix> h;

    auto segment(int n, int m, int k) const { return h.at(n).col(k).segment(static_cast<Eigen::Index>(m) * antennas, antennas); }
};

/// Draw order: h[anchor] column-major, then every other index in ascending
/// order, one CN(0, I) innovation matrix each.
ChannelBlock evolve_block(const CorrelationProfile& profile, RngStream& rng, std::vector<int> times,
                          int anchor, int antennas);

/// y_m[p] = sum_{l in U_p} sqrt(beta_ml E_up,l) h_ml[p] + sqrt(N0) w.
CVector pilot_receive(const Deployment& dep, const ChannelBlock& block, const ScenarioConfig& cfg,
                      int m, int p, RngStream& rng);

struct PilotEstimate {
    CVector h_hat;  // unit per-entry variance; zero when uninformative
    double a = 0.0;
    bool informative = false;
};

/// MMSE estimate of h_mk[P] from the pilot received at slot p.
PilotEstimate mmse_estimate(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile,
                            const CVector& y_m_p, int m, int k, int p);

/// Closed-form estimation quality a_mk for every pair.
RMatrix estimation_coefficients(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile);

struct EstimateSet {
    CMatrix h_hat;  // (M N) x K, unit variance per entry
    RMatrix a;      // M x K
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> informative;

    RMatrix a_bar2() const { return (1.0 - a.array().square()).max(0.0).matrix(); }
};

/// Runs the full pilot phase on a block containing every slot 1..P.
/// Draw order: slots ascending, APs ascending, N noise entries each.
EstimateSet estimate_all(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile,
                         const ChannelBlock& block, RngStream& rng);

/// The three orthogonal parts of h_mk[n] relative to the estimate at P.
struct AgedChannel {
    CVector estimate_part;    // rho a h_hat
    CVector error_part;       // rho a_bar h_tilde
    CVector innovation_part;  // rho_bar z[n; P]

    CVector total() const { return estimate_part + error_part + innovation_part; }
};

/// Throws std::out_of_range for n <= P or an index missing from the block.
AgedChannel aged_true_channel(const ChannelBlock& block, const CorrelationProfile& profile, const EstimateSet& est,
                              int m, int k, int n);

/// Channel block and estimates for one Monte Carlo trial. The block holds
/// slots 1..P plus any extra indices requested.
struct TrialRealization {
    ChannelBlock block;
    EstimateSet est;
};

TrialRealization realize_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                               RngStream& rng, const std::vector<int>& extra_times = {});

}  // namespace cfaging
