#pragma once

#include "cfaging/channel.hpp"
#include "cfaging/result.hpp"
#include "cfaging/uplink.hpp"

#include <string>
#include <vector>

namespace cfaging {

/// Large-scale quantities at one data time; everything the deterministic
/// equivalent needs. zeta + zeta_check + zeta_dot equals beta entrywise.
struct LargeScaleProfile {
    RMatrix zeta;        // beta a^2 rho^2
    RMatrix zeta_check;  // beta a_bar^2 rho^2
    RMatrix zeta_dot;    // beta rho_bar^2
    RVector psi;         // M
    RVector energy;      // K, data energies
    int antennas = 1;
    double noise_power = 1.0;
    int time = 0;

    int num_aps() const { return static_cast<int>(zeta.rows()); }
    int num_ues() const { return static_cast<int>(zeta.cols()); }
};

/// psi_m = sum_l E_l (zeta_check_ml + zeta_dot_ml) + N0.
LargeScaleProfile make_profile(const RMatrix& beta, const RMatrix& a, const RMatrix& rho, const RVector& energy,
                               int antennas, double noise_power, int time = 0);

LargeScaleProfile build_profile(const Deployment& dep, const RMatrix& a, const CorrelationProfile& profile,
                                const ScenarioConfig& cfg, int n);

/// Reading of the leave-two-out quantities in the multiuser interference term.
enum class DottedFixedPoint { LeaveTwoOut, ReuseLeaveOneOut };
enum class DottedSolve { Inverse, Literal };
enum class EpsilonReading { Aggregate, PerAp };

struct DeOptions {
    double tol = 1e-10;
    int max_iterations = 1000;
    DottedFixedPoint dotted_fixed_point = DottedFixedPoint::LeaveTwoOut;
    DottedSolve dotted_solve = DottedSolve::Inverse;
    EpsilonReading epsilon = EpsilonReading::Aggregate;
};

class DetEquivError : public std::runtime_error {
public:
    DetEquivError(const std::string& stage, const std::string& what)
        : std::runtime_error("deterministic equivalent [" + stage + "]: " + what), stage_(stage)
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Converged resolvent fixed point with a set of excluded users.
///
/// e holds K entries. For users in the active set they are the iterated
/// values; for excluded users they are evaluated once from the final phi,
/// so for excluded = {k}, e(k) is the deterministic-equivalent SINR.
struct FixedPointState {
    RVector e;
    RVector phi;  // M
    std::vector<int> active;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

FixedPointState fixed_point(const LargeScaleProfile& lsp, const std::vector<int>& excluded,
                            const DeOptions& options = {});

/// e_{k,l} for all l != k, iterated from 1/N0.
FixedPointState fixed_point_e(const LargeScaleProfile& lsp, int k, const DeOptions& options = {});

/// Solution of (I - J) e' = u over the active set of `state` for the
/// weight vector a_m (per AP), together with the per-AP derivative
/// phi_m^2 (a_m + sum_p E_p zeta_mp e'_p / (1 + e_p)^2).
struct DerivativeWeights {
    RVector e_prime;    // K, zero outside the active set
    RVector phi_prime;  // M
};

DerivativeWeights derivative_weights(const LargeScaleProfile& lsp, const FixedPointState& state,
                                     const RVector& a_weights, bool literal = false);

/// e'_{k,l} and phi'_mk for user k (weights zeta_mk).
DerivativeWeights e_prime_solve(const LargeScaleProfile& lsp, int k, const FixedPointState& state);

/// Leave-two-out quantities for the pair (k, l).
struct DottedState {
    int l = 0;
    FixedPointState fp;
    double coupling = 0.0;  // N sum_m E_l zeta_ml phi_dot_m
    DerivativeWeights weights;
};

/// Everything the eta terms need for one user, independent of the zeta
/// matrices they are finally evaluated against.
struct CombinerState {
    int k = 0;
    FixedPointState fp;
    DerivativeWeights prime;
    std::vector<DottedState> dotted;
};

CombinerState solve_combiner_state(const LargeScaleProfile& lsp, int k, const DeOptions& options = {});

/// Keeps phi, e, e' and the couplings of `frozen` and recomputes every
/// phi' against the zeta of `lsp`.
CombinerState rebind_combiner_state(const LargeScaleProfile& lsp, const CombinerState& frozen);

double eta_s(const LargeScaleProfile& lsp, int k, const RVector& phi);

struct NoiseLikeTerms {
    double eta_2 = 0.0;
    double eta_3 = 0.0;
    double eta_w = 0.0;
};

NoiseLikeTerms eta_2_3_w(const LargeScaleProfile& lsp, int k, const RVector& phi_prime);

/// Residual multiuser interference. clamp_events counts epsilon factors
/// that came out negative through rounding and were set to zero.
double eta_1(const LargeScaleProfile& lsp, int k, const std::vector<DottedState>& dotted, const DeOptions& options,
             long* clamp_events = nullptr);

/// Evaluates the five terms for `lsp` with a (possibly frozen) state.
SinrBreakdown evaluate_eta_terms(const LargeScaleProfile& lsp, const CombinerState& state, const DeOptions& options,
                                 long* clamp_events = nullptr);

struct DetEquivResult {
    SinrBreakdown terms;
    double sinr = 0.0;
    int max_iterations = 0;
    long clamp_events = 0;
};

DetEquivResult det_equiv_sinr(const LargeScaleProfile& lsp, int k, const DeOptions& options = {});

/// Averages the deterministic equivalent over the same spatial drops the
/// Monte Carlo engine uses (trials are not used).
ExperimentResult run_det_equiv(const ScenarioConfig& cfg, const MonteCarloPlan& plan, const DeOptions& options = {});

}  // namespace cfaging
