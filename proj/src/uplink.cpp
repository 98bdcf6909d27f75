#include "cfaging/uplink.hpp"

#include "cfaging/parallel.hpp"

#include <chrono>
#include <cmath>

namespace cfaging {

std::vector<int> default_probe_times(int pilot_len, int frame_len)
{
    std::vector<int> times{pilot_len + 1};
    for (int n = 2; n <= frame_len; n *= 2) {
        if (n > times.back()) times.push_back(n);
    }
    if (times.back() != frame_len) times.push_back(frame_len);
    return times;
}

EffectiveChannels effective_channels(const Deployment& dep, const EstimateSet& est, const CorrelationProfile& profile,
                                     const ScenarioConfig& cfg, int n)
{
    if (n <= cfg.pilot_len || n > cfg.frame_len) {
        throw std::out_of_range("effective_channels: time index must lie in (P, T]");
    }
    const int m_count = dep.num_aps();
    const int k_count = dep.num_ues();
    const int n_ant = cfg.antennas_per_ap;
    const RMatrix rho = profile.rho_matrix(n - cfg.pilot_len);

    EffectiveChannels eff;
    eff.time = n;
    eff.antennas = n_ant;
    eff.g_hat.resize(static_cast<Eigen::Index>(m_count) * n_ant, k_count);
    eff.est_error_power = RVector::Zero(m_count);
    eff.aging_power = RVector::Zero(m_count);
    for (int k = 0; k < k_count; ++k) {
        const double energy = cfg.data_energy[static_cast<std::size_t>(k)];
        for (int m = 0; m < m_count; ++m) {
            const double r2 = rho(m, k) * rho(m, k);
            const double a = est.a(m, k);
            const double power = energy * dep.beta(m, k);
            const auto off = static_cast<Eigen::Index>(m) * n_ant;
            eff.g_hat.col(k).segment(off, n_ant) = (rho(m, k) * a * std::sqrt(power)) * est.h_hat.col(k).segment(off, n_ant);
            eff.est_error_power(m) += power * std::max(0.0, 1.0 - a * a) * r2;
            eff.aging_power(m) += power * std::max(0.0, 1.0 - r2);
        }
    }
    eff.psi = eff.est_error_power + eff.aging_power + RVector::Constant(m_count, cfg.noise_power);
    return eff;
}

CMatrix conditional_covariance(const EffectiveChannels& eff)
{
    CMatrix r = eff.g_hat * eff.g_hat.adjoint();
    r.diagonal() += eff.psi_diagonal().cast<Complex>();
    return r;
}

namespace {

SinrBreakdown breakdown_from_combiner(const EffectiveChannels& eff, const CVector& c, const RVector& d2,
                                      const RVector& d3, double noise_power, int k)
{
    SinrBreakdown out;
    const CVector proj = eff.g_hat.adjoint() * c;  // entry l: g_l^H c
    for (Eigen::Index l = 0; l < proj.size(); ++l) {
        const double p = std::norm(proj(l));
        if (l == k) {
            out.eta_s = p;
        } else {
            out.eta_1 += p;
        }
    }
    const RVector c2 = c.cwiseAbs2();
    out.eta_2 = d2.dot(c2);
    out.eta_3 = d3.dot(c2);
    out.eta_w = noise_power * c2.sum();
    return out;
}

}  // namespace

SinrBreakdown compute_conditional_sinr(const EffectiveChannels& eff, const HermitianSolver& r, double noise_power,
                                       int k)
{
    const CVector c = r.solve(eff.g_hat.col(k));
    return breakdown_from_combiner(eff, c, eff.expand(eff.est_error_power), eff.expand(eff.aging_power), noise_power,
                                   k);
}

std::vector<SinrBreakdown> compute_conditional_sinr_all(const EffectiveChannels& eff, double noise_power)
{
    const HermitianSolver r(conditional_covariance(eff));
    const CMatrix combiners = r.solve(eff.g_hat);
    const RVector d2 = eff.expand(eff.est_error_power);
    const RVector d3 = eff.expand(eff.aging_power);
    std::vector<SinrBreakdown> out;
    out.reserve(static_cast<std::size_t>(eff.num_ues()));
    for (int k = 0; k < eff.num_ues(); ++k) {
        out.push_back(breakdown_from_combiner(eff, combiners.col(k), d2, d3, noise_power, k));
    }
    return out;
}

DataPhaseRealization realize_data_phase(const Deployment& dep, const TrialRealization& trial,
                                        const CorrelationProfile& profile, const ScenarioConfig& cfg, int n,
                                        RngStream& rng)
{
    const int n_ant = cfg.antennas_per_ap;
    const Eigen::Index rows = static_cast<Eigen::Index>(dep.num_aps()) * n_ant;
    DataPhaseRealization out;
    out.g_tilde.resize(rows, dep.num_ues());
    out.xi.resize(rows, dep.num_ues());
    for (int k = 0; k < dep.num_ues(); ++k) {
        for (int m = 0; m < dep.num_aps(); ++m) {
            const AgedChannel parts = aged_true_channel(trial.block, profile, trial.est, m, k, n);
            const double scale = std::sqrt(cfg.data_energy[static_cast<std::size_t>(k)] * dep.beta(m, k));
            const auto off = static_cast<Eigen::Index>(m) * n_ant;
            out.g_tilde.col(k).segment(off, n_ant) = scale * parts.error_part;
            out.xi.col(k).segment(off, n_ant) = scale * parts.innovation_part;
        }
    }
    out.symbols = sample_complex_gaussian(rng, dep.num_ues());
    out.w = sample_complex_gaussian(rng, rows);
    return out;
}

DecodedSample mmse_combine_and_decode(const EffectiveChannels& eff, const HermitianSolver& r,
                                      const DataPhaseRealization& data, double noise_power, int k)
{
    const CVector c = r.solve(eff.g_hat.col(k));
    const CVector known = eff.g_hat.adjoint() * c;
    const CVector err = data.g_tilde.adjoint() * c;
    const CVector aged = data.xi.adjoint() * c;

    DecodedSample out;
    for (Eigen::Index l = 0; l < data.symbols.size(); ++l) {
        // g^H c is the conjugate of c^H g.
        const Complex s = data.symbols(l);
        if (l == k) {
            out.desired += std::conj(known(l)) * s;
        } else {
            out.multiuser += std::conj(known(l)) * s;
        }
        out.estimation_error += std::conj(err(l)) * s;
        out.aging += std::conj(aged(l)) * s;
    }
    out.noise = std::sqrt(noise_power) * c.dot(data.w);
    return out;
}

ExperimentResult monte_carlo_average(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                                     const TrialEvaluator& evaluate, const std::string& engine)
{
    validate(cfg);
    if (plan.drops < 1 || plan.trials < 1) {
        throw std::invalid_argument("monte_carlo_average: drops and trials must be >= 1");
    }
    const std::vector<int> probes =
        plan.probe_times.empty() ? default_probe_times(cfg.pilot_len, cfg.frame_len) : plan.probe_times;
    for (int n : probes) {
        if (n <= cfg.pilot_len || n > cfg.frame_len) {
            throw std::out_of_range("probe time " + std::to_string(n) + " outside (P, T]");
        }
    }
    const auto start = std::chrono::steady_clock::now();

    std::vector<Deployment> deployments(static_cast<std::size_t>(plan.drops));
    for (int d = 0; d < plan.drops; ++d) {
        RngStream rng(plan.seed, drop_stream(d));
        deployments[static_cast<std::size_t>(d)] = drop_uniform(cfg, rng);
    }
    std::vector<CorrelationProfile> profiles;
    for (const auto& dep : deployments) profiles.emplace_back(cfg, dep);

    const auto items = static_cast<std::size_t>(plan.drops) * static_cast<std::size_t>(plan.trials);
    std::vector<RMatrix> per_trial(items);
    parallel_for(items, plan.threads, [&](std::size_t i) {
        const int d = static_cast<int>(i / static_cast<std::size_t>(plan.trials));
        const int t = static_cast<int>(i % static_cast<std::size_t>(plan.trials));
        RngStream rng(plan.seed, trial_stream(d, t));
        per_trial[i] = evaluate(cfg, deployments[static_cast<std::size_t>(d)], profiles[static_cast<std::size_t>(d)],
                                rng, probes);
    });

    long non_finite = 0;
    RMatrix total = RMatrix::Zero(static_cast<Eigen::Index>(probes.size()), cfg.num_ues);
    for (int d = 0; d < plan.drops; ++d) {
        RMatrix drop_sum = RMatrix::Zero(total.rows(), total.cols());
        for (int t = 0; t < plan.trials; ++t) {
            const RMatrix& r = per_trial[static_cast<std::size_t>(d) * static_cast<std::size_t>(plan.trials) +
                                         static_cast<std::size_t>(t)];
            non_finite += static_cast<long>((!r.array().isFinite()).count());
            drop_sum += r;
        }
        total += drop_sum / plan.trials;
    }
    total /= plan.drops;

    ExperimentResult result;
    result.engine = engine;
    result.axis.assign(probes.begin(), probes.end());
    result.sinr = total;
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metadata = {{"engine", engine},
                       {"seed", plan.seed},
                       {"drops", plan.drops},
                       {"trials", plan.trials},
                       {"probe_times", probes},
                       {"non_finite_samples", non_finite},
                       {"runtime_s", runtime}};
    return result;
}

RMatrix cell_free_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                        RngStream& rng, const std::vector<int>& probe_times)
{
    const TrialRealization trial = realize_trial(cfg, dep, profile, rng);
    RMatrix out(static_cast<Eigen::Index>(probe_times.size()), dep.num_ues());
    for (std::size_t i = 0; i < probe_times.size(); ++i) {
        const EffectiveChannels eff = effective_channels(dep, trial.est, profile, cfg, probe_times[i]);
        const auto terms = compute_conditional_sinr_all(eff, cfg.noise_power);
        for (int k = 0; k < dep.num_ues(); ++k) {
            out(static_cast<Eigen::Index>(i), k) = terms[static_cast<std::size_t>(k)].sinr();
        }
    }
    return out;
}

ExperimentResult run_monte_carlo(const ScenarioConfig& cfg, const MonteCarloPlan& plan)
{
    return monte_carlo_average(cfg, plan, cell_free_trial, "mc");
}

}  // namespace cfaging
