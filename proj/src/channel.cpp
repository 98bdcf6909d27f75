#include "cfaging/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfaging {

ChannelBlock evolve_block(const CorrelationProfile& profile, RngStream& rng, std::vector<int> times, int anchor,
                          int antennas)
{
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("evolve_block: times must be sorted ascending");
    }
    ChannelBlock block;
    block.num_aps = profile.num_aps();
    block.antennas = antennas;
    block.anchor = anchor;
    const Eigen::Index rows = static_cast<Eigen::Index>(block.num_aps) * antennas;
    const int k_count = profile.num_ues();

    CMatrix h_anchor(rows, k_count);
    fill_complex_gaussian(rng, h_anchor);
    block.h.emplace(anchor, h_anchor);

    times.erase(std::unique(times.begin(), times.end()), times.end());
    CMatrix z(rows, k_count);
    for (int n : times) {
        if (n == anchor) continue;
        fill_complex_gaussian(rng, z);
        const RMatrix rho = profile.rho_matrix(n - anchor);
        CMatrix h(rows, k_count);
        for (int k = 0; k < k_count; ++k) {
            for (int m = 0; m < block.num_aps; ++m) {
                const double r = rho(m, k);
                const double rb = complement(r);
                const auto off = static_cast<Eigen::Index>(m) * antennas;
                h.col(k).segment(off, antennas) =
                    r * h_anchor.col(k).segment(off, antennas) + rb * z.col(k).segment(off, antennas);
            }
        }
        block.h.emplace(n, std::move(h));
    }
    return block;
}

CVector pilot_receive(const Deployment& dep, const ChannelBlock& block, const ScenarioConfig& cfg, int m, int p,
                      RngStream& rng)
{
    if (p < 1 || p > cfg.pilot_len) {
        throw std::out_of_range("pilot_receive: slot out of range");
    }
    CVector y = std::sqrt(cfg.noise_power) * sample_complex_gaussian(rng, block.antennas);
    const auto& users = cfg.pilot_slots.at(static_cast<std::size_t>(p - 1));
    for (int l : users) {
        y += std::sqrt(dep.beta(m, l) * cfg.pilot_energy[static_cast<std::size_t>(l)]) * block.segment(p, m, l);
    }
    return y;
}

namespace {

double slot_power(const Deployment& dep, const ScenarioConfig& cfg, int m, int p)
{
    double total = cfg.noise_power;
    for (int l : cfg.pilot_slots.at(static_cast<std::size_t>(p - 1))) {
        total += dep.beta(m, l) * cfg.pilot_energy[static_cast<std::size_t>(l)];
    }
    return total;
}

double coefficient_a(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile, int m,
                     int k, int p)
{
    const double rho = profile.rho(m, k, cfg.pilot_len - p);
    const double num = rho * rho * dep.beta(m, k) * cfg.pilot_energy[static_cast<std::size_t>(k)];
    return std::sqrt(num / slot_power(dep, cfg, m, p));
}

}  // namespace

PilotEstimate mmse_estimate(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile,
                            const CVector& y_m_p, int m, int k, int p)
{
    const auto& users = cfg.pilot_slots.at(static_cast<std::size_t>(p - 1));
    if (std::find(users.begin(), users.end(), k) == users.end()) {
        throw std::invalid_argument("mmse_estimate: UE is not in the given pilot slot");
    }
    PilotEstimate out;
    out.a = coefficient_a(dep, cfg, profile, m, k, p);
    if (!(out.a > 0.0)) {
        out.a = 0.0;
        out.h_hat = CVector::Zero(y_m_p.size());
        return out;
    }
    const double rho = profile.rho(m, k, cfg.pilot_len - p);
    const double coef =
        rho * std::sqrt(dep.beta(m, k) * cfg.pilot_energy[static_cast<std::size_t>(k)]) / slot_power(dep, cfg, m, p);
    out.h_hat = (coef / out.a) * y_m_p;
    out.informative = true;
    return out;
}

RMatrix estimation_coefficients(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile)
{
    RMatrix a(dep.num_aps(), dep.num_ues());
    for (int k = 0; k < dep.num_ues(); ++k) {
        const int p = cfg.pilot_slot_of(k);
        for (int m = 0; m < dep.num_aps(); ++m) {
            a(m, k) = coefficient_a(dep, cfg, profile, m, k, p);
        }
    }
    return a;
}

EstimateSet estimate_all(const Deployment& dep, const ScenarioConfig& cfg, const CorrelationProfile& profile,
                         const ChannelBlock& block, RngStream& rng)
{
    const int n_ant = block.antennas;
    EstimateSet est;
    est.h_hat = CMatrix::Zero(static_cast<Eigen::Index>(dep.num_aps()) * n_ant, dep.num_ues());
    est.a = RMatrix::Zero(dep.num_aps(), dep.num_ues());
    est.informative.setConstant(dep.num_aps(), dep.num_ues(), false);
    for (int p = 1; p <= cfg.pilot_len; ++p) {
        const auto& users = cfg.pilot_slots[static_cast<std::size_t>(p - 1)];
        for (int m = 0; m < dep.num_aps(); ++m) {
            const CVector y = pilot_receive(dep, block, cfg, m, p, rng);
            for (int k : users) {
                PilotEstimate e = mmse_estimate(dep, cfg, profile, y, m, k, p);
                est.h_hat.col(k).segment(static_cast<Eigen::Index>(m) * n_ant, n_ant) = e.h_hat;
                est.a(m, k) = e.a;
                est.informative(m, k) = e.informative;
            }
        }
    }
    return est;
}

AgedChannel aged_true_channel(const ChannelBlock& block, const CorrelationProfile& profile, const EstimateSet& est,
                              int m, int k, int n)
{
    if (n <= block.anchor) {
        throw std::out_of_range("aged_true_channel: time index must exceed the anchor");
    }
    if (!block.h.count(n)) {
        throw std::out_of_range("aged_true_channel: time index not present in block");
    }
    const int n_ant = block.antennas;
    const auto h_anchor = block.segment(block.anchor, m, k);
    const auto h_now = block.segment(n, m, k);
    const CVector h_hat = est.h_hat.col(k).segment(static_cast<Eigen::Index>(m) * n_ant, n_ant);
    const double a = est.a(m, k);
    const double rho = profile.rho(m, k, n - block.anchor);

    AgedChannel out;
    out.estimate_part = rho * a * h_hat;
    // Residuals against the realized channel.
    const CVector err = h_anchor - a * h_hat;
    out.error_part = rho * err;
    out.innovation_part = h_now - rho * h_anchor;
    return out;
}

TrialRealization realize_trial(const ScenarioConfig& cfg, const Deployment& dep, const CorrelationProfile& profile,
                               RngStream& rng, const std::vector<int>& extra_times)
{
    std::vector<int> times;
    for (int p = 1; p <= cfg.pilot_len; ++p) times.push_back(p);
    times.insert(times.end(), extra_times.begin(), extra_times.end());
    std::sort(times.begin(), times.end());
    TrialRealization out{evolve_block(profile, rng, times, cfg.pilot_len, cfg.antennas_per_ap), {}};
    out.est = estimate_all(dep, cfg, profile, out.block, rng);
    return out;
}

}  // namespace cfaging
