#include "cfaging/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfaging {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& constraint)
{
    throw ConfigError("config key '" + key + "': " + constraint);
}

void check_per_ue(const std::vector<double>& v, int k, const std::string& key, bool positive)
{
    if (static_cast<int>(v.size()) != k) {
        fail(key, "expected " + std::to_string(k) + " entries, got " + std::to_string(v.size()));
    }
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0 || (positive && x == 0.0)) {
            fail(key, positive ? "entries must be finite and > 0" : "entries must be finite and >= 0");
        }
    }
}

}  // namespace

int ScenarioConfig::pilot_slot_of(int k) const
{
    for (std::size_t p = 0; p < pilot_slots.size(); ++p) {
        if (std::find(pilot_slots[p].begin(), pilot_slots[p].end(), k) != pilot_slots[p].end()) {
            return static_cast<int>(p) + 1;
        }
    }
    throw ConfigError("UE " + std::to_string(k) + " has no pilot slot");
}

std::vector<std::vector<int>> orthogonal_pilots(int num_ues, int pilot_len)
{
    std::vector<std::vector<int>> slots(static_cast<std::size_t>(std::max(pilot_len, 0)));
    for (int k = 0; k < num_ues && k < pilot_len; ++k) {
        slots[static_cast<std::size_t>(k)].push_back(k);
    }
    return slots;
}

double kmh_to_mps(double kmh) { return kmh / 3.6; }
double mps_to_kmh(double mps) { return mps * 3.6; }

void set_uniform_speed(ScenarioConfig& cfg, double speed_mps)
{
    cfg.mean_speed_mps.assign(static_cast<std::size_t>(cfg.num_ues), speed_mps);
}

void fill_defaults(ScenarioConfig& cfg, double snr_db, double speed_mps)
{
    const auto k = static_cast<std::size_t>(std::max(cfg.num_ues, 0));
    const double energy = cfg.noise_power * from_db(snr_db);
    if (cfg.pilot_energy.empty()) cfg.pilot_energy.assign(k, energy);
    if (cfg.data_energy.empty()) cfg.data_energy.assign(k, energy);
    if (cfg.mean_speed_mps.empty()) cfg.mean_speed_mps.assign(k, speed_mps);
    if (cfg.pilot_slots.empty()) cfg.pilot_slots = orthogonal_pilots(cfg.num_ues, cfg.pilot_len);
}

void validate(const ScenarioConfig& cfg)
{
    if (cfg.num_aps < 1) fail("num_aps", "must be >= 1");
    if (cfg.antennas_per_ap < 1) fail("antennas_per_ap", "must be >= 1");
    if (cfg.num_ues < 1) fail("num_ues", "must be >= 1");
    if (!(cfg.area_side > 0.0)) fail("area_side", "must be > 0");
    if (!(cfg.unit_to_meters > 0.0)) fail("unit_to_meters", "must be > 0");
    if (!(cfg.carrier_hz > 0.0)) fail("carrier_hz", "must be > 0");
    if (!(cfg.bandwidth_hz > 0.0)) fail("bandwidth_hz", "must be > 0");
    if (cfg.pilot_len < 1) fail("pilot_len", "must be >= 1");
    if (cfg.frame_len <= cfg.pilot_len) fail("frame_len", "must exceed pilot_len");
    if (!(cfg.noise_power > 0.0) || !std::isfinite(cfg.noise_power)) fail("noise_power", "must be finite and > 0");
    if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0)) fail("delta", "must lie in [0, 1]");
    check_per_ue(cfg.pilot_energy, cfg.num_ues, "pilot_energy", false);
    check_per_ue(cfg.data_energy, cfg.num_ues, "data_energy", false);
    check_per_ue(cfg.mean_speed_mps, cfg.num_ues, "mean_speed_mps", false);

    const auto& pl = cfg.pathloss;
    if (pl.exponents.empty()) fail("pathloss_exponents", "slope table must not be empty");
    if (pl.thresholds.size() + 1 != pl.exponents.size()) {
        fail("pathloss_thresholds", "need exactly one threshold fewer than exponents");
    }
    if (!(pl.mu0 > 0.0) || !std::isfinite(pl.mu0)) fail("pathloss_mu0", "must be finite and > 0");
    for (std::size_t i = 0; i < pl.thresholds.size(); ++i) {
        if (!(pl.thresholds[i] > 0.0) || !std::isfinite(pl.thresholds[i])) {
            fail("pathloss_thresholds", "thresholds must be finite and > 0");
        }
        if (i > 0 && !(pl.thresholds[i] > pl.thresholds[i - 1])) {
            fail("pathloss_thresholds", "thresholds must be strictly increasing");
        }
    }
    for (double e : pl.exponents) {
        if (!std::isfinite(e)) fail("pathloss_exponents", "exponents must be finite");
    }

    if (static_cast<int>(cfg.pilot_slots.size()) != cfg.pilot_len) {
        fail("pilot_slots", "expected one entry per pilot slot (" + std::to_string(cfg.pilot_len) + ")");
    }
    std::vector<int> seen(static_cast<std::size_t>(cfg.num_ues), 0);
    for (const auto& slot : cfg.pilot_slots) {
        for (int k : slot) {
            if (k < 0 || k >= cfg.num_ues) fail("pilot_slots", "UE index out of range");
            ++seen[static_cast<std::size_t>(k)];
        }
    }
    for (int count : seen) {
        if (count != 1) fail("pilot_slots", "every UE must appear in exactly one slot");
    }
}

double path_loss(const PathLossModel& model, double distance)
{
    if (model.exponents.empty()) {
        throw ConfigError("config key 'pathloss_exponents': slope table must not be empty");
    }
    if (!(distance >= 0.0)) {
        throw std::domain_error("path_loss: distance must be >= 0");
    }
    double mu = model.mu0;
    std::size_t seg = 0;
    // A distance equal to a threshold belongs to the segment above it.
    while (seg < model.thresholds.size() && distance >= model.thresholds[seg]) {
        mu *= std::pow(model.thresholds[seg], model.exponents[seg + 1] - model.exponents[seg]);
        ++seg;
    }
    return mu * std::pow(distance, -model.exponents[seg]);
}

double path_loss(const ScenarioConfig& cfg, double distance) { return path_loss(cfg.pathloss, distance); }

Deployment make_deployment(const ScenarioConfig& cfg, std::vector<Complex> ap_pos,
                           std::vector<Complex> ue_pos, const RMatrix& speed_draws)
{
    const auto m_count = static_cast<Eigen::Index>(ap_pos.size());
    const auto k_count = static_cast<Eigen::Index>(ue_pos.size());
    if (speed_draws.rows() != m_count || speed_draws.cols() != k_count) {
        throw std::invalid_argument("make_deployment: speed_draws must be M x K");
    }
    Deployment dep;
    dep.beta.resize(m_count, k_count);
    dep.v_rel.resize(m_count, k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const double vk = cfg.mean_speed_mps.at(static_cast<std::size_t>(k));
        for (Eigen::Index m = 0; m < m_count; ++m) {
            dep.beta(m, k) = path_loss(cfg, std::abs(ap_pos[m] - ue_pos[k]));
            dep.v_rel(m, k) = vk * (1.0 + cfg.delta * (2.0 * speed_draws(m, k) - 1.0));
        }
    }
    dep.ap_pos = std::move(ap_pos);
    dep.ue_pos = std::move(ue_pos);
    return dep;
}

Deployment drop_uniform(const ScenarioConfig& cfg, RngStream& rng)
{
    const double side = cfg.area_side;
    std::vector<Complex> ue(static_cast<std::size_t>(cfg.num_ues));
    for (auto& p : ue) {
        const double x = rng.uniform(0.0, side);
        const double y = rng.uniform(0.0, side);
        p = {x, y};
    }
    std::vector<Complex> ap(static_cast<std::size_t>(cfg.num_aps));
    if (cfg.ap_layout == ApLayout::Center) {
        std::fill(ap.begin(), ap.end(), Complex(side / 2.0, side / 2.0));
    } else {
        for (auto& p : ap) {
            const double x = rng.uniform(0.0, side);
            const double y = rng.uniform(0.0, side);
            p = {x, y};
        }
    }
    RMatrix draws(cfg.num_aps, cfg.num_ues);
    for (Eigen::Index k = 0; k < draws.cols(); ++k) {
        for (Eigen::Index m = 0; m < draws.rows(); ++m) {
            draws(m, k) = rng.uniform();
        }
    }
    return make_deployment(cfg, std::move(ap), std::move(ue), draws);
}

CorrelationProfile::CorrelationProfile(const ScenarioConfig& cfg, const Deployment& dep)
    : v_rel_(dep.v_rel), carrier_hz_(cfg.carrier_hz), sampling_interval_(cfg.sampling_interval())
{
}

double CorrelationProfile::rho(int m, int k, long lag) const
{
    const double arg = 2.0 * M_PI * doppler_hz(m, k) * sampling_interval_ * static_cast<double>(std::labs(lag));
    return bessel_j0(arg);
}

RMatrix CorrelationProfile::rho_matrix(long lag) const
{
    RMatrix out(v_rel_.rows(), v_rel_.cols());
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        for (Eigen::Index m = 0; m < out.rows(); ++m) {
            out(m, k) = rho(static_cast<int>(m), static_cast<int>(k), lag);
        }
    }
    return out;
}

double correlation(const ScenarioConfig& cfg, const Deployment& dep, int m, int k, long lag)
{
    return CorrelationProfile(cfg, dep).rho(m, k, lag);
}

}  // namespace cfaging
