#pragma once

#include "cfaging/harness.hpp"

#include <cmath>
#include <vector>

namespace fixtures {

using namespace cfaging;

/// J0 by its power series in long double, 50 terms.
inline double j0_series(double x)
{
    long double term = 1.0L;
    long double sum = 1.0L;
    const long double q = static_cast<long double>(x) * x / 4.0L;
    for (int k = 1; k < 50; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
    }
    return static_cast<double>(sum);
}

/// Small config with every per-UE vector filled.
inline ScenarioConfig small_config(int m, int n, int k, int pilot_len = 4, int frame_len = 64)
{
    ScenarioConfig cfg;
    cfg.num_aps = m;
    cfg.antennas_per_ap = n;
    cfg.num_ues = k;
    cfg.pilot_len = pilot_len;
    cfg.frame_len = frame_len;
    fill_defaults(cfg);
    return cfg;
}

/// Speed giving a Jakes argument of x per unit lag.
inline double speed_for_argument(const ScenarioConfig& cfg, double x)
{
    return x * kSpeedOfLight / (2.0 * M_PI * cfg.carrier_hz * cfg.sampling_interval());
}

inline Deployment fixed_deployment(const ScenarioConfig& cfg, const std::vector<Complex>& aps,
                                   const std::vector<Complex>& ues)
{
    return make_deployment(cfg, aps, ues, RMatrix::Constant(cfg.num_aps, cfg.num_ues, 0.5));
}

/// Deployment with explicit gains; positions are placeholders.
inline Deployment gain_deployment(const ScenarioConfig& cfg, const RMatrix& beta)
{
    Deployment dep = fixed_deployment(cfg, std::vector<Complex>(static_cast<std::size_t>(cfg.num_aps)),
                                      std::vector<Complex>(static_cast<std::size_t>(cfg.num_ues)));
    dep.beta = beta;
    return dep;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fixtures
