#pragma once

#include "cfaging/numerics.hpp"

#include <string>
#include <vector>

namespace cfaging {

inline constexpr double kSpeedOfLight = 299792458.0;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Multi-slope path loss. Segment l covers [thresholds[l-1], thresholds[l]);
/// the last segment extends to infinity. Normalizers past the first are
/// chained so the gain is continuous at every threshold.
struct PathLossModel {
    double mu0 = 1.0;
    std::vector<double> exponents{0.0, 3.0};
    std::vector<double> thresholds{0.1};

    bool operator==(const PathLossModel&) const = default;
};

enum class ApLayout { Uniform, Center };

struct ScenarioConfig {
    int num_aps = 256;          // M
    int antennas_per_ap = 1;    // N
    int num_ues = 16;           // K
    double area_side = 1.0;     // map units
    double unit_to_meters = 1000.0;
    double carrier_hz = 5e9;
    double bandwidth_hz = 5e6;  // sampling rate 1/T_s
    int frame_len = 1024;       // T
    int pilot_len = 16;         // P
    std::vector<double> pilot_energy;  // per UE, linear
    std::vector<double> data_energy;   // per UE, linear
    double noise_power = 1.0;
    std::vector<double> mean_speed_mps;  // per UE
    double delta = 0.0;
    PathLossModel pathloss;
    /// pilot_slots[p] lists the UEs transmitting in slot p + 1.
    std::vector<std::vector<int>> pilot_slots;
    ApLayout ap_layout = ApLayout::Uniform;

    bool operator==(const ScenarioConfig&) const = default;

    double sampling_interval() const { return 1.0 / bandwidth_hz; }
    /// Slot (1-based) carrying UE k's pilot.
    int pilot_slot_of(int k) const;
};

/// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& cfg);

/// Fill per-UE vectors and pilot slots that were left empty.
/// snr_db sets both pilot and data energy relative to noise_power.
void fill_defaults(ScenarioConfig& cfg, double snr_db = 20.0, double speed_mps = 0.0);

/// Orthogonal singleton pilots in UE order, padded with empty slots up to P.
std::vector<std::vector<int>> orthogonal_pilots(int num_ues, int pilot_len);

double kmh_to_mps(double kmh);
double mps_to_kmh(double mps);

void set_uniform_speed(ScenarioConfig& cfg, double speed_mps);

struct Deployment {
    std::vector<Complex> ap_pos;  // M
    std::vector<Complex> ue_pos;  // K
    RMatrix beta;                 // M x K
    RMatrix v_rel;                // M x K, m/s

    int num_aps() const { return static_cast<int>(beta.rows()); }
    int num_ues() const { return static_cast<int>(beta.cols()); }
};

double path_loss(const PathLossModel& model, double distance);
double path_loss(const ScenarioConfig& cfg, double distance);

/// Positions, gains and relative speeds for one spatial realization.
/// Draw order: UE positions, AP positions (uniform layout only), then one
/// uniform per (m, k) for the relative speed. UE positions therefore match
/// across systems drawn from the same stream.
Deployment drop_uniform(const ScenarioConfig& cfg, RngStream& rng);

/// Build gains and speeds for explicit positions; speed_draws holds the
/// M x K uniforms in [0, 1] mapped onto [(1 - delta) v_k, (1 + delta) v_k].
Deployment make_deployment(const ScenarioConfig& cfg, std::vector<Complex> ap_pos,
                           std::vector<Complex> ue_pos, const RMatrix& speed_draws);

/// Jakes temporal correlation per (AP, UE) pair.
class CorrelationProfile {
public:
    CorrelationProfile(const ScenarioConfig& cfg, const Deployment& dep);

    int num_aps() const { return static_cast<int>(v_rel_.rows()); }
    int num_ues() const { return static_cast<int>(v_rel_.cols()); }

    double doppler_hz(int m, int k) const { return v_rel_(m, k) * carrier_hz_ / kSpeedOfLight; }
    double rho(int m, int k, long lag) const;
    double rho_bar(int m, int k, long lag) const { return complement(rho(m, k, lag)); }
    /// M x K matrix of rho at one lag.
    RMatrix rho_matrix(long lag) const;

private:
    RMatrix v_rel_;
    double carrier_hz_;
    double sampling_interval_;
};

double correlation(const ScenarioConfig& cfg, const Deployment& dep, int m, int k, long lag);

}  // namespace cfaging
