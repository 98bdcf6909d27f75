#pragma once

#include "cfaging/numerics.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cfaging {

/// Averaged per-user SINRs along one axis (time index or speed).
/// sinr holds linear values, one row per axis point and one column per UE.
struct ExperimentResult {
    std::string engine;
    std::string axis_name = "time_index";
    std::vector<double> axis;
    RMatrix sinr;
    nlohmann::json metadata = nlohmann::json::object();

    double mean_sinr(Eigen::Index row) const { return sinr.row(row).mean(); }
    double mean_sinr_db(Eigen::Index row) const { return to_db(mean_sinr(row)); }
    std::vector<double> mean_sinr_db() const
    {
        std::vector<double> out;
        for (Eigen::Index i = 0; i < sinr.rows(); ++i) out.push_back(mean_sinr_db(i));
        return out;
    }
};

struct MonteCarloPlan {
    int drops = 10;
    int trials = 20;
    std::vector<int> probe_times;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Stream ids: spatial drop d uses d << 32, trial t of drop d uses
/// (d << 32) | (t + 1).
inline std::uint64_t drop_stream(int drop) { return static_cast<std::uint64_t>(drop) << 32; }
inline std::uint64_t trial_stream(int drop, int trial)
{
    return drop_stream(drop) | static_cast<std::uint64_t>(trial + 1);
}

/// {P + 1} followed by every power of two in (P + 1, T], plus T.
std::vector<int> default_probe_times(int pilot_len, int frame_len);

}  // namespace cfaging
