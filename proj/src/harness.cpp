#include "cfaging/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cfaging {

using nlohmann::json;

Scale parse_scale(const std::string& name)
{
    if (name == "desk") return Scale::Desk;
    if (name == "paper") return Scale::Paper;
    throw ConfigError("unknown scale '" + name + "' (expected desk or paper)");
}

std::string to_string(Scale scale) { return scale == Scale::Desk ? "desk" : "paper"; }

Preset make_preset(Scale scale)
{
    Preset p;
    if (scale == Scale::Desk) {
        p.cfg.num_aps = 32;
        p.cfg.num_ues = 8;
        p.cfg.frame_len = 256;
        p.cfg.pilot_len = 8;
        p.plan.drops = 10;
        p.plan.trials = 20;
        p.plan.probe_times = {9, 16, 32, 64, 128, 256};
    } else {
        p.plan.drops = 100;
        p.plan.trials = 100;
        p.plan.probe_times = default_probe_times(p.cfg.pilot_len, p.cfg.frame_len);
    }
    fill_defaults(p.cfg);
    return p;
}

namespace {

const std::set<std::string>& scenario_keys()
{
    static const std::set<std::string> keys{
        "num_aps",       "antennas_per_ap", "num_ues",        "area_side",          "unit_to_meters",
        "carrier_hz",    "bandwidth_hz",    "frame_len",      "pilot_len",          "pilot_energy",
        "data_energy",   "snr_db",          "noise_power",    "mean_speed_mps",     "mean_speed_kmh",
        "delta",         "pathloss_mu0",    "pathloss_exponents", "pathloss_thresholds", "pilot_slots",
        "ap_layout"};
    return keys;
}

const std::set<std::string>& plan_keys()
{
    static const std::set<std::string> keys{"drops", "trials", "probe_times"};
    return keys;
}

const std::set<std::string>& de_keys()
{
    static const std::set<std::string> keys{"de_tol", "de_max_iterations", "de_dotted_fixed_point",
                                            "de_dotted_solve", "de_epsilon"};
    return keys;
}

template <typename T>
T get_as(const json& j, const std::string& key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "': wrong type");
    }
}

std::vector<double> per_ue_values(const json& j, const std::string& key, int k)
{
    const json& v = j.at(key);
    if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(std::max(k, 0)), v.get<double>());
    return get_as<std::vector<double>>(j, key);
}

void reject_unknown(const json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        if (!scenario_keys().count(key) && !plan_keys().count(key) && !de_keys().count(key)) {
            throw ConfigError("config key '" + key + "': unknown key");
        }
    }
}

}  // namespace

json read_config_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
}

ScenarioConfig config_from_json(const json& j)
{
    reject_unknown(j);
    ScenarioConfig cfg;
    if (j.contains("num_aps")) cfg.num_aps = get_as<int>(j, "num_aps");
    if (j.contains("antennas_per_ap")) cfg.antennas_per_ap = get_as<int>(j, "antennas_per_ap");
    if (j.contains("num_ues")) cfg.num_ues = get_as<int>(j, "num_ues");
    if (j.contains("area_side")) cfg.area_side = get_as<double>(j, "area_side");
    if (j.contains("unit_to_meters")) cfg.unit_to_meters = get_as<double>(j, "unit_to_meters");
    if (j.contains("carrier_hz")) cfg.carrier_hz = get_as<double>(j, "carrier_hz");
    if (j.contains("bandwidth_hz")) cfg.bandwidth_hz = get_as<double>(j, "bandwidth_hz");
    if (j.contains("frame_len")) cfg.frame_len = get_as<int>(j, "frame_len");
    if (j.contains("pilot_len")) cfg.pilot_len = get_as<int>(j, "pilot_len");
    if (j.contains("noise_power")) cfg.noise_power = get_as<double>(j, "noise_power");
    if (j.contains("delta")) cfg.delta = get_as<double>(j, "delta");

    if (!j.contains("pathloss_exponents")) throw ConfigError("config key 'pathloss_exponents': required");
    if (!j.contains("pathloss_thresholds")) throw ConfigError("config key 'pathloss_thresholds': required");
    cfg.pathloss.exponents = get_as<std::vector<double>>(j, "pathloss_exponents");
    cfg.pathloss.thresholds = get_as<std::vector<double>>(j, "pathloss_thresholds");
    if (j.contains("pathloss_mu0")) cfg.pathloss.mu0 = get_as<double>(j, "pathloss_mu0");

    if (j.contains("pilot_energy")) cfg.pilot_energy = per_ue_values(j, "pilot_energy", cfg.num_ues);
    if (j.contains("data_energy")) cfg.data_energy = per_ue_values(j, "data_energy", cfg.num_ues);
    if (j.contains("mean_speed_mps") && j.contains("mean_speed_kmh")) {
        throw ConfigError("config key 'mean_speed_kmh': conflicts with mean_speed_mps");
    }
    if (j.contains("mean_speed_mps")) cfg.mean_speed_mps = per_ue_values(j, "mean_speed_mps", cfg.num_ues);
    if (j.contains("mean_speed_kmh")) {
        for (double v : per_ue_values(j, "mean_speed_kmh", cfg.num_ues)) cfg.mean_speed_mps.push_back(kmh_to_mps(v));
    }
    if (j.contains("pilot_slots")) cfg.pilot_slots = get_as<std::vector<std::vector<int>>>(j, "pilot_slots");
    if (j.contains("ap_layout")) {
        const auto layout = get_as<std::string>(j, "ap_layout");
        if (layout == "uniform") {
            cfg.ap_layout = ApLayout::Uniform;
        } else if (layout == "center") {
            cfg.ap_layout = ApLayout::Center;
        } else {
            throw ConfigError("config key 'ap_layout': expected uniform or center");
        }
    }
    const double snr_db = j.contains("snr_db") ? get_as<double>(j, "snr_db") : 20.0;
    fill_defaults(cfg, snr_db);
    validate(cfg);
    return cfg;
}

json config_to_json(const ScenarioConfig& cfg)
{
    return {{"num_aps", cfg.num_aps},
            {"antennas_per_ap", cfg.antennas_per_ap},
            {"num_ues", cfg.num_ues},
            {"area_side", cfg.area_side},
            {"unit_to_meters", cfg.unit_to_meters},
            {"carrier_hz", cfg.carrier_hz},
            {"bandwidth_hz", cfg.bandwidth_hz},
            {"frame_len", cfg.frame_len},
            {"pilot_len", cfg.pilot_len},
            {"pilot_energy", cfg.pilot_energy},
            {"data_energy", cfg.data_energy},
            {"noise_power", cfg.noise_power},
            {"mean_speed_mps", cfg.mean_speed_mps},
            {"delta", cfg.delta},
            {"pathloss_mu0", cfg.pathloss.mu0},
            {"pathloss_exponents", cfg.pathloss.exponents},
            {"pathloss_thresholds", cfg.pathloss.thresholds},
            {"pilot_slots", cfg.pilot_slots},
            {"ap_layout", cfg.ap_layout == ApLayout::Center ? "center" : "uniform"}};
}

ScenarioConfig load_config(const std::filesystem::path& path) { return config_from_json(read_config_json(path)); }

MonteCarloPlan load_plan(const std::filesystem::path& path, MonteCarloPlan base)
{
    return plan_from_json(read_config_json(path), std::move(base));
}

MonteCarloPlan plan_from_json(const json& j, MonteCarloPlan base)
{
    reject_unknown(j);
    if (j.contains("drops")) base.drops = get_as<int>(j, "drops");
    if (j.contains("trials")) base.trials = get_as<int>(j, "trials");
    if (j.contains("probe_times")) base.probe_times = get_as<std::vector<int>>(j, "probe_times");
    if (base.drops < 1) throw ConfigError("config key 'drops': must be >= 1");
    if (base.trials < 1) throw ConfigError("config key 'trials': must be >= 1");
    return base;
}

DeOptions de_options_from_json(const json& j)
{
    DeOptions o;
    if (j.contains("de_tol")) o.tol = get_as<double>(j, "de_tol");
    if (j.contains("de_max_iterations")) o.max_iterations = get_as<int>(j, "de_max_iterations");
    if (j.contains("de_dotted_fixed_point")) {
        const auto v = get_as<std::string>(j, "de_dotted_fixed_point");
        if (v == "leave_two_out") o.dotted_fixed_point = DottedFixedPoint::LeaveTwoOut;
        else if (v == "leave_one_out") o.dotted_fixed_point = DottedFixedPoint::ReuseLeaveOneOut;
        else throw ConfigError("config key 'de_dotted_fixed_point': expected leave_two_out or leave_one_out");
    }
    if (j.contains("de_dotted_solve")) {
        const auto v = get_as<std::string>(j, "de_dotted_solve");
        if (v == "inverse") o.dotted_solve = DottedSolve::Inverse;
        else if (v == "literal") o.dotted_solve = DottedSolve::Literal;
        else throw ConfigError("config key 'de_dotted_solve': expected inverse or literal");
    }
    if (j.contains("de_epsilon")) {
        const auto v = get_as<std::string>(j, "de_epsilon");
        if (v == "aggregate") o.epsilon = EpsilonReading::Aggregate;
        else if (v == "per_ap") o.epsilon = EpsilonReading::PerAp;
        else throw ConfigError("config key 'de_epsilon': expected aggregate or per_ap");
    }
    return o;
}

json de_options_to_json(const DeOptions& o)
{
    return {{"de_tol", o.tol},
            {"de_max_iterations", o.max_iterations},
            {"de_dotted_fixed_point",
             o.dotted_fixed_point == DottedFixedPoint::LeaveTwoOut ? "leave_two_out" : "leave_one_out"},
            {"de_dotted_solve", o.dotted_solve == DottedSolve::Inverse ? "inverse" : "literal"},
            {"de_epsilon", o.epsilon == EpsilonReading::Aggregate ? "aggregate" : "per_ap"}};
}

const ExperimentResult& ResultBundle::at(const std::string& name) const
{
    for (const auto& [n, r] : results) {
        if (n == name) return r;
    }
    throw std::out_of_range("no result named " + name + " in bundle " + experiment);
}

void attach_provenance(ExperimentResult& result, const std::string& system, const ScenarioConfig& cfg,
                       const MonteCarloPlan& plan, const DeOptions& options)
{
    result.metadata["system"] = system;
    result.metadata["config"] = config_to_json(cfg);
    result.metadata["de_options"] = de_options_to_json(options);
    result.metadata["plan"] = {{"drops", plan.drops},
                               {"trials", plan.trials},
                               {"seed", plan.seed},
                               {"probe_times", plan.probe_times}};
}

ExperimentResult run_system(const std::string& system, const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                            const DeOptions& options)
{
    ExperimentResult r;
    if (system == "cf" || system == "mc") {
        r = run_monte_carlo(cfg, plan);
    } else if (system == "detequiv" || system == "de") {
        r = run_det_equiv(cfg, plan, options);
    } else if (system == "cellular") {
        r = run_cellular_mc(cfg, plan);
    } else if (system == "smallcell") {
        r = run_smallcell_mc(cfg, plan);
    } else {
        throw ConfigError("unknown system '" + system + "' (expected cf, detequiv, cellular or smallcell)");
    }
    attach_provenance(r, system, cfg, plan, options);
    return r;
}

namespace {

std::string number_label(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

}  // namespace

ResultBundle experiment_fig1(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             const std::vector<double>& speeds_kmh, const DeOptions& options)
{
    if (cfg.delta != 0.0) {
        throw ConfigError("config key 'delta': the time-sweep comparison requires delta = 0");
    }
    ResultBundle bundle{"fig1", {}};
    for (double v : speeds_kmh) {
        ScenarioConfig c = cfg;
        set_uniform_speed(c, kmh_to_mps(v));
        const std::string tag = "_v" + number_label(v);
        bundle.results.emplace_back("fig1_cf_mc" + tag, run_system("cf", c, plan, options));
        bundle.results.emplace_back("fig1_cf_de" + tag, run_system("detequiv", c, plan, options));
        bundle.results.emplace_back("fig1_cellular" + tag, run_system("cellular", c, plan, options));
        bundle.results.emplace_back("fig1_smallcell" + tag, run_system("smallcell", c, plan, options));
    }
    return bundle;
}

ResultBundle experiment_fig2(const ScenarioConfig& cfg, const MonteCarloPlan& plan, std::vector<int> ap_counts,
                             const std::vector<double>& deltas, const DeOptions& options)
{
    if (ap_counts.empty()) {
        ap_counts = {std::max(1, cfg.num_aps / 4), std::max(1, cfg.num_aps / 2), cfg.num_aps};
    }
    ResultBundle bundle{"fig2", {}};
    for (int m : ap_counts) {
        for (double delta : deltas) {
            ScenarioConfig c = cfg;
            c.num_aps = m;
            c.delta = delta;
            set_uniform_speed(c, kmh_to_mps(kFig2SpeedKmh));
            const std::string tag = "_M" + std::to_string(m) + "_delta" + number_label(delta);
            bundle.results.emplace_back("fig2_cf_mc" + tag, run_system("cf", c, plan, options));
            bundle.results.emplace_back("fig2_cf_de" + tag, run_system("detequiv", c, plan, options));
        }
    }
    return bundle;
}

std::vector<double> fig3_speed_grid()
{
    std::vector<double> grid;
    for (int v = 0; v <= 500; v += 50) grid.push_back(v);
    return grid;
}

namespace {

// Runs one system at n = T for each speed and stacks the rows.
ExperimentResult speed_sweep(const std::string& system, const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             const std::vector<double>& speeds_kmh, const DeOptions& options)
{
    MonteCarloPlan p = plan;
    p.probe_times = {cfg.frame_len};
    ExperimentResult out;
    out.axis_name = "velocity_kmh";
    out.sinr.resize(static_cast<Eigen::Index>(speeds_kmh.size()), cfg.num_ues);
    json per_speed = json::array();
    for (std::size_t i = 0; i < speeds_kmh.size(); ++i) {
        ScenarioConfig c = cfg;
        set_uniform_speed(c, kmh_to_mps(speeds_kmh[i]));
        ExperimentResult r = run_system(system, c, p, options);
        out.engine = r.engine;
        out.axis.push_back(speeds_kmh[i]);
        out.sinr.row(static_cast<Eigen::Index>(i)) = r.sinr.row(0);
        for (const char* key : {"config", "plan", "de_options", "system"}) r.metadata.erase(key);
        per_speed.push_back(r.metadata);
    }
    ScenarioConfig echo = cfg;
    set_uniform_speed(echo, 0.0);
    attach_provenance(out, system, echo, p, options);
    out.metadata["engine"] = out.engine;
    out.metadata["per_speed"] = per_speed;
    out.metadata["speeds_kmh"] = speeds_kmh;
    return out;
}

}  // namespace

ResultBundle experiment_fig3(const ScenarioConfig& cfg, const MonteCarloPlan& plan,
                             const std::vector<double>& speeds_kmh, const std::vector<double>& deltas,
                             const DeOptions& options)
{
    ResultBundle bundle{"fig3", {}};
    ScenarioConfig base = cfg;
    base.delta = 0.0;
    for (double delta : deltas) {
        ScenarioConfig c = cfg;
        c.delta = delta;
        bundle.results.emplace_back("fig3_cf_de_delta" + number_label(delta),
                                    speed_sweep("detequiv", c, plan, speeds_kmh, options));
    }
    bundle.results.emplace_back("fig3_cf_mc_delta0", speed_sweep("cf", base, plan, speeds_kmh, options));
    bundle.results.emplace_back("fig3_cellular", speed_sweep("cellular", base, plan, speeds_kmh, options));
    bundle.results.emplace_back("fig3_smallcell", speed_sweep("smallcell", base, plan, speeds_kmh, options));
    return bundle;
}

ExperimentResult regenerate(const json& sidecar, int threads)
{
    try {
        const ScenarioConfig cfg = config_from_json(sidecar.at("config"));
        const DeOptions options = de_options_from_json(sidecar.at("de_options"));
        const json& pj = sidecar.at("plan");
        MonteCarloPlan plan;
        plan.drops = pj.at("drops").get<int>();
        plan.trials = pj.at("trials").get<int>();
        plan.seed = pj.at("seed").get<std::uint64_t>();
        plan.probe_times = pj.at("probe_times").get<std::vector<int>>();
        plan.threads = threads;
        const auto system = sidecar.at("system").get<std::string>();
        if (sidecar.at("axis_name").get<std::string>() == "velocity_kmh") {
            return speed_sweep(system, cfg, plan, sidecar.at("speeds_kmh").get<std::vector<double>>(), options);
        }
        return run_system(system, cfg, plan, options);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sidecar: ") + e.what());
    }
}

namespace {

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_csv(const ExperimentResult& result)
{
    std::string out = result.axis_name;
    for (Eigen::Index k = 0; k < result.sinr.cols(); ++k) out += ",ue" + std::to_string(k) + "_sinr_db";
    out += ",mean_sinr_db\n";
    for (Eigen::Index i = 0; i < result.sinr.rows(); ++i) {
        out += format_number(result.axis[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < result.sinr.cols(); ++k) out += "," + format_number(to_db(result.sinr(i, k)));
        out += "," + format_number(result.mean_sinr_db(i)) + "\n";
    }
    return out;
}

std::vector<std::filesystem::path> emit(const ResultBundle& bundle, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    for (const auto& [name, result] : bundle.results) {
        const auto csv_path = out_dir / (name + ".csv");
        const auto json_path = out_dir / (name + ".json");

        json flagged = json::array();
        for (Eigen::Index i = 0; i < result.sinr.rows(); ++i) {
            for (Eigen::Index k = 0; k < result.sinr.cols(); ++k) {
                const double v = result.sinr(i, k);
                if (!std::isfinite(v) || !(v > 0.0)) {
                    flagged.push_back({{result.axis_name, result.axis[static_cast<std::size_t>(i)]}, {"ue", k}});
                }
            }
        }
        json sidecar = result.metadata;
        sidecar["experiment"] = bundle.experiment;
        sidecar["name"] = name;
        sidecar["engine"] = result.engine;
        sidecar["axis_name"] = result.axis_name;
        sidecar["axis"] = result.axis;
        sidecar["flagged_points"] = flagged;

        std::ofstream csv(csv_path, std::ios::binary);
        csv << to_csv(result);
        if (!csv) throw std::runtime_error("failed writing " + csv_path.string());
        std::ofstream js(json_path, std::ios::binary);
        js << sidecar.dump(2) << "\n";
        if (!js) throw std::runtime_error("failed writing " + json_path.string());
        written.push_back(csv_path);
        written.push_back(json_path);
    }
    return written;
}

}  // namespace cfaging
