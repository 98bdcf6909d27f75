#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace cfaging;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("cfaging_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string error_of(const nlohmann::json& j)
{
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

nlohmann::json minimal() { return {{"pathloss_exponents", {0.0, 3.0}}, {"pathloss_thresholds", {0.1}}}; }

MonteCarloPlan small_plan()
{
    const Preset desk = make_preset(Scale::Desk);
    MonteCarloPlan plan = desk.plan;
    plan.drops = 2;
    plan.trials = 2;
    return plan;
}

}  // namespace

TEST_CASE("full-scale defaults file")
{
    const ScenarioConfig cfg = load_config(fs::path(CFAGING_SOURCE_DIR) / "configs" / "paper.json");
    CHECK(cfg.num_ues == 16);
    CHECK(cfg.num_aps == 256);
    CHECK(cfg.antennas_per_ap == 1);
    CHECK(cfg.frame_len == 1024);
    CHECK(cfg.bandwidth_hz == 5e6);
    CHECK(cfg.carrier_hz == 5e9);
    CHECK(cfg.pilot_len == 16);
    for (double e : cfg.data_energy) CHECK(to_db(e / cfg.noise_power) == doctest::Approx(20.0));
    for (double e : cfg.pilot_energy) CHECK(to_db(e / cfg.noise_power) == doctest::Approx(20.0));
    CHECK(cfg.mean_speed_mps[0] == doctest::Approx(kmh_to_mps(30.0)));
    ScenarioConfig preset = make_preset(Scale::Paper).cfg;
    set_uniform_speed(preset, kmh_to_mps(30.0));
    CHECK(cfg == preset);

    const ScenarioConfig desk = load_config(fs::path(CFAGING_SOURCE_DIR) / "configs" / "desk.json");
    CHECK(desk.num_aps == 32);
    CHECK(desk.num_ues == 8);
    const MonteCarloPlan plan = load_plan(fs::path(CFAGING_SOURCE_DIR) / "configs" / "desk.json", {});
    CHECK(plan.probe_times == std::vector<int>{9, 16, 32, 64, 128, 256});
}

TEST_CASE("config rejection")
{
    CHECK(error_of(minimal()).empty());

    auto j = minimal();
    j["delta"] = 1.5;
    CHECK(error_of(j).find("'delta'") != std::string::npos);

    j = minimal();
    j.erase("pathloss_exponents");
    CHECK(error_of(j).find("'pathloss_exponents'") != std::string::npos);

    j = minimal();
    j["num_antennas"] = 4;
    CHECK(error_of(j).find("'num_antennas'") != std::string::npos);

    j = minimal();
    j["num_aps"] = "many";
    CHECK(error_of(j).find("'num_aps'") != std::string::npos);

    j = minimal();
    j["ap_layout"] = "ring";
    CHECK(error_of(j).find("'ap_layout'") != std::string::npos);

    j = minimal();
    j["mean_speed_kmh"] = 10.0;
    j["mean_speed_mps"] = 10.0;
    CHECK(error_of(j).find("'mean_speed_kmh'") != std::string::npos);

    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("config JSON round trip")
{
    ScenarioConfig cfg = fixtures::small_config(7, 2, 3, 5, 100);
    cfg.delta = 0.25;
    cfg.pilot_energy = {1.0, 2.0, 3.0};
    cfg.mean_speed_mps = {0.0, 12.5, 30.0};
    cfg.pathloss = {0.5, {0.0, 2.0, 3.5}, {0.01, 0.2}};
    cfg.pilot_slots = {{0, 2}, {1}, {}, {}, {}};
    cfg.ap_layout = ApLayout::Center;
    const ScenarioConfig back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
    CHECK(back == cfg);

    DeOptions o;
    o.epsilon = EpsilonReading::PerAp;
    o.dotted_solve = DottedSolve::Literal;
    const DeOptions ob = de_options_from_json(de_options_to_json(o));
    CHECK(ob.epsilon == o.epsilon);
    CHECK(ob.dotted_solve == o.dotted_solve);
    CHECK(ob.dotted_fixed_point == o.dotted_fixed_point);
}

TEST_CASE("CSV layout")
{
    Preset desk = make_preset(Scale::Desk);
    const ExperimentResult r = run_system("cf", desk.cfg, small_plan());
    const std::string csv = to_csv(r);
    std::stringstream ss(csv);
    std::string line;
    int rows = 0;
    while (std::getline(ss, line)) {
        CHECK(line.find('\r') == std::string::npos);
        CHECK(std::count(line.begin(), line.end(), ',') + 1 == 2 + desk.cfg.num_ues);
        if (rows == 0) CHECK(line.rfind("time_index,ue0_sinr_db,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 1 + 6);
    CHECK(csv.back() == '\n');
}

TEST_CASE("emit writes a sidecar that regenerates the result")
{
    Preset desk = make_preset(Scale::Desk);
    set_uniform_speed(desk.cfg, kmh_to_mps(100.0));
    ResultBundle b{"unit", {}};
    b.results.emplace_back("unit_cf", run_system("cf", desk.cfg, small_plan()));
    b.results.emplace_back("unit_de", run_system("detequiv", desk.cfg, small_plan()));
    const fs::path dir = scratch_dir("emit");
    const auto files = emit(b, dir);
    CHECK(files.size() == 4);
    for (const auto& name : {"unit_cf", "unit_de"}) {
        const auto sidecar = nlohmann::json::parse(slurp(dir / (std::string(name) + ".json")));
        CHECK(config_from_json(sidecar.at("config")) == desk.cfg);
        CHECK(sidecar.at("flagged_points").empty());
        CHECK(to_csv(regenerate(sidecar, 2)) == slurp(dir / (std::string(name) + ".csv")));
    }
    fs::remove_all(dir);
}

TEST_CASE("emit reports the failing path")
{
    const fs::path blocker = scratch_dir("blocker");
    std::ofstream(blocker) << "x";
    ResultBundle b{"unit", {}};
    try {
        emit(b, blocker / "sub");
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(blocker.string()) != std::string::npos);
    }
    fs::remove(blocker);
}

TEST_CASE("non-finite points are flagged")
{
    ExperimentResult r;
    r.axis = {5, 6};
    r.sinr = RMatrix::Ones(2, 2);
    r.sinr(1, 0) = std::nan("");
    const fs::path dir = scratch_dir("flag");
    emit({"unit", {{"flagged", r}}}, dir);
    const auto sidecar = nlohmann::json::parse(slurp(dir / "flagged.json"));
    REQUIRE(sidecar.at("flagged_points").size() == 1);
    CHECK(sidecar["flagged_points"][0]["ue"] == 0);
    CHECK(slurp(dir / "flagged.csv").find("nan") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("time-sweep experiment requires equal aging rates")
{
    Preset desk = make_preset(Scale::Desk);
    desk.cfg.delta = 0.5;
    CHECK_THROWS_AS(experiment_fig1(desk.cfg, small_plan()), ConfigError);
}

TEST_CASE("delta experiment")
{
    Preset desk = make_preset(Scale::Desk);
    MonteCarloPlan plan = small_plan();
    plan.probe_times = {9, 256};
    const ResultBundle b = experiment_fig2(desk.cfg, plan, {8, 32}, {0.0, 0.5});
    CHECK(b.results.size() == 8);
    const auto& r = b.at("fig2_cf_de_M32_delta0.5");
    CHECK(r.metadata["config"]["num_aps"] == 32);
    CHECK(r.metadata["config"]["delta"] == 0.5);
    CHECK(r.metadata["config"]["mean_speed_mps"][0].get<double>() == doctest::Approx(kmh_to_mps(300.0)));
    for (const auto& [name, res] : b.results) {
        CHECK(res.sinr.cols() == desk.cfg.num_ues);
        CHECK(res.sinr.allFinite());
    }
    plan.threads = 3;
    const ResultBundle again = experiment_fig2(desk.cfg, plan, {8, 32}, {0.0, 0.5});
    for (std::size_t i = 0; i < b.results.size(); ++i) {
        CHECK(to_csv(b.results[i].second) == to_csv(again.results[i].second));
    }
}

TEST_CASE("speed sweep experiment")
{
    Preset desk = make_preset(Scale::Desk);
    const ResultBundle b = experiment_fig3(desk.cfg, small_plan(), {0.0, 250.0, 500.0}, {0.0, 0.5});
    CHECK(b.results.size() == 5);
    for (const auto& [name, r] : b.results) {
        CHECK(r.axis_name == "velocity_kmh");
        CHECK(r.axis == std::vector<double>{0.0, 250.0, 500.0});
        CHECK(to_csv(r).rfind("velocity_kmh,", 0) == 0);
    }
    const auto& de = b.at("fig3_cf_de_delta0");
    CHECK(de.mean_sinr(0) > de.mean_sinr(1));
    const fs::path dir = scratch_dir("fig3");
    emit(b, dir);
    const auto sidecar = nlohmann::json::parse(slurp(dir / "fig3_cellular.json"));
    CHECK(to_csv(regenerate(sidecar)) == slurp(dir / "fig3_cellular.csv"));
    fs::remove_all(dir);
}

TEST_CASE("desk time-sweep bundle matches the golden files")
{
    const Preset desk = make_preset(Scale::Desk);
    MonteCarloPlan plan = desk.plan;
    plan.seed = 7;
    const fs::path golden = fs::path(CFAGING_SOURCE_DIR) / "tests" / "golden" / "desk_fig1";
    const ResultBundle b = experiment_fig1(desk.cfg, plan);
    CHECK(b.results.size() == 12);
    for (const auto& [name, r] : b.results) {
        const fs::path file = golden / (name + ".csv");
        REQUIRE_MESSAGE(fs::exists(file), file.string());
        CHECK_MESSAGE(to_csv(r) == slurp(file), name);
    }
}
