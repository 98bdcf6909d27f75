#include "fixtures.hpp"

#include <doctest.h>

using namespace cfaging;

TEST_CASE("two-slope path loss")
{
    PathLossModel pl;
    CHECK(path_loss(pl, 0.05) == 1.0);
    CHECK(path_loss(pl, 0.2) == doctest::Approx(0.125).epsilon(1e-14));
    const double below = path_loss(pl, std::nextafter(0.1, 0.0));
    const double above = path_loss(pl, std::nextafter(0.1, 1.0));
    CHECK(std::abs(below - above) <= 1e-12);
    CHECK(std::abs(path_loss(pl, 0.1) - 1.0) <= 1e-12);
}

TEST_CASE("three-slope path loss is continuous and chained")
{
    PathLossModel pl{2.0, {0.0, 2.0, 3.5}, {0.01, 0.05}};
    CHECK(path_loss(pl, 0.005) == 2.0);
    const double mu1 = 2.0 * std::pow(0.01, 2.0);
    const double mu2 = mu1 * std::pow(0.05, 1.5);
    CHECK(path_loss(pl, 0.03) == doctest::Approx(mu1 * std::pow(0.03, -2.0)).epsilon(1e-13));
    CHECK(path_loss(pl, 0.5) == doctest::Approx(mu2 * std::pow(0.5, -3.5)).epsilon(1e-13));
    for (double d : {0.01, 0.05}) {
        CHECK(path_loss(pl, std::nextafter(d, 0.0)) == doctest::Approx(path_loss(pl, d)).epsilon(1e-12));
    }
}

TEST_CASE("relative speeds")
{
    ScenarioConfig cfg = fixtures::small_config(10000, 1, 1);
    set_uniform_speed(cfg, 10.0);

    SUBCASE("delta zero collapses to the mean speed")
    {
        RngStream rng(5, 0);
        const Deployment dep = drop_uniform(cfg, rng);
        CHECK((dep.v_rel.array() == 10.0).all());
    }
    SUBCASE("uniform spread keeps the mean")
    {
        cfg.delta = 0.3;
        RngStream rng(5, 0);
        const Deployment dep = drop_uniform(cfg, rng);
        CHECK(dep.v_rel.mean() == doctest::Approx(10.0).epsilon(0.01));
        CHECK(dep.v_rel.minCoeff() >= 7.0);
        CHECK(dep.v_rel.maxCoeff() <= 13.0);
    }
}

TEST_CASE("drop geometry")
{
    ScenarioConfig cfg = fixtures::small_config(20, 1, 5);
    RngStream a(3, drop_stream(2)), b(3, drop_stream(2));
    const Deployment d1 = drop_uniform(cfg, a);
    const Deployment d2 = drop_uniform(cfg, b);
    CHECK(d1.beta == d2.beta);
    for (const auto& p : d1.ap_pos) {
        CHECK(p.real() >= 0.0);
        CHECK(p.real() <= 1.0);
        CHECK(p.imag() >= 0.0);
        CHECK(p.imag() <= 1.0);
    }
    for (int m = 0; m < 20; ++m) {
        for (int k = 0; k < 5; ++k) {
            CHECK(d1.beta(m, k) == path_loss(cfg, std::abs(d1.ap_pos[m] - d1.ue_pos[k])));
        }
    }
    cfg.ap_layout = ApLayout::Center;
    RngStream c(3, drop_stream(2));
    const Deployment d3 = drop_uniform(cfg, c);
    CHECK(d3.ue_pos == d1.ue_pos);
    for (const auto& p : d3.ap_pos) CHECK(p == Complex(0.5, 0.5));
}

TEST_CASE("Jakes correlation")
{
    ScenarioConfig cfg = fixtures::small_config(1, 1, 1);
    cfg.bandwidth_hz = 5e6;
    cfg.carrier_hz = 5e9;
    set_uniform_speed(cfg, kmh_to_mps(100.0));
    const Deployment dep = fixtures::fixed_deployment(cfg, {Complex(0, 0)}, {Complex(0.3, 0)});

    CHECK(correlation(cfg, dep, 0, 0, 0) == 1.0);
    // f_d = 463.2835 Hz, argument 0.59615147291 at lag 1024.
    CHECK(correlation(cfg, dep, 0, 0, 1024) == doctest::Approx(0.913105022706926).epsilon(1e-12));
    CHECK(correlation(cfg, dep, 0, 0, 1024) == doctest::Approx(fixtures::j0_series(0.59615147291)).epsilon(1e-10));
    CHECK(correlation(cfg, dep, 0, 0, -1024) == correlation(cfg, dep, 0, 0, 1024));
    const CorrelationProfile prof(cfg, dep);
    CHECK(prof.doppler_hz(0, 0) == doctest::Approx(463.2835).epsilon(1e-6));

    set_uniform_speed(cfg, 0.0);
    const Deployment still = fixtures::fixed_deployment(cfg, {Complex(0, 0)}, {Complex(0.3, 0)});
    for (long lag : {1L, 100L, 1024L, 100000L}) CHECK(correlation(cfg, still, 0, 0, lag) == 1.0);
}

TEST_CASE("config validation")
{
    ScenarioConfig cfg = fixtures::small_config(4, 1, 2);
    CHECK_NOTHROW(validate(cfg));

    auto rejects = [](ScenarioConfig c, const std::string& key) {
        try {
            validate(c);
        } catch (const ConfigError& e) {
            return std::string(e.what()).find("'" + key + "'") != std::string::npos;
        }
        return false;
    };
    ScenarioConfig c = cfg;
    c.delta = 1.5;
    CHECK(rejects(c, "delta"));
    c = cfg;
    c.delta = -0.1;
    CHECK(rejects(c, "delta"));
    c = cfg;
    c.frame_len = c.pilot_len;
    CHECK(rejects(c, "frame_len"));
    c = cfg;
    c.data_energy.pop_back();
    CHECK(rejects(c, "data_energy"));
    c = cfg;
    c.pilot_slots = {{0, 1}, {1}, {}, {}};
    CHECK(rejects(c, "pilot_slots"));
    c = cfg;
    c.pathloss.thresholds = {0.2, 0.1};
    c.pathloss.exponents = {0.0, 2.0, 3.0};
    CHECK(rejects(c, "pathloss_thresholds"));
}

TEST_CASE("pilot helpers")
{
    const auto slots = orthogonal_pilots(3, 5);
    REQUIRE(slots.size() == 5);
    CHECK(slots[0] == std::vector<int>{0});
    CHECK(slots[2] == std::vector<int>{2});
    CHECK(slots[4].empty());
    ScenarioConfig cfg = fixtures::small_config(2, 1, 3, 5);
    CHECK(cfg.pilot_slot_of(1) == 2);
    CHECK(kmh_to_mps(36.0) == doctest::Approx(10.0));
    CHECK(mps_to_kmh(10.0) == doctest::Approx(36.0));
}
