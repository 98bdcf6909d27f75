#include "cfaging/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace cfaging;

struct CommonArgs {
    std::string config;
    std::uint64_t seed = 1;
    std::string scale = "desk";
    std::string out = "out";
    int threads = 1;
    std::string probe_times;
    int drops = 0;
    int trials = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--config", a.config, "JSON config file (overrides the scale preset)");
    cmd->add_option("--seed", a.seed, "Master seed");
    cmd->add_option("--scale", a.scale, "Preset scale")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--out", a.out, "Output directory");
    cmd->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--probe-times", a.probe_times, "Comma-separated time indices in (P, T]");
    cmd->add_option("--drops", a.drops, "Override the number of spatial drops");
    cmd->add_option("--trials", a.trials, "Override the number of trials per drop");
}

std::vector<int> parse_times(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ConfigError("--probe-times: '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--probe-times: empty list");
    return out;
}

struct Setup {
    ScenarioConfig cfg;
    MonteCarloPlan plan;
    DeOptions de;
};

Setup resolve(const CommonArgs& a)
{
    Preset preset = make_preset(parse_scale(a.scale));
    Setup s{preset.cfg, preset.plan, {}};
    if (!a.config.empty()) {
        const auto j = read_config_json(a.config);
        s.cfg = config_from_json(j);
        s.plan = plan_from_json(j, s.plan);
        s.de = de_options_from_json(j);
        if (!j.contains("probe_times")) s.plan.probe_times = default_probe_times(s.cfg.pilot_len, s.cfg.frame_len);
    }
    if (!a.probe_times.empty()) s.plan.probe_times = parse_times(a.probe_times);
    if (a.drops > 0) s.plan.drops = a.drops;
    if (a.trials > 0) s.plan.trials = a.trials;
    s.plan.seed = a.seed;
    s.plan.threads = a.threads;
    return s;
}

void print_summary(const ResultBundle& bundle)
{
    for (const auto& [name, r] : bundle.results) {
        std::printf("%s (%s)\n", name.c_str(), r.engine.c_str());
        const auto mean = r.mean_sinr_db();
        for (std::size_t i = 0; i < mean.size(); ++i) {
            std::printf("  %s=%-8g mean SINR %8.3f dB\n", r.axis_name.c_str(), r.axis[i], mean[i]);
        }
    }
}

int fail(const std::string& stage, const std::string& what)
{
    std::fprintf(stderr, "error [%s]: %s\n", stage.c_str(), what.c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cell-free massive MIMO uplink under channel aging"};
    app.require_subcommand(1);

    CommonArgs sim_args, de_args, cmp_args, sweep_args;
    std::string system = "cf";
    double tolerance_db = 0.5;
    std::string figure;

    auto* sim = app.add_subcommand("simulate", "Monte Carlo SINR against time for one system");
    add_common(sim, sim_args);
    sim->add_option("--system", system, "cf, cellular or smallcell")
        ->check(CLI::IsMember({"cf", "cellular", "smallcell"}));

    auto* de = app.add_subcommand("detequiv", "Deterministic-equivalent SINR against time");
    add_common(de, de_args);

    auto* cmp = app.add_subcommand("compare", "Monte Carlo against deterministic equivalent");
    add_common(cmp, cmp_args);
    cmp->add_option("--tolerance-db", tolerance_db, "Largest accepted mean-SINR gap in dB");

    auto* sweep = app.add_subcommand("sweep", "Reproduce one figure's data set");
    add_common(sweep, sweep_args);
    sweep->add_option("figure", figure, "fig1, fig2 or fig3")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));

    CLI11_PARSE(app, argc, argv);

    std::string stage = "config";
    try {
        if (*sim) {
            Setup s = resolve(sim_args);
            stage = "simulate";
            ResultBundle b{"simulate", {}};
            b.results.emplace_back("simulate_" + system, run_system(system, s.cfg, s.plan, s.de));
            stage = "emit";
            emit(b, sim_args.out);
            print_summary(b);
        } else if (*de) {
            Setup s = resolve(de_args);
            stage = "detequiv";
            ResultBundle b{"detequiv", {}};
            b.results.emplace_back("detequiv_cf", run_system("detequiv", s.cfg, s.plan, s.de));
            stage = "emit";
            emit(b, de_args.out);
            print_summary(b);
        } else if (*cmp) {
            Setup s = resolve(cmp_args);
            stage = "compare";
            ResultBundle b{"compare", {}};
            b.results.emplace_back("compare_cf_mc", run_system("cf", s.cfg, s.plan, s.de));
            b.results.emplace_back("compare_cf_de", run_system("detequiv", s.cfg, s.plan, s.de));
            stage = "emit";
            emit(b, cmp_args.out);
            const auto mc = b.results[0].second.mean_sinr_db();
            const auto dq = b.results[1].second.mean_sinr_db();
            double worst = 0.0;
            std::printf("%-10s %12s %12s %10s\n", "time", "mc_db", "de_db", "gap_db");
            for (std::size_t i = 0; i < mc.size(); ++i) {
                const double gap = std::abs(mc[i] - dq[i]);
                worst = std::max(worst, gap);
                std::printf("%-10g %12.4f %12.4f %10.4f\n", b.results[0].second.axis[i], mc[i], dq[i], gap);
            }
            const bool ok = worst <= tolerance_db;
            std::printf("max gap %.4f dB, tolerance %.4f dB: %s\n", worst, tolerance_db, ok ? "within" : "EXCEEDED");
            return ok ? 0 : 2;
        } else if (*sweep) {
            Setup s = resolve(sweep_args);
            stage = figure;
            ResultBundle b = figure == "fig1"   ? experiment_fig1(s.cfg, s.plan, kFig1SpeedsKmh, s.de)
                             : figure == "fig2" ? experiment_fig2(s.cfg, s.plan, {}, kFig2Deltas, s.de)
                                                : experiment_fig3(s.cfg, s.plan, fig3_speed_grid(), kFig2Deltas, s.de);
            stage = "emit";
            emit(b, sweep_args.out);
            print_summary(b);
        }
    } catch (const std::exception& e) {
        return fail(stage, e.what());
    }
    return 0;
}
