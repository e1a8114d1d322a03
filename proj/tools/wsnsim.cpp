// wsnsim: compares the network lifetime of LEACH and FCA clustering over a
// shared set of seeded deployments, or probes the fuzzy competition-radius
// engine directly.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wsn/wsn.hpp"

namespace {

std::string fmt_opt(const std::optional<double>& v) {
    if (!v)
        return "-";
    return wsn::detail::fmt_g6(*v);
}

void print_protocol_line(const char* name, const wsn::ProtocolAggregate& agg) {
    std::printf("  %-6s fnd %8s +- %-8s hna %8s +- %-8s (defined %d/%zu, %d/%zu)\n", name,
                fmt_opt(agg.mean_fnd).c_str(), fmt_opt(agg.std_fnd).c_str(),
                fmt_opt(agg.mean_hna).c_str(), fmt_opt(agg.std_hna).c_str(), agg.fnd_defined,
                agg.trials.size(), agg.hna_defined, agg.trials.size());
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& protocol, int trials_override, long long seed_override,
            bool have_seed) {
    wsn::ScenarioConfig cfg = wsn::load_config(config_path);
    if (trials_override > 0)
        cfg.trials = trials_override;
    if (have_seed)
        cfg.base_seed = static_cast<std::uint64_t>(seed_override);

    wsn::ProtocolChoice choice = wsn::ProtocolChoice::Both;
    if (protocol == "leach")
        choice = wsn::ProtocolChoice::Leach;
    else if (protocol == "fca")
        choice = wsn::ProtocolChoice::Fca;

    std::printf("scenario: %d nodes on %gx%g m, bs (%g, %g), %d trials, seeds %llu..%llu\n",
                cfg.node_count, cfg.area_width, cfg.area_height, cfg.bs.x, cfg.bs.y, cfg.trials,
                static_cast<unsigned long long>(cfg.base_seed),
                static_cast<unsigned long long>(cfg.base_seed + cfg.trials - 1));

    const wsn::AggregateResult result = wsn::run_scenario(cfg, choice);

    if (result.leach)
        print_protocol_line("leach", *result.leach);
    if (result.fca)
        print_protocol_line("fca", *result.fca);
    if (result.win_rate_fnd)
        std::printf("  fca win rate: fnd %s, hna %s\n", fmt_opt(result.win_rate_fnd).c_str(),
                    fmt_opt(result.win_rate_hna).c_str());

    const auto written = wsn::emit_results(result, cfg, out_dir);
    for (const auto& p : written)
        std::printf("wrote %s\n", p.string().c_str());
    return 0;
}

int cmd_radius(double dist, double energy, double r_max) {
    const wsn::FuzzyEngine engine;
    std::printf("%s\n", wsn::detail::fmt_g6(engine.compute_radius(dist, energy, r_max)).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wireless sensor network clustering lifetime simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string protocol = "both";
    int trials_override = 0;
    long long seed_override = 0;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV results");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--protocol", protocol, "leach, fca, or both (default)")
        ->check(CLI::IsMember({"leach", "fca", "both"}));
    run->add_option("--trials", trials_override, "override trial count")
        ->check(CLI::PositiveNumber);
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_override, "override base seed")->check(CLI::NonNegativeNumber);

    double dist = 0.0, energy = 0.0, r_max = 0.0;
    CLI::App* radius = app.add_subcommand("radius", "print the fuzzy competition radius");
    radius->add_option("--distance", dist, "normalized base-station distance in [0, 1]")
        ->required();
    radius->add_option("--energy", energy, "normalized residual energy in [0, 1]")->required();
    radius->add_option("--r-max", r_max, "maximum radius in meters")->required()
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir, protocol, trials_override, seed_override,
                           static_cast<bool>(*seed_opt));
        return cmd_radius(dist, energy, r_max);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
