#include "spatial_ak/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Spatial AK optimal growth on the circle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int n_points = 0;
    bool quiet = false;
    double alpha_scale = 1.0;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "spectral data, value function and feedback"},
        {"simulate", "closed-loop trajectory and stability report"},
        {"verify", "HJB residual, payoff and transversality audits"},
        {"sweep", "parameter sweep summary"},
        {"perron-audit", "Perron-Frobenius checks on random Metzler matrices"},
    };
    std::vector<CLI::App*> subs;
    std::vector<CLI::Option*> seed_opts, points_opts, out_opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run file")->required()->check(CLI::ExistingFile);
        out_opts.push_back(sub->add_option("--out", out_dir, "output directory"));
        seed_opts.push_back(sub->add_option("--seed", seed, "random seed"));
        points_opts.push_back(sub->add_option("--n-points", n_points, "grid size override"));
        sub->add_flag("--quiet", quiet, "suppress progress output");
        if (name == "verify" || name == "solve" || name == "simulate") {
            sub->add_option("--debug-alpha-scale", alpha_scale, "multiply alpha (testing only)");
        }
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    spatial_ak::CommandOptions options;
    options.quiet = quiet;
    options.debug_alpha_scale = alpha_scale;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        if (out_opts[i]->count() > 0) options.out_dir = out_dir;
        if (seed_opts[i]->count() > 0) options.seed = seed;
        if (points_opts[i]->count() > 0) options.n_points = n_points;
        return spatial_ak::run_command(commands[i].first, config_path, options, std::cout, std::cerr);
    }
    return spatial_ak::kExitInternal;
}
