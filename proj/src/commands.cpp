#include "spatial_ak/commands.hpp"

#include "spatial_ak/closed_loop.hpp"
#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"
#include "spatial_ak/hjb.hpp"
#include "spatial_ak/perron.hpp"
#include "spatial_ak/spectral.hpp"
#include "spatial_ak/stability.hpp"
#include "spatial_ak/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace spatial_ak {

namespace fs = std::filesystem;

namespace {

struct Pipeline {
    Grid grid;
    ModelParams params;
    SpectralBasis basis;
};

Pipeline prepare(const RunConfig& c) {
    Grid grid(c.n_points);
    ModelParams params = make_params(c, grid);
    SpectralBasis basis = eigendecompose(assemble_generator(params, grid), c.tol);
    return {grid, std::move(params), std::move(basis)};
}

fs::path output_dir(const RunConfig& c) {
    fs::path dir(c.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    write_text(path, os.str());
}

bool infeasible(const RunConfig& c, const Pipeline& p, std::ostream& err) {
    if (check_wellposed(p.params, p.basis.lambda0())) return false;
    err << "infeasible parameters: rho = " << fmt17(c.rho) << " must exceed lambda0 (1 - gamma) = "
        << fmt17(p.basis.lambda0() * (1.0 - c.gamma)) << '\n';
    return true;
}

bool is_constant(const GridFunction& f) { return f.max() == f.min(); }

GridFunction initial_state(const RunConfig& c, const Pipeline& p, const ProjectionData* pd) {
    if (c.K0.kind != "steady_state") return make_profile(c.K0, p.grid, "K0");
    if (pd == nullptr) throw Error("steady_state K0 requires projection data");
    return pd->w * c.K0.scale;
}

std::vector<double> to_vector(const GridFunction& f) {
    return std::vector<double>(f.values().data(), f.values().data() + f.size());
}

// States with <x, b0> > 0 drawn as random combinations of the first
// eigenmodes.
std::vector<GridFunction> residual_states(const SpectralBasis& basis, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> lead(0.1, 3.0);
    const int modes = std::min(9, basis.size());
    std::vector<GridFunction> out;
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.size());
        coeffs[0] = lead(rng);
        for (int k = 1; k < modes; ++k) coeffs[k] = 0.5 * normal(rng);
        out.push_back(basis.synthesize(coeffs));
    }
    return out;
}

}  // namespace

RunConfig resolve_config(RunConfig config, const CommandOptions& options) {
    if (options.out_dir) config.out_dir = *options.out_dir;
    if (options.seed) config.seed = *options.seed;
    if (options.n_points) config.n_points = *options.n_points;
    validate_config(config);
    if (!(options.debug_alpha_scale > 0.0)) throw ConfigError("debug alpha scale must be > 0");
    return config;
}

int cmd_solve(const RunConfig& c, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    const Pipeline p = prepare(c);
    if (infeasible(c, p, err)) return kExitInfeasible;
    const HjbSolution sol = HjbSolution::build(p.basis, p.params, c.tol, options.debug_alpha_scale);

    std::optional<ProjectionData> pd;
    if (c.K0.kind == "steady_state") pd = compute_projection_data(p.basis, sol, c.tol);
    const GridFunction K0 = initial_state(c, p, pd ? &*pd : nullptr);
    const double c0 = inner_l2(K0, sol.b0());

    nlohmann::json hjb = to_json(sol);
    hjb["diagnostics"] = sol.diagnostics();
    hjb["feedback_profile"] = to_vector(sol.feedback_profile());

    nlohmann::json summary = to_json(sol);
    summary["lambda1"] = p.basis.lambda1();
    summary["grid_points"] = c.n_points;
    summary["K0_b0_projection"] = c0;
    summary["value_K0"] = c0 > 0.0 ? nlohmann::json(value_function(sol, K0)) : nlohmann::json(nullptr);
    summary["K0_in_half_space"] = c0 > 0.0;

    const fs::path dir = output_dir(c);
    write_json_file((dir / "spectral.json").string(), to_json(p.basis));
    write_json_file((dir / "hjb.json").string(), hjb);
    write_json_file((dir / "solve.json").string(), summary);
    write_with(dir / "b0.csv", [&](std::ostream& os) { write_csv(os, sol.b0()); });
    if (!options.quiet) {
        log << "lambda0 = " << fmt17(sol.lambda0()) << "  g = " << fmt17(sol.g()) << "  alpha = " << fmt17(sol.alpha())
            << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& c, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    const Pipeline p = prepare(c);
    if (infeasible(c, p, err)) return kExitInfeasible;
    const HjbSolution sol = HjbSolution::build(p.basis, p.params, c.tol, options.debug_alpha_scale);
    const ClosedLoopOperator clo = build_closed_loop(p.basis, sol);
    const ProjectionData pd = compute_projection_data(p.basis, sol, c.tol);
    const GridFunction K0 = initial_state(c, p, &pd);
    half_space_coordinate(sol, K0);

    const Trajectory traj = simulate(clo, K0, c.horizon, c.n_steps);
    const StabilityReport report = convergence_bound_check(traj, pd, p.basis.lambda1(), sol.g(), c.tol);

    nlohmann::json doc = to_json(report);
    if (is_constant(p.params.A) && is_constant(p.params.eta)) {
        doc["stability_window"] = stability_window(p.params.A[0], c.sigma, c.rho, c.gamma);
    } else {
        doc["stability_window"] = nullptr;
    }
    doc["projection"] = to_json(pd);
    doc["horizon"] = c.horizon;
    doc["n_steps"] = c.n_steps;

    const fs::path dir = output_dir(c);
    write_with(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    write_json_file((dir / "trajectory_summary.json").string(), trajectory_summary(traj, sol.b0()));
    write_json_file((dir / "stability.json").string(), doc);
    write_with(dir / "deviation.csv", [&](std::ostream& os) { write_deviation_csv(os, report); });
    if (!pd.dominance_ok) err << "warning: g <= lambda1, convergence statements do not apply\n";
    if (!options.quiet) {
        log << "bound_satisfied = " << report.bound_satisfied << "  positivity = " << report.admissible
            << "  admissibility_condition = " << report.admissibility_condition << '\n';
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& c, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    const Pipeline p = prepare(c);
    if (infeasible(c, p, err)) return kExitInfeasible;
    const HjbSolution sol = HjbSolution::build(p.basis, p.params, c.tol, options.debug_alpha_scale);
    const ClosedLoopOperator clo = build_closed_loop(p.basis, sol);
    std::optional<ProjectionData> pd;
    if (c.K0.kind == "steady_state") pd = compute_projection_data(p.basis, sol, c.tol);
    const GridFunction K0 = initial_state(c, p, pd ? &*pd : nullptr);
    half_space_coordinate(sol, K0);

    std::vector<GridFunction> states = residual_states(p.basis, c.n_residual_states, c.seed);
    states.push_back(K0);
    double max_residual = 0.0;
    for (const auto& x : states) max_residual = std::max(max_residual, hjb_residual(sol, p.basis, x));
    const bool residual_ok = max_residual < 1e-9;

    AuditOptions audit_options;
    audit_options.tol = c.tol;
    const AuditReport audit = optimality_audit(sol, clo, K0, c.n_perturbations, c.seed, audit_options);

    const Trajectory traj = simulate(clo, K0, audit.horizon, c.n_steps);
    const std::vector<double> discounted = discounted_values(sol, traj);
    const bool transversality_ok = transversality_check(sol, traj);

    const std::vector<std::pair<std::string, bool>> checks = {{"hjb_residual", residual_ok},
                                                              {"value_equality", audit.equality_ok},
                                                              {"dominance", audit.all_dominated},
                                                              {"transversality", transversality_ok}};
    nlohmann::json check_doc = nlohmann::json::object();
    std::vector<std::string> failed;
    for (const auto& [name, ok] : checks) {
        check_doc[name] = ok;
        if (!ok) failed.push_back(name);
    }

    nlohmann::json doc = to_json(audit);
    doc["checks"] = check_doc;
    doc["failed"] = failed;
    doc["seed"] = c.seed;
    doc["hjb_residual"] = {{"max", max_residual}, {"n_states", static_cast<int>(states.size())}};
    doc["transversality"] = {{"horizon", audit.horizon},
                             {"first", discounted.front()},
                             {"last", discounted.back()},
                             {"ok", transversality_ok}};

    const fs::path dir = output_dir(c);
    write_json_file((dir / "audit.json").string(), doc);

    if (!failed.empty()) {
        err << "verify failed:";
        for (const auto& name : failed) err << ' ' << name;
        err << '\n';
        return kExitAuditFailed;
    }
    if (!options.quiet) {
        log << "verify ok: max hjb residual " << fmt17(max_residual) << ", rel gap " << fmt17(audit.rel_gap) << '\n';
    }
    return kExitOk;
}

namespace {

struct SweepRow {
    double rho = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double g = 0.0;
    std::optional<double> alpha;
    std::optional<double> M;
    double rate = 0.0;
    bool feasible = false;
    bool dominance = false;
    std::optional<bool> window;
    std::string note;
};

SweepRow sweep_point(const SpectralBasis& basis, const ModelParams& base, double rho, double gamma, double sigma,
                     const Tolerances& tol) {
    SweepRow row;
    row.rho = rho;
    row.gamma = gamma;
    row.sigma = sigma;
    const ModelParams params(sigma, rho, gamma, base.q, base.A, base.eta);
    row.lambda0 = basis.lambda0();
    row.lambda1 = basis.lambda1();
    row.g = growth_rate(params, row.lambda0);
    row.rate = row.g - row.lambda1;
    row.dominance = row.g - row.lambda1 > tol.spectrum_collision;
    row.feasible = check_wellposed(params, row.lambda0);
    if (is_constant(params.A) && is_constant(params.eta)) row.window = stability_window(params.A[0], sigma, rho, gamma);
    if (!row.feasible) {
        row.note = "infeasible";
        return row;
    }
    const HjbSolution sol = HjbSolution::build(basis, params, tol);
    row.alpha = sol.alpha();
    try {
        row.M = bound_constant(compute_projection_data(basis, sol, tol));
    } catch (const SpectrumCollision&) {
        row.note = "spectrum_collision";
    }
    return row;
}

std::string opt(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }

}  // namespace

int cmd_sweep(const RunConfig& c, const CommandOptions& options, std::ostream& log, std::ostream&) {
    const std::vector<double> rhos = c.sweep.rho.empty() ? std::vector<double>{c.rho} : c.sweep.rho;
    const std::vector<double> gammas = c.sweep.gamma.empty() ? std::vector<double>{c.gamma} : c.sweep.gamma;
    const std::vector<double> sigmas = c.sweep.sigma.empty() ? std::vector<double>{c.sigma} : c.sweep.sigma;

    const Grid grid(c.n_points);
    const ModelParams base = make_params(c, grid);
    std::vector<SpectralBasis> bases;
    for (double sigma : sigmas) {
        const ModelParams params(sigma, base.rho, base.gamma, base.q, base.A, base.eta);
        bases.push_back(eigendecompose(assemble_generator(params, grid), c.tol));
    }

    std::vector<std::future<SweepRow>> jobs;
    for (double rho : rhos) {
        for (double gamma : gammas) {
            for (std::size_t s = 0; s < sigmas.size(); ++s) {
                jobs.push_back(std::async(std::launch::async, sweep_point, std::cref(bases[s]), std::cref(base), rho,
                                          gamma, sigmas[s], std::cref(c.tol)));
            }
        }
    }

    std::ostringstream os;
    os << "rho,gamma,sigma,lambda0,lambda1,g,alpha,M,rate,feasible,dominance,stability_window,note\n";
    for (auto& job : jobs) {
        const SweepRow r = job.get();
        os << fmt17(r.rho) << ',' << fmt17(r.gamma) << ',' << fmt17(r.sigma) << ',' << fmt17(r.lambda0) << ','
           << fmt17(r.lambda1) << ',' << fmt17(r.g) << ',' << opt(r.alpha) << ',' << opt(r.M) << ',' << fmt17(r.rate)
           << ',' << (r.feasible ? 1 : 0) << ',' << (r.dominance ? 1 : 0) << ','
           << (r.window ? (*r.window ? "1" : "0") : "") << ',' << r.note << '\n';
    }
    const fs::path dir = output_dir(c);
    write_text(dir / "sweep.csv", os.str());
    if (!options.quiet) log << "sweep: " << jobs.size() << " points\n";
    return kExitOk;
}

int cmd_perron_audit(const RunConfig& c, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> size(2, 12);
    nlohmann::json matrices = nlohmann::json::array();
    int passed = 0;
    for (int i = 0; i < c.perron_matrices; ++i) {
        const GeneratorMatrix g = random_irreducible_metzler(size(rng), rng);
        const PerronAudit a = audit_perron(g);
        if (a.passed) ++passed;
        matrices.push_back(to_json(a));
    }

    const Pipeline p = prepare(c);
    const PerronAudit generator = audit_perron(GeneratorMatrix::unchecked(assemble_generator(p.params, p.grid).entries));

    nlohmann::json doc = {{"seed", c.seed},
                          {"n_matrices", c.perron_matrices},
                          {"n_passed", passed},
                          {"all_passed", passed == c.perron_matrices},
                          {"matrices", matrices},
                          {"discretized_generator", to_json(generator)}};
    const fs::path dir = output_dir(c);
    write_json_file((dir / "perron_audit.json").string(), doc);
    if (passed != c.perron_matrices) {
        err << "perron audit failed on " << (c.perron_matrices - passed) << " matrices\n";
        return kExitAuditFailed;
    }
    if (!options.quiet) log << "perron audit: " << passed << '/' << c.perron_matrices << " passed\n";
    return kExitOk;
}

int run_command(const std::string& command, const std::string& config_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err) {
    try {
        const RunConfig config = resolve_config(load_config(config_path), options);
        if (command == "solve") return cmd_solve(config, options, log, err);
        if (command == "simulate") return cmd_simulate(config, options, log, err);
        if (command == "verify") return cmd_verify(config, options, log, err);
        if (command == "sweep") return cmd_sweep(config, options, log, err);
        if (command == "perron-audit") return cmd_perron_audit(config, options, log, err);
        err << "unknown command " << command << '\n';
        return kExitInternal;
    } catch (const InfeasibleParameters& e) {
        err << "infeasible parameters: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace spatial_ak
