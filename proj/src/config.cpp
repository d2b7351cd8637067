#include "spatial_ak/config.hpp"

#include "spatial_ak/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace spatial_ak {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
    if (text.find_first_not_of(" \t", used) != std::string::npos) {
        throw ConfigError(key + ": trailing characters in '" + text + "'");
    }
    return v;
}

long long to_integer(const std::string& text, const std::string& key) {
    const double v = to_double(text, key);
    if (v != std::floor(v)) throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return static_cast<long long>(v);
}

std::vector<double> to_list(const std::string& text, const std::string& key) {
    std::string normalized = text;
    for (char& c : normalized) {
        if (c == ',' || c == ';') c = ' ';
    }
    std::istringstream is(normalized);
    std::vector<double> out;
    std::string token;
    while (is >> token) out.push_back(to_double(token, key));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}


ProfileSpec& profile_for(RunConfig& c, const std::string& section) {
    if (section == "A") return c.A;
    if (section == "eta") return c.eta;
    return c.K0;
}

void set_profile_key(ProfileSpec& p, const std::string& key, const std::string& value, const std::string& path) {
    if (key == "kind") {
        p.kind = value;
    } else if (key == "value") {
        p.value = to_double(value, path);
    } else if (key == "base") {
        p.base = to_double(value, path);
    } else if (key == "amplitude") {
        p.amplitude = to_double(value, path);
    } else if (key == "mode") {
        p.mode = static_cast<int>(to_integer(value, path));
    } else if (key == "phase") {
        p.phase = to_double(value, path);
    } else if (key == "scale") {
        p.scale = to_double(value, path);
    } else if (key == "values") {
        p.table = to_list(value, path);
    } else {
        throw ConfigError("unknown key " + path);
    }
}

void set_key(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
    const std::string path = section.empty() ? key : section + "." + key;
    if (section.empty()) {
        if (key == "schema_version") {
            c.schema_version = static_cast<int>(to_integer(value, path));
            return;
        }
    } else if (section == "grid") {
        if (key == "n_points") {
            c.n_points = static_cast<int>(to_integer(value, path));
            return;
        }
    } else if (section == "params") {
        if (key == "sigma") return void(c.sigma = to_double(value, path));
        if (key == "rho") return void(c.rho = to_double(value, path));
        if (key == "gamma") return void(c.gamma = to_double(value, path));
        if (key == "q") return void(c.q = to_double(value, path));
    } else if (section == "A" || section == "eta" || section == "K0") {
        return set_profile_key(profile_for(c, section), key, value, path);
    } else if (section == "simulate") {
        if (key == "horizon") return void(c.horizon = to_double(value, path));
        if (key == "n_steps") return void(c.n_steps = static_cast<int>(to_integer(value, path)));
    } else if (section == "verify") {
        if (key == "seed") return void(c.seed = static_cast<std::uint64_t>(to_integer(value, path)));
        if (key == "n_perturbations") return void(c.n_perturbations = static_cast<int>(to_integer(value, path)));
        if (key == "n_residual_states") {
            return void(c.n_residual_states = static_cast<int>(to_integer(value, path)));
        }
    } else if (section == "perron") {
        if (key == "n_matrices") return void(c.perron_matrices = static_cast<int>(to_integer(value, path)));
    } else if (section == "sweep") {
        if (key == "rho") return void(c.sweep.rho = to_list(value, path));
        if (key == "gamma") return void(c.sweep.gamma = to_list(value, path));
        if (key == "sigma") return void(c.sweep.sigma = to_list(value, path));
    } else if (section == "tolerances") {
        Tolerances& t = c.tol;
        if (key == "resolvent_collision") return void(t.resolvent_collision = to_double(value, path));
        if (key == "spectrum_collision") return void(t.spectrum_collision = to_double(value, path));
        if (key == "symmetry") return void(t.symmetry = to_double(value, path));
        if (key == "power_floor") return void(t.power_floor = to_double(value, path));
        if (key == "half_space_margin") return void(t.half_space_margin = to_double(value, path));
        if (key == "bound_slack") return void(t.bound_slack = to_double(value, path));
    } else if (section == "output") {
        if (key == "dir") return void(c.out_dir = value);
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
    throw ConfigError("unknown key " + path);
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed run file: ") + e.what());
    }
    if (!tree.get_child_optional("schema_version")) throw ConfigError("missing schema_version");

    RunConfig config;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            set_key(config, "", name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) set_key(config, name, key, leaf.data());
    }
    if (config.schema_version != RunConfig::kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(config.schema_version));
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open run file " + path);
    return parse_config(is);
}

GridFunction make_profile(const ProfileSpec& spec, const Grid& grid, const std::string& name) {
    if (spec.kind == "constant") return GridFunction::constant(grid, spec.value);
    if (spec.kind == "cosine") {
        return GridFunction::sample(
            grid, [&](double th) { return spec.base + spec.amplitude * std::cos(spec.mode * th + spec.phase); });
    }
    if (spec.kind == "table") {
        if (spec.table.empty()) throw ConfigError(name + ": table profile without values");
        if (static_cast<int>(spec.table.size()) != grid.size()) {
            throw ConfigError(name + ": table has " + std::to_string(spec.table.size()) + " values, grid has " +
                              std::to_string(grid.size()) + " points");
        }
        return GridFunction(grid, Eigen::Map<const Eigen::VectorXd>(spec.table.data(), grid.size()));
    }
    if (spec.kind == "steady_state") throw ConfigError(name + ": steady_state is resolved only after solving");
    throw ConfigError(name + ": unknown profile kind '" + spec.kind + "'");
}

ModelParams make_params(const RunConfig& config, const Grid& grid) {
    return ModelParams(config.sigma, config.rho, config.gamma, config.q, make_profile(config.A, grid, "A"),
                       make_profile(config.eta, grid, "eta"));
}

void validate_config(const RunConfig& c) {
    const Grid grid = [&] {
        try {
            return Grid(c.n_points);
        } catch (const Error& e) {
            throw ConfigError(std::string("grid.n_points: ") + e.what());
        }
    }();
    try {
        make_params(c, grid);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    if (c.K0.kind == "steady_state") {
        if (!(c.K0.scale > 0.0)) throw ConfigError("K0.scale must be > 0");
    } else {
        make_profile(c.K0, grid, "K0");
    }
    if (!(c.horizon > 0.0)) throw ConfigError("simulate.horizon must be > 0");
    if (c.n_steps < 1) throw ConfigError("simulate.n_steps must be >= 1");
    if (c.n_perturbations < 0) throw ConfigError("verify.n_perturbations must be >= 0");
    if (c.n_residual_states < 1) throw ConfigError("verify.n_residual_states must be >= 1");
    if (c.perron_matrices < 1) throw ConfigError("perron.n_matrices must be >= 1");
    for (double s : c.sweep.sigma) {
        if (!(s > 0.0)) throw ConfigError("sweep.sigma values must be > 0");
    }
    for (double r : c.sweep.rho) {
        if (!(r > 0.0)) throw ConfigError("sweep.rho values must be > 0");
    }
    for (double g : c.sweep.gamma) {
        if (!(g > 0.0) || g == 1.0) throw ConfigError("sweep.gamma values must be > 0 and != 1");
    }
}

}  // namespace spatial_ak
