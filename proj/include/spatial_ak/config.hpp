#pragma once

#include "spatial_ak/grid.hpp"
#include "spatial_ak/spectral.hpp"
#include "spatial_ak/tolerances.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spatial_ak {

/// A coefficient or initial-state profile as written in a run file.
///
///   kind = constant      value
///   kind = cosine        base + amplitude cos(mode theta + phase)
///   kind = table         values (one per grid node, comma or space separated)
///   kind = steady_state  scale * w (initial state only; resolved after solving)
struct ProfileSpec {
    std::string kind = "constant";
    double value = 1.0;
    double base = 1.0;
    double amplitude = 0.0;
    int mode = 1;
    double phase = 0.0;
    double scale = 1.0;
    std::vector<double> table;
};

struct SweepSpec {
    std::vector<double> rho;
    std::vector<double> gamma;
    std::vector<double> sigma;
};

struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    int n_points = Grid::kDefaultPoints;
    double sigma = 1.0;
    double rho = 1.0;
    double gamma = 0.5;
    double q = 0.0;
    ProfileSpec A;
    ProfileSpec eta;
    ProfileSpec K0;
    double horizon = 10.0;
    int n_steps = 200;
    std::uint64_t seed = 0;
    int n_perturbations = 20;
    int n_residual_states = 20;
    int perron_matrices = 100;
    SweepSpec sweep;
    Tolerances tol;
    std::string out_dir = "out";
};

/// Parses the INI-style run file. Unknown sections or keys, a missing or
/// unsupported schema_version, and malformed numbers throw ConfigError.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Checks every invariant that can be checked without solving: parameter
/// ranges, profile kinds, table lengths against n_points, positivity of A
/// and eta. Throws ConfigError.
void validate_config(const RunConfig& config);

/// Samples a profile on the grid. `steady_state` profiles cannot be sampled
/// here and throw ConfigError.
GridFunction make_profile(const ProfileSpec& spec, const Grid& grid, const std::string& name);

ModelParams make_params(const RunConfig& config, const Grid& grid);

}  // namespace spatial_ak
