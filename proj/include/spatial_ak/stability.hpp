#pragma once

#include "spatial_ak/closed_loop.hpp"
#include "spatial_ak/grid.hpp"
#include "spatial_ak/tolerances.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace spatial_ak {

struct DeviationSample {
    double t = 0.0;
    double deviation = 0.0;  // |e^{-gt} K(t) - <K0,beta> w|_inf
    double bound = 0.0;      // M e^{-(g - lambda1) t} |K0 - <K0,beta> w|_inf
};

struct StabilityReport {
    double M = 1.0;
    double rate = 0.0;  // g - lambda1
    GridFunction steady_state;
    bool bound_satisfied = false;
    // Least-squares slope of log deviation; empty when the deviation is
    // identically zero (steady-state start).
    std::optional<double> fitted_rate;
    bool admissible = false;               // trajectory strictly positive
    bool admissibility_condition = false;  // sufficient condition at t = 0
    bool dominance_ok = false;             // g > lambda1
    double min_w = 0.0;
    int grid_points = 0;
    std::vector<DeviationSample> table;
};

/// M = 1 + |w|_inf int beta dtheta.
double bound_constant(const ProjectionData& pd);

/// Audits |K_g(t) - <K0,beta> w|_inf <= M e^{-(g-lambda1)t} |K0 - <K0,beta> w|_inf
/// at every sample of `traj`, and fills the remaining report fields. Never
/// throws on a violation; it is recorded in the report.
StabilityReport convergence_bound_check(const Trajectory& traj, const ProjectionData& pd, double lambda1,
                                        double g, const Tolerances& tol = {});

/// inf w > 0 and M |K0 - <K0,beta> w|_inf <= <K0,beta> inf w.
bool admissibility_condition(const ProjectionData& pd, const GridFunction& K0, double M);

/// Every stored state strictly positive at every node.
bool positivity_audit(const Trajectory& traj);

/// Homogeneous-data window A(1-gamma) < rho < A(1-gamma) + sigma gamma.
bool stability_window(double A, double sigma, double rho, double gamma);

nlohmann::json to_json(const StabilityReport& report);

// t, deviation, bound
void write_deviation_csv(std::ostream& os, const StabilityReport& report);

}  // namespace spatial_ak
