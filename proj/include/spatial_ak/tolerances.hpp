#pragma once

namespace spatial_ak {

// Numerical thresholds shared across modules. Every field can be
// overridden from the run configuration ([tolerances] section).
struct Tolerances {
    // Minimum |mu - lambda_k| accepted by the resolvent of L.
    double resolvent_collision = 1e-9;
    // Minimum |g - lambda_k| accepted when assembling w.
    double spectrum_collision = 1e-9;
    // Symmetry defect accepted for the assembled generator.
    double symmetry = 1e-12;
    // Values below this are treated as underflow when raising grid
    // functions to powers.
    double power_floor = 1e-300;
    // Relative slack for the asymptotic half-space test of perturbed
    // open-loop states.
    double half_space_margin = 1e-12;
    // Absolute slack on both sides of the convergence inequality.
    double bound_slack = 1e-9;
};

}  // namespace spatial_ak
