#pragma once

#include "spatial_ak/grid.hpp"
#include "spatial_ak/hjb.hpp"
#include "spatial_ak/spectral.hpp"
#include "spatial_ak/tolerances.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <iosfwd>
#include <vector>

namespace spatial_ak {

/// Closed-loop generator B = L - N Phi as a dense matrix.
///
/// N Phi x = withdrawal_profile * <x, b0>, so B differs from L by the
/// rank-one matrix outer(withdrawal_profile, weight * b0).
struct ClosedLoopOperator {
    Eigen::MatrixXd B;
    Eigen::MatrixXd L;
    SpectralBasis basis;
    HjbSolution sol;

    const Grid& grid() const { return basis.grid(); }
    GridFunction apply(const GridFunction& x) const;
};

ClosedLoopOperator build_closed_loop(const SpectralBasis& basis, const HjbSolution& sol);

/// Eigenvalues of the B matrix, sorted by decreasing real part.
Eigen::VectorXcd closed_loop_spectrum(const ClosedLoopOperator& clo);

/// e^{tB} x through the eigendecomposition of B (independent of the
/// exponential stepping used by simulate).
GridFunction closed_loop_semigroup_eig(const ClosedLoopOperator& clo, double t, const GridFunction& x);

/// Steady-state data around the eigenvalue g of B.
struct ProjectionData {
    GridFunction beta;            // alpha0 b0
    GridFunction w;               // spans ker(B - g), <w, beta> = 1
    GridFunction forcing;         // beta^{-1/gamma} eta^{(q+gamma-1)/gamma}
    Eigen::VectorXd beta_coeffs;  // <b_k, forcing>
    double mu0 = 0.0;             // lambda0 - g
    double g = 0.0;
    double lambda1 = 0.0;
    // g > lambda1; when false the stability statements do not apply and
    // every report says so.
    bool dominance_ok = false;
};

/// Throws SpectrumCollision when g equals lambda_0, or equals some lambda_k
/// whose mode the forcing actually excites.
ProjectionData compute_projection_data(const SpectralBasis& basis, const HjbSolution& sol,
                                       const Tolerances& tol = {});

/// P x = <x, beta> w.
GridFunction projection_apply(const ProjectionData& pd, const GridFunction& x);

/// Nodal matrix of P: outer(w, weight * beta).
Eigen::MatrixXd projection_matrix(const ProjectionData& pd);

/// w recovered as the null vector of (B - g), normalized so <w, beta> = 1.
GridFunction steady_state_by_nullspace(const ClosedLoopOperator& clo, const ProjectionData& pd);

struct ContourProjection {
    Eigen::MatrixXd P;
    double imag_residue = 0.0;  // max |Im| of the quadrature sum
    double center = 0.0;
    double radius = 0.0;
    int n_quad = 0;
};

/// Half the distance from g to the nearest other eigenvalue of B.
double default_contour_radius(const ClosedLoopOperator& clo);

/// P = -(1/2 pi i) \oint (B - mu)^{-1} dmu over the circle |mu - center| = radius,
/// by the n_quad-point periodic trapezoid rule. Throws ContourError unless
/// exactly one eigenvalue of B lies inside the circle and g is that one.
ContourProjection projection_via_contour(const ClosedLoopOperator& clo, double center, double radius,
                                         int n_quad = 64);

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<GridFunction> detrended;  // e^{-g t} K(t)
    double g = 0.0;
};

/// Samples K(t_i) = e^{t_i B} x0 on t_i = i t_final / n_steps, i = 0..n_steps,
/// by repeated application of one dense exponential e^{B dt}.
Trajectory simulate(const ClosedLoopOperator& clo, const GridFunction& x0, double t_final, int n_steps);

/// Least-squares slope of log y against t.
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y);

// Long format: t, theta, K, K_detrended.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// <K(t), b0> samples and the fitted growth exponent.
nlohmann::json trajectory_summary(const Trajectory& traj, const GridFunction& b0);

nlohmann::json to_json(const ProjectionData& pd);

}  // namespace spatial_ak
