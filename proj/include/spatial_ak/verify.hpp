#pragma once

#include "spatial_ak/closed_loop.hpp"
#include "spatial_ak/grid.hpp"
#include "spatial_ak/hjb.hpp"
#include "spatial_ak/spectral.hpp"
#include "spatial_ak/tolerances.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace spatial_ak {

/// Consumption profile c(t, .) as a function of time.
using ControlProvider = std::function<GridFunction(double)>;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// Envelope |U(c(t))| <= |u0| e^{exponent t} for t beyond the horizon.
struct TailModel {
    double u0 = 0.0;
    double exponent = 0.0;
};

struct PayoffResult {
    double value = 0.0;  // truncated integral over [0, horizon]; may be -inf
    double horizon = 0.0;
    double tail_bound = 0.0;
    int n_time_nodes = 0;
    // |value - value with twice as many time nodes|
    double refinement_delta = 0.0;
};

/// Truncated J(c) = int_0^T e^{-rho t} U(c(t)) dt by composite 16-point
/// Gauss-Legendre panels (n_time_nodes rounded up to a multiple of 16).
/// With a tail model the closed-form tail e^{-(rho-e)T}/(rho-e) |u0| is
/// reported; rho <= e throws TailDivergence.
PayoffResult payoff(const ModelParams& params, const ControlProvider& control, double T,
                    int n_time_nodes, const std::optional<TailModel>& tail = std::nullopt);

/// Horizon at which the optimal payoff tail falls to rel_tail |v| / 10.
double default_horizon(const HjbSolution& sol, double rel_tail = 1e-8);

struct OpenLoopPath {
    std::vector<double> times;
    std::vector<GridFunction> states;
};

/// Mild solution x(t) = e^{tL} x0 - int_0^t e^{(t-s)L} N c(s) ds, sampled on
/// a uniform grid of n_steps intervals. The forcing integral is taken mode
/// by mode in the L eigenbasis with `nodes_per_step` Gauss-Legendre nodes
/// per interval.
OpenLoopPath simulate_open_loop(const SpectralBasis& basis, const ModelParams& params,
                                const GridFunction& x0, const ControlProvider& control, double t_final,
                                int n_steps, int nodes_per_step = 16);

/// delta(t, theta) = amplitude e^{-t} (cos(mode theta + phase) - mean).
struct Perturbation {
    double amplitude = 0.0;
    int mode = 1;
    double phase = 0.0;
};

GridFunction perturbation_shape(const Grid& grid, const Perturbation& pert);

/// c(t) = c_hat(t) (1 + delta(t)); for gamma > 1 values are clamped to at
/// least 1e-6 min c_hat(t), and `clamped` counts the touched nodes.
GridFunction perturbed_control(const HjbSolution& sol, const GridFunction& x0, const Perturbation& pert,
                               double t, int* clamped = nullptr);

struct AuditSample {
    Perturbation perturbation;
    double J = 0.0;        // truncated at the horizon
    double J_upper = 0.0;  // J plus the tail bound when the tail is positive
};

struct AuditReport {
    double J_opt = 0.0;
    double v = 0.0;
    double rel_gap = 0.0;
    double horizon = 0.0;
    double tail_bound = 0.0;
    double refinement_delta = 0.0;
    bool equality_ok = false;
    int n_perturbations = 0;
    std::optional<double> max_perturbed_J;
    bool all_dominated = true;
    int n_resampled = 0;
    int n_clamped = 0;
    std::vector<AuditSample> samples;
};

struct AuditOptions {
    double max_amplitude = 0.2;
    double equality_tol = 1e-6;
    double dominance_tol = 1e-6;
    double rel_tail = 1e-8;
    int nodes_per_unit_time = 64;
    Tolerances tol{};
};

/// Compares J(c_hat) with v(x0) and J of seeded perturbed controls against
/// v(x0). Perturbed controls whose open-loop state leaves the half-space
/// <x, b0> > 0 are discarded and redrawn.
AuditReport optimality_audit(const HjbSolution& sol, const ClosedLoopOperator& clo, const GridFunction& x0,
                             int n_perturbations, std::uint64_t seed, const AuditOptions& options = {});

/// |rho v(x) - lambda0 <x,b0> alpha <x,b0>^{-gamma} - H(grad v(x))| / |rho v(x)|.
double hjb_residual(const HjbSolution& sol, const SpectralBasis& basis, const GridFunction& x);

/// e^{-rho t} |v(K(t))| along the trajectory.
std::vector<double> discounted_values(const HjbSolution& sol, const Trajectory& traj);

/// True iff the discounted value decreases over the second half of the
/// samples and its last value is below 1e-6 |v(K0)|.
bool transversality_check(const HjbSolution& sol, const Trajectory& traj);

nlohmann::json to_json(const AuditReport& report);

}  // namespace spatial_ak
