#pragma once

#include "spatial_ak/grid.hpp"
#include "spatial_ak/spectral.hpp"
#include "spatial_ak/tolerances.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace spatial_ak {

/// rho > lambda0 (1 - gamma).
bool check_wellposed(const ModelParams& params, double lambda0);

/// g = (lambda0 - rho) / gamma, the optimal growth rate.
double growth_rate(const ModelParams& params, double lambda0);

/// alpha = [gamma / (rho - lambda0 (1 - gamma)) * int eta^((q+gamma-1)/gamma) b0^((gamma-1)/gamma)]^gamma.
/// Throws InfeasibleParameters when check_wellposed fails.
double compute_alpha(const SpectralBasis& basis, const ModelParams& params);

/// Pointwise base^exponent for a strictly positive base. Results below
/// `floor` are raised to it and counted in `underflows`.
GridFunction positive_power(const GridFunction& base, double exponent, double floor,
                            int* underflows = nullptr);

/// U(z) = int z^{1-gamma}/(1-gamma) eta^q dtheta for z >= 0. Returns
/// -infinity when gamma > 1 and z vanishes at some node.
double utility(const ModelParams& params, const GridFunction& z);

/// Closed-form solution of the HJB equation on the half-space <x, b0> > 0:
/// v(x) = alpha <x,b0>^{1-gamma} / (1-gamma), with the rank-one optimal
/// feedback Phi x = (f / (alpha eta b0))^{1/gamma} <x, b0>, f = eta^q.
class HjbSolution {
public:
    // `alpha_scale` multiplies alpha after it is computed; anything other
    // than 1 produces a deliberately wrong solution (used to check that the
    // residual audits are not vacuous).
    static HjbSolution build(const SpectralBasis& basis, const ModelParams& params,
                             const Tolerances& tol = {}, double alpha_scale = 1.0);

    double alpha() const { return alpha_; }
    double alpha0() const { return alpha0_; }
    double g() const { return g_; }
    double lambda0() const { return basis_.lambda0(); }

    const SpectralBasis& basis() const { return basis_; }
    const ModelParams& params() const { return params_; }
    const GridFunction& b0() const { return b0_; }

    // (f / (alpha eta b0))^{1/gamma}
    const GridFunction& feedback_profile() const { return feedback_profile_; }
    // f = eta^q
    const GridFunction& consumption_weight() const { return consumption_weight_; }
    // eta * feedback_profile = eta^{(q+gamma-1)/gamma} (alpha b0)^{-1/gamma}
    const GridFunction& withdrawal_profile() const { return withdrawal_profile_; }

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    HjbSolution(SpectralBasis basis, ModelParams params);

    SpectralBasis basis_;
    ModelParams params_;
    GridFunction b0_;
    double alpha_ = 0.0;
    double alpha0_ = 0.0;
    double g_ = 0.0;
    GridFunction feedback_profile_;
    GridFunction consumption_weight_;
    GridFunction withdrawal_profile_;
    std::vector<std::string> diagnostics_;
};

/// <x, b0>, throwing HalfSpaceViolation unless it is strictly positive.
double half_space_coordinate(const HjbSolution& sol, const GridFunction& x);

double value_function(const HjbSolution& sol, const GridFunction& x0);

/// grad v(x) = alpha <x,b0>^{-gamma} b0.
GridFunction value_gradient(const HjbSolution& sol, const GridFunction& x);

GridFunction feedback_control(const HjbSolution& sol, const GridFunction& x);

/// e^{gt} Phi(x0).
GridFunction optimal_control_path(const HjbSolution& sol, const GridFunction& x0, double t);

/// Maximized Hamiltonian H(grad v(x)) in closed form.
double hamiltonian(const HjbSolution& sol, const GridFunction& x);

/// U(z) - <N z, grad v(x)>, the function maximized by the Hamiltonian.
double current_value_hamiltonian(const HjbSolution& sol, const GridFunction& x,
                                 const GridFunction& z);

// {"alpha", "alpha0", "g", "lambda0", "wellposed"}
nlohmann::json to_json(const HjbSolution& sol);

}  // namespace spatial_ak
