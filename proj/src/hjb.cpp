#include "spatial_ak/hjb.hpp"

#include "spatial_ak/errors.hpp"

#include <cmath>
#include <limits>

namespace spatial_ak {

bool check_wellposed(const ModelParams& params, double lambda0) {
    return params.rho > lambda0 * (1.0 - params.gamma);
}

double growth_rate(const ModelParams& params, double lambda0) {
    return (lambda0 - params.rho) / params.gamma;
}

GridFunction positive_power(const GridFunction& base, double exponent, double floor,
                            int* underflows) {
    if (!is_strictly_positive(base)) {
        throw DomainError("positive_power: base must be strictly positive");
    }
    Eigen::VectorXd v = base.values().array().pow(exponent).matrix();
    int hits = 0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (!std::isfinite(v[j])) throw NumericalError("positive_power: overflow");
        if (v[j] < floor) {
            v[j] = floor;
            ++hits;
        }
    }
    if (underflows) *underflows += hits;
    return GridFunction(base.grid(), std::move(v));
}

double utility(const ModelParams& params, const GridFunction& z) {
    require_same_grid(params.eta, z, "utility");
    const double gamma = params.gamma;
    const double h = z.grid().weight();
    double total = 0.0;
    for (int j = 0; j < z.size(); ++j) {
        const double zj = z[j];
        if (zj < 0.0) throw DomainError("utility: consumption must be non-negative");
        if (zj == 0.0) {
            if (gamma > 1.0) return -std::numeric_limits<double>::infinity();
            continue;
        }
        total += std::pow(zj, 1.0 - gamma) * std::pow(params.eta[j], params.q);
    }
    return h * total / (1.0 - gamma);
}

namespace {

// int eta^{(q+gamma-1)/gamma} b0^{(gamma-1)/gamma} dtheta
double alpha_integral(const GridFunction& b0, const ModelParams& p, double floor, int* underflows) {
    const GridFunction eta_part = positive_power(p.eta, (p.q + p.gamma - 1.0) / p.gamma, floor, underflows);
    const GridFunction b0_part = positive_power(b0, (p.gamma - 1.0) / p.gamma, floor, underflows);
    return inner_l2(eta_part, b0_part);
}

}  // namespace

double compute_alpha(const SpectralBasis& basis, const ModelParams& params) {
    const double lambda0 = basis.lambda0();
    if (!check_wellposed(params, lambda0)) {
        throw InfeasibleParameters("rho <= lambda0 (1 - gamma): value function is infinite");
    }
    const double integral = alpha_integral(basis.b0(), params, Tolerances{}.power_floor, nullptr);
    const double scale = params.gamma / (params.rho - lambda0 * (1.0 - params.gamma));
    return std::pow(scale * integral, params.gamma);
}

HjbSolution::HjbSolution(SpectralBasis basis, ModelParams params)
    : basis_(std::move(basis)),
      params_(std::move(params)),
      b0_(basis_.b0()),
      feedback_profile_(b0_),
      consumption_weight_(b0_),
      withdrawal_profile_(b0_) {}

HjbSolution HjbSolution::build(const SpectralBasis& basis, const ModelParams& params,
                               const Tolerances& tol, double alpha_scale) {
    if (basis.grid() != params.grid()) throw DimensionError("HjbSolution: basis/params grid mismatch");
    HjbSolution sol(basis, params);
    const ModelParams& p = sol.params_;
    const double lambda0 = basis.lambda0();
    if (!check_wellposed(p, lambda0)) {
        throw InfeasibleParameters("rho <= lambda0 (1 - gamma): value function is infinite");
    }

    int underflows = 0;
    const double integral = alpha_integral(sol.b0_, p, tol.power_floor, &underflows);
    const double scale = p.gamma / (p.rho - lambda0 * (1.0 - p.gamma));
    sol.alpha_ = std::pow(scale * integral, p.gamma) * alpha_scale;
    sol.alpha0_ = std::pow(sol.alpha_, 1.0 / (1.0 - p.gamma));
    sol.g_ = growth_rate(p, lambda0);

    sol.consumption_weight_ = positive_power(p.eta, p.q, tol.power_floor, &underflows);
    const GridFunction ratio(sol.b0_.grid(),
                             sol.consumption_weight_.values().cwiseQuotient(
                                 (sol.alpha_ * p.eta.values()).cwiseProduct(sol.b0_.values())));
    sol.feedback_profile_ = positive_power(ratio, 1.0 / p.gamma, tol.power_floor, &underflows);
    sol.withdrawal_profile_ = p.eta.times(sol.feedback_profile_);

    if (underflows > 0) {
        sol.diagnostics_.push_back("power underflow floored at " + std::to_string(underflows) +
                                   " node(s)");
    }
    if (alpha_scale != 1.0) {
        sol.diagnostics_.push_back("alpha deliberately scaled by " + std::to_string(alpha_scale));
    }
    return sol;
}

double half_space_coordinate(const HjbSolution& sol, const GridFunction& x) {
    const double c = inner_l2(x, sol.b0());
    if (!(c > 0.0)) throw HalfSpaceViolation("<x, b0> must be > 0");
    return c;
}

double value_function(const HjbSolution& sol, const GridFunction& x0) {
    const double gamma = sol.params().gamma;
    const double c = half_space_coordinate(sol, x0);
    return sol.alpha() * std::pow(c, 1.0 - gamma) / (1.0 - gamma);
}

GridFunction value_gradient(const HjbSolution& sol, const GridFunction& x) {
    const double c = half_space_coordinate(sol, x);
    return sol.b0() * (sol.alpha() * std::pow(c, -sol.params().gamma));
}

GridFunction feedback_control(const HjbSolution& sol, const GridFunction& x) {
    return sol.feedback_profile() * inner_l2(x, sol.b0());
}

GridFunction optimal_control_path(const HjbSolution& sol, const GridFunction& x0, double t) {
    if (!(t >= 0.0)) throw DomainError("optimal_control_path: t must be >= 0");
    half_space_coordinate(sol, x0);
    return feedback_control(sol, x0) * std::exp(sol.g() * t);
}

double hamiltonian(const HjbSolution& sol, const GridFunction& x) {
    const ModelParams& p = sol.params();
    const double gamma = p.gamma;
    const double c = half_space_coordinate(sol, x);
    // f^{1/gamma} (alpha eta b0)^{(gamma-1)/gamma}
    const Eigen::ArrayXd f = sol.consumption_weight().values().array();
    const Eigen::ArrayXd aeb = sol.alpha() * p.eta.values().array() * sol.b0().values().array();
    const double integral =
        x.grid().weight() * (f.pow(1.0 / gamma) * aeb.pow((gamma - 1.0) / gamma)).sum();
    return gamma * std::pow(c, 1.0 - gamma) / (1.0 - gamma) * integral;
}

double current_value_hamiltonian(const HjbSolution& sol, const GridFunction& x,
                                 const GridFunction& z) {
    const GridFunction grad = value_gradient(sol, x);
    return utility(sol.params(), z) - inner_l2(sol.params().eta.times(z), grad);
}

nlohmann::json to_json(const HjbSolution& sol) {
    return {{"alpha", sol.alpha()},
            {"alpha0", sol.alpha0()},
            {"g", sol.g()},
            {"lambda0", sol.lambda0()},
            {"wellposed", check_wellposed(sol.params(), sol.lambda0())}};
}

}  // namespace spatial_ak
