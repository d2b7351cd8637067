#include "spatial_ak/closed_loop.hpp"

#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace spatial_ak {

GridFunction ClosedLoopOperator::apply(const GridFunction& x) const {
    if (x.grid() != grid()) throw DimensionError("ClosedLoopOperator::apply: grid mismatch");
    return GridFunction(grid(), B * x.values());
}

ClosedLoopOperator build_closed_loop(const SpectralBasis& basis, const HjbSolution& sol) {
    if (basis.grid() != sol.basis().grid()) {
        throw DimensionError("build_closed_loop: solution built on a different grid");
    }
    const OperatorMatrix L = assemble_generator(sol.params(), basis.grid());
    const Eigen::VectorXd& profile = sol.withdrawal_profile().values();
    const Eigen::VectorXd weighted_b0 = basis.grid().weight() * sol.b0().values();
    Eigen::MatrixXd B = L.entries - profile * weighted_b0.transpose();
    return ClosedLoopOperator{std::move(B), L.entries, basis, sol};
}

Eigen::VectorXcd closed_loop_spectrum(const ClosedLoopOperator& clo) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(clo.B, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("closed_loop_spectrum: eigensolver failed");
    Eigen::VectorXcd ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() > b.imag();
              });
    return ev;
}

GridFunction closed_loop_semigroup_eig(const ClosedLoopOperator& clo, double t, const GridFunction& x) {
    if (!(t >= 0.0)) throw DomainError("closed_loop_semigroup_eig: t must be >= 0");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(clo.B);
    if (solver.info() != Eigen::Success) throw NumericalError("closed_loop_semigroup_eig: eigensolver failed");
    const Eigen::MatrixXcd V = solver.eigenvectors();
    const Eigen::VectorXcd growth = (solver.eigenvalues().array() * t).exp().matrix();
    const Eigen::VectorXcd coords = V.partialPivLu().solve(x.values().cast<std::complex<double>>());
    const Eigen::VectorXcd out = V * growth.cwiseProduct(coords);
    return GridFunction(clo.grid(), out.real());
}

ProjectionData compute_projection_data(const SpectralBasis& basis, const HjbSolution& sol,
                                       const Tolerances& tol) {
    const ModelParams& p = sol.params();
    const double g = sol.g();
    if (std::abs(g - basis.lambda0()) < tol.spectrum_collision) {
        throw SpectrumCollision("compute_projection_data: g collides with lambda_0");
    }

    GridFunction beta = basis.b0() * sol.alpha0();
    const GridFunction forcing =
        positive_power(beta, -1.0 / p.gamma, tol.power_floor)
            .times(positive_power(p.eta, (p.q + p.gamma - 1.0) / p.gamma, tol.power_floor));
    Eigen::VectorXd beta_coeffs = basis.coefficients(forcing);

    // w = b0 / alpha0 + sum_{k>=1} beta_k / (lambda_k - g) b_k
    Eigen::VectorXd w_coeffs(basis.size());
    w_coeffs[0] = 1.0 / sol.alpha0();
    // A collision g = lambda_k is harmless when the forcing has no b_k
    // component (constant data, where every beta_k with k >= 1 vanishes).
    const double negligible = 1e-12 * std::abs(beta_coeffs[0]);
    for (int k = 1; k < basis.size(); ++k) {
        if (std::abs(g - basis.lambda(k)) >= tol.spectrum_collision) {
            w_coeffs[k] = beta_coeffs[k] / (basis.lambda(k) - g);
        } else if (std::abs(beta_coeffs[k]) <= negligible) {
            w_coeffs[k] = 0.0;
        } else {
            throw SpectrumCollision("compute_projection_data: g collides with lambda_" + std::to_string(k));
        }
    }
    GridFunction w = basis.synthesize(w_coeffs);

    ProjectionData pd{std::move(beta), std::move(w), forcing, std::move(beta_coeffs)};
    pd.mu0 = basis.lambda0() - g;
    pd.g = g;
    pd.lambda1 = basis.lambda1();
    pd.dominance_ok = g - basis.lambda1() > tol.spectrum_collision;
    return pd;
}

GridFunction projection_apply(const ProjectionData& pd, const GridFunction& x) {
    return pd.w * inner_l2(x, pd.beta);
}

Eigen::MatrixXd projection_matrix(const ProjectionData& pd) {
    return pd.w.values() * (pd.beta.grid().weight() * pd.beta.values()).transpose();
}

GridFunction steady_state_by_nullspace(const ClosedLoopOperator& clo, const ProjectionData& pd) {
    const int n = clo.grid().size();
    const Eigen::MatrixXd shifted = clo.B - pd.g * Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
    GridFunction w(clo.grid(), svd.matrixV().col(n - 1));
    return w * (1.0 / inner_l2(w, pd.beta));
}

double default_contour_radius(const ClosedLoopOperator& clo) {
    const Eigen::VectorXcd ev = closed_loop_spectrum(clo);
    const double g = clo.sol.g();
    Eigen::Index nearest = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
        if (std::abs(ev[i] - g) < std::abs(ev[nearest] - g)) nearest = i;
    }
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (i != nearest) gap = std::min(gap, std::abs(ev[i] - g));
    }
    return 0.5 * gap;
}

ContourProjection projection_via_contour(const ClosedLoopOperator& clo, double center, double radius,
                                         int n_quad) {
    using cd = std::complex<double>;
    if (n_quad < 16) throw ContourError("projection_via_contour: n_quad must be >= 16");
    if (!(radius > 0.0)) throw ContourError("projection_via_contour: radius must be > 0");

    const double g = clo.sol.g();
    if (!(std::abs(g - center) < radius)) throw ContourError("contour does not enclose g");
    const Eigen::VectorXcd ev = closed_loop_spectrum(clo);
    int enclosed = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double d = std::abs(ev[i] - center);
        if (std::abs(d - radius) < 1e-12 * std::max(1.0, radius)) {
            throw ContourError("an eigenvalue of B lies on the contour");
        }
        if (d < radius) ++enclosed;
    }
    if (enclosed != 1) {
        throw ContourError("contour encloses " + std::to_string(enclosed) +
                           " eigenvalues of B, expected exactly one");
    }

    const int n = clo.grid().size();
    const Eigen::MatrixXcd Bc = clo.B.cast<cd>();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n_quad; ++j) {
        const double phi = kTwoPi * j / n_quad;
        const cd dir = std::polar(1.0, phi);
        const cd mu = center + radius * dir;
        // dmu = i radius dir dphi, so -(1/2 pi i) dmu = -(radius dir / 2 pi) dphi.
        sum -= (radius * dir / static_cast<double>(n_quad)) * (Bc - mu * I).partialPivLu().inverse();
    }
    return ContourProjection{sum.real(), sum.imag().cwiseAbs().maxCoeff(), center, radius, n_quad};
}

Trajectory simulate(const ClosedLoopOperator& clo, const GridFunction& x0, double t_final, int n_steps) {
    if (x0.grid() != clo.grid()) throw DimensionError("simulate: initial state on the wrong grid");
    if (!(t_final > 0.0)) throw DomainError("simulate: t_final must be > 0");
    if (n_steps < 1) throw DomainError("simulate: n_steps must be >= 1");

    const double dt = t_final / n_steps;
    const Eigen::MatrixXd step = (clo.B * dt).exp();
    const double g = clo.sol.g();

    Trajectory traj;
    traj.g = g;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.detrended.reserve(n_steps + 1);
    Eigen::VectorXd state = x0.values();
    for (int i = 0; i <= n_steps; ++i) {
        const double t = (i == n_steps) ? t_final : i * dt;
        if (i > 0) state = step * state;
        traj.times.push_back(t);
        traj.states.emplace_back(clo.grid(), state);
        traj.detrended.emplace_back(clo.grid(), state * std::exp(-g * t));
    }
    return traj;
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2) throw DomainError("fit_log_slope: need >= 2 paired samples");
    const double n = static_cast<double>(t.size());
    const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
    double ly_mean = 0.0;
    for (double v : y) {
        if (!(v > 0.0)) throw DomainError("fit_log_slope: samples must be positive");
        ly_mean += std::log(v);
    }
    ly_mean /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxy += (t[i] - t_mean) * (std::log(y[i]) - ly_mean);
        sxx += (t[i] - t_mean) * (t[i] - t_mean);
    }
    return sxy / sxx;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,theta,K,K_detrended\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const GridFunction& k = traj.states[i];
        const GridFunction& kd = traj.detrended[i];
        for (int j = 0; j < k.size(); ++j) {
            os << fmt17(traj.times[i]) << ',' << fmt17(k.grid().node(j)) << ',' << fmt17(k[j]) << ','
               << fmt17(kd[j]) << '\n';
        }
    }
}

nlohmann::json trajectory_summary(const Trajectory& traj, const GridFunction& b0) {
    std::vector<double> projections;
    projections.reserve(traj.states.size());
    for (const auto& k : traj.states) projections.push_back(inner_l2(k, b0));
    nlohmann::json doc = {{"t", traj.times}, {"b0_projection", projections}, {"g", traj.g}};
    const bool positive =
        std::all_of(projections.begin(), projections.end(), [](double v) { return v > 0.0; });
    doc["fitted_growth_exponent"] =
        positive ? nlohmann::json(fit_log_slope(traj.times, projections)) : nlohmann::json(nullptr);
    return doc;
}

nlohmann::json to_json(const ProjectionData& pd) {
    const auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    return {{"beta", vec(pd.beta.values())},
            {"w", vec(pd.w.values())},
            {"beta_coeffs", vec(pd.beta_coeffs)},
            {"mu0", pd.mu0},
            {"g", pd.g},
            {"lambda1", pd.lambda1},
            {"dominance_violated", !pd.dominance_ok}};
}

}  // namespace spatial_ak
