#include "spatial_ak/stability.hpp"

#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spatial_ak {

double bound_constant(const ProjectionData& pd) { return 1.0 + sup_norm(pd.w) * integrate(pd.beta); }

bool admissibility_condition(const ProjectionData& pd, const GridFunction& K0, double M) {
    const double min_w = pd.w.min();
    if (!(min_w > 0.0)) return false;
    const double level = inner_l2(K0, pd.beta);
    const double spread = sup_norm(K0 - pd.w * level);
    return M * spread <= level * min_w;
}

bool positivity_audit(const Trajectory& traj) {
    return std::all_of(traj.states.begin(), traj.states.end(),
                       [](const GridFunction& k) { return is_strictly_positive(k); });
}

bool stability_window(double A, double sigma, double rho, double gamma) {
    const double lower = A * (1.0 - gamma);
    return lower < rho && rho < lower + sigma * gamma;
}

StabilityReport convergence_bound_check(const Trajectory& traj, const ProjectionData& pd, double lambda1,
                                        double g, const Tolerances& tol) {
    if (traj.states.empty()) throw DomainError("convergence_bound_check: empty trajectory");
    const GridFunction& K0 = traj.states.front();

    StabilityReport report{.steady_state = projection_apply(pd, K0), .fitted_rate = std::nullopt, .table = {}};
    report.M = bound_constant(pd);
    report.rate = g - lambda1;
    report.dominance_ok = g - lambda1 > tol.spectrum_collision;
    report.min_w = pd.w.min();
    report.grid_points = K0.size();

    const double initial = sup_norm(K0 - report.steady_state);
    const double noise = 1e-10 * std::max(sup_norm(K0), sup_norm(report.steady_state));
    report.bound_satisfied = true;
    std::vector<double> fit_t, fit_d;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double dev = sup_norm(traj.detrended[i] - report.steady_state);
        const double bound = report.M * std::exp(-report.rate * t) * initial;
        report.table.push_back({t, dev, bound});
        if (dev > bound + tol.bound_slack) report.bound_satisfied = false;
        // Samples at roundoff level carry no slope information.
        if (dev > noise) {
            fit_t.push_back(t);
            fit_d.push_back(dev);
        }
    }
    if (fit_t.size() >= 2) report.fitted_rate = fit_log_slope(fit_t, fit_d);

    report.admissible = positivity_audit(traj);
    report.admissibility_condition = admissibility_condition(pd, K0, report.M);
    return report;
}

nlohmann::json to_json(const StabilityReport& r) {
    nlohmann::json doc = {{"M", r.M},
                          {"rate", r.rate},
                          {"bound_satisfied", r.bound_satisfied},
                          {"positivity", r.admissible},
                          {"admissibility_condition", r.admissibility_condition},
                          {"dominance_violated", !r.dominance_ok},
                          {"min_w", r.min_w},
                          {"grid_points", r.grid_points}};
    doc["fitted_rate"] = r.fitted_rate ? nlohmann::json(*r.fitted_rate) : nlohmann::json(nullptr);
    const Eigen::VectorXd& ss = r.steady_state.values();
    doc["steady_state"] = std::vector<double>(ss.data(), ss.data() + ss.size());
    return doc;
}

void write_deviation_csv(std::ostream& os, const StabilityReport& report) {
    os << "t,deviation,bound\n";
    for (const auto& s : report.table) {
        os << fmt17(s.t) << ',' << fmt17(s.deviation) << ',' << fmt17(s.bound) << '\n';
    }
}

}  // namespace spatial_ak
