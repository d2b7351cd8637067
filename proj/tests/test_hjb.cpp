#include "spatial_ak/errors.hpp"
#include "spatial_ak/hjb.hpp"
#include "spatial_ak/verify.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spatial_ak;

TEST_CASE("well-posedness") {
    const Grid g(16);
    CHECK(check_wellposed(testing::homogeneous(g, 1, 1, 1.0, 0.5), 1.0));
    CHECK_FALSE(check_wellposed(testing::homogeneous(g, 1, 1, 0.4, 0.5), 1.0));
    CHECK_FALSE(check_wellposed(testing::homogeneous(g, 1, 1, 0.5, 0.5), 1.0));
    for (double rho : {1e-3, 0.1, 5.0}) CHECK(check_wellposed(testing::homogeneous(g, 1, 1, rho, 2.0), 3.0));
}

TEST_CASE("growth rate") {
    const Grid g(16);
    CHECK(growth_rate(testing::homogeneous(g, 1, 1, 1.2, 2.0), 1.0) == doctest::Approx(-0.1));
    CHECK(growth_rate(testing::homogeneous(g, 1, 1, 1.0, 0.5), 1.0) == 0.0);
}

TEST_CASE("alpha closed form in the homogeneous case") {
    // lambda0 = 1, b0 = (2 pi)^{-1/2}: gamma / (rho - lambda0 (1 - gamma)) = 1 and
    // int b0^{-1} = (2 pi)^{3/2}, so alpha = (2 pi)^{3/4}.
    const double oracle = std::pow(kTwoPi, 0.75);
    CHECK(oracle == doctest::Approx(3.9685778240728022).epsilon(1e-15));
    const auto p = testing::homogeneous(Grid(128), 1.0, 1.0, 1.0, 0.5);
    const SpectralBasis b = testing::basis_for(p);
    CHECK(std::abs(compute_alpha(b, p) - oracle) < 1e-9 * oracle);
    const HjbSolution sol = HjbSolution::build(b, p);
    CHECK(std::abs(sol.alpha() - oracle) < 1e-9 * oracle);
    CHECK(sol.alpha0() == doctest::Approx(oracle * oracle).epsilon(1e-12));
    CHECK_THROWS_AS(compute_alpha(b, testing::homogeneous(Grid(128), 1.0, 1.0, 0.4, 0.5)), InfeasibleParameters);
    CHECK_THROWS_AS(HjbSolution::build(b, testing::homogeneous(Grid(128), 1.0, 1.0, 0.4, 0.5)), InfeasibleParameters);
}

TEST_CASE("alpha decreases in rho for gamma below one") {
    const auto base = testing::heterogeneous(Grid(64), 1.0, 0.5);
    const SpectralBasis b = testing::basis_for(base);
    double previous = std::numeric_limits<double>::infinity();
    for (double rho : {0.8, 1.6, 3.2}) {
        const ModelParams p(base.sigma, rho, base.gamma, base.q, base.A, base.eta);
        const double a = compute_alpha(b, p);
        CHECK(a < previous);
        previous = a;
    }
}

TEST_CASE("value function") {
    const Grid g(128);
    const auto p = testing::homogeneous(g, 1.0, 1.0, 1.0, 0.5);
    const SpectralBasis b = testing::basis_for(p);
    const HjbSolution sol = HjbSolution::build(b, p);
    const double c = 1.7;
    const double expected = sol.alpha() * std::pow(c * std::sqrt(kTwoPi), 0.5) / 0.5;
    CHECK(value_function(sol, GridFunction::constant(g, c)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(value_function(sol, GridFunction::constant(g, -1.0)), HalfSpaceViolation);
    CHECK_THROWS_AS(value_function(sol, GridFunction::sample(g, [](double t) { return std::cos(t); })),
                    HalfSpaceViolation);
}

TEST_CASE("value function properties") {
    std::mt19937_64 rng(3);
    for (double gamma : {0.5, 2.0, 0.3, 4.0}) {
        const auto p = testing::heterogeneous(Grid(64), 1.5, gamma);
        const SpectralBasis b = testing::basis_for(p);
        const HjbSolution sol = HjbSolution::build(b, p);
        for (int i = 0; i < 20; ++i) {
            const GridFunction x = testing::random_half_space(sol.b0(), rng);
            const double v = value_function(sol, x);
            CHECK(std::abs(value_function(sol, x * 2.0) - std::pow(2.0, 1.0 - gamma) * v) < 1e-12 * std::abs(v));
            if (gamma > 1.0) CHECK(v < 0.0);
            // Central difference of v along a random direction against the gradient.
            const GridFunction d = testing::random_smooth(x.grid(), rng);
            const double eps = 1e-6 * inner_l2(x, sol.b0()) / std::max(1.0, std::abs(inner_l2(d, sol.b0())));
            const double fd = (value_function(sol, x + d * eps) - value_function(sol, x - d * eps)) / (2 * eps);
            CHECK(fd == doctest::Approx(inner_l2(d, value_gradient(sol, x))).epsilon(1e-6));
        }
    }
}

TEST_CASE("value does not depend on the normalization of b0") {
    const auto p = testing::heterogeneous(Grid(64), 1.0, 0.5);
    const SpectralBasis b = testing::basis_for(p);
    std::mt19937_64 rng(4);
    for (double kappa : {0.25, 3.0, 10.0}) {
        Eigen::MatrixXd V = b.eigenfunctions();
        V.col(0) *= kappa;
        const SpectralBasis scaled(b.grid(), b.eigenvalues(), V);
        for (double gamma : {0.5, 2.0}) {
            const ModelParams q(p.sigma, 1.0 + gamma, gamma, p.q, p.A, p.eta);
            const HjbSolution s1 = HjbSolution::build(b, q);
            const HjbSolution s2 = HjbSolution::build(scaled, q);
            const GridFunction x = testing::random_half_space(b.b0(), rng);
            CHECK(std::abs(value_function(s1, x) - value_function(s2, x)) < 1e-10 * std::abs(value_function(s1, x)));
            CHECK(sup_norm(feedback_control(s1, x) - feedback_control(s2, x)) < 1e-10 * sup_norm(feedback_control(s1, x)));
        }
    }
}

TEST_CASE("feedback control") {
    const Grid g(128);
    const auto p = testing::homogeneous(g, 1.0, 1.0, 0.75, 0.5);
    const SpectralBasis b = testing::basis_for(p);
    const HjbSolution sol = HjbSolution::build(b, p);
    const auto K0 = GridFunction::sample(g, [](double t) { return 1.0 + 0.4 * std::cos(t) + 0.1 * std::sin(3 * t); });
    const double expected = (1.0 - sol.g()) / kTwoPi * integrate(K0);
    const GridFunction c = feedback_control(sol, K0);
    CHECK(sup_norm(c - GridFunction::constant(g, expected)) < 1e-10);
    CHECK(sup_norm(optimal_control_path(sol, K0, 0.0) - c) < 1e-14);
    for (double t : {0.5, 2.0}) {
        CHECK(sup_norm(optimal_control_path(sol, K0, t) - GridFunction::constant(g, expected * std::exp(sol.g() * t))) <
              1e-10);
        const double s = 0.3;
        CHECK(sup_norm(optimal_control_path(sol, K0, t + s) - optimal_control_path(sol, K0, t) * std::exp(sol.g() * s)) <
              1e-12 * sup_norm(optimal_control_path(sol, K0, t + s)));
    }
    std::mt19937_64 rng(6);
    const GridFunction x = testing::random_smooth(g, rng);
    const GridFunction y = testing::random_smooth(g, rng);
    CHECK(sup_norm(feedback_control(sol, x + y) - feedback_control(sol, x) - feedback_control(sol, y)) < 1e-12);
    const GridFunction orth = x - sol.b0() * inner_l2(x, sol.b0());
    CHECK(sup_norm(feedback_control(sol, orth)) < 1e-12);
}

TEST_CASE("hamiltonian is the supremum of the current value hamiltonian") {
    std::mt19937_64 rng(8);
    for (double gamma : {0.5, 2.0}) {
        const auto p = testing::heterogeneous(Grid(64), 1.0 + gamma, gamma);
        const SpectralBasis b = testing::basis_for(p);
        const HjbSolution sol = HjbSolution::build(b, p);
        const GridFunction x = testing::random_half_space(sol.b0(), rng);
        const double H = hamiltonian(sol, x);
        const GridFunction best = feedback_control(sol, x);
        CHECK(current_value_hamiltonian(sol, x, best) == doctest::Approx(H).epsilon(1e-12));
        for (int i = 0; i < 100; ++i) {
            const GridFunction z = testing::random_positive(x.grid(), rng, 1e-3) * (0.2 * sup_norm(best));
            CHECK(current_value_hamiltonian(sol, x, z) <= H + 1e-12 * std::abs(H));
        }
        CHECK(hamiltonian(sol, x * 2.0) == doctest::Approx(std::pow(2.0, 1.0 - gamma) * H).epsilon(1e-12));
    }
}

TEST_CASE("utility") {
    const Grid g(16);
    const auto p = testing::homogeneous(g, 1.0, 1.0, 1.0, 0.5);
    CHECK(utility(p, GridFunction::zero(g)) == 0.0);
    CHECK(utility(p, GridFunction::constant(g, 4.0)) == doctest::Approx(kTwoPi * 2.0 / 0.5));
    const auto p2 = testing::homogeneous(g, 1.0, 1.0, 1.0, 2.0);
    CHECK(std::isinf(utility(p2, GridFunction::zero(g))));
    CHECK_THROWS_AS(utility(p, GridFunction::constant(g, -1.0)), DomainError);
}

TEST_CASE("hjb residual") {
    std::mt19937_64 rng(12);
    for (double gamma : {0.5, 2.0}) {
        const auto p = testing::heterogeneous(Grid(128), 1.0 + gamma, gamma);
        const SpectralBasis b = testing::basis_for(p);
        const HjbSolution sol = HjbSolution::build(b, p);
        CHECK(hjb_residual(sol, b, sol.b0()) < 1e-10);
        for (int i = 0; i < 20; ++i) CHECK(hjb_residual(sol, b, testing::random_half_space(sol.b0(), rng)) < 1e-9);
        const HjbSolution wrong = HjbSolution::build(b, p, {}, 1.01);
        CHECK(hjb_residual(wrong, b, sol.b0()) > 1e-3);
        CHECK_FALSE(wrong.diagnostics().empty());
    }
}

TEST_CASE("hjb solution json") {
    const auto p = testing::homogeneous(Grid(32), 1.0, 1.0, 1.0, 0.5);
    const HjbSolution sol = HjbSolution::build(testing::basis_for(p), p);
    const nlohmann::json doc = to_json(sol);
    for (const char* key : {"alpha", "alpha0", "g", "lambda0", "wellposed"}) CHECK(doc.contains(key));
    CHECK(doc["wellposed"] == true);
}
