#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"
#include "spatial_ak/grid.hpp"
#include "support.hpp"

#include <doctest.h>

#include <limits>
#include <sstream>

using namespace spatial_ak;

TEST_CASE("grid construction") {
    CHECK(Grid().size() == 128);
    CHECK(Grid(16).weight() == doctest::Approx(kTwoPi / 16));
    CHECK(Grid(16).node(4) == doctest::Approx(kTwoPi / 4));
    CHECK_THROWS_AS(Grid(7), DomainError);
    CHECK_THROWS_AS(Grid(6), DomainError);
    CHECK(Grid(32) == Grid(32));
    CHECK(Grid(32) != Grid(64));
}

TEST_CASE("grid function rejects bad input") {
    const Grid g(16);
    CHECK_THROWS_AS(GridFunction(g, Eigen::VectorXd::Ones(15)), DimensionError);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(16);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(GridFunction(g, v), DomainError);
    CHECK_THROWS_AS(GridFunction::zero(g) + GridFunction::zero(Grid(32)), DimensionError);
}

TEST_CASE("inner products") {
    const Grid g(16);
    CHECK(inner_l2(GridFunction::constant(g, 1), GridFunction::constant(g, 1)) == doctest::Approx(kTwoPi).epsilon(1e-14));
    const auto s = GridFunction::sample(g, [](double t) { return std::sin(t); });
    const auto c = GridFunction::sample(g, [](double t) { return std::cos(t); });
    CHECK(std::abs(inner_l2(s, c)) < 1e-14);
    const auto b0 = GridFunction::constant(g, 1.0 / std::sqrt(kTwoPi));
    CHECK(inner_l2(b0, b0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("trapezoid rule is exact for trigonometric polynomials below the grid resolution") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    const Grid g(32);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(8), b(8), c(8), d(8);
        for (int k = 0; k < 8; ++k) {
            a[k] = n(rng);
            b[k] = n(rng);
            c[k] = n(rng);
            d[k] = n(rng);
        }
        auto series = [](const std::vector<double>& x, const std::vector<double>& y) {
            return [&x, &y](double t) {
                double s = x[0];
                for (int k = 1; k < 8; ++k) s += x[k] * std::cos(k * t) + y[k] * std::sin(k * t);
                return s;
            };
        };
        const GridFunction f = GridFunction::sample(g, series(a, b));
        const GridFunction h = GridFunction::sample(g, series(c, d));
        double exact = kTwoPi * a[0] * c[0];
        for (int k = 1; k < 8; ++k) exact += 0.5 * kTwoPi * (a[k] * c[k] + b[k] * d[k]);
        CHECK(inner_l2(f, h) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(integrate(f) == doctest::Approx(kTwoPi * a[0]).epsilon(1e-12));
    }
}

TEST_CASE("sup norm and positivity") {
    const Grid g(64);
    CHECK(sup_norm(GridFunction::constant(g, -3)) == 3.0);
    CHECK(sup_norm(GridFunction::sample(g, [](double t) { return std::sin(t); })) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(sup_norm(GridFunction::zero(g)) == 0.0);
    CHECK(is_strictly_positive(GridFunction::constant(g, 0.1)));
    CHECK_FALSE(is_strictly_positive(GridFunction::sample(g, [](double t) { return std::sin(t); })));
    CHECK_FALSE(is_strictly_positive(GridFunction::zero(g)));
}

TEST_CASE("grid function csv") {
    const Grid g(8);
    std::ostringstream os;
    write_csv(os, GridFunction::constant(g, 0.1));
    const std::string s = os.str();
    CHECK(s.rfind("theta,value\n0,0.10000000000000001\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}

TEST_CASE("json numbers keep 17 digits and sorted keys") {
    nlohmann::json doc = {{"b", 0.1}, {"a", {1, 2.5}}, {"c", std::numeric_limits<double>::infinity()}};
    const std::string s = dump_json(doc);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("null") != std::string::npos);
    CHECK(s.find("\"a\"") < s.find("\"b\""));
    CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
}
