#pragma once

#include "spatial_ak/closed_loop.hpp"
#include "spatial_ak/grid.hpp"
#include "spatial_ak/hjb.hpp"
#include "spatial_ak/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using namespace spatial_ak;

inline ModelParams homogeneous(const Grid& grid, double A, double sigma, double rho, double gamma, double q = 0.0) {
    return ModelParams(sigma, rho, gamma, q, GridFunction::constant(grid, A), GridFunction::constant(grid, 1.0));
}

// A = 1 + 0.5 cos, eta = 1 + 0.3 sin
inline ModelParams heterogeneous(const Grid& grid, double rho, double gamma, double q = 0.5) {
    return ModelParams(1.0, rho, gamma, q, GridFunction::sample(grid, [](double t) { return 1.0 + 0.5 * std::cos(t); }),
                       GridFunction::sample(grid, [](double t) { return 1.0 + 0.3 * std::sin(t); }));
}

inline SpectralBasis basis_for(const ModelParams& p) { return eigendecompose(assemble_generator(p, p.grid())); }

// Smooth random function: a few Fourier modes with normal coefficients.
inline GridFunction random_smooth(const Grid& grid, std::mt19937_64& rng, int modes = 5, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    std::vector<double> a(modes + 1), b(modes + 1);
    for (int k = 0; k <= modes; ++k) {
        a[k] = n(rng);
        b[k] = n(rng);
    }
    return GridFunction::sample(grid, [&](double t) {
        double s = a[0];
        for (int k = 1; k <= modes; ++k) s += (a[k] * std::cos(k * t) + b[k] * std::sin(k * t)) / (k * k);
        return s;
    });
}

inline GridFunction random_positive(const Grid& grid, std::mt19937_64& rng, double floor = 0.2) {
    GridFunction f = random_smooth(grid, rng);
    const double shift = floor - f.min() + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    return f + GridFunction::constant(grid, shift);
}

// Arbitrary state with <x, b0> > 0.
inline GridFunction random_half_space(const GridFunction& b0, std::mt19937_64& rng) {
    GridFunction x = random_smooth(b0.grid(), rng);
    const double c = inner_l2(x, b0);
    const double target = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    return x + b0 * (target - c);
}

// Eigenvalues of sigma d^2 + a0 + a1 cos(theta) by Galerkin on e^{ik theta},
// |k| <= K, in descending order. The matrix is real symmetric tridiagonal.
inline Eigen::VectorXd galerkin_cosine_eigenvalues(double sigma, double a0, double a1, int K = 40) {
    const int m = 2 * K + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const double k = i - K;
        H(i, i) = -sigma * k * k + a0;
        if (i + 1 < m) H(i, i + 1) = H(i + 1, i) = 0.5 * a1;
    }
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().reverse();
    return ev;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
