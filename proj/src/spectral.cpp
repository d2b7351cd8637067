#include "spatial_ak/spectral.hpp"

#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace spatial_ak {

ModelParams::ModelParams(double sigma_, double rho_, double gamma_, double q_, GridFunction A_,
                         GridFunction eta_)
    : sigma(sigma_), rho(rho_), gamma(gamma_), q(q_), A(std::move(A_)), eta(std::move(eta_)) {
    validate();
}

void ModelParams::validate() const {
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    if (!(rho > 0.0)) throw DomainError("rho must be > 0");
    if (!(q >= 0.0)) throw DomainError("q must be >= 0");
    if (!(gamma > 0.0) || gamma == 1.0) throw DomainError("gamma must be > 0 and != 1");
    require_same_grid(A, eta, "ModelParams");
    if (!is_strictly_positive(A)) throw DomainError("technology profile A must be > 0");
    if (!is_strictly_positive(eta)) throw DomainError("population density eta must be > 0");
}

GridFunction OperatorMatrix::apply(const GridFunction& x) const {
    if (x.grid() != grid) throw DimensionError("OperatorMatrix::apply: grid mismatch");
    return GridFunction(grid, entries * x.values());
}

Eigen::MatrixXd fourier_second_derivative(int n) {
    const double h = kTwoPi / n;
    const double pi = std::numbers::pi;
    Eigen::MatrixXd d2(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int k = i - j;
            if (k == 0) {
                d2(i, j) = -pi * pi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const double s = std::sin(0.5 * k * h);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                d2(i, j) = -sign / (2.0 * s * s);
            }
        }
    }
    return d2;
}

OperatorMatrix assemble_generator(const ModelParams& params, const Grid& grid) {
    if (params.grid() != grid) throw DimensionError("assemble_generator: profiles not on grid");
    Eigen::MatrixXd m = params.sigma * fourier_second_derivative(grid.size());
    m.diagonal() += params.A.values();
    return OperatorMatrix{grid, std::move(m)};
}

SpectralBasis::SpectralBasis(Grid grid, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenfunctions)
    : grid_(grid), eigenvalues_(std::move(eigenvalues)), eigenfunctions_(std::move(eigenfunctions)) {
    if (eigenfunctions_.rows() != grid_.size() || eigenfunctions_.cols() != eigenvalues_.size()) {
        throw DimensionError("SpectralBasis: eigenfunction matrix does not match the grid");
    }
}

GridFunction SpectralBasis::b(int k) const { return GridFunction(grid_, eigenfunctions_.col(k)); }

Eigen::VectorXd SpectralBasis::coefficients(const GridFunction& x) const {
    if (x.grid() != grid_) throw DimensionError("SpectralBasis::coefficients: grid mismatch");
    return grid_.weight() * (eigenfunctions_.transpose() * x.values());
}

GridFunction SpectralBasis::synthesize(const Eigen::VectorXd& coeffs) const {
    return GridFunction(grid_, eigenfunctions_ * coeffs);
}

SpectralBasis eigendecompose(const OperatorMatrix& op, const Tolerances& tol) {
    const Eigen::MatrixXd& m = op.entries;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol.symmetry * scale) {
        throw NumericalError("eigendecompose: operator matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: eigensolver failed");

    Eigen::VectorXd values = solver.eigenvalues().reverse();
    Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
    // Euclidean-unit columns -> unit in the quadrature inner product.
    vectors /= std::sqrt(op.grid.weight());
    if (vectors.col(0).sum() < 0.0) vectors.col(0) *= -1.0;

    if (!(values[0] - values[1] > 1e-12 * std::max(1.0, std::abs(values[0])))) {
        throw NumericalError("eigendecompose: leading eigenvalue is not simple");
    }
    if (!(vectors.col(0).minCoeff() > 0.0)) {
        throw PositivityViolation(
            "eigendecompose: leading eigenvector is not strictly positive (grid too coarse?)");
    }
    return SpectralBasis(op.grid, std::move(values), std::move(vectors));
}

GridFunction resolvent_apply(const SpectralBasis& basis, double mu, const GridFunction& x,
                             double collision_tol) {
    Eigen::VectorXd c = basis.coefficients(x);
    for (int k = 0; k < basis.size(); ++k) {
        const double gap = basis.lambda(k) - mu;
        if (std::abs(gap) <= collision_tol) {
            throw SpectrumCollision("resolvent_apply: mu is within tolerance of lambda_" +
                                    std::to_string(k));
        }
        c[k] /= gap;
    }
    return basis.synthesize(c);
}

GridFunction semigroup_apply(const SpectralBasis& basis, double t, const GridFunction& x) {
    if (!(t >= 0.0)) throw DomainError("semigroup_apply: t must be >= 0");
    Eigen::VectorXd c = basis.coefficients(x);
    c.array() *= (basis.eigenvalues().array() * t).exp();
    return basis.synthesize(c);
}

Eigen::MatrixXd semigroup_matrix(const SpectralBasis& basis, double t) {
    if (!(t >= 0.0)) throw DomainError("semigroup_matrix: t must be >= 0");
    const Eigen::MatrixXd& v = basis.eigenfunctions();
    const Eigen::VectorXd growth = (basis.eigenvalues().array() * t).exp().matrix();
    return basis.grid().weight() * (v * growth.asDiagonal() * v.transpose());
}

nlohmann::json to_json(const SpectralBasis& basis) {
    const Eigen::VectorXd& ev = basis.eigenvalues();
    const Eigen::VectorXd b0 = basis.eigenfunctions().col(0);
    return {{"eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())},
            {"b0", std::vector<double>(b0.data(), b0.data() + b0.size())}};
}

void write_basis_csv(std::ostream& os, const SpectralBasis& basis) {
    const int n = basis.size();
    os << "theta";
    for (int k = 0; k < n; ++k) os << ",b" << k;
    os << "\nlambda";
    for (int k = 0; k < n; ++k) os << ',' << fmt17(basis.lambda(k));
    os << '\n';
    for (int j = 0; j < basis.grid().size(); ++j) {
        os << fmt17(basis.grid().node(j));
        for (int k = 0; k < n; ++k) os << ',' << fmt17(basis.eigenfunctions()(j, k));
        os << '\n';
    }
}

}  // namespace spatial_ak
