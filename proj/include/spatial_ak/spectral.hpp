#pragma once

#include "spatial_ak/grid.hpp"
#include "spatial_ak/tolerances.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <iosfwd>

namespace spatial_ak {

/// Scalars and coefficient profiles of the spatial AK problem.
///
/// sigma: capital diffusion; rho: discount rate; gamma: curvature of the
/// power utility (gamma != 1); q: exponent of the population weight in the
/// utility; A: technology profile; eta: population density.
struct ModelParams {
    double sigma = 1.0;
    double rho = 1.0;
    double gamma = 0.5;
    double q = 0.0;
    GridFunction A;
    GridFunction eta;

    ModelParams(double sigma, double rho, double gamma, double q, GridFunction A, GridFunction eta);

    const Grid& grid() const { return A.grid(); }

    // Throws DomainError / DimensionError when an invariant fails.
    void validate() const;
};

/// Dense discretization of L = sigma d^2/dtheta^2 + A(theta).
struct OperatorMatrix {
    Grid grid;
    Eigen::MatrixXd entries;

    GridFunction apply(const GridFunction& x) const;
};

/// Fourier collocation matrix of d^2/dtheta^2 on a 2 pi-periodic grid of n
/// (even) points. Symmetric, circulant, with constants in its kernel.
Eigen::MatrixXd fourier_second_derivative(int n);

OperatorMatrix assemble_generator(const ModelParams& params, const Grid& grid);

/// Eigenpairs of a symmetric OperatorMatrix, eigenvalues descending.
///
/// Eigenfunctions are orthonormal for inner_l2 (not the Euclidean dot
/// product) and b0 is oriented so that it is strictly positive. Within a
/// degenerate eigenspace the basis is whatever the solver returned.
class SpectralBasis {
public:
    SpectralBasis(Grid grid, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenfunctions);

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(eigenvalues_.size()); }

    double lambda(int k) const { return eigenvalues_[k]; }
    double lambda0() const { return eigenvalues_[0]; }
    double lambda1() const { return eigenvalues_[1]; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

    // Columns are the nodal values of b_k.
    const Eigen::MatrixXd& eigenfunctions() const { return eigenfunctions_; }
    GridFunction b(int k) const;
    GridFunction b0() const { return b(0); }

    // <x, b_k> for every k.
    Eigen::VectorXd coefficients(const GridFunction& x) const;
    // sum_k c_k b_k.
    GridFunction synthesize(const Eigen::VectorXd& coeffs) const;

private:
    Grid grid_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenfunctions_;
};

SpectralBasis eigendecompose(const OperatorMatrix& op, const Tolerances& tol = {});

/// (L - mu)^{-1} x by eigenexpansion. Throws SpectrumCollision when mu is
/// within `collision_tol` of an eigenvalue.
GridFunction resolvent_apply(const SpectralBasis& basis, double mu, const GridFunction& x,
                             double collision_tol = Tolerances{}.resolvent_collision);

/// e^{tL} x by eigenexpansion; t must be non-negative.
GridFunction semigroup_apply(const SpectralBasis& basis, double t, const GridFunction& x);

/// Dense matrix of e^{tL} in nodal coordinates.
Eigen::MatrixXd semigroup_matrix(const SpectralBasis& basis, double t);

// {"eigenvalues": [...], "b0": [...]}
nlohmann::json to_json(const SpectralBasis& basis);

// One row per node: theta, b_0, ..., b_{n-1}; a second header row carries
// the eigenvalues.
void write_basis_csv(std::ostream& os, const SpectralBasis& basis);

}  // namespace spatial_ak
