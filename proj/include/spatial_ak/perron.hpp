#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace spatial_ak {

/// Square matrix used as the generator of a finite-dimensional semigroup.
///
/// The checked constructor requires the Metzler property (non-negative
/// off-diagonal entries), the finite-dimensional form of positivity of
/// e^{tG}. `unchecked` admits the spectral collocation matrix of L, whose
/// off-diagonal entries alternate in sign.
class GeneratorMatrix {
public:
    explicit GeneratorMatrix(Eigen::MatrixXd entries);
    static GeneratorMatrix unchecked(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.rows()); }
    bool is_metzler() const { return metzler_; }

private:
    GeneratorMatrix(Eigen::MatrixXd entries, bool metzler);

    Eigen::MatrixXd entries_;
    bool metzler_;
};

bool is_metzler(const Eigen::MatrixXd& m);

/// Strong connectivity of the graph with an edge i -> j for every nonzero
/// off-diagonal entry (i, j), by boolean transitive closure.
bool is_irreducible(const GeneratorMatrix& g);

struct PerronData {
    double spectral_bound = 0.0;
    Eigen::VectorXd right;  // max entry 1
    Eigen::VectorXd left;   // left . right = 1
    int algebraic_multiplicity = 0;
    int right_eigenspace_dim = 0;
    int left_eigenspace_dim = 0;
};

/// Spectral bound with its right and left eigenvectors. Throws
/// PerronViolation if the bound is not a real simple eigenvalue or either
/// eigenvector has a non-positive entry.
PerronData perron_data(const GeneratorMatrix& g);

struct BoundarySpectrum {
    std::vector<std::complex<double>> values;
    bool progression_ok = true;
    std::string diagnostic;
};

/// Eigenvalues with real part within `tol` of the spectral bound, checked
/// to form s + i nu {..., -1, 0, 1, ...}.
BoundarySpectrum boundary_spectrum(const GeneratorMatrix& g, double tol = 1e-9);

/// True if some global phase makes every entry real and positive within tol.
bool positive_up_to_phase(const Eigen::VectorXcd& v, double tol = 1e-9);

struct PositiveEigenpair {
    std::complex<double> eigenvalue;
    bool right_positive = false;
    bool left_positive = false;
};

/// Brute-force scan of every eigenpair (right and left), returning those
/// whose eigenvector is positive up to phase.
std::vector<PositiveEigenpair> eigenvalues_with_positive_eigenvector(const GeneratorMatrix& g);

/// Every Perron-Frobenius statement checked on one matrix: real simple
/// spectral bound, one-dimensional right and left eigenspaces with strictly
/// positive vectors, no other eigenvalue with a positive eigenvector, and a
/// boundary spectrum in arithmetic progression.
struct PerronAudit {
    int size = 0;
    bool metzler = false;
    bool irreducible = false;
    std::optional<PerronData> data;
    int n_positive_eigenpairs = 0;
    bool only_bound_positive = false;
    bool boundary_ok = false;
    int boundary_size = 0;
    bool passed = false;
    std::string failure;
};

PerronAudit audit_perron(const GeneratorMatrix& g);

nlohmann::json to_json(const PerronAudit& audit);

/// Random Metzler matrix made irreducible by a random Hamiltonian cycle of
/// positive couplings on top of a sparse random pattern.
GeneratorMatrix random_irreducible_metzler(int m, std::mt19937_64& rng);

}  // namespace spatial_ak
