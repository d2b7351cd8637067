#include "spatial_ak/perron.hpp"

#include "spatial_ak/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spatial_ak {

bool is_metzler(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) < 0.0) return false;
        }
    }
    return true;
}

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXd entries, bool metzler)
    : entries_(std::move(entries)), metzler_(metzler) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw DimensionError("GeneratorMatrix must be square and non-empty");
    }
}

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXd entries) : GeneratorMatrix(std::move(entries), true) {
    if (!spatial_ak::is_metzler(entries_)) throw DomainError("GeneratorMatrix: off-diagonal entries must be >= 0");
}

GeneratorMatrix GeneratorMatrix::unchecked(Eigen::MatrixXd entries) {
    const bool metzler = spatial_ak::is_metzler(entries);
    return GeneratorMatrix(std::move(entries), metzler);
}

bool is_irreducible(const GeneratorMatrix& g) {
    const int m = g.size();
    std::vector<char> reach(static_cast<std::size_t>(m) * m, 0);
    auto at = [&](int i, int j) -> char& { return reach[static_cast<std::size_t>(i) * m + j]; };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) at(i, j) = (i == j) || g.entries()(i, j) != 0.0;
    }
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < m; ++i) {
            if (!at(i, k)) continue;
            for (int j = 0; j < m; ++j) {
                if (at(k, j)) at(i, j) = 1;
            }
        }
    }
    return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

namespace {

double matrix_scale(const Eigen::MatrixXd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

struct NullSpace {
    Eigen::VectorXd vector;  // right singular vector of the smallest singular value
    int dimension = 0;
};

NullSpace null_space(const Eigen::MatrixXd& m, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    NullSpace out;
    out.vector = svd.matrixV().col(m.cols() - 1);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] <= tol) ++out.dimension;
    }
    return out;
}

}  // namespace

PerronData perron_data(const GeneratorMatrix& g) {
    const Eigen::MatrixXd& a = g.entries();
    const int m = g.size();
    const double scale = matrix_scale(a);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success) throw NumericalError("perron_data: eigensolver failed");
    const Eigen::VectorXcd ev = solver.eigenvalues();
    Eigen::Index top = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
        if (ev[i].real() > ev[top].real()) top = i;
    }
    if (std::abs(ev[top].imag()) > 1e-9 * scale) {
        throw PerronViolation("perron_data: spectral bound is not a real eigenvalue");
    }

    PerronData out;
    out.spectral_bound = ev[top].real();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i] - out.spectral_bound) < 1e-7 * scale) ++out.algebraic_multiplicity;
    }
    if (out.algebraic_multiplicity != 1) {
        throw PerronViolation("perron_data: spectral bound has algebraic multiplicity " +
                              std::to_string(out.algebraic_multiplicity));
    }

    const Eigen::MatrixXd shifted = a - out.spectral_bound * Eigen::MatrixXd::Identity(m, m);
    const double null_tol = 1e-10 * scale * m;
    NullSpace right = null_space(shifted, null_tol);
    NullSpace left = null_space(shifted.transpose(), null_tol);
    out.right_eigenspace_dim = right.dimension;
    out.left_eigenspace_dim = left.dimension;

    if (right.vector.sum() < 0.0) right.vector *= -1.0;
    if (left.vector.sum() < 0.0) left.vector *= -1.0;
    out.right = right.vector / right.vector.maxCoeff();
    out.left = left.vector / left.vector.dot(out.right);
    if (!(out.right.minCoeff() > 0.0) || !(out.left.minCoeff() > 0.0)) {
        throw PerronViolation("perron_data: Perron eigenvector has a non-positive entry");
    }
    return out;
}

BoundarySpectrum boundary_spectrum(const GeneratorMatrix& g, double tol) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(g.entries(), false);
    if (solver.info() != Eigen::Success) throw NumericalError("boundary_spectrum: eigensolver failed");
    const Eigen::VectorXcd ev = solver.eigenvalues();
    double s = ev[0].real();
    for (Eigen::Index i = 1; i < ev.size(); ++i) s = std::max(s, ev[i].real());

    BoundarySpectrum out;
    const double band = tol * std::max(1.0, std::abs(s));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i].real() - s) <= band) out.values.push_back(ev[i]);
    }
    std::sort(out.values.begin(), out.values.end(),
              [](const auto& a, const auto& b) { return a.imag() < b.imag(); });

    const auto has_zero = std::any_of(out.values.begin(), out.values.end(),
                                      [&](const auto& z) { return std::abs(z.imag()) <= band; });
    if (!has_zero) {
        out.progression_ok = false;
        out.diagnostic = "boundary spectrum does not contain the real spectral bound";
        return out;
    }
    double nu = 0.0;
    for (const auto& z : out.values) {
        if (z.imag() > band && (nu == 0.0 || z.imag() < nu)) nu = z.imag();
    }
    if (nu > 0.0) {
        for (const auto& z : out.values) {
            const double k = z.imag() / nu;
            if (std::abs(k - std::round(k)) > 1e-6) {
                out.progression_ok = false;
                out.diagnostic = "imaginary parts are not integer multiples of a common step";
            }
        }
    }
    return out;
}

bool positive_up_to_phase(const Eigen::VectorXcd& v, double tol) {
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
    }
    const double top = std::abs(v[pivot]);
    if (top == 0.0) return false;
    const std::complex<double> phase = std::conj(v[pivot]) / top;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const std::complex<double> u = v[i] * phase / top;
        if (std::abs(u.imag()) > tol || !(u.real() > tol)) return false;
    }
    return true;
}

std::vector<PositiveEigenpair> eigenvalues_with_positive_eigenvector(const GeneratorMatrix& g) {
    Eigen::EigenSolver<Eigen::MatrixXd> right(g.entries());
    Eigen::EigenSolver<Eigen::MatrixXd> left(g.entries().transpose());
    if (right.info() != Eigen::Success || left.info() != Eigen::Success) {
        throw NumericalError("eigenvalues_with_positive_eigenvector: eigensolver failed");
    }
    std::vector<PositiveEigenpair> out;
    for (Eigen::Index i = 0; i < right.eigenvalues().size(); ++i) {
        if (positive_up_to_phase(right.eigenvectors().col(i))) {
            out.push_back({right.eigenvalues()[i], true, false});
        }
    }
    for (Eigen::Index i = 0; i < left.eigenvalues().size(); ++i) {
        if (!positive_up_to_phase(left.eigenvectors().col(i))) continue;
        const std::complex<double> lambda = left.eigenvalues()[i];
        auto match = std::find_if(out.begin(), out.end(), [&](const PositiveEigenpair& p) {
            return std::abs(p.eigenvalue - lambda) < 1e-8 * std::max(1.0, std::abs(lambda));
        });
        if (match != out.end()) {
            match->left_positive = true;
        } else {
            out.push_back({lambda, false, true});
        }
    }
    return out;
}

PerronAudit audit_perron(const GeneratorMatrix& g) {
    PerronAudit out;
    out.size = g.size();
    out.metzler = g.is_metzler();
    out.irreducible = is_irreducible(g);
    try {
        out.data = perron_data(g);
    } catch (const PerronViolation& e) {
        out.failure = e.what();
        return out;
    }
    const PerronData& d = *out.data;
    const double scale = matrix_scale(g.entries());

    const auto positive = eigenvalues_with_positive_eigenvector(g);
    out.n_positive_eigenpairs = static_cast<int>(positive.size());
    bool bound_pair = false;
    out.only_bound_positive = true;
    for (const auto& p : positive) {
        const bool at_bound = std::abs(p.eigenvalue - d.spectral_bound) < 1e-8 * scale;
        if (!at_bound) out.only_bound_positive = false;
        if (at_bound && p.right_positive && p.left_positive) bound_pair = true;
    }

    const BoundarySpectrum boundary = boundary_spectrum(g);
    out.boundary_size = static_cast<int>(boundary.values.size());
    out.boundary_ok = boundary.progression_ok;

    if (d.right_eigenspace_dim != 1 || d.left_eigenspace_dim != 1) {
        out.failure = "eigenspace of the spectral bound is not one-dimensional";
    } else if (!bound_pair) {
        out.failure = "spectral bound has no positive right/left eigenvector pair in the eigensolver output";
    } else if (!out.only_bound_positive) {
        out.failure = "an eigenvalue other than the spectral bound has a positive eigenvector";
    } else if (!out.boundary_ok) {
        out.failure = boundary.diagnostic;
    }
    out.passed = out.failure.empty();
    return out;
}

nlohmann::json to_json(const PerronAudit& a) {
    nlohmann::json doc = {{"size", a.size},
                          {"metzler", a.metzler},
                          {"irreducible", a.irreducible},
                          {"n_positive_eigenpairs", a.n_positive_eigenpairs},
                          {"only_bound_positive", a.only_bound_positive},
                          {"boundary_ok", a.boundary_ok},
                          {"boundary_size", a.boundary_size},
                          {"passed", a.passed},
                          {"failure", a.failure}};
    if (a.data) {
        doc["spectral_bound"] = a.data->spectral_bound;
        doc["algebraic_multiplicity"] = a.data->algebraic_multiplicity;
        doc["right_eigenspace_dim"] = a.data->right_eigenspace_dim;
        doc["left_eigenspace_dim"] = a.data->left_eigenspace_dim;
        doc["min_right"] = a.data->right.minCoeff();
        doc["min_left"] = a.data->left.minCoeff();
    } else {
        doc["spectral_bound"] = nullptr;
    }
    return doc;
}

GeneratorMatrix random_irreducible_metzler(int m, std::mt19937_64& rng) {
    if (m < 1) throw DomainError("random_irreducible_metzler: m must be >= 1");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) {
                a(i, j) = -3.0 + 4.0 * unit(rng);
            } else if (unit(rng) < 0.3) {
                a(i, j) = unit(rng);
            }
        }
    }
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < m && m > 1; ++k) {
        const int from = order[k];
        const int to = order[(k + 1) % m];
        a(from, to) += 0.1 + 0.9 * unit(rng);
    }
    return GeneratorMatrix(std::move(a));
}

}  // namespace spatial_ak
