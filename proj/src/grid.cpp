#include "spatial_ak/grid.hpp"

#include "spatial_ak/errors.hpp"
#include "spatial_ak/format.hpp"

#include <ostream>
#include <string>

namespace spatial_ak {

Grid::Grid(int n_points) : n_(n_points) {
    if (n_points < 8 || n_points % 2 != 0) {
        throw DomainError("grid needs an even number of points >= 8, got " +
                          std::to_string(n_points));
    }
}

Eigen::VectorXd Grid::nodes() const {
    Eigen::VectorXd theta(n_);
    for (int j = 0; j < n_; ++j) theta[j] = node(j);
    return theta;
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DimensionError("grid function has " + std::to_string(values_.size()) +
                             " values on a grid of " + std::to_string(grid_.size()));
    }
    if (!values_.allFinite()) {
        throw DomainError("grid function values must be finite");
    }
}

GridFunction GridFunction::constant(const Grid& grid, double c) {
    return GridFunction(grid, Eigen::VectorXd::Constant(grid.size(), c));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
    Eigen::VectorXd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) v[j] = f(grid.node(j));
    return GridFunction(grid, std::move(v));
}

void require_same_grid(const GridFunction& f, const GridFunction& g, const char* where) {
    if (f.grid() != g.grid()) {
        throw DimensionError(std::string(where) + ": grids differ (" +
                             std::to_string(f.size()) + " vs " + std::to_string(g.size()) + ")");
    }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other, "operator+");
    values_ += other.values_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other, "operator-");
    values_ -= other.values_;
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    values_ *= s;
    return *this;
}

GridFunction GridFunction::times(const GridFunction& other) const {
    require_same_grid(*this, other, "times");
    return GridFunction(grid_, values_.cwiseProduct(other.values_));
}

double inner_l2(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g, "inner_l2");
    return f.grid().weight() * f.values().dot(g.values());
}

double integrate(const GridFunction& f) { return f.grid().weight() * f.values().sum(); }

double sup_norm(const GridFunction& f) { return f.values().cwiseAbs().maxCoeff(); }

bool is_strictly_positive(const GridFunction& f) { return f.min() > 0.0; }

void write_csv(std::ostream& os, const GridFunction& f) {
    os << "theta,value\n";
    for (int j = 0; j < f.size(); ++j) {
        os << fmt17(f.grid().node(j)) << ',' << fmt17(f[j]) << '\n';
    }
}

}  // namespace spatial_ak
