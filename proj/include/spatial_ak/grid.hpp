#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>

namespace spatial_ak {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic grid theta_j = 2 pi j / n on the circle.
///
/// Two grids compare equal iff they have the same number of nodes; the
/// nodes themselves are always the canonical ones.
class Grid {
public:
    static constexpr int kDefaultPoints = 128;

    explicit Grid(int n_points = kDefaultPoints);

    int size() const { return n_; }
    double weight() const { return kTwoPi / n_; }
    double node(int j) const { return kTwoPi * j / n_; }
    Eigen::VectorXd nodes() const;

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    int n_;
};

/// Real function sampled at the nodes of a Grid.
class GridFunction {
public:
    GridFunction(Grid grid, Eigen::VectorXd values);

    static GridFunction constant(const Grid& grid, double c);
    static GridFunction zero(const Grid& grid) { return constant(grid, 0.0); }
    static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    int size() const { return grid_.size(); }
    double operator[](int j) const { return values_[j]; }

    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

    // Pointwise product.
    GridFunction times(const GridFunction& other) const;

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

void require_same_grid(const GridFunction& f, const GridFunction& g, const char* where);

/// Periodic trapezoid rule for \f$\int_0^{2\pi} f g\, d\theta\f$.
double inner_l2(const GridFunction& f, const GridFunction& g);

/// \f$\int_0^{2\pi} f\, d\theta\f$.
double integrate(const GridFunction& f);

double sup_norm(const GridFunction& f);

bool is_strictly_positive(const GridFunction& f);

// CSV rows "theta,value", 17 significant digits, with a header line.
void write_csv(std::ostream& os, const GridFunction& f);

}  // namespace spatial_ak
