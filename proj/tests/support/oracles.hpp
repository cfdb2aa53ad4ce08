#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's quadrature tables or assembly routines.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "nudgefem/fem.hpp"
#include "nudgefem/sparse.hpp"

namespace oracle {

Eigen::MatrixXd to_dense(const nudgefem::SparseMatrix& a);
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// int over the reference triangle {x, y >= 0, x + y <= 1} of x^a y^b.
double monomial_integral(int a, int b);

/// Collapsed Gauss-Legendre rule on the reference triangle; exact to degree 2 * order - 2.
struct TriangleRule {
    std::vector<std::array<double, 2>> points;  ///< reference (x, y)
    std::vector<double> weights;
};
TriangleRule collapsed_gauss(int order);

/// P2 field on one physical triangle evaluated from explicit formulas.
struct LocalP2 {
    std::array<std::array<double, 2>, 3> vertices;
    std::array<double, 6> coeffs;
    double value(double x, double y) const;
    std::array<double, 2> gradient(double x, double y) const;
};

/// Integrates g(x, y, t) over every fine triangle with a collapsed rule, where
/// `t` is the triangle index. Used for L2-type reference integrals.
double integrate_mesh(const nudgefem::DofMap& dm, int order,
                      const std::function<double(double x, double y, int t)>& g);

/// Value / gradient of component c of a P2 coefficient vector at (x, y) in triangle t.
double p2_value(const nudgefem::DofMap& dm, std::span<const double> v, int c, int t, double x, double y);
std::array<double, 2> p2_gradient(const nudgefem::DofMap& dm, std::span<const double> v, int c, int t, double x,
                                  double y);
double p1_value(const nudgefem::DofMap& dm, std::span<const double> q, int t, double x, double y);

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0);

/// Observed order from three successive differences: log2(|a - b| / |b - c|).
double richardson_order(double a, double b, double c);

}  // namespace oracle
