#pragma once

#include <array>
#include <span>
#include <vector>

#include "nudgefem/assembly.hpp"
#include "nudgefem/fem.hpp"

namespace nudgefem {

/// ||u_h - u(., t)||_{L2} by elementwise quadrature of the given degree (>= 8
/// is recommended for non-polynomial u).
double l2_error(const DofMap& dofmap, std::span<const double> coefficients,
                const TimeDependentField& exact, double t, int quadrature_degree = 8);

/// ||u_h||_{L2}
double l2_norm(const DofMap& dofmap, std::span<const double> coefficients, int quadrature_degree = 8);

struct ConvergencePoint {
    double h = 0.0;
    double error = 0.0;
};

/// Least-squares slope of log(error) against log(h).
double fit_slope(std::span<const ConvergencePoint> points);

/// Least-squares line through (x, y); returns {slope, intercept}.
std::array<double, 2> least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace nudgefem
