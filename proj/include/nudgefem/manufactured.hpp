#pragma once

#include <array>

namespace nudgefem::manufactured {

using Vec2 = std::array<double, 2>;
/// grad[i][j] = d u_i / d x_j
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Time amplitude (6 + 4 cos 4t) / 10 shared by velocity and pressure.
double amplitude(double t);
double amplitude_dt(double t);

/// Velocity = curl of the stream function
/// g(t) * 8 sin^2(pi x) (y (1 - y))^2 on the unit square. Divergence free and
/// zero on the boundary.
Vec2 eval_u(double x, double y, double t);
Mat2 eval_grad_u(double x, double y, double t);
Vec2 eval_laplacian_u(double x, double y, double t);
Vec2 eval_dt_u(double x, double y, double t);

double eval_p(double x, double y, double t);
Vec2 eval_grad_p(double x, double y, double t);

/// f = du/dt - nu lap(u) + (u . grad) u + grad p
Vec2 eval_f(double x, double y, double t, double nu);

/// Period of every field in t.
inline constexpr double kPeriod = 1.5707963267948966;  // pi / 2

}  // namespace nudgefem::manufactured
