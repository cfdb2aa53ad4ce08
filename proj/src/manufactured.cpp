#include "nudgefem/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace nudgefem::manufactured {

namespace {

constexpr double kPi = std::numbers::pi;

// x factors: S = sin^2(pi x) and its derivatives
struct XFactors {
    double s, s1, s2, s3;
};

XFactors x_factors(double x) {
    const double sx = std::sin(kPi * x);
    const double s2x = std::sin(2.0 * kPi * x);
    const double c2x = std::cos(2.0 * kPi * x);
    return {sx * sx, kPi * s2x, 2.0 * kPi * kPi * c2x, -4.0 * kPi * kPi * kPi * s2x};
}

// y factors: B = (y(1-y))^2, A = B' = 2y(1-y)(1-2y), A' and A''
struct YFactors {
    double b, a, a1, a2;
};

YFactors y_factors(double y) {
    const double w = y * (1.0 - y);
    return {w * w, 2.0 * w * (1.0 - 2.0 * y), 2.0 * (1.0 - 6.0 * y + 6.0 * y * y), 24.0 * y - 12.0};
}

}  // namespace

double amplitude(double t) { return (6.0 + 4.0 * std::cos(4.0 * t)) / 10.0; }

double amplitude_dt(double t) { return -1.6 * std::sin(4.0 * t); }

Vec2 eval_u(double x, double y, double t) {
    const auto X = x_factors(x);
    const auto Y = y_factors(y);
    const double g = 8.0 * amplitude(t);
    return {g * X.s * Y.a, -g * X.s1 * Y.b};
}

Mat2 eval_grad_u(double x, double y, double t) {
    const auto X = x_factors(x);
    const auto Y = y_factors(y);
    const double g = 8.0 * amplitude(t);
    return {{{g * X.s1 * Y.a, g * X.s * Y.a1}, {-g * X.s2 * Y.b, -g * X.s1 * Y.a}}};
}

Vec2 eval_laplacian_u(double x, double y, double t) {
    const auto X = x_factors(x);
    const auto Y = y_factors(y);
    const double g = 8.0 * amplitude(t);
    return {g * (X.s2 * Y.a + X.s * Y.a2), -g * (X.s3 * Y.b + X.s1 * Y.a1)};
}

Vec2 eval_dt_u(double x, double y, double t) {
    const auto X = x_factors(x);
    const auto Y = y_factors(y);
    const double g = 8.0 * amplitude_dt(t);
    return {g * X.s * Y.a, -g * X.s1 * Y.b};
}

double eval_p(double x, double y, double t) {
    return amplitude(t) * std::sin(kPi * x) * std::cos(kPi * y);
}

Vec2 eval_grad_p(double x, double y, double t) {
    const double g = amplitude(t);
    return {g * kPi * std::cos(kPi * x) * std::cos(kPi * y),
            -g * kPi * std::sin(kPi * x) * std::sin(kPi * y)};
}

Vec2 eval_f(double x, double y, double t, double nu) {
    const Vec2 u = eval_u(x, y, t);
    const Mat2 gu = eval_grad_u(x, y, t);
    const Vec2 lap = eval_laplacian_u(x, y, t);
    const Vec2 ut = eval_dt_u(x, y, t);
    const Vec2 gp = eval_grad_p(x, y, t);
    Vec2 f{};
    for (int i = 0; i < 2; ++i) {
        const double convection = u[0] * gu[i][0] + u[1] * gu[i][1];
        f[i] = ut[i] - nu * lap[i] + convection + gp[i];
    }
    return f;
}

}  // namespace nudgefem::manufactured
