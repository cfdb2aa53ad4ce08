#include "nudgefem/metrics.hpp"

#include <cmath>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

namespace {

template <typename Fn>
double integrate_squared_difference(const DofMap& dofmap, std::span<const double> coefficients,
                                    int degree, Fn&& reference) {
    if (static_cast<int>(coefficients.size()) != dofmap.velocity_dofs()) {
        std::ostringstream msg;
        msg << "l2_error: coefficient vector has " << coefficients.size() << " entries, expected "
            << dofmap.velocity_dofs();
        throw DimensionMismatchError(msg.str());
    }
    const auto& rule = quadrature_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto map = dofmap.element_map(t);
        const auto& nodes = dofmap.velocity_nodes[t];
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto basis = eval_basis_p2(rule.points[q]);
            const Point x = map.map(rule.points[q]);
            const auto exact = reference(x);
            for (int c = 0; c < 2; ++c) {
                double uh = 0.0;
                for (int a = 0; a < 6; ++a) uh += coefficients[dofmap.velocity_dof(c, nodes[a])] * basis.values[a];
                const double diff = uh - exact[c];
                sum += rule.weights[q] * map.jacobian_determinant() * diff * diff;
            }
        }
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_error(const DofMap& dofmap, std::span<const double> coefficients,
                const TimeDependentField& exact, double t, int quadrature_degree) {
    if (quadrature_degree < 8) {
        throw InvalidConfigError("l2_error: quadrature degree must be at least 8 for the exact solution");
    }
    return integrate_squared_difference(dofmap, coefficients, quadrature_degree,
                                        [&](Point x) { return exact(x.x, x.y, t); });
}

double l2_norm(const DofMap& dofmap, std::span<const double> coefficients, int quadrature_degree) {
    return integrate_squared_difference(dofmap, coefficients, quadrature_degree,
                                        [](Point) { return manufactured::Vec2{0.0, 0.0}; });
}

std::array<double, 2> least_squares_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidConfigError("least_squares_line: need at least two (x, y) pairs");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidConfigError("least_squares_line: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double fit_slope(std::span<const ConvergencePoint> points) {
    if (points.size() < 2) throw InvalidConfigError("fit_slope: need at least two points");
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& p : points) {
        if (!(p.h > 0.0) || !(p.error > 0.0)) {
            std::ostringstream msg;
            msg << "fit_slope: nonpositive value (h=" << p.h << ", error=" << p.error << ")";
            throw InvalidConfigError(msg.str());
        }
        lx.push_back(std::log(p.h));
        ly.push_back(std::log(p.error));
    }
    return least_squares_line(lx, ly)[0];
}

}  // namespace nudgefem
