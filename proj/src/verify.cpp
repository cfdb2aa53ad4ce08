#include "nudgefem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nudgefem/assembly.hpp"
#include "nudgefem/fem.hpp"
#include "nudgefem/manufactured.hpp"
#include "nudgefem/mesh.hpp"
#include "nudgefem/observe.hpp"
#include "nudgefem/timeloop.hpp"

namespace nudgefem {

namespace {

using manufactured::Mat2;

PropertyCheck make_check(std::string name, double measured, double tolerance, std::string detail = {}) {
    PropertyCheck c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.passed = std::isfinite(measured) && measured <= tolerance;
    c.detail = std::move(detail);
    return c;
}

std::vector<double> random_field(const DofMap& dm, std::mt19937_64& rng, bool zero_boundary) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(dm.velocity_dofs()));
    for (auto& x : v) x = dist(rng);
    if (zero_boundary) {
        for (int d : dm.boundary_velocity_dofs) v[static_cast<std::size_t>(d)] = 0.0;
    }
    return v;
}

struct PointValue {
    Vec2 value{};
    Mat2 grad{};
};

PointValue evaluate_p2(const DofMap& dm, std::span<const double> v, int t, const AffineMap& map,
                       const Barycentric& lambda) {
    const auto basis = eval_basis_p2(lambda);
    const auto& nodes = dm.velocity_nodes[static_cast<std::size_t>(t)];
    PointValue out;
    for (int a = 0; a < 6; ++a) {
        const auto g = map.push_gradient(basis.gradients[a]);
        for (int c = 0; c < 2; ++c) {
            const double coef = v[static_cast<std::size_t>(dm.velocity_dof(c, nodes[a]))];
            out.value[c] += coef * basis.values[a];
            out.grad[c][0] += coef * g[0];
            out.grad[c][1] += coef * g[1];
        }
    }
    return out;
}

double evaluate_p1(const DofMap& dm, std::span<const double> q, int t, const Barycentric& lambda) {
    const auto basis = eval_basis_p1(lambda);
    const auto& nodes = dm.pressure_nodes[static_cast<std::size_t>(t)];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += q[static_cast<std::size_t>(nodes[a])] * basis.values[a];
    return s;
}

// Direct integrals of one velocity field (and a pressure field) over the mesh.
struct DirectIntegrals {
    double mass = 0.0;       // int |v|^2
    double stiffness = 0.0;  // int |grad v|^2
    double graddiv = 0.0;    // int (div v)^2
    double divergence = 0.0; // int q div v
    double divergence_scale = 0.0;
};

DirectIntegrals integrate_directly(const DofMap& dm, std::span<const double> v, std::span<const double> q) {
    const auto& rule = quadrature_rule(8);
    DirectIntegrals out;
    for (int t = 0; t < dm.triangle_count(); ++t) {
        const auto map = dm.element_map(t);
        const double det = map.jacobian_determinant();
        for (std::size_t k = 0; k < rule.points.size(); ++k) {
            const double w = rule.weights[k] * det;
            const auto pv = evaluate_p2(dm, v, t, map, rule.points[k]);
            const double div = pv.grad[0][0] + pv.grad[1][1];
            const double qv = evaluate_p1(dm, q, t, rule.points[k]);
            out.mass += w * (pv.value[0] * pv.value[0] + pv.value[1] * pv.value[1]);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) out.stiffness += w * pv.grad[i][j] * pv.grad[i][j];
            }
            out.graddiv += w * div * div;
            out.divergence += w * qv * div;
            out.divergence_scale += w * std::abs(qv * div);
        }
    }
    return out;
}

// ||I_H v||^2 from cell means or coarse nodal values computed here.
double direct_observed_norm(const DofMap& dm, const CoarseGrid& grid, InterpolantKind kind,
                            std::span<const double> v) {
    if (kind == InterpolantKind::PiecewiseConstantAverage) {
        const auto& rule = quadrature_rule(8);
        double total = 0.0;
        for (int cell = 0; cell < grid.cell_count(); ++cell) {
            Vec2 integral{};
            for (int t : grid.cell_to_fine_triangles[static_cast<std::size_t>(cell)]) {
                const auto map = dm.element_map(t);
                for (std::size_t k = 0; k < rule.points.size(); ++k) {
                    const auto pv = evaluate_p2(dm, v, t, map, rule.points[k]);
                    const double w = rule.weights[k] * map.jacobian_determinant();
                    integral[0] += w * pv.value[0];
                    integral[1] += w * pv.value[1];
                }
            }
            const double area = grid.H * grid.H;
            total += (integral[0] * integral[0] + integral[1] * integral[1]) / area;
        }
        return total;
    }
    const int m = grid.cells_per_side;
    const int side = dm.nodes_per_side;
    auto nodal = [&](int ci, int cj, int c) {
        const int node = (2 * cj * grid.k) * side + 2 * ci * grid.k;
        return v[static_cast<std::size_t>(dm.velocity_dof(c, node))];
    };
    // int over a triangle of a linear function with vertex values a, b, c
    auto tri = [](double area, double a, double b, double c) {
        return area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
    };
    const double area = 0.5 * grid.H * grid.H;
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            for (int c = 0; c < 2; ++c) {
                const double sw = nodal(i, j, c), se = nodal(i + 1, j, c);
                const double ne = nodal(i + 1, j + 1, c), nw = nodal(i, j + 1, c);
                total += tri(area, sw, se, ne) + tri(area, sw, ne, nw);
            }
        }
    }
    return total;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

template <class F>
double d1(F f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double d2(F f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace

PropertyCheck check_skew_symmetry(const std::vector<int>& ns, int pairs, unsigned seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int total = 0;
    for (int n : ns) {
        const auto mesh = build_fine_mesh(n);
        const auto dm = build_dofmap(mesh);
        const auto& rule = quadrature_rule(5);
        for (int p = 0; p < pairs; ++p) {
            const auto w = random_field(dm, rng, true);
            const auto v = random_field(dm, rng, true);
            const auto c = assemble_convection(dm, rule, w);
            worst = std::max(worst, std::abs(quadratic_form(c, v)));
            ++total;
        }
    }
    std::ostringstream detail;
    detail << total << " random (w, v) pairs with zero boundary values";
    return make_check("skew_symmetry |v^T C(w) v|", worst, 1e-12, detail.str());
}

std::vector<PropertyCheck> check_gram_consistency(int n, int ratio_k, int fields, unsigned seed) {
    const auto mesh = build_fine_mesh(n);
    const auto dm = build_dofmap(mesh);
    const auto grid = build_coarse_grid(mesh, ratio_k);
    const auto& rule = quadrature_rule(5);
    const auto ops = assemble_operators(dm, rule);
    const auto pc = assemble_nudging(dm, grid, InterpolantKind::PiecewiseConstantAverage);
    const auto lag = assemble_nudging(dm, grid, InterpolantKind::CoarseLagrangeP1);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double e_mass = 0.0, e_stiff = 0.0, e_div = 0.0, e_gd = 0.0, e_pc = 0.0, e_lag = 0.0;
    auto rel = [](double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); };
    for (int f = 0; f < fields; ++f) {
        const auto v = random_field(dm, rng, false);
        std::vector<double> q(static_cast<std::size_t>(dm.pressure_dofs));
        for (auto& x : q) x = dist(rng);
        const auto direct = integrate_directly(dm, v, q);
        e_mass = std::max(e_mass, rel(quadratic_form(ops.mass, v), direct.mass, direct.mass));
        e_stiff = std::max(e_stiff, rel(quadratic_form(ops.stiffness, v), direct.stiffness, direct.stiffness));
        e_gd = std::max(e_gd, rel(quadratic_form(ops.graddiv, v), direct.graddiv, direct.graddiv));
        const auto dv = spmv(ops.divergence, v);
        double qdv = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) qdv += q[i] * dv[i];
        e_div = std::max(e_div, rel(qdv, direct.divergence, direct.divergence_scale));
        const double opc = direct_observed_norm(dm, grid, InterpolantKind::PiecewiseConstantAverage, v);
        e_pc = std::max(e_pc, rel(quadratic_form(pc.matrix, v), opc, opc));
        const double olag = direct_observed_norm(dm, grid, InterpolantKind::CoarseLagrangeP1, v);
        e_lag = std::max(e_lag, rel(quadratic_form(lag.matrix, v), olag, olag));
    }
    std::ostringstream detail;
    detail << fields << " random fields, N=" << n << ", H=" << grid.H << ", relative to the direct integral";
    const std::string d = detail.str();
    return {make_check("gram mass", e_mass, 1e-12, d),
            make_check("gram stiffness", e_stiff, 1e-12, d),
            make_check("gram divergence", e_div, 1e-12, d),
            make_check("gram grad-div", e_gd, 1e-12, d),
            make_check("gram nudging (pc)", e_pc, 1e-12, d),
            make_check("gram nudging (lagrange)", e_lag, 1e-12, d)};
}

std::vector<PropertyCheck> check_projection(int n, int ratio_k, int random_fields, unsigned seed) {
    const auto mesh = build_fine_mesh(n);
    const auto dm = build_dofmap(mesh);
    const auto grid = build_coarse_grid(mesh, ratio_k);
    const CoarseObserver observer(dm, grid, InterpolantKind::PiecewiseConstantAverage);
    const auto sample = standard_sample(dm, random_fields, seed);
    double worst = 0.0;
    for (const auto& v : sample) {
        const auto nrm = interpolant_residual_norms(observer, dm, v);
        const double f2 = nrm.field * nrm.field;
        const double gap = std::abs(f2 - nrm.interpolant * nrm.interpolant - nrm.residual * nrm.residual);
        worst = std::max(worst, gap / f2);
    }
    const auto quality = measure_constants(observer, dm, sample, "standard sample");
    std::ostringstream detail;
    detail << sample.size() << " fields, N=" << n << ", H=" << grid.H;
    return {make_check("projection pythagoras (relative)", worst, 1e-12, detail.str()),
            make_check("projection c0 - 1", quality.c0_measured - 1.0, 1e-12, detail.str())};
}

PropertyCheck check_quadrature_exactness() {
    double worst = 0.0;
    int monomials = 0;
    for (int degree = 1; degree <= 10; ++degree) {
        const auto& rule = quadrature_rule(degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                for (int c = 0; a + b + c <= degree; ++c) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < rule.points.size(); ++k) {
                        const auto& l = rule.points[k];
                        s += rule.weights[k] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
                    }
                    const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
                    worst = std::max(worst, std::abs(s - exact));
                    ++monomials;
                }
            }
        }
    }
    std::ostringstream detail;
    detail << monomials << " barycentric monomials over degrees 1..10";
    return make_check("quadrature exactness", worst, 1e-14, detail.str());
}

PropertyCheck check_forcing_residual() {
    using namespace manufactured;
    const double h = 1e-3;
    double worst = 0.0;
    int samples = 0;
    for (double nu : {1.0, 1e-2, 1e-6}) {
        for (int ix = 1; ix <= 6; ++ix) {
            for (int iy = 1; iy <= 6; ++iy) {
                for (double t : {0.0, 0.37, 1.3}) {
                    const double x = ix / 7.0, y = iy / 7.0 + 0.013;
                    const auto u = eval_u(x, y, t);
                    Vec2 res{};
                    for (int c = 0; c < 2; ++c) {
                        auto ux = [&](double s) { return eval_u(s, y, t)[c]; };
                        auto uy = [&](double s) { return eval_u(x, s, t)[c]; };
                        auto ut = [&](double s) { return eval_u(x, y, s)[c]; };
                        const double lap = d2(ux, x, h) + d2(uy, y, h);
                        const double conv = u[0] * d1(ux, x, h) + u[1] * d1(uy, y, h);
                        const double dp = c == 0 ? d1([&](double s) { return eval_p(s, y, t); }, x, h)
                                                 : d1([&](double s) { return eval_p(x, s, t); }, y, h);
                        res[c] = d1(ut, t, h) - nu * lap + conv + dp - eval_f(x, y, t, nu)[c];
                    }
                    worst = std::max({worst, std::abs(res[0]), std::abs(res[1])});
                    ++samples;
                }
            }
        }
    }
    std::ostringstream detail;
    detail << samples << " interior points, nu in {1, 1e-2, 1e-6}, fourth-order differences";
    return make_check("manufactured forcing residual", worst, 1e-5, detail.str());
}

std::vector<PropertyCheck> check_exact_solution() {
    using namespace manufactured;
    double div = 0.0;
    double trace = 0.0;
    for (double t : {0.0, 0.5, 1.1, 2.9}) {
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 40; ++j) {
                const auto g = eval_grad_u(i / 40.0, j / 40.0, t);
                div = std::max(div, std::abs(g[0][0] + g[1][1]));
            }
            const double s = i / 40.0;
            for (const auto& u : {eval_u(s, 0.0, t), eval_u(s, 1.0, t), eval_u(0.0, s, t), eval_u(1.0, s, t)}) {
                trace = std::max({trace, std::abs(u[0]), std::abs(u[1])});
            }
        }
    }
    return {make_check("exact divergence", div, 1e-13, "41x41 grid, 4 times"),
            make_check("exact boundary trace", trace, 1e-13, "41 points per side, 4 times")};
}

std::vector<PropertyCheck> check_step_residuals(int n, int steps) {
    SimulationConfig config;
    config.n = n;
    config.ratio_k = 2;
    config.nu = 1e-2;
    config.mu = 0.05;
    config.beta = 1.0;
    config.t_final = 1.0;
    config.dt = config.t_final / steps;
    NudgedSimulation sim(config);
    double div = 0.0;
    double mean = 0.0;
    int count = 0;
    sim.run([&](const TimeState& state, const StepDiagnostics& d) {
        if (state.step == 0) return;
        div = std::max(div, d.div_residual);
        mean = std::max(mean, d.mean_residual);
        ++count;
    });
    std::ostringstream detail;
    detail << count << " steps, N=" << n << ", nu=1e-2, mu=0.05";
    return {make_check("per-step ||D u||_inf", div, 1e-9, detail.str()),
            make_check("per-step |m^T p|", mean, 1e-10, detail.str())};
}

std::vector<PropertyCheck> run_property_suite(const PropertySuiteOptions& options) {
    std::vector<PropertyCheck> out;
    auto append = [&](std::vector<PropertyCheck> more) { out.insert(out.end(), more.begin(), more.end()); };
    out.push_back(check_skew_symmetry(options.skew_ns, options.skew_pairs, options.seed));
    append(check_gram_consistency(options.gram_n, options.gram_ratio_k, options.random_fields, options.seed + 1));
    append(check_projection(options.gram_n, options.gram_ratio_k, options.random_fields, options.seed + 2));
    out.push_back(check_quadrature_exactness());
    out.push_back(check_forcing_residual());
    append(check_exact_solution());
    append(check_step_residuals(options.step_run_n, options.step_run_steps));
    return out;
}

bool all_passed(const std::vector<PropertyCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

}  // namespace nudgefem
