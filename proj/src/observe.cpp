#include "nudgefem/observe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

std::string to_string(InterpolantKind kind) {
    switch (kind) {
    case InterpolantKind::PiecewiseConstantAverage:
        return "pc";
    case InterpolantKind::CoarseLagrangeP1:
        return "lagrange";
    }
    return "unknown";
}

InterpolantKind parse_interpolant_kind(std::string_view text) {
    if (text == "pc" || text == "PiecewiseConstantAverage") {
        return InterpolantKind::PiecewiseConstantAverage;
    }
    if (text == "lagrange" || text == "CoarseLagrangeP1") return InterpolantKind::CoarseLagrangeP1;
    throw InvalidConfigError("unknown interpolant kind '" + std::string(text) +
                             "' (expected pc or lagrange)");
}

namespace {

void check_compatible(const DofMap& dofmap, const CoarseGrid& grid) {
    if (grid.fine_n != dofmap.n) {
        std::ostringstream msg;
        msg << "coarse grid built for N=" << grid.fine_n << " used with a dofmap of N=" << dofmap.n;
        throw DimensionMismatchError(msg.str());
    }
}

int p2_node_of_fine_vertex(const DofMap& dofmap, int fine_vertex) {
    const int i = fine_vertex % (dofmap.n + 1);
    const int j = fine_vertex / (dofmap.n + 1);
    return (2 * j) * dofmap.nodes_per_side + 2 * i;
}

// Corner numbering of coarse cell (col, row): SW, SE, NE, NW coarse vertices.
std::array<int, 4> cell_corners(const CoarseGrid& grid, int cell) {
    const int side = grid.cells_per_side + 1;
    const int col = cell % grid.cells_per_side;
    const int row = cell / grid.cells_per_side;
    const int sw = row * side + col;
    return {sw, sw + 1, sw + side + 1, sw + side};
}

}  // namespace

CoarseObserver::CoarseObserver(const DofMap& dofmap, const CoarseGrid& grid, InterpolantKind kind)
    : kind_(kind), grid_(grid), velocity_dofs_(dofmap.velocity_dofs()) {
    check_compatible(dofmap, grid);
    const int nv = dofmap.velocity_dofs();
    std::vector<Triplet> e_entries;
    std::vector<Triplet> w_entries;
    const double H = grid.H;

    upper_half_.resize(static_cast<std::size_t>(dofmap.triangle_count()));
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto& nodes = dofmap.velocity_nodes[t];
        Point c{};
        for (int v = 0; v < 3; ++v) {
            c.x += dofmap.node_coords[nodes[v]].x / 3.0;
            c.y += dofmap.node_coords[nodes[v]].y / 3.0;
        }
        const int cell = grid.fine_triangle_to_cell[t];
        const double x0 = (cell % grid.cells_per_side) * H;
        const double y0 = (cell / grid.cells_per_side) * H;
        upper_half_[t] = (c.y - y0) > (c.x - x0) ? 1 : 0;
    }

    if (kind == InterpolantKind::PiecewiseConstantAverage) {
        entities_ = grid.cell_count();
        const auto& rule = quadrature_rule(5);
        for (int cell = 0; cell < entities_; ++cell) {
            for (int t : grid.cell_to_fine_triangles[cell]) {
                const auto map = dofmap.element_map(t);
                const auto& nodes = dofmap.velocity_nodes[t];
                std::array<double, 6> integrals{};
                for (std::size_t q = 0; q < rule.points.size(); ++q) {
                    const auto basis = eval_basis_p2(rule.points[q]);
                    for (int a = 0; a < 6; ++a) {
                        integrals[a] += rule.weights[q] * map.jacobian_determinant() * basis.values[a];
                    }
                }
                for (int c = 0; c < 2; ++c) {
                    for (int a = 0; a < 6; ++a) {
                        e_entries.push_back({c * entities_ + cell, dofmap.velocity_dof(c, nodes[a]),
                                             integrals[a] / (H * H)});
                    }
                }
            }
            for (int c = 0; c < 2; ++c) {
                w_entries.push_back({c * entities_ + cell, c * entities_ + cell, H * H});
            }
        }
    } else {
        entities_ = static_cast<int>(grid.coarse_vertices.size());
        for (int v = 0; v < entities_; ++v) {
            const int node = p2_node_of_fine_vertex(dofmap, grid.fine_vertex_of(v));
            for (int c = 0; c < 2; ++c) {
                e_entries.push_back({c * entities_ + v, dofmap.velocity_dof(c, node), 1.0});
            }
        }
        // coarse P1 mass matrix, triangles (SW, SE, NE) and (SW, NE, NW)
        const double area = 0.5 * H * H;
        for (int cell = 0; cell < grid.cell_count(); ++cell) {
            const auto corner = cell_corners(grid, cell);
            const std::array<std::array<int, 3>, 2> tris{
                {{corner[0], corner[1], corner[2]}, {corner[0], corner[2], corner[3]}}};
            for (const auto& tri : tris) {
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) {
                        const double value = area / 12.0 * (a == b ? 2.0 : 1.0);
                        for (int c = 0; c < 2; ++c) {
                            w_entries.push_back({c * entities_ + tri[a], c * entities_ + tri[b], value});
                        }
                    }
                }
            }
        }
    }
    observation_ = SparseMatrix::from_triplets(2 * entities_, nv, std::move(e_entries));
    gram_ = SparseMatrix::from_triplets(2 * entities_, 2 * entities_, std::move(w_entries));
}

std::vector<double> CoarseObserver::apply(std::span<const double> field) const {
    if (static_cast<int>(field.size()) != velocity_dofs_) {
        std::ostringstream msg;
        msg << "apply_interpolant: field has " << field.size() << " entries, expected "
            << velocity_dofs_;
        throw DimensionMismatchError(msg.str());
    }
    return spmv(observation_, field);
}

Vec2 CoarseObserver::evaluate(std::span<const double> coarse, int fine_triangle, Point p) const {
    const int cell = grid_.fine_triangle_to_cell[fine_triangle];
    if (kind_ == InterpolantKind::PiecewiseConstantAverage) {
        return {coarse[cell], coarse[entities_ + cell]};
    }
    const auto corner = cell_corners(grid_, cell);
    const double s = (p.x - (cell % grid_.cells_per_side) * grid_.H) / grid_.H;
    const double r = (p.y - (cell / grid_.cells_per_side) * grid_.H) / grid_.H;
    std::array<double, 4> w{};
    if (upper_half_[fine_triangle]) {
        w = {1.0 - r, 0.0, s, r - s};
    } else {
        w = {1.0 - s, s - r, r, 0.0};
    }
    Vec2 out{};
    for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < 4; ++k) out[c] += w[k] * coarse[c * entities_ + corner[k]];
    }
    return out;
}

std::vector<double> CoarseObserver::observe_function(const VelocityFunction& u,
                                                     const DofMap& dofmap) const {
    check_compatible(dofmap, grid_);
    std::vector<double> out(static_cast<std::size_t>(coarse_size()), 0.0);
    if (kind_ == InterpolantKind::PiecewiseConstantAverage) {
        const auto& rule = quadrature_rule(8);
        const double inv_area = 1.0 / (grid_.H * grid_.H);
        for (int cell = 0; cell < entities_; ++cell) {
            for (int t : grid_.cell_to_fine_triangles[cell]) {
                const auto map = dofmap.element_map(t);
                for (std::size_t q = 0; q < rule.points.size(); ++q) {
                    const Point x = map.map(rule.points[q]);
                    const Vec2 val = u(x.x, x.y);
                    const double w = rule.weights[q] * map.jacobian_determinant() * inv_area;
                    out[cell] += w * val[0];
                    out[entities_ + cell] += w * val[1];
                }
            }
        }
    } else {
        for (int v = 0; v < entities_; ++v) {
            const Point p = grid_.coarse_vertices[v];
            const Vec2 val = u(p.x, p.y);
            out[v] = val[0];
            out[entities_ + v] = val[1];
        }
    }
    return out;
}

std::vector<double> apply_interpolant(const CoarseObserver& observer, std::span<const double> field) {
    return observer.apply(field);
}

InterpolantNorms interpolant_residual_norms(const CoarseObserver& observer, const DofMap& dofmap,
                                            std::span<const double> field, int quadrature_degree) {
    const auto coarse = observer.apply(field);
    const auto& rule = quadrature_rule(std::max(quadrature_degree, 5));
    InterpolantNorms sq;
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto map = dofmap.element_map(t);
        const auto& nodes = dofmap.velocity_nodes[t];
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto basis = eval_basis_p2(rule.points[q]);
            const double w = rule.weights[q] * map.jacobian_determinant();
            const Point x = map.map(rule.points[q]);
            const Vec2 ih = observer.evaluate(coarse, t, x);
            for (int c = 0; c < 2; ++c) {
                double value = 0.0;
                Grad2 grad{0.0, 0.0};
                for (int a = 0; a < 6; ++a) {
                    const double coef = field[dofmap.velocity_dof(c, nodes[a])];
                    value += coef * basis.values[a];
                    const Grad2 g = map.push_gradient(basis.gradients[a]);
                    grad[0] += coef * g[0];
                    grad[1] += coef * g[1];
                }
                sq.field += w * value * value;
                sq.interpolant += w * ih[c] * ih[c];
                sq.residual += w * (value - ih[c]) * (value - ih[c]);
                sq.gradient += w * (grad[0] * grad[0] + grad[1] * grad[1]);
            }
        }
    }
    return {std::sqrt(sq.interpolant), std::sqrt(sq.residual), std::sqrt(sq.gradient),
            std::sqrt(sq.field)};
}

InterpolantQuality measure_constants(const CoarseObserver& observer, const DofMap& dofmap,
                                     std::span<const std::vector<double>> sample,
                                     std::string description) {
    if (sample.empty()) throw InvalidConfigError("measure_constants: empty sample");
    InterpolantQuality quality;
    quality.sample_size = static_cast<int>(sample.size());
    quality.sample_description = std::move(description);
    for (const auto& field : sample) {
        const auto norms = interpolant_residual_norms(observer, dofmap, field);
        if (norms.field <= 0.0 || norms.gradient <= 0.0) {
            throw InvalidConfigError("measure_constants: sample contains a zero field");
        }
        quality.c0_measured = std::max(quality.c0_measured, norms.interpolant / norms.field);
        quality.cI_measured =
            std::max(quality.cI_measured, norms.residual / (observer.grid().H * norms.gradient));
    }
    return quality;
}

std::vector<double> interpolate_p2(const DofMap& dofmap, const VelocityFunction& u) {
    std::vector<double> v(static_cast<std::size_t>(dofmap.velocity_dofs()));
    for (int node = 0; node < dofmap.p2_nodes; ++node) {
        const Point p = dofmap.node_coords[node];
        const Vec2 val = u(p.x, p.y);
        v[dofmap.velocity_dof(0, node)] = val[0];
        v[dofmap.velocity_dof(1, node)] = val[1];
    }
    return v;
}

std::vector<std::vector<double>> standard_sample(const DofMap& dofmap, int random_count,
                                                 unsigned seed) {
    std::vector<std::vector<double>> sample;
    constexpr double kPi = std::numbers::pi;
    for (int m = 1; m <= 4; ++m) {
        sample.push_back(interpolate_p2(dofmap, [m](double x, double y) {
            const double s = std::sin(m * kPi * x) * std::sin(m * kPi * y);
            return Vec2{s, 0.5 * s};
        }));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < random_count; ++i) {
        std::vector<double> v(static_cast<std::size_t>(dofmap.velocity_dofs()));
        for (double& x : v) x = dist(rng);
        for (int d : dofmap.boundary_velocity_dofs) v[d] = 0.0;
        sample.push_back(std::move(v));
    }
    return sample;
}

std::vector<std::vector<double>> coarse_vertex_peaks(const DofMap& dofmap, const CoarseGrid& grid) {
    std::vector<std::vector<double>> sample;
    const int side = grid.cells_per_side + 1;
    const double spacing = 0.5 / dofmap.n;
    for (int v = 0; v < static_cast<int>(grid.coarse_vertices.size()); ++v) {
        const int i = v % side;
        const int j = v / side;
        if (i == 0 || j == 0 || i == side - 1 || j == side - 1) continue;
        const Point centre = grid.coarse_vertices[v];
        std::vector<double> field(static_cast<std::size_t>(dofmap.velocity_dofs()), 0.0);
        for (int node = 0; node < dofmap.p2_nodes; ++node) {
            const Point p = dofmap.node_coords[node];
            const double r = std::hypot(p.x - centre.x, p.y - centre.y);
            field[dofmap.velocity_dof(0, node)] = std::max(0.0, std::log(grid.H / std::max(r, spacing)));
        }
        sample.push_back(std::move(field));
    }
    return sample;
}

}  // namespace nudgefem
