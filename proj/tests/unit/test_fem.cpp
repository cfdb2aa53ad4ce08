#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "nudgefem/errors.hpp"
#include "nudgefem/fem.hpp"
#include "oracles.hpp"

using namespace nudgefem;

namespace {

std::vector<Barycentric> random_points(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Barycentric> pts;
    while (static_cast<int>(pts.size()) < count) {
        const double a = u(rng), b = u(rng);
        if (a + b > 1.0) continue;
        pts.push_back({1.0 - a - b, a, b});
    }
    return pts;
}

double integrate_xy(const QuadratureRule& rule, int a, int b) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
        s += rule.weights[k] * std::pow(rule.points[k][1], a) * std::pow(rule.points[k][2], b);
    }
    return s;
}

}  // namespace

TEST(BasisP1, NodalAndCentroid) {
    const auto c = eval_basis_p1({1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (double v : c.values) EXPECT_DOUBLE_EQ(v, 1.0 / 3);
    const auto v1 = eval_basis_p1({1.0, 0.0, 0.0});
    EXPECT_EQ(v1.values, (std::array<double, 3>{1.0, 0.0, 0.0}));
}

TEST(BasisP1, PartitionOfUnity) {
    for (const auto& p : random_points(100, 1)) {
        const auto b = eval_basis_p1(p);
        EXPECT_NEAR(b.values[0] + b.values[1] + b.values[2], 1.0, 1e-14);
        EXPECT_NEAR(b.gradients[0][0] + b.gradients[1][0] + b.gradients[2][0], 0.0, 1e-14);
        EXPECT_NEAR(b.gradients[0][1] + b.gradients[1][1] + b.gradients[2][1], 0.0, 1e-14);
    }
}

TEST(BasisP2, NodalProperty) {
    const std::array<Barycentric, 6> nodes = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                              {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}};
    for (int i = 0; i < 6; ++i) {
        const auto b = eval_basis_p2(nodes[i]);
        for (int j = 0; j < 6; ++j) EXPECT_NEAR(b.values[j], i == j ? 1.0 : 0.0, 1e-15) << i << ' ' << j;
    }
}

TEST(BasisP2, PartitionOfUnity) {
    for (const auto& p : random_points(100, 2)) {
        const auto b = eval_basis_p2(p);
        double s = 0.0, gx = 0.0, gy = 0.0;
        for (int i = 0; i < 6; ++i) {
            s += b.values[i];
            gx += b.gradients[i][0];
            gy += b.gradients[i][1];
        }
        EXPECT_NEAR(s, 1.0, 1e-14);
        EXPECT_NEAR(gx, 0.0, 1e-13);
        EXPECT_NEAR(gy, 0.0, 1e-13);
    }
}

TEST(BasisGradients, MatchDirectionalDifferences) {
    const double step = 1e-6;
    for (const auto& p : random_points(50, 3)) {
        // reference coordinates (l1, l2)
        const Barycentric px{p[0] - step, p[1] + step, p[2]};
        const Barycentric mx{p[0] + step, p[1] - step, p[2]};
        const Barycentric py{p[0] - step, p[1], p[2] + step};
        const Barycentric my{p[0] + step, p[1], p[2] - step};
        const auto b2 = eval_basis_p2(p);
        const auto b1 = eval_basis_p1(p);
        for (int i = 0; i < 6; ++i) {
            const double dx = (eval_basis_p2(px).values[i] - eval_basis_p2(mx).values[i]) / (2 * step);
            const double dy = (eval_basis_p2(py).values[i] - eval_basis_p2(my).values[i]) / (2 * step);
            EXPECT_NEAR(dx, b2.gradients[i][0], 1e-6);
            EXPECT_NEAR(dy, b2.gradients[i][1], 1e-6);
        }
        for (int i = 0; i < 3; ++i) {
            const double dx = (eval_basis_p1(px).values[i] - eval_basis_p1(mx).values[i]) / (2 * step);
            const double dy = (eval_basis_p1(py).values[i] - eval_basis_p1(my).values[i]) / (2 * step);
            EXPECT_NEAR(dx, b1.gradients[i][0], 1e-6);
            EXPECT_NEAR(dy, b1.gradients[i][1], 1e-6);
        }
    }
}

TEST(Quadrature, ConstantGivesReferenceArea) {
    EXPECT_NEAR(integrate_xy(quadrature_rule(1), 0, 0), 0.5, 1e-15);
}

TEST(Quadrature, DegreeFiveMonomial) {
    EXPECT_NEAR(integrate_xy(quadrature_rule(5), 2, 3), 1.0 / 420.0, 1e-15);
    EXPECT_NEAR(oracle::monomial_integral(2, 3), 1.0 / 420.0, 1e-17);
}

TEST(Quadrature, DegreeEightSixthOrderMonomial) {
    EXPECT_NEAR(integrate_xy(quadrature_rule(8), 3, 3), 1.0 / 1120.0, 1e-15);
}

TEST(Quadrature, ExactnessSweep) {
    for (int d = 1; d <= 10; ++d) {
        const auto& rule = quadrature_rule(d);
        EXPECT_GE(rule.degree, d);
        double wsum = 0.0;
        for (double w : rule.weights) {
            EXPECT_GT(w, 0.0);
            wsum += w;
        }
        EXPECT_NEAR(wsum, 0.5, 1e-15);
        for (const auto& p : rule.points) {
            for (double l : p) EXPECT_GE(l, 0.0);
        }
        for (int a = 0; a <= rule.degree; ++a) {
            for (int b = 0; a + b <= rule.degree; ++b) {
                EXPECT_NEAR(integrate_xy(rule, a, b), oracle::monomial_integral(a, b), 1e-14)
                    << "degree " << d << " monomial x^" << a << " y^" << b;
            }
        }
    }
}

TEST(Quadrature, UnsupportedDegree) {
    EXPECT_THROW(quadrature_rule(0), InvalidConfigError);
    EXPECT_THROW(quadrature_rule(11), InvalidConfigError);
}

TEST(DofMap, CountsTwoByTwo) {
    const auto dm = build_dofmap(build_fine_mesh(2));
    EXPECT_EQ(dm.p2_nodes, 25);
    EXPECT_EQ(dm.velocity_dofs(), 50);
    EXPECT_EQ(dm.pressure_dofs, 9);
    EXPECT_EQ(dm.boundary_velocity_dofs.size(), 32u);
}

TEST(DofMap, CountsFourByFour) {
    const auto dm = build_dofmap(build_fine_mesh(4));
    EXPECT_EQ(dm.p2_nodes, 81);
}

TEST(DofMap, SharedMidpointsAndBoundaryList) {
    const int n = 5;
    const auto dm = build_dofmap(build_fine_mesh(n));
    std::vector<int> uses(dm.p2_nodes, 0);
    for (const auto& tri : dm.velocity_nodes) {
        for (int a = 3; a < 6; ++a) ++uses[tri[a]];
    }
    std::vector<int> node_tris(dm.p2_nodes, 0);
    for (int node = 0; node < dm.p2_nodes; ++node) {
        const auto p = dm.node_coords[node];
        const bool on_boundary = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
        if (uses[node] > 0) {
            EXPECT_EQ(uses[node], on_boundary ? 1 : 2) << node;
        }
    }
    std::set<int> expected;
    for (int c = 0; c < 2; ++c) {
        for (int node = 0; node < dm.p2_nodes; ++node) {
            const auto p = dm.node_coords[node];
            if (p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0) expected.insert(dm.velocity_dof(c, node));
        }
    }
    EXPECT_EQ(std::set<int>(dm.boundary_velocity_dofs.begin(), dm.boundary_velocity_dofs.end()), expected);
    EXPECT_TRUE(std::is_sorted(dm.boundary_velocity_dofs.begin(), dm.boundary_velocity_dofs.end()));
}

TEST(DofMap, LocalNodesMatchGeometry) {
    const auto mesh = build_fine_mesh(3);
    const auto dm = build_dofmap(mesh);
    for (int t = 0; t < dm.triangle_count(); ++t) {
        const auto& nodes = dm.velocity_nodes[t];
        for (int a = 0; a < 3; ++a) {
            const auto v = mesh.vertices[mesh.triangles[t][a]];
            EXPECT_DOUBLE_EQ(dm.node_coords[nodes[a]].x, v.x);
            EXPECT_DOUBLE_EQ(dm.node_coords[nodes[a]].y, v.y);
            EXPECT_EQ(dm.pressure_nodes[t][a], mesh.triangles[t][a]);
        }
        const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (int e = 0; e < 3; ++e) {
            const auto p = dm.node_coords[nodes[pairs[e][0]]], q = dm.node_coords[nodes[pairs[e][1]]];
            EXPECT_NEAR(dm.node_coords[nodes[3 + e]].x, 0.5 * (p.x + q.x), 1e-15);
            EXPECT_NEAR(dm.node_coords[nodes[3 + e]].y, 0.5 * (p.y + q.y), 1e-15);
        }
    }
}

TEST(AffineMap, AreaAndGradients) {
    const AffineMap map({0.25, 0.5}, {0.5, 0.5}, {0.5, 0.75});
    EXPECT_NEAR(map.jacobian_determinant(), 2 * 0.25 * 0.25 / 2, 1e-16);
    const auto centre = map.map({1.0 / 3, 1.0 / 3, 1.0 / 3});
    EXPECT_NEAR(centre.x, (0.25 + 0.5 + 0.5) / 3, 1e-15);
    EXPECT_NEAR(centre.y, (0.5 + 0.5 + 0.75) / 3, 1e-15);
    // lambda1 = 4 (x - 0.25) - 4 (y - 0.5) on this triangle
    const auto g = map.push_gradient({1.0, 0.0});
    EXPECT_NEAR(g[0], 4.0, 1e-14);
    EXPECT_NEAR(g[1], -4.0, 1e-14);
}
