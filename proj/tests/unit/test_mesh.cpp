#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nudgefem/errors.hpp"
#include "nudgefem/mesh.hpp"

using namespace nudgefem;

TEST(FineMesh, CountsForTwoByTwo) {
    const auto m = build_fine_mesh(2);
    EXPECT_EQ(m.vertices.size(), 9u);
    EXPECT_EQ(m.triangles.size(), 8u);
    for (int t = 0; t < 8; ++t) EXPECT_DOUBLE_EQ(m.triangle_area(t), 1.0 / 8.0);
}

TEST(FineMesh, AreasForThreeByThree) {
    const auto m = build_fine_mesh(3);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        EXPECT_NEAR(m.triangle_area(t), 1.0 / 18.0, 1e-16);
    }
}

TEST(FineMesh, BoundaryFlagsTwoByTwo) {
    const auto m = build_fine_mesh(2);
    int count = 0;
    for (auto f : m.boundary_vertex) count += f;
    EXPECT_EQ(count, 8);
    EXPECT_EQ(m.boundary_vertex[4], 0);
}

TEST(FineMesh, InvariantsAcrossSizes) {
    for (int n : {2, 5, 8, 13}) {
        const auto m = build_fine_mesh(n);
        ASSERT_EQ(m.vertices.size(), static_cast<std::size_t>((n + 1) * (n + 1)));
        ASSERT_EQ(m.triangles.size(), static_cast<std::size_t>(2 * n * n));
        double total = 0.0;
        for (int t = 0; t < 2 * n * n; ++t) {
            const auto& tri = m.triangles[t];
            const auto a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
            const double signed_area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
            EXPECT_GT(signed_area, 0.0);
            EXPECT_NEAR(signed_area, 0.5 / (n * n), 1e-15);
            total += m.triangle_area(t);
        }
        EXPECT_NEAR(total, 1.0, 1e-14);
        for (std::size_t v = 0; v < m.vertices.size(); ++v) {
            const auto p = m.vertices[v];
            const bool on = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
            EXPECT_EQ(static_cast<bool>(m.boundary_vertex[v]), on);
        }
    }
}

TEST(FineMesh, DiagonalRunsSouthWestToNorthEast) {
    const int n = 4;
    const auto m = build_fine_mesh(n);
    for (int c = 0; c < n * n; ++c) {
        const int i = c % n, j = c / n;
        const int sw = j * (n + 1) + i, ne = (j + 1) * (n + 1) + i + 1;
        for (int t : {2 * c, 2 * c + 1}) {
            std::set<int> verts(m.triangles[t].begin(), m.triangles[t].end());
            EXPECT_TRUE(verts.count(sw) && verts.count(ne));
        }
    }
}

TEST(FineMesh, Deterministic) {
    const auto a = build_fine_mesh(7);
    const auto b = build_fine_mesh(7);
    EXPECT_EQ(a.triangles, b.triangles);
    EXPECT_EQ(a.boundary_vertex, b.boundary_vertex);
}

TEST(FineMesh, RejectsTooCoarse) {
    EXPECT_THROW(build_fine_mesh(1), InvalidConfigError);
    EXPECT_THROW(build_fine_mesh(0), InvalidConfigError);
}

TEST(CoarseGrid, SixByThree) {
    const auto g = build_coarse_grid(build_fine_mesh(6), 3);
    EXPECT_EQ(g.cell_count(), 4);
    for (const auto& cell : g.cell_to_fine_triangles) EXPECT_EQ(cell.size(), 18u);
    EXPECT_DOUBLE_EQ(g.H, 0.5);
}

TEST(CoarseGrid, IdentityCoarsening) {
    const auto m = build_fine_mesh(4);
    const auto g = build_coarse_grid(m, 1);
    EXPECT_EQ(g.cell_count(), 16);
    for (int c = 0; c < 16; ++c) {
        std::set<int> tris(g.cell_to_fine_triangles[c].begin(), g.cell_to_fine_triangles[c].end());
        EXPECT_EQ(tris, (std::set<int>{2 * c, 2 * c + 1}));
    }
}

TEST(CoarseGrid, RejectsNonDivisor) {
    try {
        build_coarse_grid(build_fine_mesh(4), 3);
        FAIL() << "expected InvalidConfigError";
    } catch (const InvalidConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find('3'), std::string::npos);
        EXPECT_NE(msg.find('4'), std::string::npos);
    }
}

TEST(CoarseGrid, CoverIsCompleteAndDisjoint) {
    const auto m = build_fine_mesh(12);
    for (int k : {1, 2, 3, 4, 6, 12}) {
        const auto g = build_coarse_grid(m, k);
        std::vector<int> seen(m.triangles.size(), 0);
        double area = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) {
            EXPECT_EQ(g.cell_to_fine_triangles[c].size(), static_cast<std::size_t>(2 * k * k));
            for (int t : g.cell_to_fine_triangles[c]) {
                ++seen[t];
                area += m.triangle_area(t);
                EXPECT_EQ(g.fine_triangle_to_cell[t], c);
            }
        }
        for (int s : seen) EXPECT_EQ(s, 1);
        EXPECT_NEAR(area, 1.0, 1e-14);
        EXPECT_EQ(g.coarse_vertices.size(), static_cast<std::size_t>((12 / k + 1) * (12 / k + 1)));
    }
}

TEST(CoarseGrid, CentroidsLocateToListingCell) {
    const auto m = build_fine_mesh(12);
    const auto g = build_coarse_grid(m, 3);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        EXPECT_EQ(g.linear_index(locate_cell(g, m.centroid(t))), g.fine_triangle_to_cell[t]);
    }
}

TEST(CoarseGrid, CoarseVerticesSitOnFineVertices) {
    const auto m = build_fine_mesh(12);
    const auto g = build_coarse_grid(m, 4);
    for (int v = 0; v < static_cast<int>(g.coarse_vertices.size()); ++v) {
        const auto p = m.vertices[g.fine_vertex_of(v)];
        EXPECT_DOUBLE_EQ(p.x, g.coarse_vertices[v].x);
        EXPECT_DOUBLE_EQ(p.y, g.coarse_vertices[v].y);
    }
}

TEST(LocateCell, FloorConvention) {
    const auto g = build_coarse_grid(build_fine_mesh(4), 2);
    EXPECT_EQ(locate_cell(g, {0.3, 0.7}), (CellIndex{0, 1}));
    EXPECT_EQ(locate_cell(g, {1.0, 1.0}), (CellIndex{1, 1}));
    EXPECT_EQ(locate_cell(g, {0.5, 0.5}), (CellIndex{1, 1}));
    EXPECT_EQ(locate_cell(g, {0.0, 0.0}), (CellIndex{0, 0}));
}

TEST(LocateCell, OutsideDomain) {
    const auto g = build_coarse_grid(build_fine_mesh(4), 2);
    EXPECT_THROW(locate_cell(g, {-0.1, 0.5}), OutOfDomainError);
    EXPECT_THROW(locate_cell(g, {0.5, 1.0001}), OutOfDomainError);
}
