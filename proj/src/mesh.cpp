#include "nudgefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

double FineMesh::triangle_area(int t) const {
    const auto& tri = triangles[static_cast<std::size_t>(t)];
    const Point a = vertices[tri[0]];
    const Point b = vertices[tri[1]];
    const Point c = vertices[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point FineMesh::centroid(int t) const {
    const auto& tri = triangles[static_cast<std::size_t>(t)];
    Point c;
    for (int v : tri) {
        c.x += vertices[v].x / 3.0;
        c.y += vertices[v].y / 3.0;
    }
    return c;
}

FineMesh build_fine_mesh(int n) {
    if (n < 2) {
        std::ostringstream msg;
        msg << "build_fine_mesh: N must be >= 2, got " << n;
        throw InvalidConfigError(msg.str());
    }
    FineMesh mesh;
    mesh.n = n;
    mesh.h = 1.0 / n;
    const int side = n + 1;
    mesh.vertices.reserve(static_cast<std::size_t>(side * side));
    mesh.boundary_vertex.reserve(static_cast<std::size_t>(side * side));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            // i / n rather than i * h so that x = 1 is exact
            mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            const bool on_boundary = i == 0 || i == n || j == 0 || j == n;
            mesh.boundary_vertex.push_back(on_boundary ? 1 : 0);
        }
    }
    mesh.triangles.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int sw = j * side + i;
            const int se = sw + 1;
            const int nw = sw + side;
            const int ne = nw + 1;
            mesh.triangles.push_back({sw, se, ne});
            mesh.triangles.push_back({sw, ne, nw});
        }
    }
    return mesh;
}

int CoarseGrid::fine_vertex_of(int coarse_vertex) const {
    const int side = cells_per_side + 1;
    const int ci = coarse_vertex % side;
    const int cj = coarse_vertex / side;
    return (cj * k) * (fine_n + 1) + ci * k;
}

CoarseGrid build_coarse_grid(const FineMesh& mesh, int k) {
    if (k < 1 || mesh.n % k != 0) {
        std::ostringstream msg;
        msg << "build_coarse_grid: ratio k=" << k << " must be >= 1 and divide N=" << mesh.n;
        throw InvalidConfigError(msg.str());
    }
    CoarseGrid grid;
    grid.k = k;
    grid.fine_n = mesh.n;
    grid.cells_per_side = mesh.n / k;
    grid.H = static_cast<double>(k) / mesh.n;
    grid.cell_to_fine_triangles.resize(static_cast<std::size_t>(grid.cell_count()));
    grid.fine_triangle_to_cell.resize(mesh.triangles.size());
    for (int j = 0; j < mesh.n; ++j) {
        for (int i = 0; i < mesh.n; ++i) {
            const int cell = (j / k) * grid.cells_per_side + i / k;
            const int fine_cell = j * mesh.n + i;
            for (int t : {2 * fine_cell, 2 * fine_cell + 1}) {
                grid.cell_to_fine_triangles[cell].push_back(t);
                grid.fine_triangle_to_cell[t] = cell;
            }
        }
    }
    const int side = grid.cells_per_side;
    for (int j = 0; j <= side; ++j) {
        for (int i = 0; i <= side; ++i) {
            grid.coarse_vertices.push_back(
                {static_cast<double>(i) / side, static_cast<double>(j) / side});
        }
    }
    return grid;
}

CellIndex locate_cell(const CoarseGrid& grid, Point p) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
        std::ostringstream msg;
        msg << "locate_cell: point (" << p.x << ", " << p.y << ") lies outside [0,1]^2";
        throw OutOfDomainError(msg.str());
    }
    const int last = grid.cells_per_side - 1;
    const auto clamp_index = [&](double s) {
        return std::min(static_cast<int>(std::floor(s * grid.cells_per_side)), last);
    };
    return {clamp_index(p.x), clamp_index(p.y)};
}

}  // namespace nudgefem
