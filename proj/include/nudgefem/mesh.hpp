#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace nudgefem {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Structured triangulation of the unit square, N cells per side, each cell
/// split by its SW-NE diagonal.
///
/// Vertices are numbered row-major, `j * (N + 1) + i` for (x, y) = (i h, j h).
/// Cell (i, j) owns triangles `2 (j N + i)` = (SW, SE, NE) and
/// `2 (j N + i) + 1` = (SW, NE, NW), both counter-clockwise.
struct FineMesh {
    int n = 0;
    double h = 0.0;
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::uint8_t> boundary_vertex;

    double triangle_area(int t) const;
    Point centroid(int t) const;
};

FineMesh build_fine_mesh(int n);

struct CellIndex {
    int col = 0;
    int row = 0;
    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Square observation cells of width H = k h aligned with the fine grid.
/// Cell (col, row) has linear index `row * cells_per_side + col`.
struct CoarseGrid {
    int k = 1;
    int fine_n = 0;
    int cells_per_side = 0;
    double H = 0.0;
    std::vector<std::vector<int>> cell_to_fine_triangles;
    std::vector<int> fine_triangle_to_cell;
    /// (cells_per_side + 1)^2 nodes, row-major.
    std::vector<Point> coarse_vertices;

    int cell_count() const { return cells_per_side * cells_per_side; }
    int linear_index(CellIndex c) const { return c.row * cells_per_side + c.col; }
    /// Fine vertex index coinciding with coarse vertex `v`.
    int fine_vertex_of(int coarse_vertex) const;
};

CoarseGrid build_coarse_grid(const FineMesh& mesh, int k);

/// Floor convention with the top/right boundary clamped into the last cell.
CellIndex locate_cell(const CoarseGrid& grid, Point p);

}  // namespace nudgefem
