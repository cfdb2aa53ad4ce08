#pragma once

#include <array>
#include <vector>

#include "nudgefem/mesh.hpp"

namespace nudgefem {

/// Barycentric coordinates (lambda0, lambda1, lambda2) on the reference triangle
/// with vertices (0,0), (1,0), (0,1); reference coordinates are (lambda1, lambda2).
using Barycentric = std::array<double, 3>;
using Grad2 = std::array<double, 2>;

struct BasisP1 {
    std::array<double, 3> values{};
    /// Gradients with respect to the reference coordinates.
    std::array<Grad2, 3> gradients{};
};

/// Local P2 numbering: vertices 0, 1, 2, then midpoints of edges (0,1), (1,2), (2,0).
struct BasisP2 {
    std::array<double, 6> values{};
    std::array<Grad2, 6> gradients{};
};

BasisP1 eval_basis_p1(const Barycentric& lambda);
BasisP2 eval_basis_p2(const Barycentric& lambda);

struct QuadratureRule {
    std::vector<Barycentric> points;
    /// Positive, summing to the reference area 1/2.
    std::vector<double> weights;
    int degree = 0;
};

/// Fully symmetric rule exact to at least `degree` (1..10). Rules are cached.
const QuadratureRule& quadrature_rule(int degree);

/// Affine map from the reference triangle onto a physical triangle.
class AffineMap {
public:
    AffineMap(Point v0, Point v1, Point v2);

    Point map(const Barycentric& lambda) const;
    /// Reference gradient to physical gradient (J^{-T} g).
    Grad2 push_gradient(const Grad2& g) const;
    /// |det J|, i.e. twice the triangle area.
    double jacobian_determinant() const { return det_; }

private:
    Point v0_;
    double j00_, j01_, j10_, j11_;
    double det_;
    double i00_, i01_, i10_, i11_;
};

/// Degrees of freedom of the P2 velocity / P1 pressure pair on a FineMesh.
///
/// P2 nodes form the (2N+1)^2 lattice of spacing h/2, numbered row-major.
/// Velocity dofs are component-major: dof = component * p2_nodes + node.
/// Pressure dofs coincide with the mesh vertices.
struct DofMap {
    int n = 0;
    int nodes_per_side = 0;
    int p2_nodes = 0;
    int pressure_dofs = 0;
    std::vector<std::array<int, 6>> velocity_nodes;
    std::vector<std::array<int, 3>> pressure_nodes;
    std::vector<Point> node_coords;
    std::vector<Point> pressure_coords;
    /// Sorted velocity dofs (both components) lying on the boundary.
    std::vector<int> boundary_velocity_dofs;

    int velocity_dofs() const { return 2 * p2_nodes; }
    int velocity_dof(int component, int node) const { return component * p2_nodes + node; }
    int triangle_count() const { return static_cast<int>(velocity_nodes.size()); }
    AffineMap element_map(int t) const;
};

DofMap build_dofmap(const FineMesh& mesh);

}  // namespace nudgefem
