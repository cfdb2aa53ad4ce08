#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudgefem/fem.hpp"
#include "nudgefem/manufactured.hpp"
#include "nudgefem/mesh.hpp"
#include "nudgefem/sparse.hpp"

namespace nudgefem {

enum class InterpolantKind {
    /// L2-orthogonal projection onto cellwise constants.
    PiecewiseConstantAverage,
    /// Nodal interpolation onto continuous P1 on the coarse grid (cells split SW-NE).
    CoarseLagrangeP1,
};

std::string to_string(InterpolantKind kind);
/// Accepts "pc" / "lagrange" (and the enumerator names).
InterpolantKind parse_interpolant_kind(std::string_view text);

using Vec2 = manufactured::Vec2;
using VelocityFunction = std::function<Vec2(double x, double y)>;

/// Coarse observation operator I_H restricted to the fine P2 velocity space.
///
/// Coarse data are component-major: entry `c * coarse_entities() + e` holds
/// component c of cell mean (piecewise constant) or nodal value (Lagrange) e.
/// I_H v = observation() * v, and the L2 inner product of two coarse
/// functions is a^T gram() b.
class CoarseObserver {
public:
    CoarseObserver(const DofMap& dofmap, const CoarseGrid& grid, InterpolantKind kind);

    InterpolantKind kind() const { return kind_; }
    const CoarseGrid& grid() const { return grid_; }
    int coarse_entities() const { return entities_; }
    int coarse_size() const { return 2 * entities_; }
    int velocity_dofs() const { return velocity_dofs_; }

    const SparseMatrix& observation() const { return observation_; }
    const SparseMatrix& gram() const { return gram_; }

    std::vector<double> apply(std::span<const double> field) const;

    /// Coarse function at a point of fine triangle `fine_triangle`.
    Vec2 evaluate(std::span<const double> coarse, int fine_triangle, Point p) const;

    /// I_H of a continuous function: exact cell means (degree-8 quadrature on
    /// the fine triangles) or point values at coarse vertices.
    std::vector<double> observe_function(const VelocityFunction& u, const DofMap& dofmap) const;

private:
    InterpolantKind kind_;
    CoarseGrid grid_;
    int entities_ = 0;
    int velocity_dofs_ = 0;
    SparseMatrix observation_;
    SparseMatrix gram_;
    // per fine triangle: true when it lies in the upper-left half of its coarse cell
    std::vector<char> upper_half_;
};

std::vector<double> apply_interpolant(const CoarseObserver& observer, std::span<const double> field);

struct InterpolantNorms {
    double interpolant = 0.0;  ///< ||I_H v||_0
    double residual = 0.0;     ///< ||v - I_H v||_0
    double gradient = 0.0;     ///< ||grad v||_0
    double field = 0.0;        ///< ||v||_0
};

InterpolantNorms interpolant_residual_norms(const CoarseObserver& observer, const DofMap& dofmap,
                                            std::span<const double> field, int quadrature_degree = 8);

struct InterpolantQuality {
    double c0_measured = 0.0;  ///< sup ||I_H v|| / ||v||
    double cI_measured = 0.0;  ///< sup ||v - I_H v|| / (H ||grad v||)
    int sample_size = 0;
    std::string sample_description;
};

InterpolantQuality measure_constants(const CoarseObserver& observer, const DofMap& dofmap,
                                     std::span<const std::vector<double>> sample,
                                     std::string description = {});

/// P2 nodal interpolant of a vector function (boundary values included as evaluated).
std::vector<double> interpolate_p2(const DofMap& dofmap, const VelocityFunction& u);

/// Fields sin(m pi x) sin(m pi y) in each component for m = 1..4, plus
/// `random_count` uniform random coefficient vectors with zero boundary values.
std::vector<std::vector<double>> standard_sample(const DofMap& dofmap, int random_count,
                                                 unsigned seed);

/// Logarithmic peaks max(0, log(H / max(r, h/2))) centred on each interior coarse
/// vertex. Nodal coarse interpolation of these degrades like sqrt(log(H/h)).
std::vector<std::vector<double>> coarse_vertex_peaks(const DofMap& dofmap, const CoarseGrid& grid);

}  // namespace nudgefem
