#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nudgefem/fem.hpp"
#include "nudgefem/manufactured.hpp"
#include "nudgefem/observe.hpp"
#include "nudgefem/sparse.hpp"

namespace nudgefem {

/// Velocity operators act on component-major P2 coefficients (see DofMap).
SparseMatrix assemble_mass(const DofMap& dofmap, const QuadratureRule& rule);
SparseMatrix assemble_stiffness(const DofMap& dofmap, const QuadratureRule& rule);
/// Rows: pressure dofs; entry (i, j) = (psi_i, div phi_j).
SparseMatrix assemble_divergence(const DofMap& dofmap, const QuadratureRule& rule);
SparseMatrix assemble_graddiv(const DofMap& dofmap, const QuadratureRule& rule);
/// Entry (i, j) = b_h(w, phi_j, phi_i) with the skew-symmetrised trilinear form.
SparseMatrix assemble_convection(const DofMap& dofmap, const QuadratureRule& rule,
                                 std::span<const double> w);

/// Integrals of the pressure basis functions, i.e. the zero-mean constraint row.
std::vector<double> assemble_pressure_mean(const DofMap& dofmap, const QuadratureRule& rule);

/// Gram matrix of the observed fields, E^T W E with E = observation, W = coarse Gram.
struct NudgingOperator {
    SparseMatrix observation;
    SparseMatrix coarse_gram;
    SparseMatrix matrix;
};

NudgingOperator assemble_nudging(const DofMap& dofmap, const CoarseGrid& grid, InterpolantKind kind);
NudgingOperator assemble_nudging(const CoarseObserver& observer);

using TimeDependentField = std::function<manufactured::Vec2(double x, double y, double t)>;

std::vector<double> assemble_load(const DofMap& dofmap, const QuadratureRule& rule,
                                  const TimeDependentField& f, double t);

/// Symmetric elimination of homogeneous Dirichlet dofs: rows and columns are
/// zeroed (pattern kept), the diagonal set to one and the rhs entries zeroed.
void apply_dirichlet(SparseMatrix& a, std::span<const int> dofs, std::span<double> rhs);
/// Zero the given columns only (off-diagonal coupling blocks).
void zero_columns(SparseMatrix& a, std::span<const int> cols);
void zero_entries(std::span<double> v, std::span<const int> dofs);

struct OperatorSet {
    SparseMatrix mass;
    SparseMatrix stiffness;
    SparseMatrix divergence;
    SparseMatrix graddiv;
    std::vector<double> pressure_mean;
};

OperatorSet assemble_operators(const DofMap& dofmap, const QuadratureRule& rule);

/// Reusable convection assembly on a fixed block-diagonal P2 pattern.
class ConvectionAssembler {
public:
    ConvectionAssembler(const DofMap& dofmap, const QuadratureRule& rule);
    SparseMatrix assemble(std::span<const double> w) const;

private:
    const DofMap* dofmap_;
    const QuadratureRule* rule_;
    SparseMatrix pattern_;
    // value positions of local pair (a, b) of triangle t, index t * 36 + a * 6 + b,
    // one table per velocity component
    std::vector<int> slots_first_;
    std::vector<int> slots_second_;
};

/// Debug dump of every operator as "row col value" triplet files in `directory`.
void dump_operators(const OperatorSet& ops, const NudgingOperator& nudging, const std::string& directory);

}  // namespace nudgefem
