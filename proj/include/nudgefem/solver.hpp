#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nudgefem/sparse.hpp"

namespace nudgefem {

/// Sparse LU with partial pivoting (UMFPACK). The symbolic analysis is kept
/// and reused by `refactor` when the sparsity pattern is unchanged.
class LuFactorization {
public:
    explicit LuFactorization(const SparseMatrix& a);
    ~LuFactorization();
    LuFactorization(LuFactorization&&) noexcept;
    LuFactorization& operator=(LuFactorization&&) noexcept;
    LuFactorization(const LuFactorization&) = delete;
    LuFactorization& operator=(const LuFactorization&) = delete;

    /// New values; recomputes the symbolic analysis only if the pattern changed.
    void refactor(const SparseMatrix& a);
    std::vector<double> solve(std::span<const double> b) const;
    int size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LuFactorization factorize(const SparseMatrix& a);

/// Per-step velocity/pressure system
///
///   [ A    -D^T   0   C ] [u]   [f]
///   [ -D    0     m   0 ] [p] = [g]
///   [ 0     m^T   0   0 ] [l]   [0]
///   [ E     0     0  -I ] [z]   [0]
///
/// where C = beta E^T W realises the implicit nudging term beta E^T W E u
/// through the auxiliary coarse unknowns z = E u. A, D, C are expected to
/// carry the homogeneous Dirichlet elimination already.
struct SaddleSystem {
    SparseMatrix velocity_block;
    std::shared_ptr<const SparseMatrix> divergence;
    std::vector<double> pressure_mean;
    /// Optional nudging coupling; both null when nudging is off.
    std::shared_ptr<const SparseMatrix> observation;       ///< E, coarse x velocity
    std::shared_ptr<const SparseMatrix> coupling;          ///< beta E^T W, velocity x coarse
    std::vector<double> rhs_velocity;
    std::vector<double> rhs_pressure;
};

struct SaddleSolution {
    std::vector<double> velocity;
    std::vector<double> pressure;
    double divergence_residual = 0.0;  ///< ||D u||_inf
    double mean_residual = 0.0;        ///< |m^T p|
};

struct SolverTolerances {
    double divergence = 1e-9;
    double mean = 1e-10;
};

/// Keeps the bordered matrix pattern and LU analysis across time steps.
class SaddleSolver {
public:
    explicit SaddleSolver(SolverTolerances tol = {}) : tol_(tol) {}
    SaddleSolution solve(const SaddleSystem& system);
    /// Bordered matrix of the last solve (for residual checks).
    const SparseMatrix& bordered_matrix() const { return bordered_; }

private:
    SolverTolerances tol_;
    SparseMatrix bordered_;
    std::unique_ptr<LuFactorization> lu_;
};

SparseMatrix build_bordered_matrix(const SaddleSystem& system);
SaddleSolution solve_saddle(const SaddleSystem& system, SolverTolerances tol = {});

}  // namespace nudgefem
