#include "nudgefem/solver.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

// UMFPACK works on compressed columns. The CSR arrays of A are the CSC arrays
// of A^T, so every solve uses UMFPACK_At to recover A x = b.
struct LuFactorization::Impl {
    int n = 0;
    std::vector<int> offsets;
    std::vector<int> indices;
    std::vector<double> values;
    void* symbolic = nullptr;
    void* numeric = nullptr;
    double control[UMFPACK_CONTROL];

    Impl() {
        umfpack_di_defaults(control);
        // the saddle blocks are structurally symmetric; AMD on A + A^T fills far less
        control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
        // callers check residuals themselves
        control[UMFPACK_IRSTEP] = 0;
    }
    ~Impl() { release(); }

    void release() {
        if (numeric) umfpack_di_free_numeric(&numeric);
        if (symbolic) umfpack_di_free_symbolic(&symbolic);
    }

    void analyse() {
        if (symbolic) umfpack_di_free_symbolic(&symbolic);
        const int status = umfpack_di_symbolic(n, n, offsets.data(), indices.data(), values.data(),
                                               &symbolic, control, nullptr);
        if (status != UMFPACK_OK) {
            std::ostringstream msg;
            msg << "LU symbolic analysis failed (UMFPACK status " << status << ")";
            throw Error(msg.str());
        }
    }

    void factor() {
        if (numeric) umfpack_di_free_numeric(&numeric);
        const int status = umfpack_di_numeric(offsets.data(), indices.data(), values.data(), symbolic,
                                              &numeric, control, nullptr);
        if (status == UMFPACK_WARNING_singular_matrix) {
            throw SingularMatrixError(
                "LU factorization: matrix is numerically singular at pivot " + std::to_string(zero_pivot()),
                zero_pivot());
        }
        if (status != UMFPACK_OK) {
            std::ostringstream msg;
            msg << "LU numeric factorization failed (UMFPACK status " << status << ")";
            throw Error(msg.str());
        }
    }

    std::size_t zero_pivot() const {
        std::vector<double> diag(static_cast<std::size_t>(n));
        if (umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                   nullptr, diag.data(), nullptr, nullptr, numeric) != UMFPACK_OK) {
            return 0;
        }
        for (int i = 0; i < n; ++i) {
            if (diag[i] == 0.0 || !std::isfinite(diag[i])) return static_cast<std::size_t>(i);
        }
        return 0;
    }

    void load(const SparseMatrix& a) {
        if (a.rows != a.cols) {
            std::ostringstream msg;
            msg << "factorize: matrix must be square, got " << a.rows << "x" << a.cols;
            throw DimensionMismatchError(msg.str());
        }
        n = a.rows;
        offsets = a.row_offsets;
        indices = a.col_indices;
        values = a.values;
    }
};

LuFactorization::LuFactorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
    impl_->load(a);
    impl_->analyse();
    impl_->factor();
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

void LuFactorization::refactor(const SparseMatrix& a) {
    const bool same = a.rows == impl_->n && a.row_offsets == impl_->offsets && a.col_indices == impl_->indices;
    if (same) {
        impl_->values = a.values;
    } else {
        impl_->load(a);
        impl_->analyse();
    }
    impl_->factor();
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != impl_->n) {
        std::ostringstream msg;
        msg << "LU solve: rhs has " << b.size() << " entries, expected " << impl_->n;
        throw DimensionMismatchError(msg.str());
    }
    std::vector<double> x(b.size());
    const int status = umfpack_di_solve(UMFPACK_At, impl_->offsets.data(), impl_->indices.data(),
                                        impl_->values.data(), x.data(), b.data(), impl_->numeric,
                                        impl_->control, nullptr);
    if (status != UMFPACK_OK) {
        std::ostringstream msg;
        msg << "LU solve failed (UMFPACK status " << status << ")";
        throw Error(msg.str());
    }
    return x;
}

int LuFactorization::size() const { return impl_->n; }

LuFactorization factorize(const SparseMatrix& a) { return LuFactorization(a); }

SparseMatrix build_bordered_matrix(const SaddleSystem& s) {
    const SparseMatrix& a = s.velocity_block;
    const SparseMatrix& d = *s.divergence;
    const int nv = a.rows;
    const int np = d.rows;
    const bool nudged = s.observation && s.coupling;
    const int nc = nudged ? s.observation->rows : 0;
    if (a.cols != nv || d.cols != nv || static_cast<int>(s.pressure_mean.size()) != np ||
        (nudged && (s.observation->cols != nv || s.coupling->rows != nv || s.coupling->cols != nc))) {
        throw DimensionMismatchError("saddle system: block dimensions are inconsistent");
    }
    const auto dt = d.transpose();
    const int n = nv + np + 1 + nc;
    SparseMatrix k;
    k.rows = k.cols = n;
    k.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    k.col_indices.reserve(static_cast<std::size_t>(a.nonzeros() + 2 * d.nonzeros() + 2 * np +
                                                   (nudged ? s.observation->nonzeros() + s.coupling->nonzeros() + nc : 0)));
    k.values.reserve(k.col_indices.capacity());
    const auto append_row = [&](const SparseMatrix& m, int row, int col_offset, double scale) {
        for (int e = m.row_offsets[row]; e < m.row_offsets[row + 1]; ++e) {
            k.col_indices.push_back(m.col_indices[e] + col_offset);
            k.values.push_back(scale * m.values[e]);
        }
    };
    int row = 0;
    const auto close_row = [&] { k.row_offsets[++row] = static_cast<int>(k.col_indices.size()); };
    for (int i = 0; i < nv; ++i) {
        append_row(a, i, 0, 1.0);
        append_row(dt, i, nv, -1.0);
        if (nudged) append_row(*s.coupling, i, nv + np + 1, 1.0);
        close_row();
    }
    for (int i = 0; i < np; ++i) {
        append_row(d, i, 0, -1.0);
        k.col_indices.push_back(nv + np);
        k.values.push_back(s.pressure_mean[i]);
        close_row();
    }
    for (int i = 0; i < np; ++i) {
        k.col_indices.push_back(nv + i);
        k.values.push_back(s.pressure_mean[i]);
    }
    close_row();
    for (int i = 0; i < nc; ++i) {
        append_row(*s.observation, i, 0, 1.0);
        k.col_indices.push_back(nv + np + 1 + i);
        k.values.push_back(-1.0);
        close_row();
    }
    return k;
}

SaddleSolution SaddleSolver::solve(const SaddleSystem& s) {
    const int nv = s.velocity_block.rows;
    const int np = s.divergence->rows;
    if (static_cast<int>(s.rhs_velocity.size()) != nv || static_cast<int>(s.rhs_pressure.size()) != np) {
        throw DimensionMismatchError("saddle system: right-hand side sizes are inconsistent");
    }
    bordered_ = build_bordered_matrix(s);
    if (lu_) {
        lu_->refactor(bordered_);
    } else {
        lu_ = std::make_unique<LuFactorization>(bordered_);
    }
    std::vector<double> rhs(static_cast<std::size_t>(bordered_.rows), 0.0);
    std::copy(s.rhs_velocity.begin(), s.rhs_velocity.end(), rhs.begin());
    std::copy(s.rhs_pressure.begin(), s.rhs_pressure.end(), rhs.begin() + nv);
    const auto x = lu_->solve(rhs);

    SaddleSolution sol;
    sol.velocity.assign(x.begin(), x.begin() + nv);
    sol.pressure.assign(x.begin() + nv, x.begin() + nv + np);
    const auto du = spmv(*s.divergence, sol.velocity);
    for (int i = 0; i < np; ++i) {
        // continuity rows read -D u + m l = g; with g = 0 this is ||D u||_inf up to l ~ 0
        const double expected = -s.rhs_pressure[i] + s.pressure_mean[i] * x[nv + np];
        sol.divergence_residual = std::max(sol.divergence_residual, std::abs(du[i] - expected));
    }
    double mean = 0.0;
    for (int i = 0; i < np; ++i) mean += s.pressure_mean[i] * sol.pressure[i];
    sol.mean_residual = std::abs(mean);
    const bool finite = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    if (!finite || sol.divergence_residual > tol_.divergence || sol.mean_residual > tol_.mean) {
        std::ostringstream msg;
        msg << "saddle solve failed quality gates: ||Du||_inf=" << sol.divergence_residual
            << " (tol " << tol_.divergence << "), |m^T p|=" << sol.mean_residual << " (tol "
            << tol_.mean << ")";
        throw SolverQualityError(msg.str(), sol.divergence_residual, sol.mean_residual);
    }
    return sol;
}

SaddleSolution solve_saddle(const SaddleSystem& system, SolverTolerances tol) {
    return SaddleSolver(tol).solve(system);
}

}  // namespace nudgefem
