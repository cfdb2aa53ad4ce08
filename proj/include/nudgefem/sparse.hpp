#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace nudgefem {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row storage. Column indices are strictly increasing
/// within each row; explicit zeros may be present (patterns are kept stable
/// under boundary elimination).
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_offsets{0};
    std::vector<int> col_indices;
    std::vector<double> values;

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseMatrix identity(int n);
    static SparseMatrix zero(int rows, int cols);

    int nonzeros() const { return static_cast<int>(values.size()); }
    /// Entry (i, j); zero when not stored.
    double at(int i, int j) const;
    SparseMatrix transpose() const;
    SparseMatrix scaled(double alpha) const;
    bool same_pattern(const SparseMatrix& other) const;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
/// y += alpha * A x
void spmv_add(const SparseMatrix& a, std::span<const double> x, double alpha, std::span<double> y);

/// sum_k coef_k * A_k over the union of the patterns.
struct ScaledTerm {
    double coefficient;
    const SparseMatrix* matrix;
};
SparseMatrix linear_combination(std::span<const ScaledTerm> terms);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

double max_abs(const SparseMatrix& a);
double quadratic_form(const SparseMatrix& a, std::span<const double> x);

/// One "row col value" line per stored entry, 17 significant digits.
void write_triplets(const SparseMatrix& a, std::ostream& out);

}  // namespace nudgefem
