#include "nudgefem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            std::ostringstream msg;
            msg << "from_triplets: entry (" << t.row << ", " << t.col << ") outside " << rows << "x"
                << cols;
            throw DimensionMismatchError(msg.str());
        }
    }
    // stable sort keeps the summation order of duplicates deterministic
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
        const int r = triplets[i].row;
        const int c = triplets[i].col;
        double sum = 0.0;
        while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
            sum += triplets[i].value;
            ++i;
        }
        m.col_indices.push_back(c);
        m.values.push_back(sum);
        ++m.row_offsets[static_cast<std::size_t>(r) + 1];
    }
    for (int r = 0; r < rows; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m;
    m.rows = m.cols = n;
    m.row_offsets.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) m.row_offsets[i] = i;
    m.col_indices.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m.col_indices[i] = i;
    m.values.assign(static_cast<std::size_t>(n), 1.0);
    return m;
}

SparseMatrix SparseMatrix::zero(int rows, int cols) {
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
    return m;
}

double SparseMatrix::at(int i, int j) const {
    const auto begin = col_indices.begin() + row_offsets[i];
    const auto end = col_indices.begin() + row_offsets[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - col_indices.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.row_offsets.assign(static_cast<std::size_t>(cols) + 1, 0);
    for (int c : col_indices) ++t.row_offsets[static_cast<std::size_t>(c) + 1];
    for (int c = 0; c < cols; ++c) t.row_offsets[c + 1] += t.row_offsets[c];
    t.col_indices.resize(col_indices.size());
    t.values.resize(values.size());
    std::vector<int> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (int r = 0; r < rows; ++r) {
        for (int k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
            const int dst = next[col_indices[k]]++;
            t.col_indices[dst] = r;
            t.values[dst] = values[k];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
    SparseMatrix s = *this;
    for (double& v : s.values) v *= alpha;
    return s;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
    return rows == other.rows && cols == other.cols && row_offsets == other.row_offsets &&
           col_indices == other.col_indices;
}

namespace {

void check_product_dims(const SparseMatrix& a, std::size_t x_size, std::size_t y_size) {
    if (static_cast<std::size_t>(a.cols) != x_size || static_cast<std::size_t>(a.rows) != y_size) {
        std::ostringstream msg;
        msg << "spmv: matrix " << a.rows << "x" << a.cols << " incompatible with x[" << x_size
            << "], y[" << y_size << "]";
        throw DimensionMismatchError(msg.str());
    }
}

}  // namespace

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(a.rows), 0.0);
    spmv_add(a, x, 1.0, y);
    return y;
}

void spmv_add(const SparseMatrix& a, std::span<const double> x, double alpha, std::span<double> y) {
    check_product_dims(a, x.size(), y.size());
    for (int r = 0; r < a.rows; ++r) {
        double sum = 0.0;
        for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
            sum += a.values[k] * x[a.col_indices[k]];
        }
        y[r] += alpha * sum;
    }
}

SparseMatrix linear_combination(std::span<const ScaledTerm> terms) {
    if (terms.empty()) throw DimensionMismatchError("linear_combination: no terms");
    const int rows = terms.front().matrix->rows;
    const int cols = terms.front().matrix->cols;
    for (const auto& t : terms) {
        if (t.matrix->rows != rows || t.matrix->cols != cols) {
            throw DimensionMismatchError("linear_combination: operand dimensions differ");
        }
    }
    SparseMatrix out;
    out.rows = rows;
    out.cols = cols;
    out.row_offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<double> accum(static_cast<std::size_t>(cols), 0.0);
    std::vector<char> used(static_cast<std::size_t>(cols), 0);
    std::vector<int> touched;
    for (int r = 0; r < rows; ++r) {
        touched.clear();
        for (const auto& t : terms) {
            const auto& m = *t.matrix;
            for (int k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
                const int c = m.col_indices[k];
                if (!used[c]) {
                    used[c] = 1;
                    touched.push_back(c);
                }
                accum[c] += t.coefficient * m.values[k];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            out.col_indices.push_back(c);
            out.values.push_back(accum[c]);
            accum[c] = 0.0;
            used[c] = 0;
        }
        out.row_offsets[r + 1] = static_cast<int>(out.col_indices.size());
    }
    return out;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols != b.rows) {
        std::ostringstream msg;
        msg << "multiply: " << a.rows << "x" << a.cols << " times " << b.rows << "x" << b.cols;
        throw DimensionMismatchError(msg.str());
    }
    SparseMatrix out;
    out.rows = a.rows;
    out.cols = b.cols;
    out.row_offsets.assign(static_cast<std::size_t>(a.rows) + 1, 0);
    std::vector<double> accum(static_cast<std::size_t>(b.cols), 0.0);
    std::vector<char> used(static_cast<std::size_t>(b.cols), 0);
    std::vector<int> touched;
    for (int r = 0; r < a.rows; ++r) {
        touched.clear();
        for (int ka = a.row_offsets[r]; ka < a.row_offsets[r + 1]; ++ka) {
            const int mid = a.col_indices[ka];
            const double av = a.values[ka];
            for (int kb = b.row_offsets[mid]; kb < b.row_offsets[mid + 1]; ++kb) {
                const int c = b.col_indices[kb];
                if (!used[c]) {
                    used[c] = 1;
                    touched.push_back(c);
                }
                accum[c] += av * b.values[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            out.col_indices.push_back(c);
            out.values.push_back(accum[c]);
            accum[c] = 0.0;
            used[c] = 0;
        }
        out.row_offsets[r + 1] = static_cast<int>(out.col_indices.size());
    }
    return out;
}

double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

double quadratic_form(const SparseMatrix& a, std::span<const double> x) {
    const auto ax = spmv(a, x);
    double s = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) s += x[i] * ax[i];
    return s;
}

void write_triplets(const SparseMatrix& a, std::ostream& out) {
    const auto old_precision = out.precision(17);
    for (int r = 0; r < a.rows; ++r) {
        for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
            out << r << ' ' << a.col_indices[k] << ' ' << a.values[k] << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace nudgefem
