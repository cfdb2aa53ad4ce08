#include "nudgefem/assembly.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

namespace {

// Basis data of one element at one quadrature point, gradients in physical coordinates.
struct PointData {
    double weight;  // quadrature weight times |det J|
    Point x;
    std::array<double, 6> phi;
    std::array<Grad2, 6> dphi;
};

template <typename Fn>
void for_each_point(const DofMap& dofmap, const QuadratureRule& rule, int t, Fn&& fn) {
    const auto map = dofmap.element_map(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto basis = eval_basis_p2(rule.points[q]);
        PointData d{rule.weights[q] * map.jacobian_determinant(), map.map(rule.points[q]),
                    basis.values, {}};
        for (int a = 0; a < 6; ++a) d.dphi[a] = map.push_gradient(basis.gradients[a]);
        fn(d);
    }
}

using Local6 = std::array<std::array<double, 6>, 6>;

// Scalar element matrix replicated on both velocity components.
template <typename Kernel>
SparseMatrix assemble_componentwise(const DofMap& dofmap, const QuadratureRule& rule, Kernel&& kernel) {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dofmap.triangle_count()) * 72);
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        Local6 local{};
        for_each_point(dofmap, rule, t, [&](const PointData& d) {
            for (int a = 0; a < 6; ++a) {
                for (int b = 0; b < 6; ++b) local[a][b] += d.weight * kernel(d, a, b);
            }
        });
        const auto& nodes = dofmap.velocity_nodes[t];
        for (int c = 0; c < 2; ++c) {
            for (int a = 0; a < 6; ++a) {
                for (int b = 0; b < 6; ++b) {
                    triplets.push_back({dofmap.velocity_dof(c, nodes[a]),
                                        dofmap.velocity_dof(c, nodes[b]), local[a][b]});
                }
            }
        }
    }
    const int nv = dofmap.velocity_dofs();
    return SparseMatrix::from_triplets(nv, nv, std::move(triplets));
}

void check_velocity_vector(const DofMap& dofmap, std::span<const double> w, const char* where) {
    if (static_cast<int>(w.size()) != dofmap.velocity_dofs()) {
        std::ostringstream msg;
        msg << where << ": coefficient vector has " << w.size() << " entries, expected "
            << dofmap.velocity_dofs();
        throw DimensionMismatchError(msg.str());
    }
}

// Value and gradient of the advecting field w at a quadrature point.
struct AdvectingField {
    std::array<double, 2> value{};
    std::array<Grad2, 2> grad{};  // grad[c] = gradient of component c
};

AdvectingField evaluate_field(const DofMap& dofmap, std::span<const double> w, int t,
                              const PointData& d) {
    AdvectingField f;
    const auto& nodes = dofmap.velocity_nodes[t];
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 6; ++a) {
            const double coef = w[dofmap.velocity_dof(c, nodes[a])];
            f.value[c] += coef * d.phi[a];
            f.grad[c][0] += coef * d.dphi[a][0];
            f.grad[c][1] += coef * d.dphi[a][1];
        }
    }
    return f;
}

Local6 convection_element(const DofMap& dofmap, const QuadratureRule& rule, std::span<const double> w,
                          int t) {
    Local6 local{};
    for_each_point(dofmap, rule, t, [&](const PointData& d) {
        const auto f = evaluate_field(dofmap, w, t, d);
        const double half_div = 0.5 * (f.grad[0][0] + f.grad[1][1]);
        for (int b = 0; b < 6; ++b) {
            const double advect = f.value[0] * d.dphi[b][0] + f.value[1] * d.dphi[b][1] + half_div * d.phi[b];
            for (int a = 0; a < 6; ++a) local[a][b] += d.weight * advect * d.phi[a];
        }
    });
    return local;
}

}  // namespace

SparseMatrix assemble_mass(const DofMap& dofmap, const QuadratureRule& rule) {
    return assemble_componentwise(dofmap, rule,
                                  [](const PointData& d, int a, int b) { return d.phi[a] * d.phi[b]; });
}

SparseMatrix assemble_stiffness(const DofMap& dofmap, const QuadratureRule& rule) {
    return assemble_componentwise(dofmap, rule, [](const PointData& d, int a, int b) {
        return d.dphi[a][0] * d.dphi[b][0] + d.dphi[a][1] * d.dphi[b][1];
    });
}

SparseMatrix assemble_divergence(const DofMap& dofmap, const QuadratureRule& rule) {
    std::vector<Triplet> triplets;
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        // local[i][c][b] = (psi_i, d_c phi_b)
        std::array<std::array<std::array<double, 6>, 2>, 3> local{};
        const auto map = dofmap.element_map(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto p1 = eval_basis_p1(rule.points[q]);
            const auto p2 = eval_basis_p2(rule.points[q]);
            const double w = rule.weights[q] * map.jacobian_determinant();
            for (int b = 0; b < 6; ++b) {
                const Grad2 g = map.push_gradient(p2.gradients[b]);
                for (int i = 0; i < 3; ++i) {
                    local[i][0][b] += w * p1.values[i] * g[0];
                    local[i][1][b] += w * p1.values[i] * g[1];
                }
            }
        }
        const auto& vnodes = dofmap.velocity_nodes[t];
        const auto& pnodes = dofmap.pressure_nodes[t];
        for (int i = 0; i < 3; ++i) {
            for (int c = 0; c < 2; ++c) {
                for (int b = 0; b < 6; ++b) {
                    triplets.push_back({pnodes[i], dofmap.velocity_dof(c, vnodes[b]), local[i][c][b]});
                }
            }
        }
    }
    return SparseMatrix::from_triplets(dofmap.pressure_dofs, dofmap.velocity_dofs(), std::move(triplets));
}

SparseMatrix assemble_graddiv(const DofMap& dofmap, const QuadratureRule& rule) {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dofmap.triangle_count()) * 144);
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        // (d_c phi_a, d_e phi_b)
        std::array<std::array<double, 12>, 12> local{};
        for_each_point(dofmap, rule, t, [&](const PointData& d) {
            for (int i = 0; i < 12; ++i) {
                for (int j = 0; j < 12; ++j) {
                    local[i][j] += d.weight * (d.dphi[i % 6][i / 6] * d.dphi[j % 6][j / 6]);
                }
            }
        });
        const auto& nodes = dofmap.velocity_nodes[t];
        for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 12; ++j) {
                triplets.push_back({dofmap.velocity_dof(i / 6, nodes[i % 6]),
                                    dofmap.velocity_dof(j / 6, nodes[j % 6]), local[i][j]});
            }
        }
    }
    const int nv = dofmap.velocity_dofs();
    return SparseMatrix::from_triplets(nv, nv, std::move(triplets));
}

SparseMatrix assemble_convection(const DofMap& dofmap, const QuadratureRule& rule,
                                 std::span<const double> w) {
    return ConvectionAssembler(dofmap, rule).assemble(w);
}

std::vector<double> assemble_pressure_mean(const DofMap& dofmap, const QuadratureRule& rule) {
    std::vector<double> m(static_cast<std::size_t>(dofmap.pressure_dofs), 0.0);
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto map = dofmap.element_map(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double w = rule.weights[q] * map.jacobian_determinant();
            for (int i = 0; i < 3; ++i) m[dofmap.pressure_nodes[t][i]] += w * rule.points[q][i];
        }
    }
    return m;
}

NudgingOperator assemble_nudging(const CoarseObserver& observer) {
    NudgingOperator op;
    op.observation = observer.observation();
    op.coarse_gram = observer.gram();
    const auto et = op.observation.transpose();
    op.matrix = multiply(multiply(et, op.coarse_gram), op.observation);
    // the triple product is symmetric only up to rounding
    const auto mt = op.matrix.transpose();
    if (mt.col_indices == op.matrix.col_indices && mt.row_offsets == op.matrix.row_offsets) {
        for (std::size_t k = 0; k < op.matrix.values.size(); ++k) {
            op.matrix.values[k] = 0.5 * (op.matrix.values[k] + mt.values[k]);
        }
    }
    return op;
}

NudgingOperator assemble_nudging(const DofMap& dofmap, const CoarseGrid& grid, InterpolantKind kind) {
    return assemble_nudging(CoarseObserver(dofmap, grid, kind));
}

std::vector<double> assemble_load(const DofMap& dofmap, const QuadratureRule& rule,
                                  const TimeDependentField& f, double t) {
    std::vector<double> load(static_cast<std::size_t>(dofmap.velocity_dofs()), 0.0);
    for (int e = 0; e < dofmap.triangle_count(); ++e) {
        const auto& nodes = dofmap.velocity_nodes[e];
        for_each_point(dofmap, rule, e, [&](const PointData& d) {
            const auto fx = f(d.x.x, d.x.y, t);
            for (int a = 0; a < 6; ++a) {
                load[dofmap.velocity_dof(0, nodes[a])] += d.weight * fx[0] * d.phi[a];
                load[dofmap.velocity_dof(1, nodes[a])] += d.weight * fx[1] * d.phi[a];
            }
        });
    }
    return load;
}

void zero_columns(SparseMatrix& a, std::span<const int> cols) {
    std::vector<char> flag(static_cast<std::size_t>(a.cols), 0);
    for (int c : cols) flag[c] = 1;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (flag[a.col_indices[k]]) a.values[k] = 0.0;
    }
}

void zero_entries(std::span<double> v, std::span<const int> dofs) {
    for (int d : dofs) v[d] = 0.0;
}

void apply_dirichlet(SparseMatrix& a, std::span<const int> dofs, std::span<double> rhs) {
    if (a.rows != a.cols) throw DimensionMismatchError("apply_dirichlet: matrix must be square");
    std::vector<char> flag(static_cast<std::size_t>(a.rows), 0);
    for (int d : dofs) flag[d] = 1;
    for (int r = 0; r < a.rows; ++r) {
        bool has_diagonal = false;
        for (int k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
            const int c = a.col_indices[k];
            if (flag[r] || flag[c]) a.values[k] = (r == c) ? 1.0 : 0.0;
            has_diagonal = has_diagonal || r == c;
        }
        if (flag[r] && !has_diagonal) {
            std::ostringstream msg;
            msg << "apply_dirichlet: row " << r << " has no stored diagonal";
            throw DimensionMismatchError(msg.str());
        }
    }
    if (!rhs.empty()) zero_entries(rhs, dofs);
}

OperatorSet assemble_operators(const DofMap& dofmap, const QuadratureRule& rule) {
    return {assemble_mass(dofmap, rule), assemble_stiffness(dofmap, rule),
            assemble_divergence(dofmap, rule), assemble_graddiv(dofmap, rule),
            assemble_pressure_mean(dofmap, rule)};
}

ConvectionAssembler::ConvectionAssembler(const DofMap& dofmap, const QuadratureRule& rule)
    : dofmap_(&dofmap), rule_(&rule) {
    std::vector<Triplet> triplets;
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto& nodes = dofmap.velocity_nodes[t];
        for (int c = 0; c < 2; ++c) {
            for (int a = 0; a < 6; ++a) {
                for (int b = 0; b < 6; ++b) {
                    triplets.push_back(
                        {dofmap.velocity_dof(c, nodes[a]), dofmap.velocity_dof(c, nodes[b]), 0.0});
                }
            }
        }
    }
    const int nv = dofmap.velocity_dofs();
    pattern_ = SparseMatrix::from_triplets(nv, nv, std::move(triplets));
    const auto slot = [&](int row, int col) {
        const auto begin = pattern_.col_indices.begin() + pattern_.row_offsets[row];
        const auto end = pattern_.col_indices.begin() + pattern_.row_offsets[row + 1];
        return static_cast<int>(std::lower_bound(begin, end, col) - pattern_.col_indices.begin());
    };
    slots_first_.resize(static_cast<std::size_t>(dofmap.triangle_count()) * 36);
    slots_second_.resize(slots_first_.size());
    for (int t = 0; t < dofmap.triangle_count(); ++t) {
        const auto& nodes = dofmap.velocity_nodes[t];
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const std::size_t idx = static_cast<std::size_t>(t) * 36 + a * 6 + b;
                slots_first_[idx] = slot(dofmap.velocity_dof(0, nodes[a]), dofmap.velocity_dof(0, nodes[b]));
                slots_second_[idx] = slot(dofmap.velocity_dof(1, nodes[a]), dofmap.velocity_dof(1, nodes[b]));
            }
        }
    }
}

SparseMatrix ConvectionAssembler::assemble(std::span<const double> w) const {
    check_velocity_vector(*dofmap_, w, "assemble_convection");
    SparseMatrix c = pattern_;
    std::fill(c.values.begin(), c.values.end(), 0.0);
    for (int t = 0; t < dofmap_->triangle_count(); ++t) {
        const auto local = convection_element(*dofmap_, *rule_, w, t);
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const std::size_t idx = static_cast<std::size_t>(t) * 36 + a * 6 + b;
                c.values[slots_first_[idx]] += local[a][b];
                c.values[slots_second_[idx]] += local[a][b];
            }
        }
    }
    return c;
}

void dump_operators(const OperatorSet& ops, const NudgingOperator& nudging, const std::string& directory) {
    std::filesystem::create_directories(directory);
    const auto dump = [&](const SparseMatrix& m, const char* name) {
        std::ofstream out(std::filesystem::path(directory) / name);
        if (!out) throw Error(std::string("dump_operators: cannot write ") + name);
        write_triplets(m, out);
    };
    dump(ops.mass, "mass.txt");
    dump(ops.stiffness, "stiffness.txt");
    dump(ops.divergence, "divergence.txt");
    dump(ops.graddiv, "graddiv.txt");
    dump(nudging.matrix, "nudging.txt");
}

}  // namespace nudgefem
