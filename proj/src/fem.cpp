#include "nudgefem/fem.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

namespace {

constexpr std::array<Grad2, 3> kLambdaGradients{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

}  // namespace

BasisP1 eval_basis_p1(const Barycentric& lambda) {
    BasisP1 b;
    b.values = lambda;
    b.gradients = kLambdaGradients;
    return b;
}

BasisP2 eval_basis_p2(const Barycentric& lambda) {
    BasisP2 b;
    for (int i = 0; i < 3; ++i) {
        b.values[i] = lambda[i] * (2.0 * lambda[i] - 1.0);
        const double s = 4.0 * lambda[i] - 1.0;
        b.gradients[i] = {s * kLambdaGradients[i][0], s * kLambdaGradients[i][1]};
    }
    constexpr std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
    for (int e = 0; e < 3; ++e) {
        const int i = edges[e][0];
        const int j = edges[e][1];
        b.values[3 + e] = 4.0 * lambda[i] * lambda[j];
        for (int d = 0; d < 2; ++d) {
            b.gradients[3 + e][d] =
                4.0 * (lambda[j] * kLambdaGradients[i][d] + lambda[i] * kLambdaGradients[j][d]);
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Symmetric quadrature.
//
// Rules are stored as orbits of the triangle symmetry group with tabulated
// (15-digit) parameters, then polished by Gauss-Newton on the moment
// equations so that every monomial up to the rule degree is integrated to
// round-off.
// ---------------------------------------------------------------------------

namespace {

enum class OrbitKind { Centroid, S21, S111 };

struct Orbit {
    OrbitKind kind;
    double a = 0.0;
    double b = 0.0;
    double weight = 0.0;  // normalised to a unit-area sum
};

struct RuleTable {
    int degree;
    std::vector<Orbit> orbits;
};

const std::vector<RuleTable>& rule_tables() {
    static const std::vector<RuleTable> tables{
        {1, {{OrbitKind::Centroid, 0, 0, 1.0}}},
        {2, {{OrbitKind::S21, 1.0 / 6.0, 0, 1.0 / 3.0}}},
        {4,
         {{OrbitKind::S21, 0.445948490915965, 0, 0.223381589678011},
          {OrbitKind::S21, 0.091576213509771, 0, 0.109951743655322}}},
        {5,
         {{OrbitKind::Centroid, 0, 0, 0.225},
          {OrbitKind::S21, 0.470142064105115, 0, 0.132394152788506},
          {OrbitKind::S21, 0.101286507323456, 0, 0.125939180544827}}},
        {6,
         {{OrbitKind::S21, 0.249286745170910, 0, 0.116786275726379},
          {OrbitKind::S21, 0.063089014491502, 0, 0.050844906370207},
          {OrbitKind::S111, 0.053145049844817, 0.310352451033784, 0.082851075618374}}},
        {8,
         {{OrbitKind::Centroid, 0, 0, 0.144315607677787},
          {OrbitKind::S21, 0.459292588292723, 0, 0.095091634267285},
          {OrbitKind::S21, 0.170569307751760, 0, 0.103217370534718},
          {OrbitKind::S21, 0.050547228317031, 0, 0.032458497623198},
          {OrbitKind::S111, 0.008394777409958, 0.263112829634638, 0.027230314174435}}},
        {9,
         {{OrbitKind::Centroid, 0, 0, 0.097135796282799},
          {OrbitKind::S21, 0.489682519198738, 0, 0.031334700227139},
          {OrbitKind::S21, 0.437089591492937, 0, 0.077827541004774},
          {OrbitKind::S21, 0.188203535619033, 0, 0.079647738927210},
          {OrbitKind::S21, 0.044729513394453, 0, 0.025577675658698},
          {OrbitKind::S111, 0.036838412054736, 0.221962989160766, 0.043283539377289}}},
        {10,
         {{OrbitKind::Centroid, 0, 0, 0.090817990382754},
          {OrbitKind::S21, 0.485577633383657, 0, 0.036725957756467},
          {OrbitKind::S21, 0.109481575485037, 0, 0.045321059435528},
          {OrbitKind::S111, 0.141707219414880, 0.307939838764121, 0.072757916845420},
          {OrbitKind::S111, 0.025003534762686, 0.246672560639903, 0.028327242531057},
          {OrbitKind::S111, 0.009540815400299, 0.066803251012200, 0.009421666963733}}},
    };
    return tables;
}

void expand_orbit(const Orbit& o, std::vector<Barycentric>& points, std::vector<double>& weights) {
    const auto add = [&](double l0, double l1, double l2) {
        points.push_back({l0, l1, l2});
        weights.push_back(0.5 * o.weight);
    };
    switch (o.kind) {
    case OrbitKind::Centroid:
        add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        break;
    case OrbitKind::S21: {
        const double c = 1.0 - 2.0 * o.a;
        add(o.a, o.a, c);
        add(o.a, c, o.a);
        add(c, o.a, o.a);
        break;
    }
    case OrbitKind::S111: {
        const double c = 1.0 - o.a - o.b;
        add(o.a, o.b, c);
        add(o.a, c, o.b);
        add(o.b, o.a, c);
        add(o.b, c, o.a);
        add(c, o.a, o.b);
        add(c, o.b, o.a);
        break;
    }
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Integral of x^p y^q over the reference triangle.
double monomial_integral(int p, int q) {
    return factorial(p) * factorial(q) / factorial(p + q + 2);
}

struct MomentProblem {
    int degree;
    std::vector<Orbit> orbits;

    std::vector<double*> parameters() {
        std::vector<double*> params;
        for (auto& o : orbits) {
            if (o.kind != OrbitKind::Centroid) params.push_back(&o.a);
            if (o.kind == OrbitKind::S111) params.push_back(&o.b);
            params.push_back(&o.weight);
        }
        return params;
    }

    Eigen::VectorXd residual() const {
        std::vector<Barycentric> pts;
        std::vector<double> w;
        for (const auto& o : orbits) expand_orbit(o, pts, w);
        const int rows = (degree + 1) * (degree + 2) / 2;
        Eigen::VectorXd r(rows);
        int row = 0;
        for (int total = 0; total <= degree; ++total) {
            for (int p = total; p >= 0; --p) {
                const int q = total - p;
                double sum = 0.0;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    sum += w[i] * std::pow(pts[i][1], p) * std::pow(pts[i][2], q);
                }
                r(row++) = sum - monomial_integral(p, q);
            }
        }
        return r;
    }
};

QuadratureRule polish(const RuleTable& table) {
    MomentProblem problem{table.degree, table.orbits};
    auto params = problem.parameters();
    constexpr double kStep = 1e-7;
    for (int iter = 0; iter < 8; ++iter) {
        const Eigen::VectorXd r = problem.residual();
        if (r.lpNorm<Eigen::Infinity>() < 1e-17) break;
        Eigen::MatrixXd jac(r.size(), static_cast<Eigen::Index>(params.size()));
        for (std::size_t c = 0; c < params.size(); ++c) {
            const double saved = *params[c];
            *params[c] = saved + kStep;
            const Eigen::VectorXd plus = problem.residual();
            *params[c] = saved - kStep;
            const Eigen::VectorXd minus = problem.residual();
            *params[c] = saved;
            jac.col(static_cast<Eigen::Index>(c)) = (plus - minus) / (2.0 * kStep);
        }
        const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-r);
        for (std::size_t c = 0; c < params.size(); ++c) {
            *params[c] += delta(static_cast<Eigen::Index>(c));
        }
    }
    QuadratureRule rule;
    rule.degree = table.degree;
    for (const auto& o : problem.orbits) expand_orbit(o, rule.points, rule.weights);
    return rule;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
    if (degree < 1 || degree > 10) {
        std::ostringstream msg;
        msg << "quadrature_rule: unsupported degree " << degree << " (supported: 1..10)";
        throw InvalidConfigError(msg.str());
    }
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    const std::lock_guard lock(mutex);
    if (auto it = cache.find(degree); it != cache.end()) return it->second;
    for (const auto& table : rule_tables()) {
        if (table.degree >= degree) {
            return cache.emplace(degree, polish(table)).first->second;
        }
    }
    throw InvalidConfigError("quadrature_rule: no rule available");
}

AffineMap::AffineMap(Point v0, Point v1, Point v2)
    : v0_(v0),
      j00_(v1.x - v0.x), j01_(v2.x - v0.x),
      j10_(v1.y - v0.y), j11_(v2.y - v0.y) {
    const double det = j00_ * j11_ - j01_ * j10_;
    det_ = std::abs(det);
    // inverse transpose
    i00_ = j11_ / det;
    i01_ = -j10_ / det;
    i10_ = -j01_ / det;
    i11_ = j00_ / det;
}

Point AffineMap::map(const Barycentric& lambda) const {
    return {v0_.x + j00_ * lambda[1] + j01_ * lambda[2], v0_.y + j10_ * lambda[1] + j11_ * lambda[2]};
}

Grad2 AffineMap::push_gradient(const Grad2& g) const {
    return {i00_ * g[0] + i01_ * g[1], i10_ * g[0] + i11_ * g[1]};
}

AffineMap DofMap::element_map(int t) const {
    const auto& nodes = velocity_nodes[static_cast<std::size_t>(t)];
    return AffineMap(node_coords[nodes[0]], node_coords[nodes[1]], node_coords[nodes[2]]);
}

DofMap build_dofmap(const FineMesh& mesh) {
    DofMap dm;
    dm.n = mesh.n;
    dm.nodes_per_side = 2 * mesh.n + 1;
    dm.p2_nodes = dm.nodes_per_side * dm.nodes_per_side;
    dm.pressure_dofs = static_cast<int>(mesh.vertices.size());
    const int side = dm.nodes_per_side;
    const double half = 2.0 * mesh.n;

    dm.node_coords.reserve(static_cast<std::size_t>(dm.p2_nodes));
    std::vector<int> boundary_nodes;
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            dm.node_coords.push_back({i / half, j / half});
            if (i == 0 || j == 0 || i == side - 1 || j == side - 1) {
                boundary_nodes.push_back(j * side + i);
            }
        }
    }
    dm.pressure_coords = mesh.vertices;

    // Fine vertex (i, j) sits on lattice node (2i, 2j); edge midpoints are the
    // lattice average of their endpoints.
    const auto lattice = [&](int vertex) {
        const int vi = vertex % (mesh.n + 1);
        const int vj = vertex / (mesh.n + 1);
        return std::array<int, 2>{2 * vi, 2 * vj};
    };
    const auto midpoint = [&](int a, int b) {
        const auto la = lattice(a);
        const auto lb = lattice(b);
        return ((la[1] + lb[1]) / 2) * side + (la[0] + lb[0]) / 2;
    };
    dm.velocity_nodes.reserve(mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        std::array<int, 6> nodes{};
        for (int v = 0; v < 3; ++v) {
            const auto l = lattice(tri[v]);
            nodes[v] = l[1] * side + l[0];
        }
        nodes[3] = midpoint(tri[0], tri[1]);
        nodes[4] = midpoint(tri[1], tri[2]);
        nodes[5] = midpoint(tri[2], tri[0]);
        dm.velocity_nodes.push_back(nodes);
    }
    dm.pressure_nodes = mesh.triangles;

    for (int c = 0; c < 2; ++c) {
        for (int node : boundary_nodes) dm.boundary_velocity_dofs.push_back(dm.velocity_dof(c, node));
    }
    return dm;
}

}  // namespace nudgefem
