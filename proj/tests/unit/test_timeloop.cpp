#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nudgefem/errors.hpp"
#include "nudgefem/metrics.hpp"
#include "nudgefem/timeloop.hpp"
#include "oracles.hpp"

using namespace nudgefem;

namespace {

SimulationConfig small_config(int n = 6, int k = 3) {
    SimulationConfig c;
    c.n = n;
    c.ratio_k = k;
    c.t_final = 0.1;
    c.dt = 0.01;
    return c;
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

TimeDependentField exact_u() {
    return [](double x, double y, double t) { return manufactured::eval_u(x, y, t); };
}

}  // namespace

TEST(Config, Validation) {
    SimulationConfig c;
    EXPECT_NO_THROW(c.validate());
    c.ratio_k = 5;
    EXPECT_THROW(c.validate(), InvalidConfigError);
    c = {};
    c.nu = 0.0;
    EXPECT_THROW(c.validate(), InvalidConfigError);
    c = {};
    c.beta = -1.0;
    EXPECT_THROW(c.validate(), InvalidConfigError);
    c = {};
    c.dt = 10.0;
    EXPECT_THROW(c.validate(), InvalidConfigError);
}

TEST(Config, StepsLandOnFinalTime) {
    SimulationConfig c;
    c.n = 24;
    c.t_final = 4.0;
    EXPECT_EQ(c.step_count(), 960);  // default min(0.1 h, 0.01 T)
    c.dt = 0.3;
    EXPECT_EQ(c.step_count(), 14);
    EXPECT_NEAR(c.effective_dt() * c.step_count(), 4.0, 1e-15);
    EXPECT_LE(c.effective_dt(), 0.3);
}

TEST(ObservationRhs, ZeroWithoutNudging) {
    auto c = small_config();
    c.beta = 0.0;
    NudgedSimulation sim(c);
    EXPECT_EQ(norm_inf(sim.observation_rhs(0.3)), 0.0);
}

TEST(ObservationRhs, ConstantDatumMatchesNudgingMatrix) {
    for (auto kind : {InterpolantKind::PiecewiseConstantAverage, InterpolantKind::CoarseLagrangeP1}) {
        auto c = small_config();
        c.beta = 2.5;
        c.interpolant = kind;
        FlowProblem constant{[](double, double, double) { return manufactured::Vec2{0.4, -0.9}; },
                             [](double, double, double) { return manufactured::Vec2{0.0, 0.0}; }};
        NudgedSimulation sim(c, constant);
        const auto rhs = sim.observation_rhs(0.0);
        const auto field = interpolate_p2(sim.dofmap(), [](double, double) { return Vec2{0.4, -0.9}; });
        const auto b = assemble_nudging(sim.observer());
        const auto ref = spmv(b.matrix, field);
        for (std::size_t i = 0; i < rhs.size(); ++i) EXPECT_NEAR(rhs[i], 2.5 * ref[i], 1e-14);
    }
}

TEST(ObservationRhs, ManufacturedDatumMatchesBruteForce) {
    auto c = small_config(6, 3);
    c.beta = 1.0;
    NudgedSimulation sim(c);
    const auto rhs = sim.observation_rhs(0.0);
    const auto& dm = sim.dofmap();
    const auto& grid = sim.grid();
    const double area = grid.H * grid.H;
    // exact cell means of u(., 0)
    std::vector<manufactured::Vec2> mean(grid.cell_count(), {0.0, 0.0});
    const auto rule = oracle::collapsed_gauss(14);
    for (int t = 0; t < dm.triangle_count(); ++t) {
        const auto& nodes = dm.velocity_nodes[t];
        const auto p0 = dm.node_coords[nodes[0]], p1 = dm.node_coords[nodes[1]], p2 = dm.node_coords[nodes[2]];
        const double det = 2.0 * sim.mesh().triangle_area(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double a = rule.points[q][0], b = rule.points[q][1];
            const auto u = manufactured::eval_u(p0.x + a * (p1.x - p0.x) + b * (p2.x - p0.x),
                                                p0.y + a * (p1.y - p0.y) + b * (p2.y - p0.y), 0.0);
            for (int comp = 0; comp < 2; ++comp) {
                mean[grid.fine_triangle_to_cell[t]][comp] += rule.weights[q] * det * u[comp] / area;
            }
        }
    }
    // (I_H u, I_H phi_i) = sum over cells H^2 mean(u) mean(phi_i); a P2 vertex function has zero
    // integral and a midpoint function integrates to |T| / 3 on each triangle it touches
    std::vector<double> ref(rhs.size(), 0.0);
    for (int t = 0; t < dm.triangle_count(); ++t) {
        const int cell = grid.fine_triangle_to_cell[t];
        for (int a = 3; a < 6; ++a) {
            const int node = dm.velocity_nodes[t][a];
            const double phi_mean = sim.mesh().triangle_area(t) / 3.0 / area;
            for (int comp = 0; comp < 2; ++comp) ref[dm.velocity_dof(comp, node)] += area * mean[cell][comp] * phi_mean;
        }
    }
    for (std::size_t i = 0; i < rhs.size(); ++i) EXPECT_NEAR(rhs[i], ref[i], 1e-12);
}

TEST(FirstStep, ZeroFixedPoint) {
    auto c = small_config();
    c.beta = 0.0;
    NudgedSimulation sim(c, FlowProblem::at_rest());
    const auto s1 = sim.first_step(sim.initial_state());
    EXPECT_EQ(norm_inf(s1.u_prev), 0.0);
    EXPECT_EQ(norm_inf(s1.p_prev), 0.0);
    EXPECT_DOUBLE_EQ(s1.t, c.dt);
    EXPECT_EQ(s1.step, 1);
}

TEST(FirstStep, ViscousDissipation) {
    auto c = small_config(8, 2);
    c.beta = 0.0;
    c.nu = 1e6;
    NudgedSimulation sim(c, FlowProblem::at_rest());
    const auto u0 = interpolate_p2(sim.dofmap(), [](double x, double y) {
        return Vec2{std::sin(M_PI * x) * std::sin(M_PI * y), std::sin(2 * M_PI * x) * std::sin(M_PI * y)};
    });
    const auto s0 = sim.state_from(u0);
    const auto s1 = sim.first_step(s0);
    EXPECT_LT(l2_norm(sim.dofmap(), s1.u_prev), l2_norm(sim.dofmap(), s0.u_prev));
}

TEST(FirstStep, TemporalDefectIsSecondOrderLocally) {
    // nu = 1 is stiff at these steps (dt * lambda >> 1) and shows order reduction
    std::vector<double> err;
    for (double dt : {0.08, 0.04, 0.02}) {
        auto c = small_config(32, 4);
        c.nu = 1e-2;
        c.beta = 0.0;
        c.dt = dt;
        c.t_final = dt;
        c.initial = InitialCondition::ExactAtZero;
        NudgedSimulation sim(c);
        const auto s1 = sim.first_step(sim.initial_state());
        err.push_back(l2_error(sim.dofmap(), s1.u_prev, exact_u(), s1.t));
    }
    EXPECT_GE(oracle::richardson_order(err[0], err[1], err[2]), 1.9);
}

TEST(Bdf2Step, ZeroHistoryStaysZero) {
    auto c = small_config();
    c.beta = 0.0;
    NudgedSimulation sim(c, FlowProblem::at_rest());
    auto s = sim.initial_state();
    s.step = 1;
    s.t = c.dt;
    const auto s2 = sim.bdf2_step(s);
    EXPECT_EQ(norm_inf(s2.u_prev), 0.0);
    EXPECT_EQ(s2.step, 2);
}

TEST(Bdf2Step, OneStepDefectFromExactHistory) {
    std::vector<double> err;
    for (double dt : {0.08, 0.04, 0.02}) {
        auto c = small_config(32, 4);
        c.beta = 0.0;
        c.dt = dt;
        c.t_final = 2 * dt;
        NudgedSimulation sim(c);
        auto at = [&](double t) {
            return interpolate_p2(sim.dofmap(), [t](double x, double y) { return manufactured::eval_u(x, y, t); });
        };
        TimeState s = sim.state_from(at(dt));
        s.u_prev2 = at(0.0);
        s.t = dt;
        s.step = 1;
        const auto s2 = sim.bdf2_step(s);
        err.push_back(l2_error(sim.dofmap(), s2.u_prev, exact_u(), s2.t));
    }
    EXPECT_GE(oracle::richardson_order(err[0], err[1], err[2]), 1.9);
}

TEST(Run, ConstraintsHoldEveryStep) {
    auto c = small_config(8, 2);
    c.nu = 1e-3;
    c.mu = 0.05;
    c.t_final = 1.0;
    c.dt = 0.01;
    NudgedSimulation sim(c);
    int steps = 0;
    sim.run([&](const TimeState& s, const StepDiagnostics& d) {
        if (s.step == 0) return;
        ++steps;
        EXPECT_LE(d.div_residual, 1e-9);
        EXPECT_LE(d.mean_residual, 1e-10);
        EXPECT_LE(d.obs_ratio, 1.0 + 1e-12);
    });
    EXPECT_EQ(steps, 100);
}

TEST(Run, ZeroDataGivesZeroTrajectory) {
    auto c = small_config();
    NudgedSimulation sim(c, FlowProblem::at_rest());
    const auto last = sim.run([&](const TimeState& s, const StepDiagnostics& d) {
        EXPECT_EQ(norm_inf(s.u_prev), 0.0);
        EXPECT_EQ(d.l2_error, 0.0);
    });
    EXPECT_NEAR(last.t, c.t_final, 1e-14);
}

TEST(Run, Deterministic) {
    auto c = small_config(6, 3);
    c.initial = InitialCondition::Zero;
    std::vector<double> a, b;
    NudgedSimulation(c).run([&](const TimeState&, const StepDiagnostics& d) { a.push_back(d.l2_error); });
    NudgedSimulation(c).run([&](const TimeState&, const StepDiagnostics& d) { b.push_back(d.l2_error); });
    EXPECT_EQ(a, b);
}

TEST(Run, NoDecayWithoutNudging) {
    SimulationConfig c;
    c.nu = 1e-6;
    c.beta = 0.0;
    c.t_final = 2.0;
    std::vector<double> err;
    NudgedSimulation(c).run([&](const TimeState&, const StepDiagnostics& d) { err.push_back(d.l2_error); });
    EXPECT_GE(err.back(), 0.5 * err.front());
    EXPECT_LE(err.back(), 2.0 * err.front());
}

TEST(Run, NudgingDampsInitialError) {
    SimulationConfig c;
    c.nu = 1e-6;
    c.beta = 1.0;
    c.t_final = 2.0;
    std::vector<double> err;
    NudgedSimulation(c).run([&](const TimeState&, const StepDiagnostics& d) { err.push_back(d.l2_error); });
    EXPECT_LT(err.back(), 0.2 * err.front());
}

TEST(Run, HighViscosityErrorAtInterpolationScale) {
    SimulationConfig c;
    c.n = 16;
    c.ratio_k = 4;
    c.nu = 1.0;
    c.beta = 0.0;
    c.t_final = 1.0;
    c.initial = InitialCondition::ExactAtZero;
    double worst = 0.0;
    NudgedSimulation sim(c);
    sim.run([&](const TimeState&, const StepDiagnostics& d) { worst = std::max(worst, d.l2_error); });
    const double h = 1.0 / c.n;
    const double scale = h * h * h * l2_norm(sim.dofmap(), interpolate_p2(sim.dofmap(), [](double x, double y) {
        return manufactured::eval_u(x, y, 0.0);
    }));
    EXPECT_LE(worst, 10.0 * scale);
    // golden value from the first verified run
    EXPECT_NEAR(worst, 6.8622261929e-04, 1e-10);
}

TEST(Run, NonFiniteStateRaisesDivergence) {
    auto c = small_config();
    NudgedSimulation sim(c);
    auto s = sim.initial_state();
    s.u_prev[sim.dofmap().p2_nodes / 2] = std::numeric_limits<double>::quiet_NaN();
    try {
        sim.advance(s);
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.step(), 1);
        EXPECT_EQ(e.last_good_time(), 0.0);
    }
}
