#include "nudgefem/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nudgefem/errors.hpp"
#include "nudgefem/manufactured.hpp"
#include "nudgefem/metrics.hpp"

namespace nudgefem {

void SimulationConfig::validate() const {
    std::ostringstream msg;
    if (!(nu > 0.0)) msg << "nu must be > 0 (got " << nu << "); ";
    if (!(beta >= 0.0)) msg << "beta must be >= 0 (got " << beta << "); ";
    if (!(mu >= 0.0)) msg << "mu must be >= 0 (got " << mu << "); ";
    if (n < 2) msg << "N must be >= 2 (got " << n << "); ";
    if (ratio_k < 1 || (n >= 2 && n % ratio_k != 0)) {
        msg << "ratio k=" << ratio_k << " must be >= 1 and divide N=" << n << "; ";
    }
    if (!(t_final > 0.0)) msg << "T must be > 0 (got " << t_final << "); ";
    if (dt > 0.0 && dt > t_final) msg << "dt=" << dt << " exceeds T=" << t_final << "; ";
    if (assembly_degree < 5 || assembly_degree > 10) msg << "assembly quadrature degree must be in 5..10; ";
    if (error_degree < 8 || error_degree > 10) msg << "error quadrature degree must be in 8..10; ";
    const auto text = msg.str();
    if (!text.empty()) throw InvalidConfigError("invalid simulation config: " + text);
}

int SimulationConfig::step_count() const {
    const double requested = dt > 0.0 ? dt : std::min(0.1 / n, 0.01 * t_final);
    return std::max(1, static_cast<int>(std::ceil(t_final / requested - 1e-9)));
}

double SimulationConfig::effective_dt() const { return t_final / step_count(); }

FlowProblem FlowProblem::manufactured(double nu) {
    return {[](double x, double y, double t) { return manufactured::eval_u(x, y, t); },
            [nu](double x, double y, double t) { return manufactured::eval_f(x, y, t, nu); }};
}

FlowProblem FlowProblem::at_rest() {
    const auto zero = [](double, double, double) { return manufactured::Vec2{0.0, 0.0}; };
    return {zero, zero};
}

NudgedSimulation::NudgedSimulation(SimulationConfig config)
    : NudgedSimulation(config, FlowProblem::manufactured(config.nu)) {}

NudgedSimulation::NudgedSimulation(SimulationConfig config, FlowProblem problem)
    : config_(config), problem_(std::move(problem)) {
    config_.validate();
    mesh_ = build_fine_mesh(config_.n);
    dofmap_ = build_dofmap(mesh_);
    grid_ = build_coarse_grid(mesh_, config_.ratio_k);
    observer_ = std::make_unique<CoarseObserver>(dofmap_, grid_, config_.interpolant);
    const auto& rule = quadrature_rule(config_.assembly_degree);
    ops_ = assemble_operators(dofmap_, rule);
    convection_ = std::make_unique<ConvectionAssembler>(dofmap_, rule);
    dt_ = config_.effective_dt();

    const auto& boundary = dofmap_.boundary_velocity_dofs;
    auto divergence = ops_.divergence;
    zero_columns(divergence, boundary);
    divergence_bc_ = std::make_shared<const SparseMatrix>(std::move(divergence));

    coupling_raw_ = multiply(observer_->observation().transpose(), observer_->gram()).scaled(config_.beta);
    if (config_.beta > 0.0) {
        auto observation = observer_->observation();
        zero_columns(observation, boundary);
        observation_bc_ = std::make_shared<const SparseMatrix>(std::move(observation));
        auto coupling = coupling_raw_;
        std::vector<char> flag(static_cast<std::size_t>(dofmap_.velocity_dofs()), 0);
        for (int d : boundary) flag[d] = 1;
        for (int r = 0; r < coupling.rows; ++r) {
            if (!flag[r]) continue;
            for (int k = coupling.row_offsets[r]; k < coupling.row_offsets[r + 1]; ++k) coupling.values[k] = 0.0;
        }
        coupling_bc_ = std::make_shared<const SparseMatrix>(std::move(coupling));
    }
}

TimeState NudgedSimulation::state_from(std::vector<double> u0) const {
    if (static_cast<int>(u0.size()) != dofmap_.velocity_dofs()) {
        throw DimensionMismatchError("state_from: initial velocity has the wrong size");
    }
    zero_entries(u0, dofmap_.boundary_velocity_dofs);
    TimeState s;
    s.u_prev = u0;
    s.u_prev2 = std::move(u0);
    s.p_prev.assign(static_cast<std::size_t>(dofmap_.pressure_dofs), 0.0);
    return s;
}

TimeState NudgedSimulation::initial_state() const {
    if (config_.initial == InitialCondition::ExactAtZero) {
        const auto& u = problem_.velocity;
        return state_from(interpolate_p2(dofmap_, [&](double x, double y) { return u(x, y, 0.0); }));
    }
    return state_from(std::vector<double>(static_cast<std::size_t>(dofmap_.velocity_dofs()), 0.0));
}

std::vector<double> NudgedSimulation::observation_rhs(double t) const {
    if (config_.beta == 0.0) return std::vector<double>(static_cast<std::size_t>(dofmap_.velocity_dofs()), 0.0);
    const auto& u = problem_.velocity;
    const auto datum = observer_->observe_function([&](double x, double y) { return u(x, y, t); }, dofmap_);
    return spmv(coupling_raw_, datum);
}

TimeState NudgedSimulation::first_step(const TimeState& state) { return solve_step(state, false); }

TimeState NudgedSimulation::bdf2_step(const TimeState& state) { return solve_step(state, true); }

TimeState NudgedSimulation::advance(const TimeState& state) { return solve_step(state, state.step > 0); }

TimeState NudgedSimulation::solve_step(const TimeState& state, bool second_order) {
    const double t_new = (state.step + 1) * dt_;
    const std::size_t nv = state.u_prev.size();
    const auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(state.u_prev) || (second_order && !finite(state.u_prev2))) {
        std::ostringstream msg;
        msg << "non-finite history entering step " << state.step + 1;
        throw DivergenceError(msg.str(), state.step + 1, state.t);
    }

    // extrapolated advecting field and the history part of the time derivative
    std::vector<double> advecting(nv);
    std::vector<double> history(nv);
    double mass_coefficient = 0.0;
    if (second_order) {
        for (std::size_t i = 0; i < nv; ++i) {
            advecting[i] = 2.0 * state.u_prev[i] - state.u_prev2[i];
            history[i] = (4.0 * state.u_prev[i] - state.u_prev2[i]) / (2.0 * dt_);
        }
        mass_coefficient = 1.5 / dt_;
    } else {
        advecting = state.u_prev;
        for (std::size_t i = 0; i < nv; ++i) history[i] = state.u_prev[i] / dt_;
        mass_coefficient = 1.0 / dt_;
    }

    const auto convection = convection_->assemble(advecting);
    std::vector<ScaledTerm> terms{{mass_coefficient, &ops_.mass}, {config_.nu, &ops_.stiffness}, {1.0, &convection}};
    if (config_.mu > 0.0) terms.push_back({config_.mu, &ops_.graddiv});

    SaddleSystem system;
    system.velocity_block = linear_combination(terms);
    system.divergence = divergence_bc_;
    system.pressure_mean = ops_.pressure_mean;
    system.observation = observation_bc_;
    system.coupling = coupling_bc_;

    system.rhs_velocity = assemble_load(dofmap_, quadrature_rule(config_.assembly_degree), problem_.forcing, t_new);
    spmv_add(ops_.mass, history, 1.0, system.rhs_velocity);
    if (config_.beta > 0.0) {
        const auto obs = observation_rhs(t_new);
        for (std::size_t i = 0; i < nv; ++i) system.rhs_velocity[i] += obs[i];
    }
    apply_dirichlet(system.velocity_block, dofmap_.boundary_velocity_dofs, system.rhs_velocity);
    system.rhs_pressure.assign(static_cast<std::size_t>(dofmap_.pressure_dofs), 0.0);

    SaddleSolution solution;
    try {
        solution = solver_.solve(system);
    } catch (const SolverQualityError& e) {
        const bool finite = std::isfinite(e.divergence_residual()) && std::isfinite(e.mean_residual());
        if (!finite) {
            throw DivergenceError(std::string("non-finite solution: ") + e.what(), state.step + 1, state.t);
        }
        throw;
    }
    if (!finite(solution.velocity) || !finite(solution.pressure)) {
        std::ostringstream msg;
        msg << "non-finite state at step " << state.step + 1;
        throw DivergenceError(msg.str(), state.step + 1, state.t);
    }
    last_div_residual_ = solution.divergence_residual;
    last_mean_residual_ = solution.mean_residual;

    TimeState next;
    next.u_prev2 = state.u_prev;
    next.u_prev = std::move(solution.velocity);
    next.p_prev = std::move(solution.pressure);
    next.t = t_new;
    next.step = state.step + 1;
    return next;
}

StepDiagnostics NudgedSimulation::diagnose(const TimeState& state) const {
    StepDiagnostics d;
    d.t = state.t;
    d.l2_error = l2_error(dofmap_, state.u_prev, problem_.velocity, state.t, config_.error_degree);

    const auto& u = problem_.velocity;
    auto coarse_error = observer_->apply(state.u_prev);
    const auto datum = observer_->observe_function([&](double x, double y) { return u(x, y, state.t); }, dofmap_);
    for (std::size_t i = 0; i < coarse_error.size(); ++i) coarse_error[i] -= datum[i];
    const double observed = std::sqrt(std::max(0.0, quadratic_form(observer_->gram(), coarse_error)));
    d.obs_ratio = d.l2_error > 0.0 ? observed / d.l2_error : 0.0;

    double div = 0.0;
    for (double v : spmv(*divergence_bc_, state.u_prev)) div = std::max(div, std::abs(v));
    d.div_residual = div;
    double mean = 0.0;
    for (std::size_t i = 0; i < state.p_prev.size(); ++i) mean += ops_.pressure_mean[i] * state.p_prev[i];
    d.mean_residual = std::abs(mean);
    return d;
}

TimeState NudgedSimulation::run(const StepCallback& on_step) {
    TimeState state = initial_state();
    if (on_step) on_step(state, diagnose(state));
    const int steps = config_.step_count();
    for (int s = 0; s < steps; ++s) {
        state = advance(state);
        if (on_step) on_step(state, diagnose(state));
    }
    return state;
}

}  // namespace nudgefem
