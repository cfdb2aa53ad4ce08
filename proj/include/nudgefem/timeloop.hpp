#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nudgefem/assembly.hpp"
#include "nudgefem/fem.hpp"
#include "nudgefem/mesh.hpp"
#include "nudgefem/observe.hpp"
#include "nudgefem/solver.hpp"

namespace nudgefem {

enum class InitialCondition { Zero, ExactAtZero };

struct SimulationConfig {
    double nu = 1.0;
    double beta = 1.0;
    double mu = 0.0;
    int n = 24;
    int ratio_k = 3;
    /// Requested step; <= 0 selects min(0.1 h, 0.01 T).
    double dt = 0.0;
    double t_final = 4.0;
    InterpolantKind interpolant = InterpolantKind::PiecewiseConstantAverage;
    InitialCondition initial = InitialCondition::Zero;
    int assembly_degree = 5;
    int error_degree = 8;

    void validate() const;
    /// Number of steps to reach t_final with a step no larger than the requested one.
    int step_count() const;
    /// Effective step t_final / step_count(), so the run ends exactly at t_final.
    double effective_dt() const;
};

/// Reference flow driving the forcing, the observations and the error metric.
struct FlowProblem {
    TimeDependentField velocity;
    TimeDependentField forcing;

    /// Closed-form manufactured solution with its consistent forcing for viscosity nu.
    static FlowProblem manufactured(double nu);
    /// u = 0, f = 0.
    static FlowProblem at_rest();
};

/// BDF2 history: u_prev = u^{n}, u_prev2 = u^{n-1} after `step` steps.
struct TimeState {
    std::vector<double> u_prev;
    std::vector<double> u_prev2;
    std::vector<double> p_prev;
    double t = 0.0;
    int step = 0;
};

struct StepDiagnostics {
    double t = 0.0;
    double l2_error = 0.0;       ///< ||u_h - u||_0
    double obs_ratio = 0.0;      ///< ||I_H(u_h - u)||_0 / ||u_h - u||_0
    double div_residual = 0.0;   ///< ||D u_h||_inf
    double mean_residual = 0.0;  ///< |m^T p_h|
};

/// IMEX-BDF2 integrator for the nudged Navier-Stokes system on P2/P1
/// Taylor-Hood elements with optional grad-div stabilisation.
///
/// Convection is linearised with the extrapolated field 2u^{n-1} - u^{n-2}
/// (u^0 in the implicit-Euler first step); viscosity, grad-div, pressure and
/// the nudging relaxation are implicit, the observed datum is taken at t_n.
class NudgedSimulation {
public:
    explicit NudgedSimulation(SimulationConfig config);
    NudgedSimulation(SimulationConfig config, FlowProblem problem);

    const SimulationConfig& config() const { return config_; }
    const FineMesh& mesh() const { return mesh_; }
    const DofMap& dofmap() const { return dofmap_; }
    const CoarseGrid& grid() const { return grid_; }
    const CoarseObserver& observer() const { return *observer_; }
    const OperatorSet& operators() const { return ops_; }
    const FlowProblem& problem() const { return problem_; }
    double dt() const { return dt_; }

    /// State at t = 0 following config.initial.
    TimeState initial_state() const;
    /// State at t = 0 holding the given velocity coefficients.
    TimeState state_from(std::vector<double> u0) const;

    /// beta E^T W I_H u(t), before boundary elimination.
    std::vector<double> observation_rhs(double t) const;

    TimeState first_step(const TimeState& state);
    TimeState bdf2_step(const TimeState& state);
    /// first_step at step 0, bdf2_step afterwards.
    TimeState advance(const TimeState& state);

    StepDiagnostics diagnose(const TimeState& state) const;

    using StepCallback = std::function<void(const TimeState&, const StepDiagnostics&)>;
    /// Runs from initial_state() to t_final, reporting t = 0 and every step.
    TimeState run(const StepCallback& on_step);

private:
    TimeState solve_step(const TimeState& state, bool second_order);

    SimulationConfig config_;
    FlowProblem problem_;
    FineMesh mesh_;
    DofMap dofmap_;
    CoarseGrid grid_;
    std::unique_ptr<CoarseObserver> observer_;
    OperatorSet ops_;
    std::unique_ptr<ConvectionAssembler> convection_;
    std::shared_ptr<const SparseMatrix> divergence_bc_;
    std::shared_ptr<const SparseMatrix> observation_bc_;
    std::shared_ptr<const SparseMatrix> coupling_bc_;
    SparseMatrix coupling_raw_;  // beta E^T W without elimination
    double dt_ = 0.0;
    SaddleSolver solver_;
    double last_div_residual_ = 0.0;
    double last_mean_residual_ = 0.0;
};

}  // namespace nudgefem
