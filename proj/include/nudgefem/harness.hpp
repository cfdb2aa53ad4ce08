#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nudgefem/metrics.hpp"
#include "nudgefem/timeloop.hpp"

namespace nudgefem {

struct ErrorSample {
    double t = 0.0;
    double l2_error = 0.0;
    double obs_ratio = 0.0;
    double div_residual = 0.0;
    friend bool operator==(const ErrorSample&, const ErrorSample&) = default;
};

struct ErrorSeries {
    std::vector<ErrorSample> samples;
    SimulationConfig config;
};

ErrorSeries simulate(const SimulationConfig& config);
ErrorSeries simulate(const SimulationConfig& config, const FlowProblem& problem);

/// Max l2_error over t in [(1 - window_fraction) T, T], T the last sample time.
double asymptotic_max(const ErrorSeries& series, double window_fraction = 0.25);

// -- convergence studies ---------------------------------------------------

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double max_window_error = 0.0;
    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  ///< ordered by decreasing h
    double slope = 0.0;
    std::array<double, 2> window{};
};

struct ConvergenceOptions {
    std::vector<int> ns{12, 24, 48};
    double window_fraction = 0.25;
    /// When > 0 every level uses dt = dt_per_h * h; otherwise base.dt applies.
    double dt_per_h = 0.0;
};

/// One run per N with coarse ratio base.ratio_k; slope of the windowed maxima.
ConvergenceReport run_convergence(const SimulationConfig& base, const ConvergenceOptions& options);
/// Piecewise-constant observations, H = k h.
ConvergenceReport run_convergence(double nu, double mu, std::span<const int> ns, int k, double beta);

enum class LagrangeMode {
    ProportionalH,  ///< H = k h with the base ratio (3 by default)
    FixedH,         ///< H fixed, k = H / h per level
};

/// Coarse Lagrange observations in either coarse-mesh regime.
ConvergenceReport run_lagrange_study(const SimulationConfig& base, LagrangeMode mode,
                                     const ConvergenceOptions& options, double fixed_H = 0.25);

/// Temporal-resolution check: max relative change of the windowed errors when
/// every level is recomputed with half the step.
struct DtGuardResult {
    std::vector<double> relative_changes;
    double max_relative_change = 0.0;
};
DtGuardResult dt_dominance_guard(const ConvergenceReport& reference, const SimulationConfig& base,
                                 const ConvergenceOptions& options,
                                 std::optional<LagrangeMode> lagrange = std::nullopt,
                                 double fixed_H = 0.25);

// -- decay studies ---------------------------------------------------------

struct DecayRun {
    double beta = 0.0;
    std::optional<ErrorSeries> series;
    std::string failure;  ///< set when the run threw
};

/// One run per beta; failures are recorded and the study continues.
std::vector<DecayRun> run_decay_study(const SimulationConfig& base, std::span<const double> betas);

/// Exponential rate r of ||e||_0^2 ~ C exp(-r t) fitted on samples in [t_begin, t_end].
double fit_decay_rate(const ErrorSeries& series, double t_begin, double t_end);

struct DecayAnalysis {
    double initial_error = 0.0;  ///< error at the first computed step
    double plateau_level = 0.0;  ///< asymptotic_max over the last quarter
    double plateau_start = 0.0;  ///< first time the error drops below plateau_factor * level
    double pre_plateau_rate = 0.0;
    bool reached_plateau = false;
};

DecayAnalysis analyze_decay(const ErrorSeries& series, double plateau_factor = 2.0,
                            double window_fraction = 0.25);

struct DecayPrediction {
    double gamma = 0.0;
    double viscous_branch = 0.0;  ///< nu / (2 c_I^2 H^2)
    double nudging_branch = 0.0;  ///< beta / 2
    double nu = 0.0;
    double H = 0.0;
    double beta = 0.0;
    double c_I = 1.0;
    /// beta >= nu / (c_I H)^2: the coarse mesh resolves the viscous decay
    /// rather than the relaxation setting the rate (diagnostic only).
    bool viscous_branch_active = false;
};

/// gamma = min(nu / (2 c_I^2 H^2), beta / 2).
DecayPrediction predict_gamma(double nu, double H, double beta, double c_I_assumed = 1.0);

// -- CSV and config I/O ----------------------------------------------------

/// `t,l2_error,obs_ratio,div_residual`, 17 significant digits.
void write_decay_csv(std::ostream& out, const ErrorSeries& series);
std::vector<ErrorSample> read_decay_csv(std::istream& in);

/// `h,n,max_window_error` plus a `# slope=<value>` footer.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
ConvergenceReport read_convergence_csv(std::istream& in);

/// Flat `key = value` file; `#` starts a comment.
std::map<std::string, std::string> read_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value_text(std::istream& in);
/// Known keys: nu, beta, mu, n, ratio_k, dt, t_final, interpolant, initial.
void apply_config_entries(SimulationConfig& config, const std::map<std::string, std::string>& entries);

}  // namespace nudgefem
