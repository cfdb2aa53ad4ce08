#include "nudgefem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nudgefem/errors.hpp"

namespace nudgefem {

ErrorSeries simulate(const SimulationConfig& config) {
    return simulate(config, FlowProblem::manufactured(config.nu));
}

ErrorSeries simulate(const SimulationConfig& config, const FlowProblem& problem) {
    ErrorSeries series;
    series.config = config;
    NudgedSimulation sim(config, problem);
    series.samples.reserve(static_cast<std::size_t>(config.step_count()) + 1);
    sim.run([&](const TimeState&, const StepDiagnostics& d) {
        series.samples.push_back({d.t, d.l2_error, d.obs_ratio, d.div_residual});
    });
    return series;
}

double asymptotic_max(const ErrorSeries& series, double window_fraction) {
    if (series.samples.empty()) throw InvalidConfigError("asymptotic_max: empty series");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw InvalidConfigError("asymptotic_max: window fraction must lie in (0, 1]");
    }
    const double t_end = series.samples.back().t;
    const double t_begin = (1.0 - window_fraction) * t_end;
    double best = -1.0;
    for (const auto& s : series.samples) {
        if (s.t >= t_begin - 1e-12 * std::max(1.0, t_end)) best = std::max(best, s.l2_error);
    }
    if (best < 0.0) throw InvalidConfigError("asymptotic_max: no samples in the window");
    return best;
}

// ---------------------------------------------------------------------------

namespace {

SimulationConfig level_config(const SimulationConfig& base, int n, const ConvergenceOptions& options) {
    SimulationConfig c = base;
    c.n = n;
    if (options.dt_per_h > 0.0) c.dt = options.dt_per_h / n;
    return c;
}

ConvergenceReport finish_report(std::vector<ConvergenceRow> rows, double window_fraction, double t_final) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.h > b.h; });
    ConvergenceReport report;
    report.rows = std::move(rows);
    std::vector<ConvergencePoint> points;
    for (const auto& r : report.rows) points.push_back({r.h, r.max_window_error});
    report.slope = fit_slope(points);
    report.window = {(1.0 - window_fraction) * t_final, t_final};
    return report;
}

int lagrange_ratio(int n, LagrangeMode mode, int base_k, double fixed_H) {
    if (mode == LagrangeMode::ProportionalH) return base_k;
    const double k = fixed_H * n;
    const int rounded = static_cast<int>(std::lround(k));
    if (std::abs(k - rounded) > 1e-9 || rounded < 1 || n % rounded != 0) {
        std::ostringstream msg;
        msg << "fixed H=" << fixed_H << " is not a multiple of h=1/" << n << " dividing the unit square";
        throw InvalidConfigError(msg.str());
    }
    return rounded;
}

}  // namespace

ConvergenceReport run_convergence(const SimulationConfig& base, const ConvergenceOptions& options) {
    if (options.ns.size() < 2) throw InvalidConfigError("run_convergence: need at least two mesh levels");
    std::vector<ConvergenceRow> rows;
    for (int n : options.ns) {
        const auto series = simulate(level_config(base, n, options));
        rows.push_back({n, 1.0 / n, asymptotic_max(series, options.window_fraction)});
    }
    return finish_report(std::move(rows), options.window_fraction, base.t_final);
}

ConvergenceReport run_convergence(double nu, double mu, std::span<const int> ns, int k, double beta) {
    SimulationConfig base;
    base.nu = nu;
    base.mu = mu;
    base.ratio_k = k;
    base.beta = beta;
    ConvergenceOptions options;
    options.ns.assign(ns.begin(), ns.end());
    return run_convergence(base, options);
}

ConvergenceReport run_lagrange_study(const SimulationConfig& base, LagrangeMode mode,
                                     const ConvergenceOptions& options, double fixed_H) {
    if (options.ns.size() < 2) throw InvalidConfigError("run_lagrange_study: need at least two mesh levels");
    std::vector<ConvergenceRow> rows;
    for (int n : options.ns) {
        auto c = level_config(base, n, options);
        c.interpolant = InterpolantKind::CoarseLagrangeP1;
        c.ratio_k = lagrange_ratio(n, mode, base.ratio_k, fixed_H);
        const auto series = simulate(c);
        rows.push_back({n, 1.0 / n, asymptotic_max(series, options.window_fraction)});
    }
    return finish_report(std::move(rows), options.window_fraction, base.t_final);
}

DtGuardResult dt_dominance_guard(const ConvergenceReport& reference, const SimulationConfig& base,
                                 const ConvergenceOptions& options, std::optional<LagrangeMode> lagrange,
                                 double fixed_H) {
    DtGuardResult result;
    for (const auto& row : reference.rows) {
        auto c = level_config(base, row.n, options);
        c.dt = 0.5 * c.effective_dt();
        if (lagrange) {
            c.interpolant = InterpolantKind::CoarseLagrangeP1;
            c.ratio_k = lagrange_ratio(row.n, *lagrange, base.ratio_k, fixed_H);
        }
        const double refined = asymptotic_max(simulate(c), options.window_fraction);
        const double change = std::abs(refined - row.max_window_error) / row.max_window_error;
        result.relative_changes.push_back(change);
        result.max_relative_change = std::max(result.max_relative_change, change);
    }
    return result;
}

// ---------------------------------------------------------------------------

std::vector<DecayRun> run_decay_study(const SimulationConfig& base, std::span<const double> betas) {
    std::vector<DecayRun> runs;
    for (double beta : betas) {
        DecayRun run;
        run.beta = beta;
        try {
            auto c = base;
            c.beta = beta;
            run.series = simulate(c);
        } catch (const std::exception& e) {
            run.failure = e.what();
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

double fit_decay_rate(const ErrorSeries& series, double t_begin, double t_end) {
    std::vector<double> t;
    std::vector<double> log_sq;
    for (const auto& s : series.samples) {
        if (s.t >= t_begin && s.t <= t_end && s.l2_error > 0.0) {
            t.push_back(s.t);
            log_sq.push_back(2.0 * std::log(s.l2_error));
        }
    }
    if (t.size() < 2) throw InvalidConfigError("fit_decay_rate: fewer than two samples in the fit interval");
    return -least_squares_line(t, log_sq)[0];
}

DecayAnalysis analyze_decay(const ErrorSeries& series, double plateau_factor, double window_fraction) {
    if (series.samples.size() < 3) throw InvalidConfigError("analyze_decay: series too short");
    DecayAnalysis a;
    a.initial_error = series.samples[1].l2_error;
    a.plateau_level = asymptotic_max(series, window_fraction);
    const double threshold = plateau_factor * a.plateau_level;
    a.plateau_start = series.samples.back().t;
    for (std::size_t i = 1; i < series.samples.size(); ++i) {
        if (series.samples[i].l2_error <= threshold) {
            a.plateau_start = series.samples[i].t;
            a.reached_plateau = true;
            break;
        }
    }
    const double t0 = series.samples[1].t;
    if (a.reached_plateau && a.plateau_start > t0) {
        a.pre_plateau_rate = fit_decay_rate(series, t0, a.plateau_start);
    }
    return a;
}

DecayPrediction predict_gamma(double nu, double H, double beta, double c_I_assumed) {
    if (!(nu > 0.0) || !(H > 0.0) || !(beta > 0.0) || !(c_I_assumed > 0.0)) {
        throw InvalidConfigError("predict_gamma: nu, H, beta and c_I must be positive");
    }
    DecayPrediction p;
    p.nu = nu;
    p.H = H;
    p.beta = beta;
    p.c_I = c_I_assumed;
    p.viscous_branch = nu / (2.0 * c_I_assumed * c_I_assumed * H * H);
    p.nudging_branch = beta / 2.0;
    p.gamma = std::min(p.viscous_branch, p.nudging_branch);
    p.viscous_branch_active = p.viscous_branch < p.nudging_branch;
    return p;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw Error("cannot parse " + what + " value '" + text + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_decay_csv(std::ostream& out, const ErrorSeries& series) {
    out << "t,l2_error,obs_ratio,div_residual\n";
    out << std::setprecision(17);
    for (const auto& s : series.samples) {
        out << s.t << ',' << s.l2_error << ',' << s.obs_ratio << ',' << s.div_residual << '\n';
    }
}

std::vector<ErrorSample> read_decay_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,l2_error,obs_ratio,div_residual") {
        throw Error("decay CSV: missing header t,l2_error,obs_ratio,div_residual");
    }
    std::vector<ErrorSample> samples;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4) throw Error("decay CSV: expected 4 columns in '" + line + "'");
        samples.push_back({parse_double(cells[0], "t"), parse_double(cells[1], "l2_error"),
                           parse_double(cells[2], "obs_ratio"), parse_double(cells[3], "div_residual")});
    }
    return samples;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "h,n,max_window_error\n";
    out << std::setprecision(17);
    for (const auto& r : report.rows) out << r.h << ',' << r.n << ',' << r.max_window_error << '\n';
    out << "# slope=" << report.slope << '\n';
}

ConvergenceReport read_convergence_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "h,n,max_window_error") {
        throw Error("convergence CSV: missing header h,n,max_window_error");
    }
    ConvergenceReport report;
    bool has_slope = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("slope=");
            if (pos != std::string::npos) {
                report.slope = parse_double(trim(line.substr(pos + 6)), "slope");
                has_slope = true;
            }
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 3) throw Error("convergence CSV: expected 3 columns in '" + line + "'");
        report.rows.push_back({static_cast<int>(parse_double(cells[1], "n")), parse_double(cells[0], "h"),
                               parse_double(cells[2], "max_window_error")});
    }
    if (!has_slope) throw Error("convergence CSV: missing '# slope=' footer");
    return report;
}

std::map<std::string, std::string> parse_key_value_text(std::istream& in) {
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config file " + path);
    return parse_key_value_text(in);
}

void apply_config_entries(SimulationConfig& config, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "nu") {
            config.nu = parse_double(value, key);
        } else if (key == "beta") {
            config.beta = parse_double(value, key);
        } else if (key == "mu") {
            config.mu = parse_double(value, key);
        } else if (key == "n") {
            config.n = static_cast<int>(parse_double(value, key));
        } else if (key == "ratio_k" || key == "ratio-k") {
            config.ratio_k = static_cast<int>(parse_double(value, key));
        } else if (key == "dt") {
            config.dt = parse_double(value, key);
        } else if (key == "t_final" || key == "t-final") {
            config.t_final = parse_double(value, key);
        } else if (key == "interpolant") {
            config.interpolant = parse_interpolant_kind(value);
        } else if (key == "initial") {
            if (value == "zero") {
                config.initial = InitialCondition::Zero;
            } else if (value == "exact") {
                config.initial = InitialCondition::ExactAtZero;
            } else {
                throw InvalidConfigError("initial must be zero or exact, got '" + value + "'");
            }
        } else {
            throw InvalidConfigError("unknown config key '" + key + "'");
        }
    }
}

}  // namespace nudgefem
