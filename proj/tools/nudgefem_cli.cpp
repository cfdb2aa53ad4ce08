// nudgefem: command line driver for the nudged Navier-Stokes solver.
//
//   nudgefem verify
//   nudgefem run --nu 1e-6 --mu 0.05 --n 24 --out results
//   nudgefem decay --betas 0,1,10,100 --t-final 8 --out results
//   nudgefem convergence --nu 1 --ns 12,24,48 --guard --slope-min 2.7 --slope-max 3.3
//   nudgefem lagrange --mode fixed --fixed-H 0.25
//   nudgefem gamma --nu 1e-2 --n 24 --ratio-k 3 --beta 0.01
//
// Exit status: 0 success, 2 gate failure, 1 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nudgefem/errors.hpp"
#include "nudgefem/harness.hpp"
#include "nudgefem/verify.hpp"

using namespace nudgefem;
namespace fs = std::filesystem;

namespace {

constexpr int kGateFailure = 2;

struct CommonOptions {
    std::string config_file;
    std::string out_dir = ".";
    std::optional<double> nu, beta, mu, dt, t_final;
    std::optional<int> n, ratio_k;
    std::optional<std::string> interpolant, initial;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_file, "flat key=value file; flags override it")->check(CLI::ExistingFile);
    app->add_option("--out", o.out_dir, "output directory");
    app->add_option("--nu", o.nu, "viscosity");
    app->add_option("--beta", o.beta, "nudging parameter");
    app->add_option("--mu", o.mu, "grad-div parameter");
    app->add_option("--n", o.n, "fine cells per side");
    app->add_option("--ratio-k", o.ratio_k, "coarse cell width in fine cells (H = k h)");
    app->add_option("--dt", o.dt, "time step (<= 0: default)");
    app->add_option("--t-final", o.t_final, "final time");
    app->add_option("--interpolant", o.interpolant, "observation operator")
        ->check(CLI::IsMember({"pc", "lagrange"}));
    app->add_option("--initial", o.initial, "initial velocity")->check(CLI::IsMember({"zero", "exact"}));
}

SimulationConfig resolve(const CommonOptions& o, SimulationConfig base = {}) {
    SimulationConfig c = base;
    if (!o.config_file.empty()) apply_config_entries(c, read_key_value_file(o.config_file));
    std::map<std::string, std::string> flags;
    auto put = [&](const char* key, const auto& value) {
        if (value) {
            std::ostringstream s;
            s.precision(17);
            s << *value;
            flags[key] = s.str();
        }
    };
    put("nu", o.nu);
    put("beta", o.beta);
    put("mu", o.mu);
    put("n", o.n);
    put("ratio_k", o.ratio_k);
    put("dt", o.dt);
    put("t_final", o.t_final);
    put("interpolant", o.interpolant);
    put("initial", o.initial);
    apply_config_entries(c, flags);
    c.validate();
    return c;
}

fs::path prepare_out(const CommonOptions& o) {
    fs::path dir(o.out_dir);
    fs::create_directories(dir);
    return dir;
}

std::string number_tag(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void print_config(const SimulationConfig& c) {
    std::printf("nu=%g beta=%g mu=%g n=%d k=%d dt=%g T=%g interpolant=%s\n", c.nu, c.beta, c.mu, c.n, c.ratio_k,
                c.effective_dt(), c.t_final, to_string(c.interpolant).c_str());
}

int gate(bool ok, const std::string& what) {
    std::printf("%s: %s\n", ok ? "PASS" : "FAIL", what.c_str());
    return ok ? 0 : kGateFailure;
}

void write_report(const fs::path& path, const ConvergenceReport& report) {
    std::ofstream out(path);
    write_convergence_csv(out, report);
    std::printf("%6s %12s %16s\n", "n", "h", "max_err");
    for (const auto& r : report.rows) std::printf("%6d %12.6g %16.8e\n", r.n, r.h, r.max_window_error);
    std::printf("slope=%.4f window=[%g, %g]\nwrote %s\n", report.slope, report.window[0], report.window[1],
                path.c_str());
}

struct StudyOptions {
    std::vector<int> ns{12, 24, 48};
    double dt_per_h = 0.0;
    double window = 0.25;
    bool guard = false;
    std::optional<double> slope_min, slope_max;
};

void add_study(CLI::App* app, StudyOptions& s) {
    app->add_option("--ns", s.ns, "mesh levels")->delimiter(',');
    app->add_option("--dt-per-h", s.dt_per_h, "use dt = c h on every level");
    app->add_option("--window", s.window, "asymptotic window fraction");
    app->add_flag("--guard", s.guard, "rerun every level with dt/2 and gate the change at 5%");
    app->add_option("--slope-min", s.slope_min, "gate: minimum slope");
    app->add_option("--slope-max", s.slope_max, "gate: maximum slope");
}

int finish_study(const ConvergenceReport& report, const SimulationConfig& base, const StudyOptions& s,
                 const ConvergenceOptions& copts, std::optional<LagrangeMode> mode, double fixed_H) {
    int status = 0;
    if (s.slope_min) status |= gate(report.slope >= *s.slope_min, "slope >= " + number_tag(*s.slope_min));
    if (s.slope_max) status |= gate(report.slope <= *s.slope_max, "slope <= " + number_tag(*s.slope_max));
    if (s.guard) {
        const auto g = dt_dominance_guard(report, base, copts, mode, fixed_H);
        for (std::size_t i = 0; i < g.relative_changes.size(); ++i) {
            std::printf("dt/2 change n=%d: %.3f%%\n", report.rows[i].n, 100.0 * g.relative_changes[i]);
        }
        status |= gate(g.max_relative_change < 0.05, "dt/2 dominance guard < 5%");
    }
    return status ? kGateFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nudged Navier-Stokes finite element solver"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "property suite (no simulation studies)");

    // run
    CommonOptions run_opts;
    std::string dump_dir;
    auto* run = app.add_subcommand("run", "single simulation, decay-schema CSV");
    add_common(run, run_opts);
    run->add_option("--dump-operators", dump_dir, "write assembled operators as triplet files");

    // decay
    CommonOptions decay_opts;
    std::vector<double> betas{0.0, 0.1, 1.0, 10.0, 100.0};
    auto* decay = app.add_subcommand("decay", "one run per beta, one CSV per beta");
    add_common(decay, decay_opts);
    decay->add_option("--betas", betas, "beta list")->delimiter(',');

    // convergence
    CommonOptions conv_opts;
    StudyOptions conv_study;
    auto* conv = app.add_subcommand("convergence", "errors vs h, piecewise-constant observations");
    add_common(conv, conv_opts);
    add_study(conv, conv_study);

    // lagrange
    CommonOptions lag_opts;
    StudyOptions lag_study;
    std::string mode_name = "proportional";
    double fixed_H = 0.25;
    auto* lag = app.add_subcommand("lagrange", "errors vs h, coarse Lagrange observations");
    add_common(lag, lag_opts);
    add_study(lag, lag_study);
    lag->add_option("--mode", mode_name, "H = k h or H fixed")->check(CLI::IsMember({"proportional", "fixed"}));
    lag->add_option("--fixed-H", fixed_H, "coarse width in fixed mode");

    // gamma
    CommonOptions gamma_opts;
    double c_I = 1.0;
    bool measure = false;
    auto* gamma = app.add_subcommand("gamma", "predicted decay rate min(nu/(2 c_I^2 H^2), beta/2)");
    add_common(gamma, gamma_opts);
    gamma->add_option("--c-i", c_I, "assumed interpolation constant");
    gamma->add_flag("--measure-ci", measure, "use the measured constant of the observation operator");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            const auto checks = run_property_suite();
            for (const auto& c : checks) {
                std::printf("%s %-36s %.3e (tol %.0e)  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                            c.measured, c.tolerance, c.detail.c_str());
            }
            return all_passed(checks) ? 0 : kGateFailure;
        }

        if (*run) {
            const auto config = resolve(run_opts);
            print_config(config);
            if (!dump_dir.empty()) {
                NudgedSimulation sim(config);
                fs::create_directories(dump_dir);
                dump_operators(sim.operators(), assemble_nudging(sim.observer()), dump_dir);
            }
            const auto series = simulate(config);
            const auto path = prepare_out(run_opts) / "run.csv";
            std::ofstream out(path);
            write_decay_csv(out, series);
            const auto& last = series.samples.back();
            std::printf("t=%g l2_error=%.6e obs_ratio=%.4f asymptotic_max=%.6e\nwrote %s\n", last.t, last.l2_error,
                        last.obs_ratio, asymptotic_max(series), path.c_str());
            return 0;
        }

        if (*decay) {
            SimulationConfig base;
            base.t_final = 8.0;
            const auto config = resolve(decay_opts, base);
            print_config(config);
            const auto dir = prepare_out(decay_opts);
            int status = 0;
            for (const auto& r : run_decay_study(config, betas)) {
                if (!r.series) {
                    std::printf("beta=%g FAILED: %s\n", r.beta, r.failure.c_str());
                    status = 1;
                    continue;
                }
                const auto path = dir / ("decay_beta_" + number_tag(r.beta) + ".csv");
                std::ofstream out(path);
                write_decay_csv(out, *r.series);
                const auto a = analyze_decay(*r.series);
                std::printf("beta=%-6g err(0+)=%.4e plateau=%.4e from t=%.3f rate=%.4f  -> %s\n", r.beta,
                            a.initial_error, a.plateau_level, a.plateau_start, a.pre_plateau_rate, path.c_str());
            }
            return status;
        }

        if (*conv || *lag) {
            const bool is_lag = static_cast<bool>(*lag);
            auto& common = is_lag ? lag_opts : conv_opts;
            auto& study = is_lag ? lag_study : conv_study;
            SimulationConfig base;
            base.initial = InitialCondition::ExactAtZero;
            const auto config = resolve(common, base);
            print_config(config);
            ConvergenceOptions copts;
            copts.ns = study.ns;
            copts.dt_per_h = study.dt_per_h;
            copts.window_fraction = study.window;
            std::optional<LagrangeMode> mode;
            ConvergenceReport report;
            if (is_lag) {
                mode = mode_name == "fixed" ? LagrangeMode::FixedH : LagrangeMode::ProportionalH;
                report = run_lagrange_study(config, *mode, copts, fixed_H);
            } else {
                report = run_convergence(config, copts);
            }
            const auto name = is_lag ? "lagrange_" + mode_name + ".csv" : std::string("convergence.csv");
            write_report(prepare_out(common) / name, report);
            return finish_study(report, config, study, copts, mode, fixed_H);
        }

        if (*gamma) {
            const auto config = resolve(gamma_opts);
            const double H = static_cast<double>(config.ratio_k) / config.n;
            if (measure) {
                const auto mesh = build_fine_mesh(config.n);
                const auto dm = build_dofmap(mesh);
                const CoarseObserver obs(dm, build_coarse_grid(mesh, config.ratio_k), config.interpolant);
                const auto q = measure_constants(obs, dm, standard_sample(dm, 8, 7u), "standard sample");
                c_I = q.cI_measured;
                std::printf("measured c0=%.4f c_I=%.4f over %d fields\n", q.c0_measured, q.cI_measured,
                            q.sample_size);
            }
            const auto p = predict_gamma(config.nu, H, config.beta, c_I);
            std::printf("nu=%g H=%g beta=%g c_I=%g\nviscous branch nu/(2 c_I^2 H^2) = %.6g\n"
                        "nudging branch beta/2 = %.6g\ngamma = %.6g (%s branch active)\n",
                        p.nu, p.H, p.beta, p.c_I, p.viscous_branch, p.nudging_branch, p.gamma,
                        p.viscous_branch_active ? "viscous" : "nudging");
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
