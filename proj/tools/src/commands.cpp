#include "commands.hpp"

#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <squidbath/csv.hpp>
#include <squidbath/dynamics.hpp>
#include <squidbath/lindblad.hpp>
#include <squidbath/spectroscopy.hpp>
#include <squidbath/version.hpp>

#include "manifest.hpp"

namespace squidbath::cli {

using nlohmann::json;

namespace {

struct Outcome {
    std::vector<std::pair<std::string, CsvTable>> tables;  // file stem -> table
    json results = json::object();
    json failures = json::array();
    std::vector<Warning> warnings;
    bool numerical_failure = false;
};

// nlohmann writes NaN as null; keep the distinction explicit.
json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json params_json(const SquidParams& p) {
    return {
        {"omega0", p.omega0},       {"nu_ratio", p.nu_ratio}, {"s", p.s},
        {"xi", p.xi},               {"gamma_ratio", p.gamma_ratio}, {"g", p.g},
        {"phi", p.phi},             {"chi_scale", p.chi_scale}, {"kappa", p.kappa},
        {"inductance_H", p.inductance_H}, {"sine_coupling", std::string(to_string(p.sine_coupling))},
    };
}

void stamp(CsvTable& t, const std::string& command) {
    t.metadata.insert(t.metadata.begin(), {"command", command});
    t.metadata.insert(t.metadata.begin(), {"squidbath_version", kVersion});
}

Outcome cmd_spectrum(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    SweepSpec spec;
    spec.phi_grid = c.phi_grid();
    spec.g_grid = c.g_values;
    spec.levels = c.levels;
    spec.include = c.include;
    spec.space = c.space();
    const SweepResult r = spectrum_sweep(spec, c.device, c.sine_coupling, ctx.threads);

    Outcome out;
    out.tables.emplace_back("spectrum", r.to_csv(derive_params(c.device, {}, c.sine_coupling)));
    for (const auto& f : r.failures) out.failures.push_back({{"phi", f.phi}, {"g", f.g}, {"error", f.message}});
    for (double g : r.unbounded_g) {
        out.warnings.push_back({"UnboundedSqueezing",
                                "2|c_XP| >= 1 at g = " + format_double(g) + "; truncated spectrum is not converged", g});
    }
    out.results = {{"rows", r.rows.size()},
                   {"points", spec.phi_grid.size() * spec.g_grid.size()},
                   {"unbounded_g", r.unbounded_g}};
    out.numerical_failure = !r.failures.empty();
    return out;
}

Outcome cmd_spiderweb(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    const SpiderwebResult r = spiderweb(c.device, c.space(), c.sine_coupling, ctx.threads);
    const SquidParams p = derive_params(c.device, {}, c.sine_coupling);

    Outcome out;
    out.tables.emplace_back("spiderweb", r.to_csv(p, c.space()));
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back({{"include", e.include.label()}, {"energy", e.energy}});
    out.results = {{"entries", entries},
                   {"residual_XP_XS", r.residual_xp_xs},
                   {"residual_XP_PS", r.residual_xp_ps},
                   {"residual_PS_XS", r.residual_ps_xs}};
    return out;
}

Outcome cmd_susceptibility(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    SusceptibilityOptions opts;
    opts.fd_step = c.fd_step;
    opts.refine_tolerance = c.refine_tolerance;
    opts.include = c.include;
    opts.space = c.space();
    const SusceptibilityResult r =
        susceptibility(c.device, c.phi_grid(), c.g_values, opts, c.sine_coupling, ctx.threads);

    Outcome out;
    out.tables.emplace_back("susceptibility", r.to_csv(derive_params(c.device, {}, c.sine_coupling), opts));
    json flagged = json::array();
    double worst = 0.0;
    for (const auto& row : r.rows) {
        worst = std::max(worst, row.self_consistency);
        if (row.step_too_large) flagged.push_back({{"phi", row.phi}, {"g", row.g}});
    }
    if (r.any_step_too_large()) {
        out.warnings.push_back({"FDStepTooLarge", "Richardson estimate exceeds 5% of |chi0| at "
                                                      + std::to_string(flagged.size()) + " points", 0.0});
    }
    for (const auto& f : r.failures) out.failures.push_back({{"phi", f.phi}, {"g", f.g}, {"error", f.message}});
    out.results = {{"rows", r.rows.size()}, {"fd_step_too_large", flagged}, {"max_self_consistency", worst}};
    out.numerical_failure = !r.failures.empty();
    return out;
}

Outcome cmd_lindblads(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    const SquidParams base = derive_params(c.device, {}, c.sine_coupling);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CsvTable t;
    t.add_meta("kind", "lindblads");
    t.add_meta("xi", format_double(base.xi));
    t.add_meta("gamma_ratio", format_double(base.gamma_ratio));
    t.add_meta("kappa", format_double(base.kappa));
    t.add_meta("sine_coupling", std::string(to_string(base.sine_coupling)));
    t.columns = {"g", "xi", "completed", "a_ss", "raw_min_eig", "eig1", "eig2", "eig3", "k", "weight",
                 "cX_re", "cX_im", "cP_re", "cP_im", "cS_re", "cS_im"};

    Outcome out;
    json points = json::array();
    for (double g : c.g_values) {
        const SquidParams p = base.with_coupling(g);
        const CoefficientMatrix raw = coefficient_matrix(p, false);
        json point = {{"g", g}, {"g_in_range", raw.g_in_range}, {"raw_min_eigenvalue", raw.min_eigenvalue()}};
        CoefficientMatrix done;
        try {
            done = coefficient_matrix(p, true);
        } catch (const DegenerateMinor& e) {
            point["completed"] = false;
            point["error"] = e.what();
            points.push_back(point);
            out.failures.push_back({{"g", g}, {"error", e.what()}});
            out.numerical_failure = true;
            continue;
        }
        const SsSolution ss = solve_a_ss(done.entries, p);
        point["completed"] = done.completed;
        point["a_ss"] = done.a_ss;
        point["a_ss_closed_form"] = ss.closed_form;
        point["a_ss_printed_closed_form"] = ss.closed_form_printed;
        point["eigenvalues"] = {done.eigenvalues[0], done.eigenvalues[1], done.eigenvalues[2]};
        point["min_eigenvalue"] = done.min_eigenvalue();

        auto prefix_row = [&](std::size_t k, double weight) {
            return std::vector<std::string>{format_double(g), format_double(p.xi), done.completed ? "1" : "0",
                                            format_double(done.a_ss), format_double(raw.min_eigenvalue()),
                                            format_double(done.eigenvalues[0]), format_double(done.eigenvalues[1]),
                                            format_double(done.eigenvalues[2]), std::to_string(k),
                                            format_double(weight)};
        };
        if (!done.completed) {
            auto row = prefix_row(0, nan);
            for (int i = 0; i < 6; ++i) row.push_back(format_double(nan));
            t.rows.push_back(std::move(row));
            points.push_back(point);
            continue;
        }
        const CoefficientEigen eig = analyze_coefficients(done.entries);
        const double cutoff = 1e-12 * done.norm();
        json ops = json::array();
        std::size_t k = 0;
        for (int col = 2; col >= 0; --col) {
            if (eig.values[col] <= cutoff) continue;
            ++k;
            const double weight = done.prefactor * eig.values[col];
            auto row = prefix_row(k, weight);
            json coeffs = json::array();
            for (int i = 0; i < 3; ++i) {
                const cplx v = eig.vectors(i, col);
                row.push_back(format_double(v.real()));
                row.push_back(format_double(v.imag()));
                coeffs.push_back({v.real(), v.imag()});
            }
            t.rows.push_back(std::move(row));
            ops.push_back({{"weight", weight}, {"coefficients_XPS", coeffs}});
        }
        point["lindblad_operators"] = ops;
        points.push_back(point);
    }
    out.tables.emplace_back("lindblads", std::move(t));
    out.results = {{"points", points}};
    return out;
}

CsvTable trajectory_table(const Trajectory& tr, const std::string& rhs, const RunConfig& c) {
    CsvTable t;
    t.add_meta("kind", "trajectory");
    t.add_meta("rhs", rhs);
    t.add_meta("dim", std::to_string(c.dyn_dim));
    t.add_meta("dt", format_double(c.dt));
    t.add_meta("status", std::string(to_string(tr.status)));
    t.columns = {"t", "trace_dev", "herm_defect", "min_eig", "energy"};
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const StepMonitor& m = tr.monitors[i];
        t.rows.push_back({format_double(tr.times[i]), format_double(m.trace_dev), format_double(m.herm_defect),
                          format_double(m.min_eig), format_double(m.energy)});
    }
    return t;
}

// Row-major flat complex pairs: rho(0,0).re, rho(0,0).im, rho(0,1).re, ...
CsvTable snapshot_table(const Trajectory& tr, const std::string& rhs, std::size_t dim) {
    CsvTable t;
    t.add_meta("kind", "snapshots");
    t.add_meta("rhs", rhs);
    t.add_meta("dim", std::to_string(dim));
    t.add_meta("layout", "row-major re/im pairs of rho(i,j)");
    t.columns.push_back("t");
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const std::string ij = std::to_string(i) + "_" + std::to_string(j);
            t.columns.push_back("re_" + ij);
            t.columns.push_back("im_" + ij);
        }
    }
    for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
        std::vector<std::string> row{format_double(tr.snapshot_times[s])};
        const ComplexMatrix& rho = tr.snapshots[s];
        for (Eigen::Index i = 0; i < rho.rows(); ++i) {
            for (Eigen::Index j = 0; j < rho.cols(); ++j) {
                row.push_back(format_double(rho(i, j).real()));
                row.push_back(format_double(rho(i, j).imag()));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

json trajectory_summary(const Trajectory& tr) {
    return {{"status", std::string(to_string(tr.status))},
            {"steps_completed", tr.steps_completed},
            {"max_trace_dev", num(tr.max_trace_dev())},
            {"max_herm_defect", num(tr.max_herm_defect())},
            {"min_eigenvalue", num(tr.min_eigenvalue())},
            {"dips_below_threshold", tr.min_eigenvalue() < kPositivityDipThreshold}};
}

Outcome cmd_evolve(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    const FockSpace space = c.dynamics_space();
    const SquidParams p = derive_params(c.device, {}, c.sine_coupling);
    const DissipativeModel model = DissipativeModel::build(p, FockOperators(space));

    Outcome out;
    out.results["completed"] = model.completed.completed;
    out.results["completed_min_eigenvalue"] = model.completed.min_eigenvalue();
    out.results["raw_min_eigenvalue"] = model.raw.min_eigenvalue();
    out.results["a_ss"] = model.completed.a_ss;
    out.results["suggested_dt"] = num(suggested_time_step(model.h_regrouped));

    const bool want_l = c.rhs != RhsChoice::kBornMarkov;
    const bool want_bm = c.rhs != RhsChoice::kLindblad;
    if (want_l && !model.completed.completed) {
        out.failures.push_back({{"rhs", "lindblad"},
                                {"error", "coefficient matrix is not completable at g = " + format_double(p.g)},
                                {"min_eigenvalue", model.completed.min_eigenvalue()}});
        out.numerical_failure = true;
    }

    // OutOfBasis here is an input problem; it propagates as a validation failure.
    const DensityMatrix rho0 = [&] {
        try {
            return initial_state(c.initial, space, &model.h_regrouped);
        } catch (const OutOfBasis& e) {
            throw ValidationError(e.what());
        }
    }();

    EvolveOptions opts;
    opts.dt = c.dt;
    opts.steps = c.steps;
    opts.snapshot_stride = c.stride;

    auto run = [&](const std::string& name, const RhsFunction& f) {
        const Trajectory tr = evolve(rho0, f, opts, model.h_regrouped);
        out.tables.emplace_back("trajectory_" + name, trajectory_table(tr, name, c));
        if (c.snapshots) out.tables.emplace_back("snapshots_" + name, snapshot_table(tr, name, space.dim()));
        out.results[name] = trajectory_summary(tr);
        if (tr.status == EvolveStatus::kDiverged) {
            out.failures.push_back({{"rhs", name}, {"error", "trajectory diverged"}});
            out.numerical_failure = true;
        }
        return tr;
    };
    if (want_l && model.completed.completed) {
        run("lindblad", [&model](const ComplexMatrix& rho) { return model.lindblad(rho); });
    }
    if (want_bm) {
        run("bm", [&model](const ComplexMatrix& rho) { return model.bm(rho); });
    }
    return out;
}

const std::map<std::string, std::function<Outcome(const RunContext&)>>& registry() {
    static const std::map<std::string, std::function<Outcome(const RunContext&)>> r = {
        {"spectrum", cmd_spectrum},   {"spiderweb", cmd_spiderweb}, {"susceptibility", cmd_susceptibility},
        {"lindblads", cmd_lindblads}, {"evolve", cmd_evolve},
    };
    return r;
}

json warnings_json(const std::vector<Warning>& ws) {
    json a = json::array();
    for (const auto& w : ws) {
        json e = {{"kind", w.kind}, {"message", w.message}};
        if (w.kind != "FDStepTooLarge") e["g"] = w.g;
        a.push_back(e);
    }
    return a;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"spectrum", "spiderweb", "susceptibility", "lindblads", "evolve"};
    return names;
}

int run_command(const std::string& name, const RunContext& ctx, std::ostream& err) {
    const auto it = registry().find(name);
    if (it == registry().end()) {
        err << "unknown command '" << name << "'\n";
        return kExitValidation;
    }
    const RunConfig& c = ctx.config;
    const std::string started = utc_timestamp();

    Outcome outcome;
    std::string error;
    int code = kExitOk;
    try {
        outcome = it->second(ctx);
        if (outcome.numerical_failure) code = kExitNumerical;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        error = e.what();
        code = kExitNumerical;
    }

    json outputs = json::array();
    try {
        for (auto& [stem, table] : outcome.tables) {
            stamp(table, name);
            const auto rec = emit_file(c.out_dir / (c.prefix + stem + ".csv"), to_csv_string(table));
            outputs.push_back(to_json(rec));
        }
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << '\n';
        return kExitNumerical;
    }

    std::vector<Warning> warnings = c.warnings;
    warnings.insert(warnings.end(), outcome.warnings.begin(), outcome.warnings.end());

    json m;
    m["tool"] = "squidbath";
    m["version"] = kVersion;
    m["command"] = name;
    m["status"] = code == kExitOk ? "ok" : "numerical_failure";
    m["exit_code"] = code;
    m["started_utc"] = started;
    m["finished_utc"] = utc_timestamp();
    m["threads"] = ctx.threads;
    m["seedless"] = ctx.seedless;
    m["config"] = c.to_json();
    m["defaults_applied"] = c.defaulted;
    m["params"] = params_json(derive_params(c.device, {}, c.sine_coupling));
    m["warnings"] = warnings_json(warnings);
    m["results"] = outcome.results;
    m["failures"] = outcome.failures;
    if (!error.empty()) m["error"] = error;
    m["outputs"] = outputs;

    try {
        write_atomic(c.out_dir / (c.prefix + name + ".manifest.json"), m.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "manifest error: " << e.what() << '\n';
        return kExitNumerical;
    }

    for (const auto& w : warnings) err << "warning [" << w.kind << "]: " << w.message << '\n';
    if (!error.empty()) err << "numerical failure: " << error << '\n';
    for (const auto& f : outcome.failures) err << "failure: " << f.dump() << '\n';
    return code;
}

}  // namespace squidbath::cli
