#include "squidbath/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace squidbath {

namespace {

// Runs body(i) for i in [0, n). Each index is claimed by exactly one worker,
// so writes into per-index slots need no locking.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

void require_increasing(const std::vector<double>& v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string(name) + " must be non-empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw std::invalid_argument(std::string(name) + " must be finite");
        if (i > 0 && !(v[i] > v[i - 1])) {
            throw std::invalid_argument(std::string(name) + " must be strictly increasing");
        }
    }
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (double x : v) {
        if (!out.empty()) out += ';';
        out += format_double(x);
    }
    return out;
}

void add_param_meta(CsvTable& t, const SquidParams& p) {
    t.add_meta("omega0", format_double(p.omega0));
    t.add_meta("nu_ratio", format_double(p.nu_ratio));
    t.add_meta("s", format_double(p.s));
    t.add_meta("xi", format_double(p.xi));
    t.add_meta("gamma_ratio", format_double(p.gamma_ratio));
    t.add_meta("kappa", format_double(p.kappa));
    t.add_meta("chi_scale", format_double(p.chi_scale));
    t.add_meta("sine_coupling", std::string(to_string(p.sine_coupling)));
}

double ground_energy(const SquidParams& p, const FockOperators& ops, const TermSet& include) {
    return hermitian_eigenvalues(effective_hamiltonian(p, ops, include))[0];
}

}  // namespace

void SweepSpec::validate() const {
    require_increasing(phi_grid, "phi_grid");
    require_increasing(g_grid, "g_grid");
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (levels > space.dim()) throw std::invalid_argument("levels must not exceed the basis dimension");
}

bool squeezing_unbounded(const SquidParams& p) { return 2.0 * std::abs(xp_coefficient(p)) >= 1.0; }

SweepResult spectrum_sweep(const SweepSpec& spec, const DeviceInputs& inputs, SineCoupling coupling,
                           std::size_t threads) {
    spec.validate();
    const SquidParams base = derive_params(inputs, {}, coupling);
    const FockOperators ops(spec.space);

    const std::size_t n_phi = spec.phi_grid.size();
    const std::size_t n_pts = n_phi * spec.g_grid.size();

    struct Slot {
        std::vector<double> energies;
        std::string error;
    };
    std::vector<Slot> slots(n_pts);

    parallel_for(n_pts, threads, [&](std::size_t i) {
        const double g = spec.g_grid[i / n_phi];
        const double phi = spec.phi_grid[i % n_phi];
        try {
            const SquidParams p = base.with_coupling(g).with_flux(phi);
            const RealVector ev = hermitian_eigenvalues(effective_hamiltonian(p, ops, spec.include));
            slots[i].energies.assign(ev.data(), ev.data() + spec.levels);
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    });

    SweepResult out;
    out.dim = spec.space.dim();
    out.pad = spec.space.pad();
    out.include = spec.include;
    out.rows.reserve(n_pts * spec.levels);
    for (std::size_t i = 0; i < n_pts; ++i) {
        const double g = spec.g_grid[i / n_phi];
        const double phi = spec.phi_grid[i % n_phi];
        if (!slots[i].error.empty()) {
            out.failures.push_back({phi, g, slots[i].error});
            continue;
        }
        for (std::size_t k = 0; k < slots[i].energies.size(); ++k) {
            out.rows.push_back({phi, g, k, slots[i].energies[k]});
        }
    }
    if (spec.include.xp) {
        for (double g : spec.g_grid) {
            if (squeezing_unbounded(base.with_coupling(g))) out.unbounded_g.push_back(g);
        }
    }
    return out;
}

CsvTable SweepResult::to_csv(const SquidParams& base) const {
    CsvTable t;
    t.add_meta("kind", "spectrum");
    add_param_meta(t, base);
    t.add_meta("dim", std::to_string(dim));
    t.add_meta("pad", std::to_string(pad));
    t.add_meta("include", include.label());
    t.add_meta("failures", std::to_string(failures.size()));
    t.add_meta("unbounded_g", unbounded_g.empty() ? "none" : join_doubles(unbounded_g));
    t.columns = {"phi", "g", "level", "energy"};
    for (const auto& r : rows) {
        t.rows.push_back({format_double(r.phi), format_double(r.g), std::to_string(r.level),
                          format_double(r.energy)});
    }
    return t;
}

const std::array<TermSet, 8>& spiderweb_configurations() {
    static const std::array<TermSet, 8> order = {
        TermSet{true, true, true},    // full
        TermSet{false, false, false}, // H_0
        TermSet{false, true, false},  // XS
        TermSet{true, false, false},  // XP
        TermSet{false, false, true},  // PS
        TermSet{true, true, false},   // XP+XS
        TermSet{true, false, true},   // XP+PS
        TermSet{false, true, true},   // PS+XS
    };
    return order;
}

double SpiderwebResult::energy(const TermSet& t) const {
    for (const auto& e : entries) {
        if (e.include == t) return e.energy;
    }
    throw std::out_of_range("spiderweb: include-set not present");
}

SpiderwebResult spiderweb(const DeviceInputs& inputs, const FockSpace& space, SineCoupling coupling,
                          std::size_t threads) {
    const SquidParams p = derive_params(inputs, {}, coupling);
    const FockOperators ops(space);
    const ComplexMatrix h0 = build_system_hamiltonian(p, ops);
    const CorrectionTerms terms = build_correction_terms(p, ops);
    const auto& configs = spiderweb_configurations();

    SpiderwebResult out;
    out.phi = p.phi;
    out.g = p.g;
    parallel_for(configs.size(), threads, [&](std::size_t i) {
        const TermSet& inc = configs[i];
        ComplexMatrix h = h0;
        if (inc.xp) h += terms.xp;
        if (inc.xs) h += terms.xs;
        if (inc.ps) h += terms.ps;
        out.entries[i] = {inc, hermitian_eigenvalues(h)[0]};
    });

    const double e0 = out.energy(TermSet::none());
    auto residual = [&](TermSet a, TermSet b) {
        const TermSet both{a.xp || b.xp, a.xs || b.xs, a.ps || b.ps};
        return (out.energy(a) - e0) + (out.energy(b) - e0) - (out.energy(both) - e0);
    };
    const TermSet xp{true, false, false};
    const TermSet xs{false, true, false};
    const TermSet ps{false, false, true};
    out.residual_xp_xs = residual(xp, xs);
    out.residual_xp_ps = residual(xp, ps);
    out.residual_ps_xs = residual(ps, xs);
    return out;
}

CsvTable SpiderwebResult::to_csv(const SquidParams& p, const FockSpace& space) const {
    CsvTable t;
    t.add_meta("kind", "spiderweb");
    add_param_meta(t, p);
    t.add_meta("phi", format_double(phi));
    t.add_meta("g", format_double(g));
    t.add_meta("dim", std::to_string(space.dim()));
    t.add_meta("pad", std::to_string(space.pad()));
    t.add_meta("residual_XP_XS", format_double(residual_xp_xs));
    t.add_meta("residual_XP_PS", format_double(residual_xp_ps));
    t.add_meta("residual_PS_XS", format_double(residual_ps_xs));
    t.columns = {"include", "energy"};
    for (const auto& e : entries) {
        t.rows.push_back({e.include.empty() ? std::string("H0") : e.include == TermSet::all() ? "full"
                                                                                            : e.include.label(),
                          format_double(e.energy)});
    }
    return t;
}

bool SusceptibilityResult::any_step_too_large() const {
    return std::any_of(rows.begin(), rows.end(), [](const SusceptibilityRow& r) { return r.step_too_large; });
}

SusceptibilityResult susceptibility(const DeviceInputs& inputs, const std::vector<double>& phi_grid,
                                    const std::vector<double>& g_grid, const SusceptibilityOptions& opts,
                                    SineCoupling coupling, std::size_t threads) {
    require_increasing(phi_grid, "phi_grid");
    require_increasing(g_grid, "g_grid");
    if (!(opts.fd_step > 0.0 && opts.fd_step <= 0.05)) {
        throw std::invalid_argument("fd_step must be in (0, 0.05]");
    }
    if (!(opts.refine_tolerance > 0.0)) throw std::invalid_argument("refine_tolerance must be > 0");

    const SquidParams base = derive_params(inputs, {}, coupling);
    const FockOperators ops(opts.space);
    const std::size_t n_phi = phi_grid.size();
    const std::size_t n_pts = n_phi * g_grid.size();

    struct Slot {
        SusceptibilityRow row{};
        std::string error;
    };
    std::vector<Slot> slots(n_pts);

    parallel_for(n_pts, threads, [&](std::size_t i) {
        const double g = g_grid[i / n_phi];
        const double phi = phi_grid[i % n_phi];
        try {
            const SquidParams p = base.with_coupling(g);
            auto e = [&](double f) { return ground_energy(p.with_flux(f), ops, opts.include); };
            const double e_mid = e(phi);
            auto second = [&](double h) { return (e(phi + h) - 2.0 * e_mid + e(phi - h)) / (h * h); };

            double h = opts.fd_step;
            double d_h = second(h);
            double d_half = second(0.5 * h);
            for (std::size_t k = 0; k < opts.max_halvings; ++k) {
                const double diff = std::abs(d_half - d_h);
                if (diff <= opts.refine_tolerance * std::abs(d_half)) break;
                if (0.25 * h < opts.min_step) break;
                h *= 0.5;
                d_h = d_half;
                d_half = second(0.5 * h);
            }

            SusceptibilityRow& r = slots[i].row;
            r.phi = phi;
            r.g = g;
            r.chi0 = -p.chi_scale * d_half;
            r.chi0_over_L = r.chi0 / p.inductance_H;
            r.fd_step = h;
            r.richardson_error = p.chi_scale * std::abs(d_half - d_h) / 3.0;
            const double diff = std::abs(d_half - d_h);
            r.self_consistency = diff == 0.0 ? 0.0 : diff / std::abs(d_half);
            r.step_too_large = r.richardson_error > opts.flag_threshold * std::abs(r.chi0);
            r.chi0_sum_over_states = -p.chi_scale * ground_curvature_sum_over_states(p.with_flux(phi), ops, opts.include);
        } catch (const std::exception& ex) {
            slots[i].error = ex.what();
        }
    });

    SusceptibilityResult out;
    for (std::size_t i = 0; i < n_pts; ++i) {
        if (!slots[i].error.empty()) {
            out.failures.push_back({phi_grid[i % n_phi], g_grid[i / n_phi], slots[i].error});
        } else {
            out.rows.push_back(slots[i].row);
        }
    }
    return out;
}

CsvTable SusceptibilityResult::to_csv(const SquidParams& base, const SusceptibilityOptions& opts) const {
    CsvTable t;
    t.add_meta("kind", "susceptibility");
    add_param_meta(t, base);
    t.add_meta("inductance_H", format_double(base.inductance_H));
    t.add_meta("dim", std::to_string(opts.space.dim()));
    t.add_meta("pad", std::to_string(opts.space.pad()));
    t.add_meta("include", opts.include.label());
    t.add_meta("fd_step_initial", format_double(opts.fd_step));
    t.add_meta("refine_tolerance", format_double(opts.refine_tolerance));
    t.add_meta("fd_step_too_large", yes_no(any_step_too_large()));
    t.add_meta("failures", std::to_string(failures.size()));
    t.columns = {"phi", "g", "chi0", "chi0_over_L", "fd_step", "richardson_error", "self_consistency",
                 "step_too_large", "chi0_sum_over_states"};
    for (const auto& r : rows) {
        t.rows.push_back({format_double(r.phi), format_double(r.g), format_double(r.chi0),
                          format_double(r.chi0_over_L), format_double(r.fd_step),
                          format_double(r.richardson_error), format_double(r.self_consistency),
                          r.step_too_large ? "1" : "0", format_double(r.chi0_sum_over_states)});
    }
    return t;
}

double ground_curvature_sum_over_states(const SquidParams& p, const FockOperators& ops, const TermSet& include) {
    const EigenDecomposition eig = hermitian_eig(effective_hamiltonian(p, ops, include));
    const FluxDerivatives d = effective_hamiltonian_flux_derivatives(p, ops, include);
    const ComplexVector v0 = eig.vectors.col(0);
    const ComplexVector coupling = eig.vectors.adjoint() * (d.first * v0);
    double curvature = v0.dot(d.second * v0).real();
    for (Eigen::Index n = 1; n < eig.values.size(); ++n) {
        const double w = std::norm(coupling[n]);
        if (w == 0.0) continue;
        const double gap = eig.values[n] - eig.values[0];
        if (!(gap > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        curvature -= 2.0 * w / gap;
    }
    return curvature;
}

std::vector<ConvergenceRow> convergence_audit(const DeviceInputs& inputs, const std::vector<std::size_t>& dims,
                                              std::size_t pad, const TermSet& include, SineCoupling coupling) {
    if (dims.empty()) throw std::invalid_argument("convergence_audit: dims must be non-empty");
    for (std::size_t i = 1; i < dims.size(); ++i) {
        if (dims[i] <= dims[i - 1]) throw std::invalid_argument("convergence_audit: dims must be ascending");
    }
    const SquidParams p = derive_params(inputs, {}, coupling);
    std::vector<ConvergenceRow> out;
    for (std::size_t n : dims) {
        if (n < 5) throw std::invalid_argument("convergence_audit: dims must be >= 5");
        const RealVector ev = hermitian_eigenvalues(effective_hamiltonian(p, FockSpace(n, pad), include));
        ConvergenceRow r{};
        r.dim = n;
        for (std::size_t k = 0; k < 5; ++k) r.energies[k] = ev[static_cast<Eigen::Index>(k)];
        r.delta_e0 = out.empty() ? std::numeric_limits<double>::quiet_NaN() : r.energies[0] - out.back().energies[0];
        out.push_back(r);
    }
    return out;
}

CsvTable convergence_csv(const std::vector<ConvergenceRow>& rows, const SquidParams& p, std::size_t pad) {
    CsvTable t;
    t.add_meta("kind", "convergence");
    add_param_meta(t, p);
    t.add_meta("phi", format_double(p.phi));
    t.add_meta("g", format_double(p.g));
    t.add_meta("pad", std::to_string(pad));
    t.columns = {"dim", "e0", "e1", "e2", "e3", "e4", "delta_e0"};
    for (const auto& r : rows) {
        std::vector<std::string> line{std::to_string(r.dim)};
        for (double e : r.energies) line.push_back(format_double(e));
        line.push_back(format_double(r.delta_e0));
        t.rows.push_back(std::move(line));
    }
    return t;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace squidbath
