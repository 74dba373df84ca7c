// acceptance: one PASS/FAIL line per acceptance criterion, exit status 1 if any fail

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <squidbath/dynamics.hpp>
#include <squidbath/spectroscopy.hpp>

using namespace squidbath;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

std::vector<double> coupling_grid(std::size_t n) {
    return linspace(kCouplingMin, kCouplingMax, n);
}

// C1: lowest eigenvalue of the 8 include-sets at N = 128.
Verdict fig2() {
    const SpiderwebResult r = spiderweb(DeviceInputs{}, FockSpace(128, 32));
    // Axis order of spiderweb_configurations(): full, none, XS, XP, PS, XP+XS, XP+PS, PS+XS.
    const double target[8] = {3.8, 5.6, 5.7, 4.7, 5.4, 4.8, 3.8, 5.5};
    Verdict v{true, ""};
    double lo = 1e9;
    double hi = -1e9;
    for (std::size_t i = 0; i < 8; ++i) {
        const double d = r.entries[i].energy - target[i];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        if (std::abs(d) > 0.15) v.pass = false;
        v.detail += r.entries[i].include.label() + "=" + fmt("%.3f", r.entries[i].energy) + " ";
    }
    // A uniform offset beyond tolerance would show up as lo and hi sharing a sign.
    if ((lo > 0.15 || hi < -0.15)) v.pass = false;
    v.detail += fmt("offset range [%.3f,", lo) + fmt(" %.3f]", hi);
    return v;
}

// C2: completion on 50 couplings at xi = 0.05.
Verdict completion() {
    DeviceInputs in;
    in.cutoff_ratio = 10.0;
    Verdict v{true, ""};
    double worst_det = 0.0;
    double worst_eig = 0.0;
    double worst_cf = 0.0;
    double worst_printed = 0.0;
    for (double g : coupling_grid(50)) {
        in.coupling_ratio = g;
        const SquidParams p = derive_params(in);
        const CoefficientMatrix m = coefficient_matrix(p, true);
        const double n = m.norm();
        const double det = std::abs(m.entries.determinant());
        const SsSolution ss = solve_a_ss(m.entries, p);
        const int rank = (m.eigenvalues.array() > 1e-12 * n).count();
        worst_det = std::max(worst_det, det / (n * n * n));
        worst_eig = std::min(worst_eig, m.min_eigenvalue() / n);
        worst_cf = std::max(worst_cf, std::abs(ss.closed_form - ss.a_ss) / std::abs(ss.a_ss));
        worst_printed = std::max(worst_printed, std::abs(ss.closed_form_printed - ss.a_ss) / std::abs(ss.a_ss));
        if (!m.completed || det > 1e-10 * n * n * n || m.min_eigenvalue() < -1e-12 * n || rank != 2) v.pass = false;
    }
    if (worst_cf > 1e-9) v.pass = false;
    v.detail = fmt("max|det|/|m|^3=%.2e", worst_det) + fmt(" min eig/|m|=%.2e", worst_eig) +
               fmt(" closed-form rel=%.2e", worst_cf) + fmt(" printed-form rel=%.2e (logged discrepancy)", worst_printed);
    return v;
}

// C3: raw matrix has a negative eigenvalue at every in-range coupling.
Verdict raw_not_psd() {
    DeviceInputs in;
    Verdict v{true, ""};
    double largest = -1e300;
    for (double g : coupling_grid(50)) {
        in.coupling_ratio = g;
        const CoefficientMatrix m = coefficient_matrix(derive_params(in), false);
        largest = std::max(largest, m.min_eigenvalue());
        if (!(m.min_eigenvalue() < 0.0)) v.pass = false;
    }
    v.detail = fmt("largest min eigenvalue over 50 g = %.3e", largest);
    return v;
}

// C4: superoperator identities on every matrix unit at N = 16.
Verdict dissipator_equivalence() {
    const SquidParams p = derive_params(DeviceInputs{});
    const FockOperators ops(FockSpace::with_default_pad(16));
    const DissipativeModel m = DissipativeModel::build(p, ops);
    const ComplexMatrix zero = ComplexMatrix::Zero(16, 16);
    const Eigen::Matrix3cd completed = m.completed.scaled();
    const Eigen::Matrix3cd raw = m.raw.scaled();
    double lind = 0.0;
    double bm = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i) {
        for (Eigen::Index j = 0; j < 16; ++j) {
            const ComplexMatrix e = unit(16, i, j);
            lind = std::max(lind, max_abs(lindblad_rhs(e, zero, m.lindblads) - quadratic_dissipator(e, completed, m.basis)));
            const ComplexMatrix split = -kI * commutator(m.h_regrouped, e) + quadratic_dissipator(e, raw, m.basis);
            bm = std::max(bm, max_abs(m.bm(e) - split));
        }
    }
    return {lind <= 1e-10 && bm <= 1e-10,
            fmt("lindblad vs quadratic form %.2e", lind) + fmt(", bm vs -i[H',.]+D_raw %.2e", bm)};
}

// C5: dynamics invariants at N = 32.
Verdict dynamics() {
    const FockSpace space = FockSpace::with_default_pad(32);
    const FockOperators ops(space);
    const DensityMatrix rho0 = initial_state({InitialKind::kCoherent, 0, cplx(1.0)}, space);

    const DissipativeModel m = DissipativeModel::build(derive_params(DeviceInputs{}), ops);
    const RhsFunction lind = [&m](const ComplexMatrix& r) { return m.lindblad(r); };
    const Trajectory tr = evolve(rho0, lind, {1e-3, 10000, 1000, true}, m.h_regrouped);
    const double trace_dev = tr.max_trace_dev();
    const double herm = tr.max_herm_defect();
    const double min_eig = tr.min_eigenvalue();

    DeviceInputs undamped;
    undamped.damping_ratio = 0.0;
    const DissipativeModel u = DissipativeModel::build(derive_params(undamped), ops);
    const RhsFunction unitary = [&u](const ComplexMatrix& r) { return u.bm(r); };
    const Trajectory ut = evolve(rho0, unitary, {1e-3, 10000, 1000, false}, u.h_system);
    const double e0 = ut.monitors.front().energy;
    const double drift = std::abs(ut.monitors.back().energy - e0) / std::abs(e0);

    // Step halving against a dt/4 reference over t = 1.
    auto final_at = [&](double h, std::size_t n) {
        return evolve(rho0, lind, {h, n, 0, false, 1e6}, m.h_regrouped).final_state();
    };
    const ComplexMatrix ref = final_at(0.0025, 400);
    const double ratio = (final_at(0.01, 100) - ref).norm() / (final_at(0.005, 200) - ref).norm();

    const bool pass = tr.status != EvolveStatus::kDiverged && trace_dev <= 1e-8 && herm <= 1e-10 && min_eig >= -1e-6 &&
                      drift <= 1e-9 && ratio >= 8.0 && ratio <= 32.0;
    return {pass, fmt("|tr-1|=%.2e", trace_dev) + fmt(" herm=%.2e", herm) + fmt(" min eig=%.2e", min_eig) +
                      fmt(" unitary drift=%.2e", drift) + fmt(" RK4 ratio=%.2f", ratio)};
}

// C6: [X,P] = i(I - N E_{N-1,N-1}).
Verdict truncation_identity() {
    double worst = 0.0;
    for (std::size_t n : {2u, 8u, 64u, 128u}) {
        const Quadratures q = quadratures(FockSpace(n));
        ComplexMatrix expected = ComplexMatrix::Identity(n, n);
        expected(n - 1, n - 1) -= static_cast<double>(n);
        worst = std::max(worst, max_abs(commutator(q.X, q.P) - kI * expected));
    }
    return {worst <= 1e-12, fmt("max deviation %.2e", worst)};
}

// C7: mirror symmetry and periodicity of the lowest 5 levels at g = 1.8.
Verdict symmetry() {
    const FockOperators ops(FockSpace(128, 32));
    const SquidParams base = derive_params(DeviceInputs{});
    auto levels = [&](double phi) {
        return RealVector(hermitian_eigenvalues(effective_hamiltonian(base.with_flux(phi), ops, TermSet::all())).head(5));
    };
    double mirror = 0.0;
    double period = 0.0;
    for (double phi : linspace(0.0, 1.0, 21)) {
        const RealVector e = levels(phi);
        const RealVector m = levels(1.0 - phi);
        const RealVector s = levels(phi + 1.0);
        for (Eigen::Index k = 0; k < 5; ++k) {
            const double scale = std::max(1.0, std::abs(e[k]));
            mirror = std::max(mirror, std::abs(e[k] - m[k]) / scale);
            period = std::max(period, std::abs(e[k] - s[k]) / scale);
        }
    }
    return {mirror <= 1e-9 && period <= 1e-9, fmt("mirror %.2e", mirror) + fmt(", period %.2e", period)};
}

// C8: susceptibility properties on 21 flux points and four couplings.
Verdict susceptibility_properties() {
    const std::vector<double> phis = linspace(0.0, 1.0, 21);
    const std::vector<double> gs = {0.3, 1.0, 1.8, 2.2};

    DeviceInputs harmonic;
    harmonic.josephson_energy_J = 0.0;
    double zero = 0.0;
    for (const auto& row : susceptibility(harmonic, phis, gs).rows) zero = std::max(zero, std::abs(row.chi0));

    const SusceptibilityResult r = susceptibility(DeviceInputs{}, phis, gs);
    const std::size_t np = phis.size();
    double worst_sc = 0.0;
    double worst_sym = 0.0;  // asymmetry / combined Richardson error
    bool sym_ok = true;
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
        for (std::size_t i = 0; i < np; ++i) {
            const auto& a = r.rows[gi * np + i];
            const auto& b = r.rows[gi * np + (np - 1 - i)];
            worst_sc = std::max(worst_sc, a.self_consistency);
            const double tol = a.richardson_error + b.richardson_error;
            const double d = std::abs(a.chi0 - b.chi0);
            if (d > tol) sym_ok = false;
            if (tol > 0) worst_sym = std::max(worst_sym, d / tol);
        }
    }

    // Variation along phi at fixed g, and along g at fixed phi, against the largest error in that slice.
    double min_phi_ratio = 1e300;
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
        double lo = 1e300, hi = -1e300, err = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            const auto& row = r.rows[gi * np + i];
            lo = std::min(lo, row.chi0);
            hi = std::max(hi, row.chi0);
            err = std::max(err, row.richardson_error);
        }
        min_phi_ratio = std::min(min_phi_ratio, (hi - lo) / err);
    }
    double min_g_ratio = 1e300;
    for (std::size_t i = 0; i < np; ++i) {
        double lo = 1e300, hi = -1e300, err = 0.0;
        for (std::size_t gi = 0; gi < gs.size(); ++gi) {
            const auto& row = r.rows[gi * np + i];
            lo = std::min(lo, row.chi0);
            hi = std::max(hi, row.chi0);
            err = std::max(err, row.richardson_error);
        }
        min_g_ratio = std::min(min_g_ratio, (hi - lo) / err);
    }

    const bool pass = r.failures.empty() && zero <= 1e-10 && worst_sc <= 0.01 && sym_ok && min_phi_ratio > 10.0 &&
                      min_g_ratio > 10.0;
    return {pass, fmt("nu=0 max|chi0|=%.1e", zero) + fmt(" self-consistency<=%.2e", worst_sc) +
                      fmt(" asymmetry/err<=%.2f", worst_sym) + fmt(" variation/err phi>=%.1e", min_phi_ratio) +
                      fmt(" g>=%.1e", min_g_ratio)};
}

// C9: ground energy converged between N = 128 and N = 192.
Verdict convergence() {
    const SquidParams p = derive_params(DeviceInputs{});
    auto e0 = [&](std::size_t n) {
        const FockOperators ops(FockSpace::with_default_pad(n));
        return hermitian_eigenvalues(effective_hamiltonian(p, ops, TermSet::all()))[0];
    };
    const double a = e0(128);
    const double b = e0(192);
    return {std::abs(b - a) < 1e-6, fmt("E0(128)=%.12f", a) + fmt(" |E0(192)-E0(128)|=%.2e", std::abs(b - a))};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ground-energy term contributions", 60.0, fig2},
        {2, "completion correctness", 1.0, completion},
        {3, "raw coefficient matrix not PSD", 1.0, raw_not_psd},
        {4, "dissipator equivalence", 30.0, dissipator_equivalence},
        {5, "dynamics invariants", 300.0, dynamics},
        {6, "truncation identity", 1.0, truncation_identity},
        {7, "spectral symmetry and periodicity", 120.0, symmetry},
        {8, "susceptibility properties", 300.0, susceptibility_properties},
        {9, "basis convergence", 60.0, convergence},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = v.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s C%d %s: %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                    c.limit_s, in_time ? "" : " exceeded");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
