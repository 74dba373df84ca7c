// spectroscopy.hpp: Flux and coupling sweeps of the effective Hamiltonian

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "squidbath/csv.hpp"
#include "squidbath/operator_core.hpp"
#include "squidbath/squid_model.hpp"

namespace squidbath {

struct SweepSpec {
    std::vector<double> phi_grid;
    std::vector<double> g_grid;
    std::size_t levels = 5;
    TermSet include = TermSet::all();
    FockSpace space{128, 32};

    // Grids non-empty and strictly increasing, levels >= 1, levels <= dim.
    void validate() const;
};

struct SpectrumRow {
    double phi;
    double g;
    std::size_t level;
    double energy;  // hbar omega0
};

struct PointFailure {
    double phi;
    double g;
    std::string message;
};

struct SweepResult {
    std::vector<SpectrumRow> rows;  // ordered by (g, phi, level)
    std::vector<PointFailure> failures;
    std::vector<double> unbounded_g;  // g values where 2|c_XP| >= 1 and XP is included
    std::size_t dim = 0;
    std::size_t pad = 0;
    TermSet include;

    CsvTable to_csv(const SquidParams& base) const;
};

// 2|c_XP| >= 1 makes X^2/2 + P^2/2 + c_XP {X,P} unbounded below.
bool squeezing_unbounded(const SquidParams& p);

/// Lowest `levels` eigenvalues of the effective Hamiltonian on every
/// (phi, g) grid point. Per-point failures are recorded, not thrown.
/// Grid points are independent and run on `threads` workers.
SweepResult spectrum_sweep(const SweepSpec& spec, const DeviceInputs& inputs,
                           SineCoupling coupling = SineCoupling::kJosephsonScaled,
                           std::size_t threads = 1);

// Include-sets in spiderweb axis order.
const std::array<TermSet, 8>& spiderweb_configurations();

struct SpiderwebEntry {
    TermSet include;
    double energy;
};

struct SpiderwebResult {
    std::array<SpiderwebEntry, 8> entries;
    double phi = 0.5;
    double g = 1.8;
    // (E(A) - E0) + (E(B) - E0) - (E(A+B) - E0) for pairs XP/XS, XP/PS, PS/XS
    double residual_xp_xs = 0.0;
    double residual_xp_ps = 0.0;
    double residual_ps_xs = 0.0;

    double energy(const TermSet& t) const;
    CsvTable to_csv(const SquidParams& p, const FockSpace& space) const;
};

/// Lowest eigenvalue for each of the 8 include-sets at the flux and
/// coupling carried by `inputs`.
SpiderwebResult spiderweb(const DeviceInputs& inputs, const FockSpace& space,
                          SineCoupling coupling = SineCoupling::kJosephsonScaled,
                          std::size_t threads = 1);

struct SusceptibilityOptions {
    double fd_step = 1.0 / 400.0;
    // Halve the step while successive estimates disagree by more than this.
    double refine_tolerance = 0.01;
    std::size_t max_halvings = 40;
    double min_step = 1e-13;
    // Flag when the Richardson estimate exceeds this fraction of |chi0|.
    double flag_threshold = 0.05;
    TermSet include = TermSet::all();
    FockSpace space{128, 32};
};

struct SusceptibilityRow {
    double phi;
    double g;
    double chi0;               // dimensionless, -chi_scale d^2 e0 / d phi^2
    double chi0_over_L;        // 1/H
    double fd_step;            // step h actually used; estimates at h and h/2
    double richardson_error;   // |chi(h/2) - chi(h)| / 3
    double self_consistency;   // |chi(h) - chi(h/2)| / |chi(h/2)|
    bool step_too_large;       // richardson_error > flag_threshold * |chi0|
    double chi0_sum_over_states;  // second-order perturbation theory at phi, no step
};

struct SusceptibilityResult {
    std::vector<SusceptibilityRow> rows;  // ordered by (g, phi)
    std::vector<PointFailure> failures;

    bool any_step_too_large() const;
    CsvTable to_csv(const SquidParams& base, const SusceptibilityOptions& opts) const;
};

/// Ground-state susceptibility by central differences in phi, with a
/// step-halving self-consistency check at each point. The starting step is
/// halved until the check passes or the step floor is reached.
SusceptibilityResult susceptibility(const DeviceInputs& inputs, const std::vector<double>& phi_grid,
                                    const std::vector<double>& g_grid,
                                    const SusceptibilityOptions& opts = {},
                                    SineCoupling coupling = SineCoupling::kJosephsonScaled,
                                    std::size_t threads = 1);

/// d^2 e0/dphi^2 from <0|H''|0> - 2 sum_n |<n|H'|0>|^2 / (E_n - E_0).
/// NaN when the ground state is exactly degenerate.
double ground_curvature_sum_over_states(const SquidParams& p, const FockOperators& ops, const TermSet& include);

struct ConvergenceRow {
    std::size_t dim;
    std::array<double, 5> energies;
    double delta_e0;  // vs previous row, NaN for the first
};

// Lowest five eigenvalues of H' per truncation, pad fixed.
std::vector<ConvergenceRow> convergence_audit(const DeviceInputs& inputs,
                                              const std::vector<std::size_t>& dims, std::size_t pad,
                                              const TermSet& include = TermSet::all(),
                                              SineCoupling coupling = SineCoupling::kJosephsonScaled);

CsvTable convergence_csv(const std::vector<ConvergenceRow>& rows, const SquidParams& p, std::size_t pad);

// n evenly spaced points on [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace squidbath
