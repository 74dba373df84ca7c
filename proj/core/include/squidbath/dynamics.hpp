// dynamics.hpp: Fixed-step RK4 density-matrix evolution with invariant monitors

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "squidbath/lindblad.hpp"
#include "squidbath/operator_core.hpp"

namespace squidbath {

class OutOfBasis : public std::runtime_error {
public:
    explicit OutOfBasis(const std::string& what) : std::runtime_error(what) {}
};

class InvalidState : public std::invalid_argument {
public:
    explicit InvalidState(const std::string& what) : std::invalid_argument(what) {}
};

// Hermitian unit-trace matrix, positive down to -1e-8.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

    static DensityMatrix pure(const ComplexVector& psi);

private:
    ComplexMatrix m_;
};

enum class InitialKind { kGround, kFock, kCoherent };

struct InitialStateSpec {
    InitialKind kind = InitialKind::kCoherent;
    std::size_t fock_n = 0;
    cplx alpha{1.0, 0.0};
};

/// Pure initial state on `space`. `hamiltonian` is required for kGround.
/// Throws OutOfBasis when more than 1e-6 of the weight sits in the top 10%
/// of Fock levels.
DensityMatrix initial_state(const InitialStateSpec& spec, const FockSpace& space,
                            const ComplexMatrix* hamiltonian = nullptr);

using RhsFunction = std::function<ComplexMatrix(const ComplexMatrix&)>;

struct StepMonitor {
    double trace_dev = 0.0;     // |tr rho - 1|
    double herm_defect = 0.0;   // ||rho - rho^dagger||_F before re-symmetrization
    double min_eig = 0.0;
    double energy = 0.0;        // Re tr(H rho)
};

enum class EvolveStatus { kOk, kStabilityWarning, kDiverged };

std::string_view to_string(EvolveStatus s);

struct Trajectory {
    std::vector<double> times;            // one entry per recorded step (t0 included)
    std::vector<StepMonitor> monitors;    // same length as times
    std::vector<double> snapshot_times;
    std::vector<ComplexMatrix> snapshots;
    EvolveStatus status = EvolveStatus::kOk;
    std::size_t steps_completed = 0;

    double max_trace_dev() const;
    double max_herm_defect() const;
    double min_eigenvalue() const;
    const ComplexMatrix& final_state() const { return snapshots.back(); }
};

struct EvolveOptions {
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::size_t snapshot_stride = 100;  // 0: only initial and final
    bool track_min_eig = true;
    double divergence_norm = 10.0;
    double trace_warning = 1e-6;
};

/// Classical RK4 integration of d rho/dt = rhs(rho). Hermiticity is restored
/// each step as (rho + rho^dagger)/2 after recording the defect. Never
/// projects onto positive matrices. The final state is always snapshotted.
Trajectory evolve(const DensityMatrix& rho0, const RhsFunction& rhs, const EvolveOptions& opts,
                  const ComplexMatrix& energy_observable);

// Documented heuristic: dt <= 0.01 / max|eig(H)|.
double suggested_time_step(const ComplexMatrix& h);

struct PositivityReport {
    Trajectory bm;
    Trajectory lindblad;
    double bm_min_eig = 0.0;
    double lindblad_min_eig = 0.0;
    bool bm_dips = false;          // below -1e-4
    bool lindblad_dips = false;
    // ||rho_bm(t) - rho_L(t)||_F / t at the first step versus
    // gamma/omega0 * a_SS * ||S rho0 S - 1/2 {S^2, rho0}||_F.
    double early_slope_measured = 0.0;
    double early_slope_predicted = 0.0;
};

inline constexpr double kPositivityDipThreshold = -1e-4;

/// Runs the Born-Markov and Lindblad-completed equations from the same state.
PositivityReport positivity_comparison(const DensityMatrix& rho0, const DissipativeModel& model,
                                       const EvolveOptions& opts);

}  // namespace squidbath
