#include "squidbath/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace squidbath {

namespace {

double min_eigenvalue_of(const ComplexMatrix& rho) {
    return hermitian_eigenvalues(hermitian_part(rho))[0];
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2) {
        throw InvalidState("DensityMatrix: must be square with dim >= 2");
    }
    const double tr_dev = std::abs(m_.trace() - cplx(1.0));
    if (tr_dev > 1e-10) throw InvalidState("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_dev));
    if (hermiticity_defect(m_) > 1e-12) throw InvalidState("DensityMatrix: not Hermitian");
    if (min_eigenvalue_of(m_) < -1e-8) throw InvalidState("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const ComplexVector v = psi / psi.norm();
    return DensityMatrix(hermitian_part(v * v.adjoint()));
}

DensityMatrix initial_state(const InitialStateSpec& spec, const FockSpace& space,
                            const ComplexMatrix* hamiltonian) {
    const auto n = static_cast<Eigen::Index>(space.dim());
    ComplexVector psi = ComplexVector::Zero(n);
    switch (spec.kind) {
        case InitialKind::kFock:
            if (spec.fock_n >= space.dim()) {
                throw OutOfBasis("initial_state: Fock level " + std::to_string(spec.fock_n) +
                                 " outside basis of size " + std::to_string(space.dim()));
            }
            psi[static_cast<Eigen::Index>(spec.fock_n)] = 1.0;
            break;
        case InitialKind::kCoherent: {
            // c_n = alpha^n / sqrt(n!) up to normalization
            cplx c = 1.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                psi[k] = c;
                c *= spec.alpha / std::sqrt(static_cast<double>(k + 1));
            }
            psi *= std::exp(-0.5 * std::norm(spec.alpha));
            break;
        }
        case InitialKind::kGround: {
            if (hamiltonian == nullptr) throw std::invalid_argument("initial_state: ground state needs a Hamiltonian");
            if (hamiltonian->rows() != n) throw DimMismatch("initial_state: Hamiltonian dimension");
            psi = hermitian_eig(*hamiltonian).vectors.col(0);
            break;
        }
    }
    const double total = psi.squaredNorm();
    const auto top = std::max<Eigen::Index>(1, (n + 9) / 10);
    const double tail = psi.tail(top).squaredNorm() / total;
    if (tail > 1e-6) {
        throw OutOfBasis("initial_state: weight " + std::to_string(tail) + " in the top 10% of levels");
    }
    return DensityMatrix::pure(psi);
}

std::string_view to_string(EvolveStatus s) {
    switch (s) {
        case EvolveStatus::kOk: return "ok";
        case EvolveStatus::kStabilityWarning: return "stability_warning";
        case EvolveStatus::kDiverged: return "diverged";
    }
    return "ok";
}

double Trajectory::max_trace_dev() const {
    double m = 0.0;
    for (const auto& r : monitors) m = std::max(m, r.trace_dev);
    return m;
}

double Trajectory::max_herm_defect() const {
    double m = 0.0;
    for (const auto& r : monitors) m = std::max(m, r.herm_defect);
    return m;
}

double Trajectory::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : monitors) m = std::min(m, r.min_eig);
    return m;
}

double suggested_time_step(const ComplexMatrix& h) {
    const RealVector ev = hermitian_eigenvalues(h);
    const double scale = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    return scale > 0.0 ? 0.01 / scale : std::numeric_limits<double>::infinity();
}

Trajectory evolve(const DensityMatrix& rho0, const RhsFunction& rhs, const EvolveOptions& opts,
                  const ComplexMatrix& energy_observable) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (energy_observable.rows() != rho0.matrix().rows()) throw DimMismatch("evolve: observable dimension");

    Trajectory traj;
    traj.times.reserve(opts.steps + 1);
    traj.monitors.reserve(opts.steps + 1);

    auto record = [&](double t, const ComplexMatrix& rho, double defect) {
        StepMonitor m;
        m.trace_dev = std::abs(rho.trace() - cplx(1.0));
        m.herm_defect = defect;
        m.min_eig = opts.track_min_eig ? min_eigenvalue_of(rho) : std::numeric_limits<double>::quiet_NaN();
        m.energy = (energy_observable * rho).trace().real();
        traj.times.push_back(t);
        traj.monitors.push_back(m);
        return m;
    };

    ComplexMatrix rho = rho0.matrix();
    record(0.0, rho, hermiticity_defect(rho));
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(rho);

    const double h = opts.dt;
    for (std::size_t step = 1; step <= opts.steps; ++step) {
        const ComplexMatrix k1 = rhs(rho);
        const ComplexMatrix k2 = rhs(rho + 0.5 * h * k1);
        const ComplexMatrix k3 = rhs(rho + 0.5 * h * k2);
        const ComplexMatrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double defect = hermiticity_defect(rho);
        rho = hermitian_part(rho);
        const double t = static_cast<double>(step) * h;
        const StepMonitor m = record(t, rho, defect);
        traj.steps_completed = step;

        const bool last = step == opts.steps;
        if (!std::isfinite(rho.norm()) || rho.norm() > opts.divergence_norm) {
            traj.status = EvolveStatus::kDiverged;
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(rho);
            return traj;
        }
        if (m.trace_dev > opts.trace_warning) traj.status = EvolveStatus::kStabilityWarning;
        if (last || (opts.snapshot_stride > 0 && step % opts.snapshot_stride == 0)) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(rho);
        }
    }
    return traj;
}

PositivityReport positivity_comparison(const DensityMatrix& rho0, const DissipativeModel& model,
                                       const EvolveOptions& opts) {
    PositivityReport r;
    const ComplexMatrix& energy = model.h_regrouped;
    r.bm = evolve(rho0, [&model](const ComplexMatrix& rho) { return model.bm(rho); }, opts, energy);
    r.lindblad = evolve(rho0, [&model](const ComplexMatrix& rho) { return model.lindblad(rho); }, opts, energy);
    r.bm_min_eig = r.bm.min_eigenvalue();
    r.lindblad_min_eig = r.lindblad.min_eigenvalue();
    r.bm_dips = r.bm_min_eig < kPositivityDipThreshold;
    r.lindblad_dips = r.lindblad_min_eig < kPositivityDipThreshold;

    // First-step difference of the two flows.
    const EvolveOptions one{opts.dt, 1, 1, false, opts.divergence_norm, opts.trace_warning};
    const auto bm1 = evolve(rho0, [&model](const ComplexMatrix& rho) { return model.bm(rho); }, one, energy);
    const auto l1 = evolve(rho0, [&model](const ComplexMatrix& rho) { return model.lindblad(rho); }, one, energy);
    r.early_slope_measured = (bm1.final_state() - l1.final_state()).norm() / opts.dt;

    const ComplexMatrix& s = model.basis.S;
    const ComplexMatrix& rho = rho0.matrix();
    const ComplexMatrix s2 = s * s;
    const ComplexMatrix completion_term = s * rho * s - 0.5 * (s2 * rho + rho * s2);
    r.early_slope_predicted = model.completed.prefactor * model.completed.a_ss * completion_term.norm();
    return r;
}

}  // namespace squidbath
