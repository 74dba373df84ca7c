#include "squidbath/operator_core.hpp"

#include <cmath>

namespace squidbath {

FockSpace::FockSpace(std::size_t dim, std::size_t pad) : dim_(dim), pad_(pad) {
    if (dim < 2) {
        throw std::invalid_argument("FockSpace: dim must be >= 2, got " + std::to_string(dim));
    }
}

ComplexMatrix annihilator(const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.dim());
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Eigen::Index m = 0; m + 1 < n; ++m) {
        a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    }
    return a;
}

Quadratures quadratures(const FockSpace& space) {
    const ComplexMatrix a = annihilator(space);
    const ComplexMatrix ad = a.adjoint();
    const double r = 1.0 / std::sqrt(2.0);
    return {(a + ad) * r, kI * (ad - a) * r};
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

double hermiticity_defect(const ComplexMatrix& m) { return (m - m.adjoint()).norm(); }

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

namespace {

void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw DimMismatch(std::string(who) + ": matrix is not square");
    }
}

void require_hermitian(const ComplexMatrix& m) {
    const double defect = hermiticity_defect(m);
    if (defect > 1e-10 * m.norm()) {
        throw NotHermitian("hermitian_eig: hermiticity defect " + std::to_string(defect) +
                           " exceeds 1e-10*||M||_F");
    }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    require_square(m, "hermitian_eig");
    require_hermitian(m);
    // Solver reads the lower triangle; feed it the Hermitian part so both
    // triangles contribute.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("hermitian_eig: iteration budget exhausted");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigenvalues");
    require_hermitian(m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("hermitian_eigenvalues: iteration budget exhausted");
    }
    return solver.eigenvalues();
}

ComplexMatrix operator_trig(const EigenDecomposition& eig_a, double scale, double phase,
                            TrigKind kind) {
    const auto n = eig_a.values.size();
    RealVector f(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double arg = scale * eig_a.values[k] + phase;
        f[k] = kind == TrigKind::kSin ? std::sin(arg) : std::cos(arg);
    }
    const ComplexMatrix& v = eig_a.vectors;
    return hermitian_part(v * f.asDiagonal() * v.adjoint());
}

ComplexMatrix operator_trig(const ComplexMatrix& a, double scale, double phase, TrigKind kind) {
    return operator_trig(hermitian_eig(a), scale, phase, kind);
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimMismatch("commutator: dimension mismatch");
    }
    return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimMismatch("anticommutator: dimension mismatch");
    }
    return a * b + b * a;
}

ComplexMatrix parity(const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.dim());
    ComplexMatrix pi = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        pi(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    }
    return pi;
}

FockOperators::FockOperators(const FockSpace& space) : space_(space) {
    auto q = quadratures(space);
    x_ = std::move(q.X);
    p_ = std::move(q.P);
    const auto n = static_cast<Eigen::Index>(space.dim());
    id_ = ComplexMatrix::Identity(n, n);
    padded_x_eig_ = hermitian_eig(quadratures(space.padded()).X);
}

ComplexMatrix FockOperators::trig_of_x(double scale, double phase, TrigKind kind) const {
    const auto n = static_cast<Eigen::Index>(space_.dim());
    return operator_trig(padded_x_eig_, scale, phase, kind).topLeftCorner(n, n);
}

}  // namespace squidbath
