#include "squidbath/lindblad.hpp"

#include <algorithm>
#include <cmath>

namespace squidbath {

GRange g_range_check(double g) {
    return (g >= kCouplingMin && g <= kCouplingMax) ? GRange::kInside : GRange::kOutside;
}

namespace {

// (-g^4 + 2g^2 - 1)(1 + xi^2) + 4g(g^2 + 1)
double closed_form_denominator(double g, double xi) {
    const double g2 = g * g;
    return (-g2 * g2 + 2.0 * g2 - 1.0) * (1.0 + xi * xi) + 4.0 * g * (g2 + 1.0);
}

}  // namespace

double closed_form_a_ss(double g, double xi, double kappa) {
    const double g3 = g * g * g;
    return kappa * kappa * (4.0 * g3 * g + 8.0 * xi * xi * g3) / closed_form_denominator(g, xi);
}

double closed_form_a_ss_printed(double g, double xi, double kappa) {
    const double g3 = g * g * g;
    const double xi2 = xi * xi;
    return kappa * kappa * (-xi2 * g3 * g * g + 4.0 * g3 * g + 8.0 * xi2 * g3) /
           closed_form_denominator(g, xi);
}

Eigen::Matrix3cd nrw_coefficients(const SquidParams& p) {
    const double g = p.g;
    const double xi = p.xi;
    const double k = p.kappa;
    const double odd = 1.0 + g * g - g;
    const double even = xi * (1.0 - g * g);

    Eigen::Matrix3cd a;
    a(0, 0) = 2.0 * g + 1.0;
    a(0, 1) = cplx(-even, -odd);
    a(1, 0) = cplx(-even, odd);
    // (1 + i xi): conjugate partner of the (S,X) entry
    a(0, 2) = g * k * cplx(1.0, xi);
    a(2, 0) = g * k * cplx(1.0, -xi);
    a(1, 1) = 2.0 * g + g * g;
    a(1, 2) = g * g * k * cplx(xi, 1.0);
    a(2, 1) = g * g * k * cplx(xi, -1.0);
    a(2, 2) = 0.0;
    return a;
}

SsSolution solve_a_ss(const Eigen::Matrix3cd& m, const SquidParams& p) {
    Eigen::Matrix3cd base = m;
    base(2, 2) = 0.0;
    const double cofactor = (base(0, 0) * base(1, 1) - base(0, 1) * base(1, 0)).real();
    const double block = base.topLeftCorner<2, 2>().squaredNorm();
    if (std::abs(cofactor) <= 1e-12 * block) {
        throw DegenerateMinor("solve_a_ss: (S,S) cofactor vanishes at g = " + std::to_string(p.g));
    }
    SsSolution out;
    out.cofactor = cofactor;
    out.a_ss = -base.determinant().real() / cofactor;
    out.closed_form = closed_form_a_ss(p.g, p.xi, p.kappa);
    out.closed_form_printed = closed_form_a_ss_printed(p.g, p.xi, p.kappa);
    const double scale = std::max(std::abs(out.a_ss), 1e-300);
    out.closed_form_rel_discrepancy = std::abs(out.closed_form - out.a_ss) / scale;
    out.printed_rel_discrepancy = std::abs(out.closed_form_printed - out.a_ss) / scale;
    return out;
}

CoefficientEigen analyze_coefficients(const Eigen::Matrix3cd& m) {
    const Eigen::Matrix3cd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("analyze_coefficients: eigensolver failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

CoefficientMatrix coefficient_matrix(const SquidParams& p, bool complete) {
    CoefficientMatrix out;
    out.entries = nrw_coefficients(p);
    out.prefactor = p.gamma_ratio;
    out.g_in_range = g_range_check(p.g) == GRange::kInside;
    if (complete) {
        out.a_ss = solve_a_ss(out.entries, p).a_ss;
        out.entries(2, 2) = out.a_ss;
    }
    out.eigenvalues = analyze_coefficients(out.entries).values;
    if (complete) {
        const double nrm = out.norm();
        const double det = std::abs(out.entries.determinant());
        out.completed = out.eigenvalues[0] >= -1e-12 * nrm && det <= 1e-10 * nrm * nrm * nrm;
    }
    return out;
}

Eigen::Matrix3cd LindbladSet::reconstruct() const {
    Eigen::Matrix3cd r = Eigen::Matrix3cd::Zero();
    for (const auto& t : items) r += t.weight * t.coeffs * t.coeffs.adjoint();
    return r;
}

OperatorBasis make_operator_basis(const SquidParams& p, const FockOperators& ops) {
    return {ops.X(), ops.P(), build_sine_operator(p, ops)};
}

LindbladSet extract_lindblads(const CoefficientMatrix& m, const OperatorBasis& basis) {
    if (!m.completed) {
        throw NotCompleted("extract_lindblads: coefficient matrix is not a PSD completion");
    }
    const auto eig = analyze_coefficients(m.entries);
    const double cutoff = 1e-12 * m.norm();

    LindbladSet out;
    for (int k = 2; k >= 0; --k) {
        if (eig.values[k] <= cutoff) continue;
        LindbladTerm t;
        t.weight = m.prefactor * eig.values[k];
        t.coeffs = eig.vectors.col(k);
        ComplexMatrix op = t.coeffs[0] * basis.X + t.coeffs[1] * basis.P + t.coeffs[2] * basis.S;
        out.operators.push_back(std::sqrt(t.weight) * op);
        out.items.push_back(std::move(t));
    }
    return out;
}

namespace {

inline ComplexMatrix comm(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }
inline ComplexMatrix acomm(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

void require_same_dim(const ComplexMatrix& rho, const OperatorBasis& basis, const char* who) {
    if (rho.rows() != basis.X.rows() || rho.cols() != basis.X.cols()) {
        throw DimMismatch(std::string(who) + ": density matrix and operators differ in dimension");
    }
}

}  // namespace

ComplexMatrix bm_rhs(const ComplexMatrix& rho, const SquidParams& p, const OperatorBasis& basis,
                     const ComplexMatrix& h_system) {
    require_same_dim(rho, basis, "bm_rhs");
    if (h_system.rows() != rho.rows()) throw DimMismatch("bm_rhs: H_S dimension mismatch");

    const ComplexMatrix& x = basis.X;
    const ComplexMatrix& pm = basis.P;
    const ComplexMatrix& s = basis.S;
    const double gam = p.gamma_ratio;
    const double g = p.g;
    const double xi = p.xi;
    const double k = p.kappa;

    ComplexMatrix out = -kI * comm(h_system, rho);
    if (gam == 0.0) return out;

    out += -kI * gam * (1.0 + g * g - g) * comm(x, acomm(pm, rho));
    out += -kI * gam * g * (g - 0.5) * comm(acomm(x, pm), rho);
    out += -gam * (g + 0.5) * comm(x, comm(x, rho));
    out += gam * xi * (1.0 - g * g) * comm(x, comm(pm, rho));
    out += -gam * g * (1.0 + 0.5 * g) * comm(pm, comm(pm, rho));
    out += kI * gam * g * k * comm(xi * x + g * pm, acomm(s, rho));
    out += -gam * g * k * comm(x + g * xi * pm, comm(s, rho));
    return out;
}

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& h_eff, const LindbladSet& l) {
    if (h_eff.rows() != rho.rows() || h_eff.cols() != rho.cols()) {
        throw DimMismatch("lindblad_rhs: H and rho differ in dimension");
    }
    ComplexMatrix out = -kI * comm(h_eff, rho);
    for (const auto& op : l.operators) {
        if (op.rows() != rho.rows()) throw DimMismatch("lindblad_rhs: jump operator dimension");
        const ComplexMatrix op_dag = op.adjoint();
        const ComplexMatrix dd = op_dag * op;
        out += op * rho * op_dag - 0.5 * (dd * rho + rho * dd);
    }
    return out;
}

ComplexMatrix quadratic_dissipator(const ComplexMatrix& rho, const Eigen::Matrix3cd& a,
                                   const OperatorBasis& basis) {
    require_same_dim(rho, basis, "quadratic_dissipator");
    const auto n = rho.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < 3; ++i) {
        const ComplexMatrix ai_rho = basis[i] * rho;
        for (int j = 0; j < 3; ++j) {
            if (a(i, j) == cplx(0.0)) continue;
            out += a(i, j) * (ai_rho * basis[j]);
            k += a(i, j) * (basis[j] * basis[i]);
        }
    }
    out -= 0.5 * (k * rho + rho * k);
    return out;
}

ComplexMatrix regrouped_hamiltonian(const SquidParams& p, const OperatorBasis& basis,
                                    const ComplexMatrix& h_system) {
    const ComplexMatrix& x = basis.X;
    const ComplexMatrix& pm = basis.P;
    const ComplexMatrix& s = basis.S;
    const double gam = p.gamma_ratio;
    const double g = p.g;
    const double xi = p.xi;
    const double k = p.kappa;

    // d[A,{B,rho}] leaves (i d/2)[{A,B}, rho]; c[A,[B,rho]] leaves (c/2)[[A,B], rho].
    ComplexMatrix h = h_system;
    h += xp_coefficient(p) * acomm(x, pm);
    h += -0.5 * gam * g * k * xi * acomm(x, s);
    h += -0.5 * gam * g * g * k * acomm(pm, s);
    h += 0.5 * kI * gam * xi * (1.0 - g * g) * comm(x, pm);
    h += -0.5 * kI * gam * g * k * comm(x, s);
    h += -0.5 * kI * gam * g * g * k * xi * comm(pm, s);
    return hermitian_part(h);
}

DissipativeModel DissipativeModel::build(const SquidParams& p, const FockOperators& ops) {
    DissipativeModel m;
    m.params = p;
    m.basis = make_operator_basis(p, ops);
    m.h_system = build_system_hamiltonian(p, ops);
    m.h_regrouped = regrouped_hamiltonian(p, m.basis, m.h_system);
    m.raw = coefficient_matrix(p, false);
    m.completed = coefficient_matrix(p, true);
    if (m.completed.completed) m.lindblads = extract_lindblads(m.completed, m.basis);
    return m;
}

ComplexMatrix DissipativeModel::bm(const ComplexMatrix& rho) const {
    return bm_rhs(rho, params, basis, h_system);
}

ComplexMatrix DissipativeModel::lindblad(const ComplexMatrix& rho) const {
    if (!completed.completed) {
        throw NotCompleted("DissipativeModel: no Lindblad form at g = " + std::to_string(params.g));
    }
    return lindblad_rhs(rho, h_regrouped, lindblads);
}

}  // namespace squidbath
