// lindblad.hpp: NRW coefficient matrix and its minimal positive completion
//
// Operator basis ordering is (X, P, S). Dissipators over that basis use
//
//   D_a[rho] = sum_ij a_ij (A_i rho A_j - 1/2 {A_j A_i, rho}),
//
// and with a = sum_k lambda_k u_k u_k^dagger the jump operators are
// L_k = sqrt(lambda_k) sum_i (u_k)_i A_i, so D_a[rho] = sum_k L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho}.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squidbath/operator_core.hpp"
#include "squidbath/squid_model.hpp"

namespace squidbath {

class DegenerateMinor : public std::runtime_error {
public:
    explicit DegenerateMinor(const std::string& what) : std::runtime_error(what) {}
};

class NotCompleted : public std::runtime_error {
public:
    explicit NotCompleted(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kCouplingMin = 0.227;
inline constexpr double kCouplingMax = 4.40;

enum class GRange { kInside, kOutside };

// Inclusive on both ends.
GRange g_range_check(double g);

struct CoefficientMatrix {
    Eigen::Matrix3cd entries = Eigen::Matrix3cd::Zero();  // units of gamma/omega0
    double prefactor = 0.0;                               // gamma/omega0
    double a_ss = 0.0;
    bool completed = false;
    bool g_in_range = true;
    Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // ascending, of `entries`

    double min_eigenvalue() const { return eigenvalues[0]; }
    double norm() const { return entries.norm(); }
    // prefactor * entries
    Eigen::Matrix3cd scaled() const { return prefactor * entries; }
};

struct SsSolution {
    double a_ss = 0.0;             // authoritative value from the linear det solve
    double cofactor = 0.0;         // (S,S) cofactor, det is affine in a_ss with this slope
    double closed_form = 0.0;      // exact closed form, kappa^2 (4g^4 + 8 xi^2 g^3) / D
    double closed_form_printed = 0.0;  // printed closed form with the extra -xi^2 g^5 term
    double closed_form_rel_discrepancy = 0.0;
    double printed_rel_discrepancy = 0.0;
};

// Closed forms of the det(a) = 0 solution; `kappa` is the sine-coupling prefactor.
double closed_form_a_ss(double g, double xi, double kappa);
double closed_form_a_ss_printed(double g, double xi, double kappa);

/// NRW coefficient matrix in units of gamma/omega0; (S,S) set to 0, or to
/// the det = 0 value when `complete` is true.
Eigen::Matrix3cd nrw_coefficients(const SquidParams& p);

/// Returns the a_SS that makes det(a) vanish. Entries other than (S,S) are
/// read from `m`. Throws DegenerateMinor when the (S,S) cofactor is ~0.
SsSolution solve_a_ss(const Eigen::Matrix3cd& m, const SquidParams& p);

/// Builds the coefficient matrix. With complete = true the (S,S) entry is
/// raised to the det = 0 value; `completed` records whether the result is
/// actually positive semidefinite (false outside the valid g range).
CoefficientMatrix coefficient_matrix(const SquidParams& p, bool complete);

struct LindbladTerm {
    double weight = 0.0;        // prefactor * eigenvalue, >= 0
    Eigen::Vector3cd coeffs;    // unit norm over (X, P, S)
};

struct LindbladSet {
    std::vector<LindbladTerm> items;      // weights descending
    std::vector<ComplexMatrix> operators; // sqrt(weight) (cX X + cP P + cS S)

    // sum_k weight_k coeffs_k coeffs_k^dagger
    Eigen::Matrix3cd reconstruct() const;
};

struct OperatorBasis {
    ComplexMatrix X;
    ComplexMatrix P;
    ComplexMatrix S;

    std::size_t dim() const { return static_cast<std::size_t>(X.rows()); }
    const ComplexMatrix& operator[](int i) const { return i == 0 ? X : (i == 1 ? P : S); }
};

OperatorBasis make_operator_basis(const SquidParams& p, const FockOperators& ops);

/// One Lindblad per eigenvalue above 1e-12 * ||m||_F. Throws NotCompleted
/// unless `m.completed`.
LindbladSet extract_lindblads(const CoefficientMatrix& m, const OperatorBasis& basis);

// Eigen-analysis of an arbitrary Hermitian 3x3 coefficient block.
struct CoefficientEigen {
    Eigen::Vector3d values;   // ascending
    Eigen::Matrix3cd vectors; // columns
};
CoefficientEigen analyze_coefficients(const Eigen::Matrix3cd& m);

/// Born-Markov (NRW) right-hand side: -i[H_S, rho] plus the seven dissipative brackets.
ComplexMatrix bm_rhs(const ComplexMatrix& rho, const SquidParams& p, const OperatorBasis& basis,
                     const ComplexMatrix& h_system);

/// -i[H, rho] + sum_k (L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho})
ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& h_eff, const LindbladSet& l);

/// D_a[rho] for an explicit (already scaled) coefficient matrix.
ComplexMatrix quadratic_dissipator(const ComplexMatrix& rho, const Eigen::Matrix3cd& a,
                                   const OperatorBasis& basis);

/// Hamiltonian left over when the bm_rhs brackets are regrouped into
/// -i[H, rho] + gamma/omega0 * D_a[rho] with the raw NRW matrix a. Built from
/// the truncated matrices themselves, so the regrouping is exact at any N.
/// On low Fock levels it agrees with H_S + H_XP + H_XS + H_PS up to a
/// multiple of the identity.
ComplexMatrix regrouped_hamiltonian(const SquidParams& p, const OperatorBasis& basis,
                                    const ComplexMatrix& h_system);

/// Everything needed to integrate either master equation at one parameter point.
struct DissipativeModel {
    SquidParams params;
    OperatorBasis basis;
    ComplexMatrix h_system;
    ComplexMatrix h_regrouped;
    CoefficientMatrix raw;        // a_SS = 0
    CoefficientMatrix completed;  // det(a) = 0
    LindbladSet lindblads;        // empty if completion failed

    static DissipativeModel build(const SquidParams& p, const FockOperators& ops);

    ComplexMatrix bm(const ComplexMatrix& rho) const;
    ComplexMatrix lindblad(const ComplexMatrix& rho) const;
};

}  // namespace squidbath
