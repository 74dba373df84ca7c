// operator_core.hpp: Truncated Fock-space operator algebra and spectral calculus

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace squidbath {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

class NotHermitian : public std::runtime_error {
public:
    explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};

class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

class DimMismatch : public std::invalid_argument {
public:
    explicit DimMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Working truncation of the oscillator Hilbert space. `pad` extra levels are
// used when evaluating matrix functions and are discarded afterwards.
class FockSpace {
public:
    explicit FockSpace(std::size_t dim, std::size_t pad = 0);

    // pad = dim / 4, the default for trig functions that end up in Hamiltonians.
    static FockSpace with_default_pad(std::size_t dim) { return FockSpace(dim, dim / 4); }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t pad() const noexcept { return pad_; }
    std::size_t padded_dim() const noexcept { return dim_ + pad_; }
    FockSpace padded() const { return FockSpace(dim_ + pad_, 0); }

    bool operator==(const FockSpace&) const = default;

private:
    std::size_t dim_;
    std::size_t pad_;
};

struct EigenDecomposition {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns are orthonormal eigenvectors
};

enum class TrigKind { kSin, kCos };

// a[m, m+1] = sqrt(m+1)
ComplexMatrix annihilator(const FockSpace& space);

struct Quadratures {
    ComplexMatrix X;  // (a + a^dagger)/sqrt(2)
    ComplexMatrix P;  // i(a^dagger - a)/sqrt(2)
};
Quadratures quadratures(const FockSpace& space);

double frobenius_norm(const ComplexMatrix& m);

// ||M - M^dagger||_F
double hermiticity_defect(const ComplexMatrix& m);

// (M + M^dagger)/2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Throws NotHermitian when ||M - M^dagger||_F exceeds 1e-10 ||M||_F and
/// NoConvergence when the iterative solver exhausts its budget.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

// Eigenvalues only; same error contract as hermitian_eig.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// f(scale*A + phase*I) by spectral calculus, f = sin or cos.
ComplexMatrix operator_trig(const ComplexMatrix& a, double scale, double phase, TrigKind kind);

// Same as operator_trig, reusing a precomputed decomposition of A.
ComplexMatrix operator_trig(const EigenDecomposition& eig_a, double scale, double phase,
                            TrigKind kind);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Fock-basis parity diag((-1)^n): conjugation maps X -> -X, P -> -P.
ComplexMatrix parity(const FockSpace& space);

/// Quadratures on the working space together with the spectral data of the
/// padded position operator. Matrix functions of X are evaluated on the
/// padded space and truncated back to dim x dim.
class FockOperators {
public:
    explicit FockOperators(const FockSpace& space);

    const FockSpace& space() const noexcept { return space_; }
    std::size_t dim() const noexcept { return space_.dim(); }
    const ComplexMatrix& X() const noexcept { return x_; }
    const ComplexMatrix& P() const noexcept { return p_; }
    const ComplexMatrix& identity() const noexcept { return id_; }

    // f(scale*X + phase), evaluated with padding then truncated.
    ComplexMatrix trig_of_x(double scale, double phase, TrigKind kind) const;

private:
    FockSpace space_;
    ComplexMatrix x_;
    ComplexMatrix p_;
    ComplexMatrix id_;
    EigenDecomposition padded_x_eig_;
};

}  // namespace squidbath
