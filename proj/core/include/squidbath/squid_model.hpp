// squid_model.hpp: SQUID device parameters and the bath-corrected Hamiltonian

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "squidbath/operator_core.hpp"

namespace squidbath {

class InvalidDevice : public std::invalid_argument {
public:
    explicit InvalidDevice(const std::string& what) : std::invalid_argument(what) {}
};

// CODATA values.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;          // J s
    double flux_quantum = 2.067833848e-15;  // Wb
};

// SI device constants plus dimensionless bath/control ratios. Member
// defaults are the reference device used throughout the test suite.
struct DeviceInputs {
    double josephson_energy_J = 6.693e-22;  // hbar*nu
    double capacitance_F = 5e-15;
    double inductance_H = 3e-10;
    double damping_ratio = 0.05;            // gamma / omega0
    double cutoff_ratio = 10.0;             // Omega / omega0
    double coupling_ratio = 1.8;            // g
    double flux_fraction = 0.5;             // Phi_x / Phi_0
};

// Prefactor kappa carried by every sine-coupling term of the dissipator.
//
// kJosephsonScaled: kappa = (nu/omega0) * s. The S operator enters through
//   the first-order expansion of P(-tau), whose Heisenberg derivative is
//   -X - (nu/omega0) s sin(sX + 2 pi phi).
// kBare: kappa = s, the prefactor taken literally from the printed coefficients.
enum class SineCoupling { kJosephsonScaled, kBare };

std::string_view to_string(SineCoupling c);
SineCoupling sine_coupling_from_string(std::string_view name);

struct SquidParams {
    double omega0 = 0.0;       // rad/s, 1/sqrt(LC)
    double nu_ratio = 0.0;     // nu / omega0
    double s = 0.0;            // sqrt(beta nu / omega0), argument scale of cos/sin
    double xi = 0.0;           // omega0 / (2 Omega)
    double gamma_ratio = 0.0;  // gamma / omega0
    double g = 0.0;
    double phi = 0.0;          // Phi_x / Phi_0
    double chi_scale = 0.0;    // L hbar omega0 / Phi_0^2 = s^2 / (4 pi^2)
    double kappa = 0.0;        // sine-coupling prefactor, see SineCoupling
    double inductance_H = 0.0;
    SineCoupling sine_coupling = SineCoupling::kJosephsonScaled;

    SquidParams with_flux(double phi_fraction) const;
    SquidParams with_coupling(double coupling) const;
};

/// Derives the dimensionless model parameters from SI device constants.
///
/// Throws InvalidDevice on nonpositive C, L or Omega/omega0, negative
/// Josephson energy or damping, and if the internal identity
/// s^2 = 4 pi^2 chi_scale fails to 1e-12 relative.
SquidParams derive_params(const DeviceInputs& inputs, const PhysicalConstants& constants = {},
                          SineCoupling coupling = SineCoupling::kJosephsonScaled);

// Coefficients of the effective-Hamiltonian corrections in hbar*omega0 units.
// H_XP = xp * {X,P};  H_XS = xs * (1/2){X,S};
// H_PS = ps * {P,S} + ps_cos * cos(sX + 2 pi phi).
double xp_coefficient(const SquidParams& p);
double xs_coefficient(const SquidParams& p);
double ps_coefficient(const SquidParams& p);
double ps_cosine_coefficient(const SquidParams& p);

// H_S / (hbar omega0) = X^2/2 + P^2/2 - (nu/omega0) cos(sX + 2 pi phi)
ComplexMatrix build_system_hamiltonian(const SquidParams& p, const FockOperators& ops);
ComplexMatrix build_system_hamiltonian(const SquidParams& p, const FockSpace& space);

// S = sin(sX + 2 pi phi)
ComplexMatrix build_sine_operator(const SquidParams& p, const FockOperators& ops);
ComplexMatrix build_sine_operator(const SquidParams& p, const FockSpace& space);

struct CorrectionTerms {
    ComplexMatrix xp;
    ComplexMatrix xs;
    ComplexMatrix ps;
};

CorrectionTerms build_correction_terms(const SquidParams& p, const FockOperators& ops);
CorrectionTerms build_correction_terms(const SquidParams& p, const FockSpace& space);

// Subset of {XP, XS, PS}.
struct TermSet {
    bool xp = false;
    bool xs = false;
    bool ps = false;

    static TermSet none() { return {}; }
    static TermSet all() { return {true, true, true}; }
    bool empty() const { return !xp && !xs && !ps; }
    bool operator==(const TermSet&) const = default;

    // "XP+XS" style label, "none" for the empty set.
    std::string label() const;
    // Accepts the label() format plus "all"; throws std::invalid_argument.
    static TermSet parse(std::string_view text);
};

ComplexMatrix effective_hamiltonian(const SquidParams& p, const FockOperators& ops,
                                    const TermSet& include);
ComplexMatrix effective_hamiltonian(const SquidParams& p, const FockSpace& space,
                                    const TermSet& include);

struct FluxDerivatives {
    ComplexMatrix first;   // dH'/dphi
    ComplexMatrix second;  // d^2H'/dphi^2
};

// Exact phi-derivatives of effective_hamiltonian at the same truncation.
FluxDerivatives effective_hamiltonian_flux_derivatives(const SquidParams& p, const FockOperators& ops,
                                                       const TermSet& include);

}  // namespace squidbath
