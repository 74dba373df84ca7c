#include "squidbath/squid_model.hpp"

#include <cmath>
#include <numbers>

namespace squidbath {

std::string_view to_string(SineCoupling c) {
    switch (c) {
        case SineCoupling::kJosephsonScaled: return "josephson_scaled";
        case SineCoupling::kBare: return "bare";
    }
    return "josephson_scaled";
}

SineCoupling sine_coupling_from_string(std::string_view name) {
    if (name == "josephson_scaled") return SineCoupling::kJosephsonScaled;
    if (name == "bare") return SineCoupling::kBare;
    throw std::invalid_argument("unknown sine coupling convention '" + std::string(name) + "'");
}

SquidParams SquidParams::with_flux(double phi_fraction) const {
    SquidParams out = *this;
    out.phi = phi_fraction;
    return out;
}

SquidParams SquidParams::with_coupling(double coupling) const {
    SquidParams out = *this;
    out.g = coupling;
    return out;
}

SquidParams derive_params(const DeviceInputs& in, const PhysicalConstants& k, SineCoupling coupling) {
    if (!(in.capacitance_F > 0.0)) throw InvalidDevice("capacitance_F must be > 0");
    if (!(in.inductance_H > 0.0)) throw InvalidDevice("inductance_H must be > 0");
    if (!(in.josephson_energy_J >= 0.0)) throw InvalidDevice("josephson_energy_J must be >= 0");
    if (!(in.damping_ratio >= 0.0)) throw InvalidDevice("damping_ratio must be >= 0");
    if (!(in.cutoff_ratio > 0.0)) throw InvalidDevice("cutoff_ratio must be > 0");
    if (!std::isfinite(in.coupling_ratio) || !std::isfinite(in.flux_fraction)) {
        throw InvalidDevice("coupling_ratio and flux_fraction must be finite");
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    SquidParams p;
    p.omega0 = 1.0 / std::sqrt(in.inductance_H * in.capacitance_F);
    const double hbar_omega0 = k.hbar * p.omega0;
    p.nu_ratio = in.josephson_energy_J / hbar_omega0;

    // beta*nu = 4 pi^2 hbar / (Phi_0^2 C)
    const double beta_nu_ratio =
        two_pi * two_pi * k.hbar / (k.flux_quantum * k.flux_quantum * in.capacitance_F * p.omega0);
    p.s = std::sqrt(beta_nu_ratio);
    p.xi = 1.0 / (2.0 * in.cutoff_ratio);
    p.gamma_ratio = in.damping_ratio;
    p.g = in.coupling_ratio;
    p.phi = in.flux_fraction;
    p.chi_scale = in.inductance_H * hbar_omega0 / (k.flux_quantum * k.flux_quantum);
    p.inductance_H = in.inductance_H;
    p.sine_coupling = coupling;
    p.kappa = coupling == SineCoupling::kJosephsonScaled ? p.nu_ratio * p.s : p.s;

    const double lhs = p.s * p.s;
    const double rhs = two_pi * two_pi * p.chi_scale;
    if (std::abs(lhs - rhs) > 1e-12 * std::abs(lhs)) {
        throw InvalidDevice("derive_params: s^2 = 4 pi^2 chi_scale identity violated");
    }
    return p;
}

double xp_coefficient(const SquidParams& p) {
    const double g = p.g;
    return p.gamma_ratio * (1.5 * g * g - g + 0.5);
}

double xs_coefficient(const SquidParams& p) { return -p.gamma_ratio * p.xi * p.g * p.kappa; }

double ps_coefficient(const SquidParams& p) { return -0.5 * p.gamma_ratio * p.g * p.g * p.kappa; }

// Regrouping -gamma g^2 kappa xi [P,[S,rho]] leaves (i c/2)[P,S] with
// [P,S] = -i s cos(sX + 2 pi phi).
double ps_cosine_coefficient(const SquidParams& p) {
    return -0.5 * p.gamma_ratio * p.g * p.g * p.xi * p.kappa * p.s;
}

namespace {

double flux_phase(const SquidParams& p) { return 2.0 * std::numbers::pi * p.phi; }

}  // namespace

ComplexMatrix build_system_hamiltonian(const SquidParams& p, const FockOperators& ops) {
    const ComplexMatrix& x = ops.X();
    const ComplexMatrix& pm = ops.P();
    ComplexMatrix h = 0.5 * (x * x + pm * pm);
    h -= p.nu_ratio * ops.trig_of_x(p.s, flux_phase(p), TrigKind::kCos);
    return hermitian_part(h);
}

ComplexMatrix build_system_hamiltonian(const SquidParams& p, const FockSpace& space) {
    return build_system_hamiltonian(p, FockOperators(space));
}

ComplexMatrix build_sine_operator(const SquidParams& p, const FockOperators& ops) {
    return ops.trig_of_x(p.s, flux_phase(p), TrigKind::kSin);
}

ComplexMatrix build_sine_operator(const SquidParams& p, const FockSpace& space) {
    return build_sine_operator(p, FockOperators(space));
}

CorrectionTerms build_correction_terms(const SquidParams& p, const FockOperators& ops) {
    const ComplexMatrix& x = ops.X();
    const ComplexMatrix& pm = ops.P();
    const ComplexMatrix s = build_sine_operator(p, ops);
    const ComplexMatrix c = ops.trig_of_x(p.s, flux_phase(p), TrigKind::kCos);

    CorrectionTerms t;
    t.xp = hermitian_part(xp_coefficient(p) * anticommutator(x, pm));
    // Symmetrized X*S so the term stays Hermitian.
    t.xs = hermitian_part(0.5 * xs_coefficient(p) * anticommutator(x, s));
    t.ps = hermitian_part(ps_coefficient(p) * anticommutator(pm, s) + ps_cosine_coefficient(p) * c);
    return t;
}

CorrectionTerms build_correction_terms(const SquidParams& p, const FockSpace& space) {
    return build_correction_terms(p, FockOperators(space));
}

std::string TermSet::label() const {
    if (empty()) return "none";
    std::string out;
    auto add = [&out](const char* name) {
        if (!out.empty()) out += '+';
        out += name;
    };
    if (xp) add("XP");
    if (xs) add("XS");
    if (ps) add("PS");
    return out;
}

TermSet TermSet::parse(std::string_view text) {
    if (text == "none" || text.empty()) return none();
    if (text == "all") return all();
    TermSet t;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('+', start);
        const auto tok = text.substr(start, end == std::string_view::npos ? end : end - start);
        if (tok == "XP") t.xp = true;
        else if (tok == "XS") t.xs = true;
        else if (tok == "PS") t.ps = true;
        else throw std::invalid_argument("unknown correction term '" + std::string(tok) + "'");
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return t;
}

ComplexMatrix effective_hamiltonian(const SquidParams& p, const FockOperators& ops,
                                    const TermSet& include) {
    ComplexMatrix h = build_system_hamiltonian(p, ops);
    if (include.empty()) return h;
    const CorrectionTerms t = build_correction_terms(p, ops);
    if (include.xp) h += t.xp;
    if (include.xs) h += t.xs;
    if (include.ps) h += t.ps;
    return h;
}

// With theta = 2 pi phi: d cos/dtheta = -sin, d sin/dtheta = cos.
FluxDerivatives effective_hamiltonian_flux_derivatives(const SquidParams& p, const FockOperators& ops,
                                                       const TermSet& include) {
    const double w = 2.0 * std::numbers::pi;
    const ComplexMatrix& x = ops.X();
    const ComplexMatrix& pm = ops.P();
    const ComplexMatrix s = ops.trig_of_x(p.s, flux_phase(p), TrigKind::kSin);
    const ComplexMatrix c = ops.trig_of_x(p.s, flux_phase(p), TrigKind::kCos);

    ComplexMatrix d1 = p.nu_ratio * s;
    ComplexMatrix d2 = p.nu_ratio * c;
    if (include.xs) {
        d1 += 0.5 * xs_coefficient(p) * anticommutator(x, c);
        d2 -= 0.5 * xs_coefficient(p) * anticommutator(x, s);
    }
    if (include.ps) {
        d1 += ps_coefficient(p) * anticommutator(pm, c) - ps_cosine_coefficient(p) * s;
        d2 -= ps_coefficient(p) * anticommutator(pm, s) + ps_cosine_coefficient(p) * c;
    }
    return {hermitian_part(w * d1), hermitian_part(w * w * d2)};
}

ComplexMatrix effective_hamiltonian(const SquidParams& p, const FockSpace& space,
                                    const TermSet& include) {
    return effective_hamiltonian(p, FockOperators(space), include);
}

}  // namespace squidbath
