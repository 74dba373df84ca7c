// config.hpp: JSON run configuration for the squidbath driver

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <squidbath/dynamics.hpp>
#include <squidbath/spectroscopy.hpp>
#include <squidbath/squid_model.hpp>

namespace squidbath::cli {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

enum class RhsChoice { kLindblad, kBornMarkov, kBoth };

struct Warning {
    std::string kind;  // e.g. "GRangeWarning"
    std::string message;
    double g = 0.0;
};

struct RunConfig {
    DeviceInputs device;
    SineCoupling sine_coupling = SineCoupling::kJosephsonScaled;

    std::size_t dim = 128;
    std::size_t pad = 32;

    double phi_min = 0.0;
    double phi_max = 1.0;
    std::size_t phi_count = 41;
    std::vector<double> g_values{0.3, 1.0, 1.8, 2.5};
    std::size_t levels = 5;
    TermSet include = TermSet::all();
    double fd_step = 1.0 / 400.0;
    double refine_tolerance = 0.01;

    std::size_t dyn_dim = 32;
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::size_t stride = 100;
    InitialStateSpec initial;
    RhsChoice rhs = RhsChoice::kBoth;
    bool snapshots = false;

    std::filesystem::path out_dir = "squidbath_out";
    std::string prefix;

    // Dotted key paths that were not present in the input and took defaults.
    std::vector<std::string> defaulted;
    std::vector<Warning> warnings;

    std::vector<double> phi_grid() const { return linspace(phi_min, phi_max, phi_count); }
    FockSpace space() const { return FockSpace(dim, pad); }
    FockSpace dynamics_space() const { return FockSpace::with_default_pad(dyn_dim); }

    // Echo of every resolved field, defaults included.
    nlohmann::json to_json() const;
};

/// Parses and validates a configuration document. Missing keys take the
/// documented defaults and are listed in `defaulted`. Unknown keys are
/// rejected. Throws ParseError on malformed JSON and ValidationError on
/// type or range violations.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

// Re-checks cross-field invariants after command-line overrides.
void validate(RunConfig& cfg);

std::string_view to_string(RhsChoice r);

}  // namespace squidbath::cli
