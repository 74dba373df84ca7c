#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <squidbath/lindblad.hpp>

namespace squidbath::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, tracking which keys were consumed and which
// defaults were applied.
class Section {
public:
    Section(const json& root, std::string name, RunConfig& cfg) : name_(std::move(name)), cfg_(cfg) {
        if (root.contains(name_)) {
            node_ = &root.at(name_);
            if (!node_->is_object()) throw ValidationError(name_ + " must be an object");
        }
    }

    bool has(const char* key) const { return node_ != nullptr && node_->contains(key); }

    const json* get(const char* key) {
        known_.insert(key);
        if (!has(key)) {
            cfg_.defaulted.push_back(name_ + "." + key);
            return nullptr;
        }
        return &node_->at(key);
    }

    void number(const char* key, double& out) {
        if (const json* v = get(key)) {
            if (!v->is_number()) throw ValidationError(std::string(key) + " must be a number");
            out = v->get<double>();
            if (!std::isfinite(out)) throw ValidationError(std::string(key) + " must be finite");
        }
    }

    void count(const char* key, std::size_t& out) {
        if (const json* v = get(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ValidationError(std::string(key) + " must be a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void text(const char* key, std::string& out) {
        if (const json* v = get(key)) {
            if (!v->is_string()) throw ValidationError(std::string(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    void flag(const char* key, bool& out) {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) throw ValidationError(std::string(key) + " must be a boolean");
            out = v->get<bool>();
        }
    }

    // Marks a key as known without applying a default.
    void allow(const char* key) { known_.insert(key); }

    void reject_unknown() const {
        if (node_ == nullptr) return;
        for (const auto& [key, _] : node_->items()) {
            if (!known_.count(key)) throw ValidationError("unknown key '" + name_ + "." + key + "'");
        }
    }

private:
    std::string name_;
    RunConfig& cfg_;
    const json* node_ = nullptr;
    std::set<std::string> known_;
};

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void parse_device(const json& root, RunConfig& cfg) {
    Section s(root, "device", cfg);
    s.number("josephson_energy_J", cfg.device.josephson_energy_J);
    s.number("capacitance_F", cfg.device.capacitance_F);
    s.number("inductance_H", cfg.device.inductance_H);
    s.number("damping_ratio", cfg.device.damping_ratio);
    s.number("cutoff_ratio", cfg.device.cutoff_ratio);
    s.number("coupling_ratio", cfg.device.coupling_ratio);
    s.number("flux_fraction", cfg.device.flux_fraction);
    s.reject_unknown();
}

void parse_model(const json& root, RunConfig& cfg) {
    Section s(root, "model", cfg);
    std::string name(to_string(cfg.sine_coupling));
    s.text("sine_coupling", name);
    try {
        cfg.sine_coupling = sine_coupling_from_string(name);
    } catch (const std::invalid_argument&) {
        throw ValidationError("sine_coupling must be one of josephson_scaled, bare");
    }
    s.reject_unknown();
}

void parse_space(const json& root, RunConfig& cfg) {
    Section s(root, "space", cfg);
    s.count("dim", cfg.dim);
    if (s.has("pad")) {
        s.count("pad", cfg.pad);
    } else {
        s.get("pad");
        cfg.pad = cfg.dim / 4;
    }
    s.reject_unknown();
}

void parse_sweep(const json& root, RunConfig& cfg) {
    Section s(root, "sweep", cfg);
    s.number("phi_min", cfg.phi_min);
    s.number("phi_max", cfg.phi_max);
    s.count("phi_count", cfg.phi_count);

    const bool has_list = s.has("g");
    const bool has_range = s.has("g_min") || s.has("g_max") || s.has("g_count");
    if (has_list && has_range) throw ValidationError("g and g_min/g_max/g_count are mutually exclusive");
    if (has_range) {
        double lo = 0.0;
        double hi = 0.0;
        std::size_t n = 0;
        if (!s.has("g_min") || !s.has("g_max") || !s.has("g_count")) {
            throw ValidationError("g_min, g_max and g_count must be given together");
        }
        s.number("g_min", lo);
        s.number("g_max", hi);
        s.count("g_count", n);
        if (n == 0) throw ValidationError("g_count must be >= 1");
        if (n > 1 && !(hi > lo)) throw ValidationError("g_max must be > g_min");
        cfg.g_values = linspace(lo, hi, n);
        s.allow("g");
    } else {
        s.allow("g_min");
        s.allow("g_max");
        s.allow("g_count");
        if (const json* v = s.get("g")) {
            if (!v->is_array() || v->empty()) throw ValidationError("g must be a non-empty array of numbers");
            cfg.g_values.clear();
            for (const auto& x : *v) {
                if (!x.is_number()) throw ValidationError("g must be a non-empty array of numbers");
                cfg.g_values.push_back(x.get<double>());
            }
        }
    }

    s.count("levels", cfg.levels);
    std::string include = "all";
    s.text("include", include);
    try {
        cfg.include = TermSet::parse(include);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("include: ") + e.what());
    }
    s.number("fd_step", cfg.fd_step);
    s.number("refine_tolerance", cfg.refine_tolerance);
    s.reject_unknown();
}

void parse_dynamics(const json& root, RunConfig& cfg) {
    Section s(root, "dynamics", cfg);
    s.count("dim", cfg.dyn_dim);
    s.number("dt", cfg.dt);
    s.count("steps", cfg.steps);
    s.count("stride", cfg.stride);

    std::string initial = "coherent";
    s.text("initial", initial);
    if (initial == "coherent") cfg.initial.kind = InitialKind::kCoherent;
    else if (initial == "fock") cfg.initial.kind = InitialKind::kFock;
    else if (initial == "ground") cfg.initial.kind = InitialKind::kGround;
    else throw ValidationError("initial must be one of coherent, fock, ground");

    if (const json* v = s.get("alpha")) {
        if (v->is_number()) {
            cfg.initial.alpha = v->get<double>();
        } else if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
            cfg.initial.alpha = cplx((*v)[0].get<double>(), (*v)[1].get<double>());
        } else {
            throw ValidationError("alpha must be a number or [re, im]");
        }
    }
    s.count("fock_n", cfg.initial.fock_n);

    std::string rhs = "both";
    s.text("rhs", rhs);
    if (rhs == "lindblad") cfg.rhs = RhsChoice::kLindblad;
    else if (rhs == "bm") cfg.rhs = RhsChoice::kBornMarkov;
    else if (rhs == "both") cfg.rhs = RhsChoice::kBoth;
    else throw ValidationError("rhs must be one of lindblad, bm, both");
    s.flag("snapshots", cfg.snapshots);
    s.reject_unknown();
}

void parse_output(const json& root, RunConfig& cfg) {
    Section s(root, "output", cfg);
    std::string dir = cfg.out_dir.string();
    s.text("directory", dir);
    if (dir.empty()) throw ValidationError("directory must be non-empty");
    cfg.out_dir = dir;
    s.text("prefix", cfg.prefix);
    if (cfg.prefix.find('/') != std::string::npos) throw ValidationError("prefix must not contain '/'");
    s.reject_unknown();
}

}  // namespace

std::string_view to_string(RhsChoice r) {
    switch (r) {
        case RhsChoice::kLindblad: return "lindblad";
        case RhsChoice::kBornMarkov: return "bm";
        case RhsChoice::kBoth: return "both";
    }
    return "both";
}

void validate(RunConfig& cfg) {
    try {
        (void)derive_params(cfg.device, {}, cfg.sine_coupling);
    } catch (const InvalidDevice& e) {
        throw ValidationError(e.what());
    }
    if (cfg.dim < 2) throw ValidationError("dim must be >= 2");
    if (cfg.phi_count < 1) throw ValidationError("phi_count must be >= 1");
    if (cfg.phi_count > 1 && !(cfg.phi_max > cfg.phi_min)) throw ValidationError("phi_max must be > phi_min");
    for (std::size_t i = 0; i < cfg.g_values.size(); ++i) {
        if (!std::isfinite(cfg.g_values[i])) throw ValidationError("g values must be finite");
        if (i > 0 && !(cfg.g_values[i] > cfg.g_values[i - 1])) {
            throw ValidationError("g values must be strictly increasing");
        }
    }
    if (cfg.levels < 1) throw ValidationError("levels must be >= 1");
    if (cfg.levels > cfg.dim) throw ValidationError("levels must be <= dim");
    if (!(cfg.fd_step > 0.0 && cfg.fd_step <= 0.05)) throw ValidationError("fd_step must be in (0, 0.05]");
    if (!(cfg.refine_tolerance > 0.0)) throw ValidationError("refine_tolerance must be > 0");
    if (cfg.dyn_dim < 2) throw ValidationError("dynamics.dim must be >= 2");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be > 0");
    if (cfg.steps < 1) throw ValidationError("steps must be >= 1");
    if (cfg.initial.kind == InitialKind::kFock && cfg.initial.fock_n >= cfg.dyn_dim) {
        throw ValidationError("fock_n must be < dynamics.dim");
    }

    cfg.warnings.clear();
    std::vector<double> gs = cfg.g_values;
    if (std::find(gs.begin(), gs.end(), cfg.device.coupling_ratio) == gs.end()) {
        gs.push_back(cfg.device.coupling_ratio);
    }
    for (double g : gs) {
        if (g_range_check(g) == GRange::kOutside) {
            cfg.warnings.push_back({"GRangeWarning",
                                    "g = " + shortest(g) + " outside [0.227, 4.40]; completion may fail", g});
        }
    }
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::ostringstream msg;
        std::string detail = e.what();
        if (const auto pos = detail.find(": "); pos != std::string::npos) detail = detail.substr(pos + 2);
        msg << "config parse error at line " << line << ", column " << col << ": " << detail;
        throw ParseError(msg.str(), line, col);
    }
    if (!root.is_object()) throw ValidationError("config root must be an object");

    static const std::set<std::string> sections = {"device", "model", "space", "sweep", "dynamics", "output"};
    for (const auto& [key, _] : root.items()) {
        if (!sections.count(key)) throw ValidationError("unknown key '" + key + "'");
    }

    RunConfig cfg;
    parse_device(root, cfg);
    parse_model(root, cfg);
    parse_space(root, cfg);
    parse_sweep(root, cfg);
    parse_dynamics(root, cfg);
    parse_output(root, cfg);
    validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

json RunConfig::to_json() const {
    json j;
    j["device"] = {
        {"josephson_energy_J", device.josephson_energy_J},
        {"capacitance_F", device.capacitance_F},
        {"inductance_H", device.inductance_H},
        {"damping_ratio", device.damping_ratio},
        {"cutoff_ratio", device.cutoff_ratio},
        {"coupling_ratio", device.coupling_ratio},
        {"flux_fraction", device.flux_fraction},
    };
    j["model"] = {{"sine_coupling", std::string(to_string(sine_coupling))}};
    j["space"] = {{"dim", dim}, {"pad", pad}};
    j["sweep"] = {
        {"phi_min", phi_min}, {"phi_max", phi_max},   {"phi_count", phi_count},
        {"g", g_values},      {"levels", levels},     {"include", include.label()},
        {"fd_step", fd_step}, {"refine_tolerance", refine_tolerance},
    };
    std::string initial_name = "coherent";
    if (initial.kind == InitialKind::kFock) initial_name = "fock";
    if (initial.kind == InitialKind::kGround) initial_name = "ground";
    j["dynamics"] = {
        {"dim", dyn_dim},
        {"dt", dt},
        {"steps", steps},
        {"stride", stride},
        {"initial", initial_name},
        {"alpha", {initial.alpha.real(), initial.alpha.imag()}},
        {"fock_n", initial.fock_n},
        {"rhs", std::string(to_string(rhs))},
        {"snapshots", snapshots},
    };
    j["output"] = {{"directory", out_dir.string()}, {"prefix", prefix}};
    return j;
}

}  // namespace squidbath::cli
