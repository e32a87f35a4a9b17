#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlks/error.hpp"
#include "nlks/grid.hpp"
#include "nlks/io.hpp"
#include "nlks/params.hpp"
#include "nlks/regimes.hpp"

namespace nlks {

enum class Scenario { Simulate, Sandwich, OdeOnly, RegimeSweep, BlowupProbe };

inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::Simulate: return "simulate";
        case Scenario::Sandwich: return "sandwich";
        case Scenario::OdeOnly: return "ode";
        case Scenario::RegimeSweep: return "sweep";
        case Scenario::BlowupProbe: return "probe";
    }
    return "simulate";
}

inline std::optional<Scenario> scenario_from_string(std::string_view s) {
    for (auto sc : {Scenario::Simulate, Scenario::Sandwich, Scenario::OdeOnly, Scenario::RegimeSweep,
                    Scenario::BlowupProbe}) {
        if (to_string(sc) == s) return sc;
    }
    return std::nullopt;
}

struct GridSpec {
    int dim = 1;
    std::vector<double> extents{1.0};
    std::vector<std::size_t> cells{256};

    Grid build() const { return make_grid(dim, extents, cells); }
};

/// Built-in smooth initial data, or samples read from a file.
struct InitialSpec {
    enum class Kind { Constant, Gaussian, Cosine, RandomCosine, File };
    Kind kind = Kind::Constant;
    std::optional<double> value;   // constant; unset means xi
    std::vector<double> center;    // gaussian; unset means domain center
    double width = 0.1;            // gaussian
    double amplitude = 0.5;        // gaussian peak height / cosine relative amplitude
    double floor = 0.0;            // gaussian background level
    std::optional<double> base;    // cosine / random_cosine mean level; unset means xi
    int modes = 4;                 // random_cosine
    std::string path;              // file
};

struct OdeSpec {
    double t_final = 50.0;
    double dt = 1e-2;
    std::size_t stride = 10;
};

struct ProbeSpec {
    bool zero_reaction = true;
    bool with_reaction = true;
};

struct OutputSpec {
    std::string csv = "diagnostics.csv";
    std::string json = "run.json";
};

struct RunConfig {
    Scenario scenario = Scenario::Simulate;
    GridSpec grid;
    Params params;
    InitialSpec initial;
    double margin = 0.01;
    std::optional<double> sandwich_tolerance;  // unset means 1e-3 xi
    OdeSpec ode;
    SweepGrid sweep;
    ProbeSpec probe;
    OutputSpec output;
    std::uint64_t seed = 0;

    double effective_sandwich_tolerance() const { return sandwich_tolerance.value_or(1e-3 * params.xi()); }
};

// ---- initial data --------------------------------------------------------

inline Field make_initial_field(const InitialSpec& spec, const Grid& grid, double xi, std::uint64_t seed) {
    using Kind = InitialSpec::Kind;
    const double pi = std::numbers::pi;
    const double lx = grid.extent(0);
    const double ly = grid.extent(1);
    switch (spec.kind) {
        case Kind::Constant:
            return Field(grid, spec.value.value_or(xi));
        case Kind::Gaussian: {
            std::vector<double> c = spec.center;
            if (c.empty()) c = {0.5 * lx, 0.5 * ly};
            if (c.size() < static_cast<std::size_t>(grid.dim())) {
                throw ConfigError("initial.center needs one coordinate per axis");
            }
            const double w2 = 2.0 * spec.width * spec.width;
            if (grid.dim() == 1) {
                return sample(grid, [&](double x) {
                    return spec.floor + spec.amplitude * std::exp(-(x - c[0]) * (x - c[0]) / w2);
                });
            }
            return sample(grid, [&](double x, double y) {
                const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]);
                return spec.floor + spec.amplitude * std::exp(-r2 / w2);
            });
        }
        case Kind::Cosine: {
            const double b = spec.base.value_or(xi);
            if (grid.dim() == 1) {
                return sample(grid, [&](double x) { return b * (1.0 + spec.amplitude * std::cos(pi * x / lx)); });
            }
            return sample(grid, [&](double x, double y) {
                return b * (1.0 + spec.amplitude * std::cos(pi * x / lx) * std::cos(pi * y / ly));
            });
        }
        case Kind::RandomCosine: {
            // Random Neumann modes with total relative amplitude <= amplitude.
            const double b = spec.base.value_or(xi);
            std::mt19937_64 rng(seed);
            const int kmax = spec.modes;
            const int ky_max = grid.dim() == 2 ? kmax : 0;
            std::vector<double> coef;
            for (int kx = 0; kx <= kmax; ++kx) {
                for (int ky = 0; ky <= ky_max; ++ky) {
                    coef.push_back(std::generate_canonical<double, 53>(rng) * 2.0 - 1.0);
                }
            }
            double total = 0.0;
            for (std::size_t i = 1; i < coef.size(); ++i) total += std::abs(coef[i]);
            const double scale = total > 0.0 ? spec.amplitude / total : 0.0;
            auto eval = [&](double x, double y) {
                double s = 0.0;
                std::size_t idx = 0;
                for (int kx = 0; kx <= kmax; ++kx) {
                    for (int ky = 0; ky <= ky_max; ++ky, ++idx) {
                        if (kx == 0 && ky == 0) continue;
                        s += coef[idx] * std::cos(kx * pi * x / lx) * std::cos(ky * pi * y / ly);
                    }
                }
                return b * (1.0 + scale * s);
            };
            if (grid.dim() == 1) return sample(grid, [&](double x) { return eval(x, 0.0); });
            return sample(grid, eval);
        }
        case Kind::File: {
            std::istringstream in(read_text(spec.path));
            std::vector<double> v;
            std::string tok;
            while (in >> tok) {
                std::string_view sv(tok);
                while (!sv.empty() && sv.back() == ',') sv.remove_suffix(1);
                if (!sv.empty()) v.push_back(parse_double(sv));
            }
            if (v.size() != grid.size()) {
                throw ConfigError("initial datum file " + spec.path + " has " + std::to_string(v.size()) +
                                  " values, grid needs " + std::to_string(grid.size()));
            }
            return Field(grid, std::move(v));
        }
    }
    throw ConfigError("unknown initial datum type");
}

// ---- parsing -------------------------------------------------------------

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::string_view section,
                           std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw ConfigError(std::string(section) + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || k == key;
        if (!ok) {
            throw ConfigError("unknown field '" + (section.empty() ? "" : std::string(section) + ".") + key + "'");
        }
    }
}

inline double get_number(const nlohmann::json& obj, std::string_view section, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing field '" + std::string(section) + "." + key + "'");
    if (!it->is_number()) throw ConfigError("field '" + std::string(section) + "." + key + "' must be a number");
    return it->get<double>();
}

inline double get_number_or(const nlohmann::json& obj, std::string_view section, const char* key, double dflt) {
    return obj.contains(key) ? get_number(obj, section, key) : dflt;
}

inline std::vector<double> axis_values(const nlohmann::json& j, const std::string& name) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& x : j) {
            if (!x.is_number()) throw ConfigError("sweep." + name + " must hold numbers");
            v.push_back(x.get<double>());
        }
        return v;
    }
    if (j.is_object()) {
        reject_unknown(j, "sweep." + name, {"min", "max", "count"});
        const double lo = get_number(j, "sweep." + name, "min");
        const double hi = get_number(j, "sweep." + name, "max");
        const auto count = static_cast<std::size_t>(get_number(j, "sweep." + name, "count"));
        if (count == 0) throw ConfigError("sweep." + name + ".count must be positive");
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return v;
    }
    throw ConfigError("sweep." + name + " must be a number, a list or {min, max, count}");
}

inline std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline RunConfig parse_config_document(std::string_view text, std::optional<Scenario> fallback);

/**
 * Parses and validates a JSON run configuration. `fallback` supplies the
 * scenario when the document does not name one (the CLI subcommand); a
 * document naming a different scenario is rejected.
 */
inline RunConfig parse_config_document(std::string_view text, std::optional<Scenario> fallback) {
    using detail::get_number;
    using detail::get_number_or;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error at " + detail::line_col(text, e.byte) + ": " + e.what());
    }
    detail::reject_unknown(doc, "", {"scenario", "grid", "params", "numerical", "initial", "comparison", "ode",
                                     "sweep", "probe", "output", "seed"});
    RunConfig cfg;

    if (doc.contains("scenario")) {
        const auto name = doc["scenario"].is_string() ? doc["scenario"].get<std::string>() : std::string();
        const auto sc = scenario_from_string(name);
        if (!sc) throw ConfigError("unknown scenario '" + name + "'");
        if (fallback && *fallback != *sc) {
            throw ConfigError("config scenario '" + name + "' does not match command '" +
                              std::string(to_string(*fallback)) + "'");
        }
        cfg.scenario = *sc;
    } else if (fallback) {
        cfg.scenario = *fallback;
    } else {
        throw ConfigError("missing field 'scenario'");
    }

    if (!doc.contains("grid")) throw ConfigError("missing field 'grid'");
    {
        const auto& g = doc["grid"];
        detail::reject_unknown(g, "grid", {"dim", "extents", "cells"});
        cfg.grid.dim = static_cast<int>(get_number(g, "grid", "dim"));
        cfg.grid.extents.clear();
        cfg.grid.cells.clear();
        if (!g.contains("cells") || !g["cells"].is_array()) throw ConfigError("grid.cells must be a list");
        for (const auto& c : g["cells"]) {
            if (!c.is_number_integer() || c.get<long long>() < 1) {
                throw ConfigError("grid.cells must hold positive integers");
            }
            cfg.grid.cells.push_back(c.get<std::size_t>());
        }
        if (g.contains("extents")) {
            if (!g["extents"].is_array()) throw ConfigError("grid.extents must be a list");
            for (const auto& e : g["extents"]) {
                if (!e.is_number()) throw ConfigError("grid.extents must hold numbers");
                cfg.grid.extents.push_back(e.get<double>());
            }
        } else {
            cfg.grid.extents.assign(cfg.grid.cells.size(), 1.0);
        }
        try {
            (void)cfg.grid.build();
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("grid: ") + e.what());
        }
    }

    if (!doc.contains("params")) throw ConfigError("missing field 'params'");
    {
        const auto& p = doc["params"];
        detail::reject_unknown(p, "params", {"n", "alpha", "beta", "gamma", "m", "chi", "lambda", "sigma"});
        cfg.params.n = static_cast<int>(get_number_or(p, "params", "n", 3));
        cfg.params.reaction.alpha = get_number(p, "params", "alpha");
        cfg.params.reaction.beta = get_number(p, "params", "beta");
        cfg.params.gamma = get_number(p, "params", "gamma");
        cfg.params.m = get_number(p, "params", "m");
        cfg.params.chi = get_number(p, "params", "chi");
        cfg.params.reaction.lambda = get_number(p, "params", "lambda");
        cfg.params.reaction.sigma = get_number(p, "params", "sigma");
    }

    auto& num = cfg.params.numerical;
    if (doc.contains("numerical")) {
        const auto& n = doc["numerical"];
        detail::reject_unknown(n, "numerical", {"dt_initial", "dt_min", "dt_max", "cfl_safety",
                                                "blow_up_threshold", "t_final", "record_interval", "lk_order",
                                                "solver_tolerance", "max_steps", "diffusion"});
        num.dt_initial = get_number_or(n, "numerical", "dt_initial", num.dt_initial);
        num.dt_min = get_number_or(n, "numerical", "dt_min", num.dt_min);
        num.dt_max = get_number_or(n, "numerical", "dt_max", num.dt_max);
        num.cfl_safety = get_number_or(n, "numerical", "cfl_safety", num.cfl_safety);
        if (n.contains("blow_up_threshold") && !n["blow_up_threshold"].is_null()) {
            num.blow_up_threshold = get_number(n, "numerical", "blow_up_threshold");
        }
        num.t_final = get_number_or(n, "numerical", "t_final", num.t_final);
        num.record_interval = get_number_or(n, "numerical", "record_interval", num.record_interval);
        num.lk_order = get_number_or(n, "numerical", "lk_order", num.lk_order);
        num.solver_tolerance = get_number_or(n, "numerical", "solver_tolerance", num.solver_tolerance);
        num.max_steps = static_cast<std::size_t>(
            get_number_or(n, "numerical", "max_steps", static_cast<double>(num.max_steps)));
        if (n.contains("diffusion")) {
            const auto d = n["diffusion"].is_string() ? n["diffusion"].get<std::string>() : std::string();
            if (d == "backward_euler") num.diffusion = DiffusionScheme::BackwardEuler;
            else if (d == "crank_nicolson") num.diffusion = DiffusionScheme::CrankNicolson;
            else throw ConfigError("numerical.diffusion must be 'backward_euler' or 'crank_nicolson'");
        }
    }
    if (!doc.contains("numerical") || !doc["numerical"].contains("record_interval")) {
        num.record_interval = num.t_final / 100.0;
    }
    try {
        cfg.params.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("parameter out of range: ") + e.what());
    }

    if (doc.contains("initial")) {
        const auto& in = doc["initial"];
        detail::reject_unknown(in, "initial", {"type", "value", "center", "width", "amplitude", "floor", "base",
                                               "modes", "path"});
        const auto type = in.value("type", std::string("constant"));
        using Kind = InitialSpec::Kind;
        auto& s = cfg.initial;
        if (type == "constant") s.kind = Kind::Constant;
        else if (type == "gaussian") s.kind = Kind::Gaussian;
        else if (type == "cosine") s.kind = Kind::Cosine;
        else if (type == "random_cosine") s.kind = Kind::RandomCosine;
        else if (type == "file") s.kind = Kind::File;
        else throw ConfigError("unknown initial.type '" + type + "'");
        if (in.contains("value")) {
            if (in["value"].is_string() && in["value"].get<std::string>() == "xi") s.value.reset();
            else s.value = get_number(in, "initial", "value");
        }
        if (in.contains("center")) {
            for (const auto& c : in["center"]) s.center.push_back(c.get<double>());
        }
        s.width = get_number_or(in, "initial", "width", s.width);
        s.amplitude = get_number_or(in, "initial", "amplitude", s.amplitude);
        s.floor = get_number_or(in, "initial", "floor", s.floor);
        if (in.contains("base")) s.base = get_number(in, "initial", "base");
        s.modes = static_cast<int>(get_number_or(in, "initial", "modes", s.modes));
        s.path = in.value("path", std::string());
        if (s.kind == Kind::Gaussian && !(s.width > 0.0)) throw ConfigError("initial.width must be positive");
        if (s.kind == Kind::RandomCosine && s.modes < 1) throw ConfigError("initial.modes must be >= 1");
        if (s.kind == Kind::File && s.path.empty()) throw ConfigError("initial.path is required for type 'file'");
    }

    if (doc.contains("comparison")) {
        const auto& c = doc["comparison"];
        detail::reject_unknown(c, "comparison", {"margin", "tolerance"});
        cfg.margin = get_number_or(c, "comparison", "margin", cfg.margin);
        if (c.contains("tolerance") && !c["tolerance"].is_null()) {
            cfg.sandwich_tolerance = get_number(c, "comparison", "tolerance");
        }
        if (!(cfg.margin > 0.0 && cfg.margin < 1.0)) throw ConfigError("comparison.margin must lie in (0, 1)");
    }

    cfg.ode.t_final = cfg.params.reaction.lambda > 0.0 ? 50.0 / cfg.params.reaction.lambda : 50.0;
    if (doc.contains("ode")) {
        const auto& o = doc["ode"];
        detail::reject_unknown(o, "ode", {"t_final", "dt", "stride"});
        cfg.ode.t_final = get_number_or(o, "ode", "t_final", cfg.ode.t_final);
        cfg.ode.dt = get_number_or(o, "ode", "dt", cfg.ode.dt);
        cfg.ode.stride = static_cast<std::size_t>(get_number_or(o, "ode", "stride", static_cast<double>(cfg.ode.stride)));
        if (!(cfg.ode.t_final > 0.0) || !(cfg.ode.dt > 0.0) || cfg.ode.stride == 0) {
            throw ConfigError("ode.t_final, ode.dt and ode.stride must be positive");
        }
    }

    {
        const Params& p = cfg.params;
        cfg.sweep = SweepGrid{{p.reaction.alpha}, {p.reaction.beta}, {p.gamma}, {p.m}, {p.chi}, {p.reaction.lambda}};
        if (doc.contains("sweep")) {
            const auto& s = doc["sweep"];
            detail::reject_unknown(s, "sweep", {"alpha", "beta", "gamma", "m", "chi", "lambda"});
            auto axis = [&](const char* key, std::vector<double>& out) {
                if (s.contains(key)) out = detail::axis_values(s[key], key);
                if (out.empty()) throw ConfigError(std::string("sweep.") + key + " is empty");
            };
            axis("alpha", cfg.sweep.alpha);
            axis("beta", cfg.sweep.beta);
            axis("gamma", cfg.sweep.gamma);
            axis("m", cfg.sweep.m);
            axis("chi", cfg.sweep.chi);
            axis("lambda", cfg.sweep.lambda);
        }
    }

    if (doc.contains("probe")) {
        const auto& p = doc["probe"];
        detail::reject_unknown(p, "probe", {"zero_reaction", "with_reaction"});
        cfg.probe.zero_reaction = p.value("zero_reaction", true);
        cfg.probe.with_reaction = p.value("with_reaction", true);
        if (!cfg.probe.zero_reaction && !cfg.probe.with_reaction) {
            throw ConfigError("probe needs at least one of zero_reaction / with_reaction");
        }
    }

    if (doc.contains("output")) {
        const auto& o = doc["output"];
        detail::reject_unknown(o, "output", {"csv", "json"});
        cfg.output.csv = o.value("csv", cfg.output.csv);
        cfg.output.json = o.value("json", cfg.output.json);
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (cfg.scenario == Scenario::Sandwich || cfg.scenario == Scenario::OdeOnly) {
        const Field u0 = make_initial_field(cfg.initial, cfg.grid.build(), cfg.params.xi(), cfg.seed);
        if (!(u0.min() > 0.0)) {
            throw ConfigError("initial datum must be strictly positive (min u0 > 0) for the " +
                              std::string(to_string(cfg.scenario)) +
                              " scenario: the comparison pair needs a positive lower bound");
        }
    }
    if (cfg.scenario == Scenario::BlowupProbe && cfg.probe.with_reaction && !(cfg.params.reaction.lambda > 0.0)) {
        throw ConfigError("probe with_reaction needs lambda > 0");
    }
    return cfg;
}

inline RunConfig parse_config(std::string_view text, std::optional<Scenario> fallback = std::nullopt) {
    try {
        return parse_config_document(text, fallback);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

// ---- echo ----------------------------------------------------------------

/// Effective configuration, defaults included. `u0_sup` resolves the default blow-up threshold.
inline nlohmann::json to_json(const RunConfig& cfg, std::optional<double> u0_sup = std::nullopt) {
    using nlohmann::json;
    const auto& p = cfg.params;
    const auto& n = p.numerical;
    json j;
    j["scenario"] = std::string(to_string(cfg.scenario));
    j["grid"] = {{"dim", cfg.grid.dim}, {"extents", cfg.grid.extents}, {"cells", cfg.grid.cells}};
    j["params"] = {{"n", p.n},         {"alpha", p.reaction.alpha}, {"beta", p.reaction.beta},
                   {"gamma", p.gamma}, {"m", p.m},                  {"chi", p.chi},
                   {"lambda", p.reaction.lambda}, {"sigma", p.reaction.sigma}};
    json threshold = nullptr;
    if (n.blow_up_threshold) threshold = *n.blow_up_threshold;
    else if (u0_sup) threshold = 1e6 * std::max(p.xi(), *u0_sup);
    j["numerical"] = {{"dt_initial", n.dt_initial},
                      {"dt_min", n.dt_min},
                      {"dt_max", n.dt_max},
                      {"cfl_safety", n.cfl_safety},
                      {"blow_up_threshold", threshold},
                      {"t_final", n.t_final},
                      {"record_interval", n.record_interval},
                      {"lk_order", n.lk_order},
                      {"solver_tolerance", n.solver_tolerance},
                      {"max_steps", n.max_steps},
                      {"diffusion", n.diffusion == DiffusionScheme::CrankNicolson ? "crank_nicolson" : "backward_euler"}};
    const auto& s = cfg.initial;
    using Kind = InitialSpec::Kind;
    json init;
    switch (s.kind) {
        case Kind::Constant: init = {{"type", "constant"}, {"value", s.value.value_or(p.xi())}}; break;
        case Kind::Gaussian: {
            std::vector<double> c = s.center;
            if (c.empty()) c = {0.5 * cfg.grid.extents[0], cfg.grid.dim == 2 ? 0.5 * cfg.grid.extents[1] : 0.5};
            c.resize(static_cast<std::size_t>(cfg.grid.dim));
            init = {{"type", "gaussian"}, {"center", c}, {"width", s.width}, {"amplitude", s.amplitude}, {"floor", s.floor}};
            break;
        }
        case Kind::Cosine: init = {{"type", "cosine"}, {"amplitude", s.amplitude}, {"base", s.base.value_or(p.xi())}}; break;
        case Kind::RandomCosine:
            init = {{"type", "random_cosine"}, {"amplitude", s.amplitude}, {"base", s.base.value_or(p.xi())}, {"modes", s.modes}};
            break;
        case Kind::File: init = {{"type", "file"}, {"path", s.path}}; break;
    }
    j["initial"] = init;
    j["comparison"] = {{"margin", cfg.margin}, {"tolerance", cfg.effective_sandwich_tolerance()}};
    j["ode"] = {{"t_final", cfg.ode.t_final}, {"dt", cfg.ode.dt}, {"stride", cfg.ode.stride}};
    j["sweep"] = {{"alpha", cfg.sweep.alpha}, {"beta", cfg.sweep.beta}, {"gamma", cfg.sweep.gamma},
                  {"m", cfg.sweep.m},         {"chi", cfg.sweep.chi},   {"lambda", cfg.sweep.lambda}};
    j["probe"] = {{"zero_reaction", cfg.probe.zero_reaction}, {"with_reaction", cfg.probe.with_reaction}};
    j["output"] = {{"csv", cfg.output.csv}, {"json", cfg.output.json}};
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace nlks
