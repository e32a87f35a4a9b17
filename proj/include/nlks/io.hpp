#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "nlks/comparison.hpp"
#include "nlks/diagnostics.hpp"
#include "nlks/dynamics.hpp"
#include "nlks/error.hpp"
#include "nlks/regimes.hpp"

namespace nlks {

inline constexpr std::string_view kSchemaVersion = "1";

// Frozen: plotting scripts index columns by this order.
inline constexpr std::array<std::string_view, 12> kCsvColumns = {
    "t",      "l1",     "l2",     "lk",   "linf",  "min_u",
    "dist_u", "dist_c", "nonlocal_factor", "ubar", "ulow", "clamped_mass"};

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InvalidArgument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline std::string csv_header() {
    std::string h;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i) h += ',';
        h += kCsvColumns[i];
    }
    return h;
}

inline std::string to_csv(std::span<const DiagnosticsRow> rows) {
    std::string out = csv_header() + '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : rows) {
        out += format_double(r.t) + ',' + format_double(r.l1) + ',' + format_double(r.l2) + ',' +
               format_double(r.lk) + ',' + format_double(r.linf) + ',' + format_double(r.min_u) +
               ',' + format_double(r.dist_u) + ',' + format_double(r.dist_c) + ',' +
               format_double(r.nonlocal_factor) + ',' + opt(r.ubar) + ',' + opt(r.ulow) + ',' +
               format_double(r.clamped_mass) + '\n';
    }
    return out;
}

inline std::vector<DiagnosticsRow> parse_csv(std::string_view text) {
    std::vector<DiagnosticsRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) {
        throw InvalidArgument("diagnostics CSV has an unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != kCsvColumns.size()) {
            throw InvalidArgument("diagnostics CSV row has " + std::to_string(cells.size()) + " columns");
        }
        auto opt = [](std::string_view s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return parse_double(s);
        };
        DiagnosticsRow r;
        r.t = parse_double(cells[0]);
        r.l1 = parse_double(cells[1]);
        r.l2 = parse_double(cells[2]);
        r.lk = parse_double(cells[3]);
        r.linf = parse_double(cells[4]);
        r.min_u = parse_double(cells[5]);
        r.dist_u = parse_double(cells[6]);
        r.dist_c = parse_double(cells[7]);
        r.nonlocal_factor = parse_double(cells[8]);
        r.ubar = opt(cells[9]);
        r.ulow = opt(cells[10]);
        r.clamped_mass = parse_double(cells[11]);
        rows.push_back(r);
    }
    return rows;
}

inline void write_text(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed", path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_csv(std::span<const DiagnosticsRow> rows, const std::string& path) {
    write_text(path, to_csv(rows));
}

inline std::vector<DiagnosticsRow> read_csv(const std::string& path) {
    return parse_csv(read_text(path));
}

// ---- JSON ----------------------------------------------------------------

namespace detail {
inline nlohmann::json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}
inline double num_or_nan(const nlohmann::json& j) {
    return j.is_null() ? std::nan("") : j.get<double>();
}
}  // namespace detail

inline nlohmann::json to_json(const DiagnosticsRow& r) {
    using detail::num;
    nlohmann::json j;
    j["t"] = num(r.t);
    j["l1"] = num(r.l1);
    j["l2"] = num(r.l2);
    j["lk"] = num(r.lk);
    j["linf"] = num(r.linf);
    j["min_u"] = num(r.min_u);
    j["dist_u"] = num(r.dist_u);
    j["dist_c"] = num(r.dist_c);
    j["nonlocal_factor"] = num(r.nonlocal_factor);
    j["ubar"] = r.ubar ? num(*r.ubar) : nlohmann::json(nullptr);
    j["ulow"] = r.ulow ? num(*r.ulow) : nlohmann::json(nullptr);
    j["clamped_mass"] = num(r.clamped_mass);
    return j;
}

inline DiagnosticsRow row_from_json(const nlohmann::json& j) {
    using detail::num_or_nan;
    DiagnosticsRow r;
    r.t = num_or_nan(j.at("t"));
    r.l1 = num_or_nan(j.at("l1"));
    r.l2 = num_or_nan(j.at("l2"));
    r.lk = num_or_nan(j.at("lk"));
    r.linf = num_or_nan(j.at("linf"));
    r.min_u = num_or_nan(j.at("min_u"));
    r.dist_u = num_or_nan(j.at("dist_u"));
    r.dist_c = num_or_nan(j.at("dist_c"));
    r.nonlocal_factor = num_or_nan(j.at("nonlocal_factor"));
    if (!j.at("ubar").is_null()) r.ubar = j.at("ubar").get<double>();
    if (!j.at("ulow").is_null()) r.ulow = j.at("ulow").get<double>();
    r.clamped_mass = num_or_nan(j.at("clamped_mass"));
    return r;
}

inline nlohmann::json to_json(const RunStatus& s) {
    return {{"kind", std::string(to_string(s.kind))}, {"time", detail::num(s.time)}, {"message", s.message}};
}

inline RunStatus status_from_json(const nlohmann::json& j) {
    RunStatus s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "completed") s.kind = RunStatus::Kind::Completed;
    else if (kind == "blow_up") s.kind = RunStatus::Kind::BlowUp;
    else if (kind == "solver_failure") s.kind = RunStatus::Kind::SolverFailure;
    else throw InvalidArgument("unknown run status '" + kind + "'");
    s.time = detail::num_or_nan(j.at("time"));
    s.message = j.value("message", "");
    return s;
}

inline nlohmann::json to_json(const RunStats& s) {
    using detail::num;
    return {{"steps", s.steps},
            {"dt_first", num(s.dt_first)},
            {"dt_smallest", num(s.dt_smallest)},
            {"dt_last", num(s.dt_last)},
            {"sup_linf", num(s.sup_linf)},
            {"initial_mass", num(s.initial_mass)},
            {"blow_up_threshold", num(s.blow_up_threshold)},
            {"max_relative_mass_drift", num(s.max_relative_mass_drift)}};
}

inline RunStats stats_from_json(const nlohmann::json& j) {
    using detail::num_or_nan;
    RunStats s;
    s.steps = j.at("steps").get<std::size_t>();
    s.dt_first = num_or_nan(j.at("dt_first"));
    s.dt_smallest = num_or_nan(j.at("dt_smallest"));
    s.dt_last = num_or_nan(j.at("dt_last"));
    s.sup_linf = num_or_nan(j.at("sup_linf"));
    s.initial_mass = num_or_nan(j.at("initial_mass"));
    s.blow_up_threshold = num_or_nan(j.at("blow_up_threshold"));
    s.max_relative_mass_drift = num_or_nan(j.at("max_relative_mass_drift"));
    return s;
}

inline nlohmann::json to_json(const RegimeReport& r) {
    const auto& d = r.details;
    return {{"existence", std::string(to_string(r.existence))},
            {"collapse_bound", std::string(to_string(r.collapse_bound))},
            {"convergence", std::string(to_string(r.convergence))},
            {"details",
             {{"gamma_plus_m", d.gamma_plus_m},
              {"branch1_upper", d.branch1_upper},
              {"branch2_lower", d.branch2_lower},
              {"collapse_threshold", d.collapse_threshold},
              {"alpha_plus_beta", d.alpha_plus_beta},
              {"two_chi", d.two_chi},
              {"branch1", d.branch1},
              {"branch2", d.branch2},
              {"exponents_for_convergence", d.exponents_for_convergence},
              {"lambda_dominates", d.lambda_dominates}}}};
}

inline nlohmann::json to_json(const RunRecord& rec) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rec.rows) rows.push_back(to_json(r));
    return {{"status", to_json(rec.status)}, {"stats", to_json(rec.stats)}, {"rows", std::move(rows)}};
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord rec;
    rec.status = status_from_json(j.at("status"));
    rec.stats = stats_from_json(j.at("stats"));
    for (const auto& r : j.at("rows")) rec.rows.push_back(row_from_json(r));
    return rec;
}

/**
 * Run document: schema_version, the run record, and optionally the regime
 * report, the effective configuration and scenario-specific extras.
 */
inline nlohmann::json run_document(const RunRecord& rec, const std::optional<RegimeReport>& regime,
                                   const nlohmann::json& config = nullptr,
                                   const nlohmann::json& extra = nullptr) {
    nlohmann::json doc = to_json(rec);
    doc["schema_version"] = std::string(kSchemaVersion);
    doc["regime"] = regime ? to_json(*regime) : nlohmann::json(nullptr);
    if (!config.is_null()) doc["config"] = config;
    if (!extra.is_null()) doc["summary"] = extra;
    return doc;
}

inline void write_json(const nlohmann::json& doc, const std::string& path) {
    write_text(path, doc.dump(2) + '\n');
}

inline void write_json(const RunRecord& rec, const std::optional<RegimeReport>& regime,
                       const std::string& path) {
    write_json(run_document(rec, regime), path);
}

inline RunRecord read_run_json(const std::string& path) {
    const auto text = read_text(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("invalid JSON (") + e.what() + ")", path);
    }
    if (j.value("schema_version", "") != kSchemaVersion) {
        throw IoError("unsupported schema_version", path);
    }
    return run_record_from_json(j);
}

/// Comparison trajectory as CSV: t, ubar, ulow, upper_gap, lower_gap.
inline std::string trajectory_csv(const ComparisonTrajectory& traj) {
    std::string out = "t,ubar,ulow,upper_gap,lower_gap\n";
    for (const auto& s : traj.points) {
        out += format_double(s.t) + ',' + format_double(s.upper()) + ',' + format_double(s.lower()) +
               ',' + format_double(s.upper_gap()) + ',' + format_double(s.lower_gap()) + '\n';
    }
    return out;
}

}  // namespace nlks
