#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlks/comparison.hpp"
#include "nlks/config.hpp"
#include "nlks/diagnostics.hpp"
#include "nlks/dynamics.hpp"
#include "nlks/io.hpp"
#include "nlks/regimes.hpp"

namespace nlks {

struct ExecutionResult {
    int exit_code = 0;       // 0 completed, 2 blow-up detected, 1 error
    std::string status;      // run status kind, or "error"
    std::vector<std::string> files;
};

namespace detail {

inline std::optional<RegimeReport> try_classify(const Params& p) {
    try {
        return classify(p);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

inline int exit_code_for(RunStatus::Kind k) {
    switch (k) {
        case RunStatus::Kind::Completed: return 0;
        case RunStatus::Kind::BlowUp: return 2;
        case RunStatus::Kind::SolverFailure: return 1;
    }
    return 1;
}

inline nlohmann::json run_summary(const RunRecord& rec, double xi) {
    const auto b = boundedness(rec.rows, 1e-3 * xi);
    nlohmann::json s;
    s["final_dist_u"] = rec.rows.empty() ? nlohmann::json(nullptr) : detail::num(rec.rows.back().dist_u);
    s["sup_linf"] = detail::num(b.sup_linf);
    s["linf_at_half"] = detail::num(b.linf_at_half);
    s["sup_linf_final_half"] = detail::num(b.sup_linf_final_half);
    s["grows_in_final_half"] = b.grows_in_final_half;
    return s;
}

}  // namespace detail

/**
 * Runs the configured scenario and writes its CSV/JSON outputs under
 * out_dir. Output depends only on the configuration (including its seed).
 */
inline ExecutionResult execute(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    ExecutionResult result;
    const Grid grid = cfg.grid.build();
    const Params& params = cfg.params;
    const double xi = params.xi();
    const Field u0 = make_initial_field(cfg.initial, grid, xi, cfg.seed);
    const nlohmann::json echo = to_json(cfg, u0.max());
    const auto csv_path = (out_dir / cfg.output.csv).string();
    const auto json_path = (out_dir / cfg.output.json).string();

    switch (cfg.scenario) {
        case Scenario::Simulate: {
            const RunRecord rec = run_simulation(u0, params);
            write_csv(rec.rows, csv_path);
            write_json(run_document(rec, detail::try_classify(params), echo, detail::run_summary(rec, xi)), json_path);
            result.exit_code = detail::exit_code_for(rec.status.kind);
            result.status = std::string(to_string(rec.status.kind));
            result.files = {csv_path, json_path};
            break;
        }
        case Scenario::Sandwich: {
            const ComparisonState comp0 = make_initial(u0, xi, cfg.margin);
            const RunRecord rec = run_simulation(u0, params, comp0);
            const double eps = cfg.effective_sandwich_tolerance();
            nlohmann::json summary = detail::run_summary(rec, xi);
            const auto surrogates = check_initial_datum(u0);
            summary["sandwich_tolerance"] = eps;
            summary["sandwich_violations"] = sandwich_violations(rec.rows, eps);
            summary["rows_checked"] = rec.rows.size();
            summary["initial_upper"] = comp0.upper();
            summary["initial_lower"] = comp0.lower();
            summary["initial_min_positive"] = surrogates.min_positive;
            summary["initial_gradient_finite"] = surrogates.gradient_finite;
            const auto cc = convergence_conditions(params);
            summary["convergence_conditions"] = {{"delta_low", cc.delta_low},
                                                 {"delta_high", cc.delta_high},
                                                 {"rate_margin", cc.rate_margin},
                                                 {"holds", cc.holds}};
            write_csv(rec.rows, csv_path);
            write_json(run_document(rec, detail::try_classify(params), echo, summary), json_path);
            result.exit_code = detail::exit_code_for(rec.status.kind);
            result.status = std::string(to_string(rec.status.kind));
            result.files = {csv_path, json_path};
            break;
        }
        case Scenario::OdeOnly: {
            const ComparisonState comp0 = make_initial(u0, xi, cfg.margin);
            nlohmann::json doc;
            doc["schema_version"] = std::string(kSchemaVersion);
            doc["config"] = echo;
            const auto regime = detail::try_classify(params);
            doc["regime"] = regime ? to_json(*regime) : nlohmann::json(nullptr);
            const auto cc = convergence_conditions(params);
            doc["convergence_conditions"] = {{"delta_low", cc.delta_low},
                                             {"delta_high", cc.delta_high},
                                             {"rate_margin", cc.rate_margin},
                                             {"holds", cc.holds}};
            try {
                const auto traj = integrate_comparison(comp0, params, cfg.ode.t_final, cfg.ode.dt, cfg.ode.stride);
                write_text(csv_path, trajectory_csv(traj));
                const auto& last = traj.points.back();
                const auto rate = estimate_rate(traj);
                doc["status"] = {{"kind", "completed"}, {"time", last.t}, {"message", ""}};
                doc["summary"] = {{"dt", traj.dt},
                                  {"halvings", traj.halvings},
                                  {"final_upper", last.upper()},
                                  {"final_lower", last.lower()},
                                  {"final_distance", last.gap()},
                                  {"rate", rate ? nlohmann::json(*rate) : nlohmann::json(nullptr)}};
                result.exit_code = 0;
                result.status = "completed";
            } catch (const IntegratorFailure& e) {
                doc["status"] = {{"kind", "solver_failure"}, {"time", nullptr}, {"message", e.what()}};
                result.exit_code = 1;
                result.status = "solver_failure";
            }
            write_json(doc, json_path);
            result.files = {csv_path, json_path};
            break;
        }
        case Scenario::RegimeSweep: {
            const auto reports = sweep(cfg.sweep, params);
            std::string csv = "alpha,beta,gamma,m,chi,lambda,existence,collapse_bound,convergence\n";
            nlohmann::json list = nlohmann::json::array();
            for (const auto& [p, r] : reports) {
                csv += format_double(p.reaction.alpha) + ',' + format_double(p.reaction.beta) + ',' +
                       format_double(p.gamma) + ',' + format_double(p.m) + ',' + format_double(p.chi) + ',' +
                       format_double(p.reaction.lambda) + ',' + std::string(to_string(r.existence)) + ',' +
                       std::string(to_string(r.collapse_bound)) + ',' + std::string(to_string(r.convergence)) +
                       '\n';
                list.push_back({{"alpha", p.reaction.alpha},
                                {"beta", p.reaction.beta},
                                {"gamma", p.gamma},
                                {"m", p.m},
                                {"chi", p.chi},
                                {"lambda", p.reaction.lambda},
                                {"report", to_json(r)}});
            }
            write_text(csv_path, csv);
            nlohmann::json doc = {{"schema_version", std::string(kSchemaVersion)},
                                  {"config", echo},
                                  {"status", {{"kind", "completed"}, {"time", nullptr}, {"message", ""}}},
                                  {"reports", std::move(list)}};
            write_json(doc, json_path);
            result.exit_code = 0;
            result.status = "completed";
            result.files = {csv_path, json_path};
            break;
        }
        case Scenario::BlowupProbe: {
            nlohmann::json doc = {{"schema_version", std::string(kSchemaVersion)}, {"config", echo}};
            nlohmann::json variants = nlohmann::json::object();
            const auto stem = std::filesystem::path(cfg.output.csv).stem().string();
            auto run_variant = [&](const std::string& name, Params p) {
                const RunRecord rec = run_simulation(u0, p);
                const auto path = (out_dir / (stem + "_" + name + ".csv")).string();
                write_csv(rec.rows, path);
                result.files.push_back(path);
                nlohmann::json v = to_json(rec);
                v["lambda"] = p.reaction.lambda;
                v["regime"] = [&] {
                    const auto r = detail::try_classify(p);
                    return r ? to_json(*r) : nlohmann::json(nullptr);
                }();
                v["summary"] = detail::run_summary(rec, xi);
                variants[name] = std::move(v);
                return rec.status.kind;
            };
            bool failed = false;
            if (cfg.probe.zero_reaction) {
                Params p = params;
                p.reaction.lambda = 0.0;
                failed |= run_variant("zero_reaction", p) == RunStatus::Kind::SolverFailure;
            }
            if (cfg.probe.with_reaction) {
                failed |= run_variant("with_reaction", params) == RunStatus::Kind::SolverFailure;
            }
            doc["variants"] = std::move(variants);
            write_json(doc, json_path);
            result.files.push_back(json_path);
            // Blow-up is an expected outcome of a probe, not an error.
            result.exit_code = failed ? 1 : 0;
            result.status = failed ? "solver_failure" : "completed";
            break;
        }
    }
    return result;
}

}  // namespace nlks
