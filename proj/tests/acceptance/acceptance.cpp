// Acceptance suite. Each criterion prints one PASS/FAIL line; pass criterion
// numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlks/nlks.hpp"

namespace {

using namespace nlks;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Draw {
    Params params;
    double upper0 = 0.0;
    double lower0 = 0.0;
};

// Admissible parameter vector: n >= 3, alpha >= 1, beta > 1, gamma, m >= 1, chi, lambda, sigma > 0.
Params random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Params p;
    p.n = 3 + static_cast<int>(u(rng) * 3);
    p.m = 1.0 + 2.0 * u(rng);
    p.gamma = 1.0 + 2.0 * u(rng);
    p.chi = 0.05 + 1.5 * u(rng);
    p.reaction = ReactionParams(1.0 + 3.0 * u(rng), 1.1 + 4.0 * u(rng), 0.2 + 2.0 * u(rng), 0.1 + 2.9 * u(rng));
    return p;
}

Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    d.params = random_params(rng);
    const double xi = d.params.xi();
    d.upper0 = xi * (1.01 + u(rng));
    d.lower0 = xi * (0.05 + 0.94 * u(rng));
    return d;
}

Params theorem_set(int n, double alpha, double beta, double gamma, double m, double chi, double lambda,
                   double sigma) {
    Params p;
    p.n = n;
    p.chi = chi;
    p.m = m;
    p.gamma = gamma;
    p.reaction = ReactionParams(alpha, beta, sigma, lambda);
    return p;
}

// Five parameter sets inside both the global-existence and the convergence conditions.
std::vector<Params> convergent_sets() {
    return {theorem_set(3, 2.0, 4.0, 1.0, 1.0, 0.4, 1.0, 1.0),
            theorem_set(3, 2.5, 3.0, 1.0, 1.2, 0.2, 2.0, 0.5),
            theorem_set(3, 1.5, 2.5, 1.0, 1.0, 0.3, 1.0, 2.0),
            theorem_set(3, 3.0, 4.0, 1.5, 1.5, 0.5, 1.5, 1.5),
            theorem_set(4, 2.0, 5.0, 1.0, 1.0, 0.25, 0.6, 0.8)};
}

// ---- 1 ---------------------------------------------------------------------

Outcome elliptic_correctness() {
    std::ostringstream detail;
    bool pass = true;
    for (int dim : {1, 2}) {
        std::vector<double> errors;
        std::vector<double> hs;
        for (std::size_t n : {32u, 64u, 128u}) {
            const Grid g = dim == 1 ? make_grid_1d(1.0, n) : make_grid_2d(1.0, 1.0, n, n);
            const HelmholtzSolver solver(g);
            Field rhs, exact;
            if (dim == 1) {
                rhs = sample(g, [](double x) { return 1.0 + std::cos(kPi * x); });
                exact = sample(g, [](double x) { return 1.0 + std::cos(kPi * x) / (1.0 + kPi * kPi); });
            } else {
                rhs = sample(g, [](double x, double y) { return 1.0 + std::cos(kPi * x) * std::cos(kPi * y); });
                exact = sample(g, [](double x, double y) {
                    return 1.0 + std::cos(kPi * x) * std::cos(kPi * y) / (1.0 + 2.0 * kPi * kPi);
                });
            }
            const Field c = solver.solve(rhs);
            double err = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) err = std::max(err, std::abs(c[k] - exact[k]));
            const double h = g.spacing(0);
            pass = pass && err <= 5.0 * h * h * std::pow(kPi, 4);
            errors.push_back(err);
            hs.push_back(h);
        }
        detail << dim << "D errors";
        for (double e : errors) detail << ' ' << fmt(e);
        detail << " orders";
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            const double order = std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]);
            pass = pass && order >= 1.9 && order <= 2.1;
            detail << ' ' << fmt(order);
        }
        detail << "; ";
    }
    return {pass, detail.str()};
}

// ---- 2 ---------------------------------------------------------------------

Outcome equilibrium_stationarity() {
    std::mt19937_64 rng(2002);
    double worst = 0.0;
    for (int set = 0; set < 10; ++set) {
        Params p = random_params(rng);
        const double xi = p.xi();
        const Grid g = set % 2 == 0 ? make_grid_2d(1.0, 1.0, 24, 24) : make_grid_1d(1.0, 128);
        const HelmholtzSolver solver(g, p.numerical.solver_tolerance);
        SimState s = make_state(Field(g, xi), p, solver);
        for (int step = 0; step < 1000; ++step) {
            s.dt = adapt_dt(s, p);
            s = imex_step(s, p, solver);
            for (double v : s.u.values) worst = std::max(worst, std::abs(v - xi) / xi);
        }
    }
    return {worst <= 1e-8, "10 sets x 1000 steps, max |u - xi| / xi = " + fmt(worst)};
}

// ---- 3 ---------------------------------------------------------------------

constexpr double kOdeDt = 2e-3;

Outcome ode_ordering() {
    std::mt19937_64 rng(3003);
    int accepted = 0, rejected = 0, violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Draw d = random_draw(rng);
        const double xi = d.params.xi();
        const auto s0 = ComparisonState::from_values(d.upper0, d.lower0, xi);
        try {
            const auto traj = integrate_comparison(s0, d.params, 50.0 / d.params.reaction.lambda, kOdeDt, 10);
            ++accepted;
            // Positive log ratios are exactly 0 < lower < xi < upper.
            for (const auto& s : traj.points) {
                if (!s.strictly_ordered()) ++violations;
            }
        } catch (const IntegratorFailure&) {
            ++rejected;
        }
    }
    return {violations == 0 && accepted > 0, std::to_string(accepted) + " accepted, " + std::to_string(rejected) +
                                                 " rejected by the integrator, " + std::to_string(violations) +
                                                 " ordering violations"};
}

// ---- 4 ---------------------------------------------------------------------

Outcome ode_convergence() {
    std::mt19937_64 rng(4004);
    int draws = 0, failures = 0, in_existence_region = 0, failures_in_region = 0, linear_unstable = 0;
    int lower_collapsed = 0;
    std::string example;
    while (draws < 200) {
        const Draw d = random_draw(rng);
        const Params& p = d.params;
        const auto cc = convergence_conditions(p);
        if (!cc.holds) continue;
        ++draws;
        const double xi = p.xi();
        const bool region = classify(p).existence != ExistenceRegime::Unclassified;
        in_existence_region += region;
        bool ok = false;
        try {
            const auto traj = integrate_comparison(ComparisonState::from_values(d.upper0, d.lower0, xi), p,
                                                   50.0 / p.reaction.lambda, kOdeDt, 10);
            const auto& last = traj.points.back();
            const auto rate = estimate_rate(traj);
            ok = std::abs(last.upper() - xi) + std::abs(last.lower() - xi) < 1e-4 * xi && rate && *rate < 0.0;
            lower_collapsed += !ok && last.lower() < 0.1 * xi;
        } catch (const IntegratorFailure&) {
        }
        if (!ok) {
            ++failures;
            failures_in_region += region;
            // Linearisation at (xi, xi): the symmetric mode grows unless
            // lambda beta xi^(alpha-1) > 2 chi gamma xi^(m+gamma-1).
            const auto& r = p.reaction;
            const bool unstable = r.lambda * r.beta * std::pow(xi, r.alpha - 1.0) <=
                                  2.0 * p.chi * p.gamma * std::pow(xi, p.m + p.gamma - 1.0);
            linear_unstable += unstable;
            if (example.empty()) {
                example = "; first failure n=" + std::to_string(p.n) + " alpha=" + fmt(r.alpha) + " beta=" +
                          fmt(r.beta) + " gamma=" + fmt(p.gamma) + " m=" + fmt(p.m) + " chi=" + fmt(p.chi) +
                          " lambda=" + fmt(r.lambda) + " sigma=" + fmt(r.sigma);
            }
        }
    }
    return {failures == 0, std::to_string(draws) + " draws with alpha+beta >= gamma+m and lambda > 2 chi, " +
                               std::to_string(failures) + " not converged at T = 50/lambda (" +
                               std::to_string(failures_in_region) + " of them inside the existence region, " +
                               std::to_string(in_existence_region) + " draws there; " +
                               std::to_string(linear_unstable) + " linearly unstable at xi, " +
                               std::to_string(lower_collapsed) + " with lower(T) < 0.1 xi)" + example};
}

// ---- 5 ---------------------------------------------------------------------

Outcome sandwich() {
    bool pass = true;
    std::ostringstream detail;
    std::size_t rows = 0, violations = 0;
    double worst_final = 0.0;
    int set = 0;
    for (Params p : convergent_sets()) {
        const double xi = p.xi();
        p.numerical.t_final = 20.0 / p.reaction.lambda;
        p.numerical.record_interval = 1e-3;
        const Grid g = make_grid_1d(1.0, 256);
        InitialSpec spec;
        spec.kind = InitialSpec::Kind::RandomCosine;
        spec.amplitude = 0.1;
        const Field u0 = make_initial_field(spec, g, xi, static_cast<std::uint64_t>(++set));
        const RunRecord rec = run_simulation(u0, p, make_initial(u0, xi));
        const std::size_t v = sandwich_violations(rec.rows, 1e-3 * xi);
        const double final_dist = rec.rows.back().dist_u / xi;
        pass = pass && rec.status.kind == RunStatus::Kind::Completed && v == 0 && final_dist < 1e-3;
        rows += rec.rows.size();
        violations += v;
        worst_final = std::max(worst_final, final_dist);
    }
    detail << "5 sets, " << rows << " records, " << violations << " outside the band, max dist_u(T)/xi "
           << fmt(worst_final);
    return {pass, detail.str()};
}

// ---- 6 ---------------------------------------------------------------------

Outcome boundedness_large_data() {
    bool pass = true;
    std::ostringstream detail;
    detail << "sup_t Linf / xi:";
    for (Params p : convergent_sets()) {
        const double xi = p.xi();
        p.numerical.t_final = 100.0 / p.reaction.lambda;
        p.numerical.record_interval = p.numerical.t_final / 1000.0;
        const Grid g = make_grid_1d(1.0, 256);
        const double x0 = g.center(0, 76);
        const Field u0 = sample(g, [&](double x) {
            return xi * (1.0 + 9.0 * std::exp(-(x - x0) * (x - x0) / (2.0 * 0.05 * 0.05)));
        });
        const RunRecord rec = run_simulation(u0, p);
        const auto b = boundedness(rec.rows, 1e-3 * xi);
        pass = pass && rec.status.kind == RunStatus::Kind::Completed && std::isfinite(b.sup_linf) &&
               !b.grows_in_final_half;
        detail << ' ' << fmt(b.sup_linf / xi) << (b.grows_in_final_half ? " (grows)" : "");
    }
    return {pass, detail.str()};
}

// ---- 7 ---------------------------------------------------------------------

Outcome collapse_contrast() {
    Params p = theorem_set(3, 3.0, 4.0, 1.0, 2.0, 20.0, 1.0, 1.0);
    auto& num = p.numerical;
    num.t_final = 1.0;
    num.dt_initial = num.dt_max;
    // Grid-scale threshold: on a fixed mesh the peak saturates near mass / h^2.
    num.blow_up_threshold = 2000.0;
    num.record_interval = 1e-3;
    const Grid g = make_grid_2d(1.0, 1.0, 128, 128);
    InitialSpec spec;
    spec.kind = InitialSpec::Kind::Gaussian;
    spec.width = 0.05;
    spec.amplitude = 60.0;
    spec.floor = 0.05;
    const Field u0 = make_initial_field(spec, g, p.xi(), 0);

    Params zero = p;
    zero.reaction.lambda = 0.0;
    const RunRecord a = run_simulation(u0, zero);
    const RunRecord b = run_simulation(u0, p);
    const double collapse = a.stats.dt_smallest / a.stats.dt_first;
    const bool blew_up = a.status.kind == RunStatus::Kind::BlowUp && std::isfinite(a.status.time) && collapse <= 1e-2;
    // The damped run first drains the peak, then recovers towards xi from below.
    const bool bounded = b.status.kind == RunStatus::Kind::Completed && b.stats.sup_linf <= u0.max();
    return {blew_up && bounded, "lambda=0: " + std::string(to_string(a.status.kind)) + " (" + a.status.message +
                                    ") at t=" + fmt(a.status.time) + ", dt_min/dt_first=" + fmt(collapse) +
                                    "; lambda=1: " + std::string(to_string(b.status.kind)) +
                                    ", sup Linf=" + fmt(b.stats.sup_linf) + " (sup u0 " + fmt(u0.max()) + ")"};
}

// ---- 8 ---------------------------------------------------------------------

Outcome mass_conservation() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Params p = theorem_set(3, 2.0, 4.0, 1.0 + 0.3 * static_cast<double>(seed), 1.0 + 0.2 * static_cast<double>(seed),
                               0.5 * static_cast<double>(seed), 0.0, 1.0);
        const Grid g = seed % 2 ? make_grid_2d(1.0, 1.5, 32, 48) : make_grid_1d(2.0, 200);
        InitialSpec spec;
        spec.kind = InitialSpec::Kind::RandomCosine;
        spec.amplitude = 0.8;
        const Field u0 = make_initial_field(spec, g, 1.0, seed);
        const HelmholtzSolver solver(g, p.numerical.solver_tolerance);
        SimState s = make_state(u0, p, solver);
        const double m0 = integral(u0);
        for (int step = 0; step < 1000; ++step) {
            s.dt = adapt_dt(s, p);
            s = imex_step(s, p, solver);
            worst = std::max(worst, std::abs(integral(s.u) - s.clamped_mass - m0) / m0);
        }
    }
    return {worst <= 1e-8, "4 data x 1000 steps, max relative pre-clamp drift " + fmt(worst)};
}

// ---- 9 ---------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

Outcome classifier_truth_table() {
    Params base = theorem_set(3, 2.0, 4.0, 1.0, 1.0, 0.4, 1.0, 1.0);
    const SweepGrid grid{linspace(1.0, 5.0, 25), linspace(1.1, 6.0, 25), {1.0, 1.5, 2.0, 2.5}, {1.0, 1.5, 2.0, 2.5},
                         {0.4},
                         {1.0}};
    const auto reports = sweep(grid, base);
    std::size_t overlap = 0, global = 0, below_collapse = 0, branch2_below = 0;
    std::string example;
    for (const auto& [p, r] : reports) {
        overlap += r.details.branch1 && r.details.branch2;
        if (r.existence == ExistenceRegime::Unclassified) continue;
        ++global;
        if (!(p.reaction.beta > p.n / 2.0 * (p.gamma + p.m - 1.0))) {
            ++below_collapse;
            branch2_below += r.existence == ExistenceRegime::GlobalBranch2;
            if (example.empty()) {
                example = " e.g. alpha=" + fmt(p.reaction.alpha) + " beta=" + fmt(p.reaction.beta) + " gamma=" +
                          fmt(p.gamma) + " m=" + fmt(p.m);
            }
        }
    }

    // Flips at alpha = gamma + m (inclusive for branch 1) and alpha = 1 + 2 beta / n (exclusive).
    std::size_t bad_flips = 0, flips = 0;
    for (double beta : grid.beta) {
        for (double gamma : grid.gamma) {
            for (double m : grid.m) {
                Params p = base;
                p.reaction.beta = beta;
                p.gamma = gamma;
                p.m = m;
                auto at = [&](double alpha) {
                    Params q = p;
                    q.reaction.alpha = alpha;
                    return classify(q).existence;
                };
                const double lo = gamma + m;
                const double hi = 1.0 + 2.0 * beta / p.n;
                const double b2 = (p.n + 4.0) / 2.0 - beta;
                if (lo < hi) {
                    ++flips;
                    bad_flips += at(lo) != ExistenceRegime::GlobalBranch1;
                    bad_flips += at(std::nextafter(hi, 0.0)) != ExistenceRegime::GlobalBranch1;
                    bad_flips += at(hi) == ExistenceRegime::GlobalBranch1;
                }
                if (b2 < std::nextafter(lo, 0.0) && std::nextafter(lo, 0.0) >= 1.0) {
                    ++flips;
                    bad_flips += at(std::nextafter(lo, 0.0)) != ExistenceRegime::GlobalBranch2;
                }
            }
        }
    }
    const bool pass = reports.size() == 10000 && overlap == 0 && below_collapse == 0 && bad_flips == 0;
    return {pass, std::to_string(reports.size()) + " points, " + std::to_string(overlap) + " overlaps, " +
                      std::to_string(global) + " global, " + std::to_string(below_collapse) +
                      " global points with beta <= (n/2)(gamma+m-1) (" + std::to_string(branch2_below) +
                      " in branch 2)" + example + ", " + std::to_string(bad_flips) + " wrong flips over " +
                      std::to_string(flips) + " boundaries"};
}

// ---- 10 --------------------------------------------------------------------

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "nlks_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::string> configs = {
        R"({"scenario": "simulate", "grid": {"dim": 2, "cells": [32, 32]}, "seed": 13,
            "params": {"alpha": 2, "beta": 4, "gamma": 1, "m": 1, "chi": 0.4, "lambda": 1, "sigma": 1},
            "numerical": {"t_final": 0.5}, "initial": {"type": "random_cosine", "amplitude": 0.3}})",
        R"({"scenario": "sandwich", "grid": {"dim": 1, "cells": [128]}, "seed": 5,
            "params": {"alpha": 2.5, "beta": 3, "gamma": 1, "m": 1.2, "chi": 0.2, "lambda": 2, "sigma": 0.5},
            "numerical": {"t_final": 2}, "initial": {"type": "random_cosine", "amplitude": 0.1}})",
        R"({"scenario": "ode", "grid": {"dim": 1, "cells": [64]}, "seed": 9,
            "params": {"alpha": 2, "beta": 4, "gamma": 1, "m": 1, "chi": 0.4, "lambda": 1, "sigma": 1},
            "initial": {"type": "random_cosine", "amplitude": 0.5}})",
        R"({"scenario": "sweep", "grid": {"dim": 1, "cells": [8]},
            "params": {"alpha": 2, "beta": 4, "gamma": 1, "m": 1, "chi": 0.4, "lambda": 1, "sigma": 1},
            "sweep": {"alpha": {"min": 1, "max": 4, "count": 7}, "beta": [2, 3, 4]}})"};
    std::size_t compared = 0, differing = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunConfig cfg = parse_config(configs[i]);
        std::vector<std::string> first;
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / (std::to_string(i) + "_" + std::to_string(run));
            const auto res = execute(cfg, dir);
            for (std::size_t f = 0; f < res.files.size(); ++f) {
                const auto text = read_text(res.files[f]);
                if (run == 0) {
                    first.push_back(text);
                } else {
                    ++compared;
                    differing += f >= first.size() || first[f] != text;
                }
            }
        }
    }
    fs::remove_all(root);
    return {compared > 0 && differing == 0,
            std::to_string(compared) + " output files compared across repeated runs, " + std::to_string(differing) +
                " differ"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "elliptic correctness", elliptic_correctness},
        {2, "equilibrium stationarity", equilibrium_stationarity},
        {3, "comparison ODE ordering", ode_ordering},
        {4, "comparison ODE convergence", ode_convergence},
        {5, "ODE-PDE sandwich", sandwich},
        {6, "boundedness for large data", boundedness_large_data},
        {7, "collapse-prevention contrast", collapse_contrast},
        {8, "mass conservation", mass_conservation},
        {9, "regime classifier truth table", classifier_truth_table},
        {10, "determinism", determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 1;
        }
        selected.push_back(id);
    }
    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %-30s %s  %s [%.1fs]\n", c.id, c.name, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !out.pass;
    }
    return failed == 0 ? 0 : 1;
}
