#pragma once

#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

#include "nlks/error.hpp"
#include "nlks/grid.hpp"
#include "nlks/params.hpp"

namespace nlks {

enum class ExistenceRegime { GlobalBranch1, GlobalBranch2, Unclassified };
enum class CollapseRegime { CollapsePreventionHolds, OpenRegime };
enum class ConvergenceRegime { Guaranteed, NotGuaranteed };

inline std::string_view to_string(ExistenceRegime r) {
    switch (r) {
        case ExistenceRegime::GlobalBranch1: return "global_branch_1";
        case ExistenceRegime::GlobalBranch2: return "global_branch_2";
        case ExistenceRegime::Unclassified: return "unclassified";
    }
    return "unclassified";
}

inline std::string_view to_string(CollapseRegime r) {
    return r == CollapseRegime::CollapsePreventionHolds ? "collapse_prevention_holds" : "open_regime";
}

inline std::string_view to_string(ConvergenceRegime r) {
    return r == ConvergenceRegime::Guaranteed ? "guaranteed" : "not_guaranteed";
}

/// Every quantity the classification compares, for reporting.
struct RegimeDetails {
    double gamma_plus_m = 0.0;          // branch 1 lower bound (inclusive), branch 2 upper (strict)
    double branch1_upper = 0.0;         // 1 + 2 beta / n (strict)
    double branch2_lower = 0.0;         // (n + 4)/2 - beta (strict)
    double collapse_threshold = 0.0;    // (n/2)(gamma + m - 1)
    double alpha_plus_beta = 0.0;
    double two_chi = 0.0;
    bool branch1 = false;
    bool branch2 = false;
    bool exponents_for_convergence = false;  // alpha + beta >= gamma + m
    bool lambda_dominates = false;           // lambda > 2 chi
};

struct RegimeReport {
    ExistenceRegime existence = ExistenceRegime::Unclassified;
    CollapseRegime collapse_bound = CollapseRegime::OpenRegime;
    ConvergenceRegime convergence = ConvergenceRegime::NotGuaranteed;
    RegimeDetails details;
};

/**
 * Classifies a parameter vector against the global-existence conditions
 *
 *   branch 1:  gamma + m <= alpha < 1 + 2 beta / n
 *   branch 2:  (n + 4)/2 - beta < alpha < gamma + m
 *
 * the collapse-prevention bound beta > (n/2)(gamma + m - 1), and the
 * convergence conditions alpha + beta >= gamma + m, lambda > 2 chi.
 * All comparisons are made directly on the given doubles.
 */
inline RegimeReport classify(const Params& p) {
    const auto& r = p.reaction;
    if (p.n < 3) throw InvalidArgument("classification needs n >= 3");
    if (!(r.alpha >= 1.0) || !(p.gamma >= 1.0) || !(p.m >= 1.0)) {
        throw InvalidArgument("classification needs alpha, gamma, m >= 1");
    }
    if (!(r.beta > 1.0)) throw InvalidArgument("classification needs beta > 1");
    if (!(p.chi > 0.0) || !(r.lambda > 0.0) || !(r.sigma > 0.0)) {
        throw InvalidArgument("classification needs chi, lambda, sigma > 0");
    }
    const double n = static_cast<double>(p.n);
    RegimeReport rep;
    auto& d = rep.details;
    d.gamma_plus_m = p.gamma + p.m;
    d.branch1_upper = 1.0 + 2.0 * r.beta / n;
    d.branch2_lower = (n + 4.0) / 2.0 - r.beta;
    d.collapse_threshold = n / 2.0 * (p.gamma + p.m - 1.0);
    d.alpha_plus_beta = r.alpha + r.beta;
    d.two_chi = 2.0 * p.chi;
    d.branch1 = d.gamma_plus_m <= r.alpha && r.alpha < d.branch1_upper;
    d.branch2 = d.branch2_lower < r.alpha && r.alpha < d.gamma_plus_m;
    d.exponents_for_convergence = d.alpha_plus_beta >= d.gamma_plus_m;
    d.lambda_dominates = r.lambda > d.two_chi;

    if (d.branch1) {
        rep.existence = ExistenceRegime::GlobalBranch1;
    } else if (d.branch2) {
        rep.existence = ExistenceRegime::GlobalBranch2;
    }
    rep.collapse_bound = r.beta > d.collapse_threshold ? CollapseRegime::CollapsePreventionHolds
                                                         : CollapseRegime::OpenRegime;
    const bool guaranteed = rep.existence != ExistenceRegime::Unclassified &&
                            d.exponents_for_convergence && d.lambda_dominates;
    rep.convergence = guaranteed ? ConvergenceRegime::Guaranteed : ConvergenceRegime::NotGuaranteed;
    return rep;
}

/// Value lists for each swept parameter; n and sigma come from the base vector.
struct SweepGrid {
    std::vector<double> alpha, beta, gamma, m, chi, lambda;
};

/// Cartesian-product classification, alpha outermost and lambda innermost.
inline std::vector<std::pair<Params, RegimeReport>> sweep(const SweepGrid& grid, const Params& base) {
    for (const auto* axis : {&grid.alpha, &grid.beta, &grid.gamma, &grid.m, &grid.chi, &grid.lambda}) {
        if (axis->empty()) throw InvalidArgument("sweep grid has an empty axis");
    }
    std::vector<std::pair<Params, RegimeReport>> out;
    out.reserve(grid.alpha.size() * grid.beta.size() * grid.gamma.size() * grid.m.size() *
                grid.chi.size() * grid.lambda.size());
    for (double a : grid.alpha)
        for (double b : grid.beta)
            for (double g : grid.gamma)
                for (double mm : grid.m)
                    for (double c : grid.chi)
                        for (double l : grid.lambda) {
                            Params p = base;
                            p.reaction.alpha = a;
                            p.reaction.beta = b;
                            p.gamma = g;
                            p.m = mm;
                            p.chi = c;
                            p.reaction.lambda = l;
                            out.emplace_back(p, classify(p));
                        }
    return out;
}

/// Computable stand-ins for the regularity hypothesis on u0.
struct InitialDatumSurrogates {
    double min_value = 0.0;
    double max_gradient = 0.0;
    bool min_positive = false;
    bool gradient_finite = false;
};

inline InitialDatumSurrogates check_initial_datum(const Field& u0) {
    InitialDatumSurrogates s;
    s.min_value = u0.min();
    s.min_positive = s.min_value > 0.0;
    const Grid& g = u0.grid;
    double gmax = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            gmax = std::max(gmax, std::abs(u0[k + 1] - u0[k]) / g.spacing(0));
        }
    }
    if (g.dim() == 2) {
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                gmax = std::max(gmax, std::abs(u0[k + g.nx()] - u0[k]) / g.spacing(1));
            }
        }
    }
    s.max_gradient = gmax;
    s.gradient_finite = std::isfinite(gmax);
    return s;
}

}  // namespace nlks
