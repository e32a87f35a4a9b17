#pragma once

#include <cmath>
#include <string>

#include "nlks/error.hpp"
#include "nlks/grid.hpp"

namespace nlks {

/// Exponents and rates of the nonlocal source lambda * u^alpha (1 - sigma * avg(u^beta)).
struct ReactionParams {
    double alpha = 1.0;
    double beta = 2.0;
    double sigma = 1.0;
    double lambda = 1.0;  // 0 switches the source off

    ReactionParams() = default;
    ReactionParams(double alpha_, double beta_, double sigma_, double lambda_)
        : alpha(alpha_), beta(beta_), sigma(sigma_), lambda(lambda_) {
        validate();
    }

    void validate() const {
        if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
            throw InvalidArgument("alpha = " + std::to_string(alpha) + " violates alpha >= 1");
        }
        if (!(beta > 1.0) || !std::isfinite(beta)) {
            throw InvalidArgument("beta = " + std::to_string(beta) + " violates beta > 1");
        }
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InvalidArgument("sigma = " + std::to_string(sigma) + " violates sigma > 0");
        }
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw InvalidArgument("lambda = " + std::to_string(lambda) + " violates lambda >= 0");
        }
    }

    /// Constant state where the nonlocal factor equals one.
    double equilibrium() const { return std::pow(sigma, -1.0 / beta); }
};

namespace detail {
inline double pos_pow(double v, double p) {
    if (p == 0.0) return 1.0;
    if (v <= 0.0) return 0.0;
    return p == 1.0 ? v : std::pow(v, p);
}
}  // namespace detail

/// sigma * avg_Omega u^beta. One scalar per time level.
inline double nonlocal_factor(const Field& u, const ReactionParams& p) {
    require_finite(u, "cell density");
    double sum = 0.0;
    for (double v : u.values) sum += detail::pos_pow(v, p.beta);
    return p.sigma * (sum / static_cast<double>(u.size()));
}

/// lambda * u^alpha * (1 - factor) with a precomputed nonlocal factor.
inline Field reaction_term(const Field& u, const ReactionParams& p, double factor) {
    const double scale = p.lambda * (1.0 - factor);
    return map_values(u, [&](double v) { return scale * detail::pos_pow(v, p.alpha); });
}

inline Field reaction_term(const Field& u, const ReactionParams& p) {
    return reaction_term(u, p, nonlocal_factor(u, p));
}

/**
 * Lipschitz estimate of the source at the current state, used for step
 * control. Local part: d/du of u^alpha (1 - F) at sup u. Nonlocal part: the
 * response of u^alpha F to a uniform perturbation, sigma*beta*avg(u^(beta-1)).
 */
inline double reaction_lipschitz(const Field& u, const ReactionParams& p, double factor) {
    const double sup = std::max(u.max(), 0.0);
    double avg = 0.0;
    for (double v : u.values) avg += detail::pos_pow(v, p.beta - 1.0);
    avg /= static_cast<double>(u.size());
    const double local = p.alpha * detail::pos_pow(sup, p.alpha - 1.0) * std::abs(1.0 - factor);
    const double nonlocal = p.sigma * p.beta * detail::pos_pow(sup, p.alpha) * avg;
    return p.lambda * (local + nonlocal);
}

}  // namespace nlks
