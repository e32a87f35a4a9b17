#pragma once

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlks/error.hpp"
#include "nlks/grid.hpp"

namespace nlks {

namespace detail {

// FFTW's planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct DctPlans {
    fftw_plan forward = nullptr;   // DCT-II, cell values -> cosine coefficients
    fftw_plan backward = nullptr;  // DCT-III, unnormalized inverse

    explicit DctPlans(const Grid& g) {
        std::vector<double> scratch(g.size(), 0.0);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard lock(fftw_planner_mutex());
        if (g.dim() == 1) {
            const int n = static_cast<int>(g.nx());
            forward = fftw_plan_r2r_1d(n, scratch.data(), scratch.data(), FFTW_REDFT10, flags);
            backward = fftw_plan_r2r_1d(n, scratch.data(), scratch.data(), FFTW_REDFT01, flags);
        } else {
            const int n0 = static_cast<int>(g.ny());
            const int n1 = static_cast<int>(g.nx());
            forward = fftw_plan_r2r_2d(n0, n1, scratch.data(), scratch.data(), FFTW_REDFT10,
                                       FFTW_REDFT10, flags);
            backward = fftw_plan_r2r_2d(n0, n1, scratch.data(), scratch.data(), FFTW_REDFT01,
                                        FFTW_REDFT01, flags);
        }
        if (forward == nullptr || backward == nullptr) {
            throw SolverFailure("FFTW could not create cosine-transform plans", 0.0);
        }
    }
    ~DctPlans() {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
    DctPlans(const DctPlans&) = delete;
    DctPlans& operator=(const DctPlans&) = delete;
};

/// Eigenvalues of -Laplacian (mirror Neumann, cell centered) along one axis.
inline std::vector<double> neumann_eigenvalues(std::size_t n, double h) {
    std::vector<double> mu(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        mu[k] = 4.0 * s * s / (h * h);
    }
    return mu;
}

inline double l2_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace detail

/**
 * Direct solver for (a I - b Lap_h) x = rhs on a rectangle with homogeneous
 * Neumann conditions.
 *
 * The mirror-ghost Laplacian is diagonalized exactly by the type-II cosine
 * transform, so each solve is forward DCT, diagonal scaling, inverse DCT.
 * The transform plans are built once per grid and shared between copies; a
 * constructed solver is read-only and can be used from several threads.
 *
 * After the direct solve the residual is measured explicitly and, if above
 * tolerance, reduced by up to max_iterations refinement sweeps. If that still
 * fails a SolverFailure carrying the achieved relative residual is thrown.
 */
class HelmholtzSolver {
public:
    explicit HelmholtzSolver(const Grid& grid, double tolerance = 1e-10, int max_iterations = 4)
        : grid_(grid),
          tolerance_(tolerance),
          max_iterations_(max_iterations),
          plans_(std::make_shared<const detail::DctPlans>(grid)),
          mu_x_(detail::neumann_eigenvalues(grid.nx(), grid.spacing(0))),
          mu_y_(grid.dim() == 2 ? detail::neumann_eigenvalues(grid.ny(), grid.spacing(1))
                                : std::vector<double>{0.0}) {
        if (!(tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
        if (max_iterations < 0) throw InvalidArgument("max_iterations must be nonnegative");
    }

    const Grid& grid() const noexcept { return grid_; }
    double tolerance() const noexcept { return tolerance_; }
    int max_iterations() const noexcept { return max_iterations_; }

    /// shift * x - diffusivity * Lap_h x
    Field apply(const Field& x, double shift = 1.0, double diffusivity = 1.0) const {
        Field out = laplacian_neumann(x);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = shift * x[k] - diffusivity * out[k];
        }
        return out;
    }

    double relative_residual(const Field& x, const Field& rhs, double shift = 1.0,
                             double diffusivity = 1.0) const {
        const double rn = detail::l2_sum(rhs.values);
        Field ax = apply(x, shift, diffusivity);
        for (std::size_t k = 0; k < ax.size(); ++k) ax[k] -= rhs[k];
        const double res = detail::l2_sum(ax.values);
        return rn > 0.0 ? res / rn : res;
    }

    Field solve(const Field& rhs, double shift = 1.0, double diffusivity = 1.0) const {
        if (!(rhs.grid == grid_)) throw InvalidArgument("right-hand side is on a different grid");
        require_finite(rhs, "right-hand side");
        if (!(shift > 0.0) || !(diffusivity >= 0.0)) {
            throw InvalidArgument("Helmholtz operator needs shift > 0 and diffusivity >= 0");
        }
        const double rhs_norm = detail::l2_sum(rhs.values);
        if (rhs_norm == 0.0) return Field(grid_, 0.0);

        Field x = direct(rhs.values, shift, diffusivity);
        double rel = relative_residual(x, rhs, shift, diffusivity);
        for (int it = 0; it < max_iterations_ && rel > tolerance_; ++it) {
            Field r = apply(x, shift, diffusivity);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] = rhs[k] - r[k];
            const Field dx = direct(r.values, shift, diffusivity);
            for (std::size_t k = 0; k < x.size(); ++k) x[k] += dx[k];
            rel = relative_residual(x, rhs, shift, diffusivity);
        }
        if (!(rel <= tolerance_)) {
            std::ostringstream msg;
            msg << "Helmholtz solve reached relative residual " << rel << " > tolerance "
                << tolerance_;
            throw SolverFailure(msg.str(), rel);
        }
        return x;
    }

private:
    Field direct(std::vector<double> buf, double shift, double diffusivity) const {
        fftw_execute_r2r(plans_->forward, buf.data(), buf.data());
        const std::size_t nx = grid_.nx();
        for (std::size_t j = 0; j < mu_y_.size(); ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                buf[i + nx * j] /= shift + diffusivity * (mu_x_[i] + mu_y_[j]);
            }
        }
        fftw_execute_r2r(plans_->backward, buf.data(), buf.data());
        double norm = 2.0 * static_cast<double>(nx);
        if (grid_.dim() == 2) norm *= 2.0 * static_cast<double>(grid_.ny());
        for (double& v : buf) v /= norm;
        return Field(grid_, std::move(buf));
    }

    Grid grid_;
    double tolerance_;
    int max_iterations_;
    std::shared_ptr<const detail::DctPlans> plans_;
    std::vector<double> mu_x_;
    std::vector<double> mu_y_;
};

inline Field solve_helmholtz(const HelmholtzSolver& solver, const Field& rhs) {
    return solver.solve(rhs, 1.0, 1.0);
}

/// Result of raising a field to a power after clamping negatives to zero.
struct ClampedPower {
    Field values;
    double clamp_magnitude = 0.0;  // largest |negative| sample that was clamped
};

inline ClampedPower nonnegative_power(const Field& f, double exponent) {
    ClampedPower out{Field(f.grid), 0.0};
    for (std::size_t k = 0; k < f.size(); ++k) {
        double v = f[k];
        if (v < 0.0) {
            out.clamp_magnitude = std::max(out.clamp_magnitude, -v);
            v = 0.0;
        }
        out.values[k] = exponent == 1.0 ? v : std::pow(v, exponent);
    }
    return out;
}

/// c solving -Lap c + c = u^gamma.
inline Field chemoattractant(const HelmholtzSolver& solver, const Field& u, double gamma) {
    if (!(gamma >= 1.0)) throw InvalidArgument("chemoattractant exponent needs gamma >= 1");
    require_finite(u, "cell density");
    return solve_helmholtz(solver, nonnegative_power(u, gamma).values);
}

}  // namespace nlks
