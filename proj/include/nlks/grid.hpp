#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "nlks/error.hpp"

namespace nlks {

/**
 * Uniform cell-centered discretization of a rectangle (1D interval or 2D box).
 *
 * Cell (i, j) has its center at ((i + 1/2) hx, (j + 1/2) hy); values are
 * stored x-fastest, i.e. index = i + nx * j. In 1D the y axis is a single
 * dummy cell of unit width so that cell_measure() equals hx.
 */
class Grid {
public:
    static constexpr std::size_t kMinCells = 4;

    Grid() = default;

    Grid(int dim, std::span<const double> extents, std::span<const std::size_t> cells) {
        if (dim != 1 && dim != 2) {
            throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
        }
        if (extents.size() != static_cast<std::size_t>(dim) ||
            cells.size() != static_cast<std::size_t>(dim)) {
            throw InvalidArgument("grid needs exactly one extent and one cell count per axis");
        }
        dim_ = dim;
        for (int a = 0; a < dim; ++a) {
            if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
                throw InvalidArgument("grid extents must be positive and finite");
            }
            if (cells[a] < kMinCells) {
                throw InvalidArgument("grid needs at least 4 cells per axis");
            }
            extent_[a] = extents[a];
            cells_[a] = cells[a];
            spacing_[a] = extents[a] / static_cast<double>(cells[a]);
        }
    }

    int dim() const noexcept { return dim_; }
    std::size_t nx() const noexcept { return cells_[0]; }
    std::size_t ny() const noexcept { return cells_[1]; }
    std::size_t cells(int axis) const noexcept { return cells_[axis]; }
    double extent(int axis) const noexcept { return extent_[axis]; }
    double spacing(int axis) const noexcept { return spacing_[axis]; }
    std::size_t size() const noexcept { return cells_[0] * cells_[1]; }

    double min_spacing() const noexcept {
        return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
    }
    double cell_measure() const noexcept { return spacing_[0] * spacing_[1]; }
    double measure() const noexcept { return extent_[0] * extent_[1]; }

    double center(int axis, std::size_t i) const noexcept {
        return (static_cast<double>(i) + 0.5) * spacing_[axis];
    }
    std::size_t index(std::size_t i, std::size_t j = 0) const noexcept { return i + cells_[0] * j; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int dim_ = 1;
    std::array<double, 2> extent_{1.0, 1.0};
    std::array<std::size_t, 2> cells_{kMinCells, 1};
    std::array<double, 2> spacing_{0.25, 1.0};
};

inline Grid make_grid(int dim, std::span<const double> extents, std::span<const std::size_t> cells) {
    return Grid(dim, extents, cells);
}

inline Grid make_grid_1d(double extent, std::size_t cells) {
    const std::array<double, 1> e{extent};
    const std::array<std::size_t, 1> n{cells};
    return Grid(1, e, n);
}

inline Grid make_grid_2d(double ex, double ey, std::size_t nx, std::size_t ny) {
    const std::array<double, 2> e{ex, ey};
    const std::array<std::size_t, 2> n{nx, ny};
    return Grid(2, e, n);
}

/// Cell-sampled scalar function on a Grid. Value type; owns its samples.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) {
            throw InvalidArgument("field size does not match grid");
        }
    }

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t k) noexcept { return values[k]; }
    double operator[](std::size_t k) const noexcept { return values[k]; }

    double min() const { return *std::min_element(values.begin(), values.end()); }
    double max() const { return *std::max_element(values.begin(), values.end()); }
};

/// Samples fn at cell centers; fn takes (x) in 1D and (x, y) in 2D.
template <class Fn>
Field sample(const Grid& g, Fn&& fn) {
    Field f(g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if constexpr (std::is_invocable_v<Fn, double>) {
                f[g.index(i, j)] = fn(g.center(0, i));
            } else {
                f[g.index(i, j)] = fn(g.center(0, i), g.center(1, j));
            }
        }
    }
    return f;
}

/// Pointwise transform of a field into a new field on the same grid.
template <class Fn>
Field map_values(const Field& f, Fn&& fn) {
    Field out(f.grid);
    std::transform(f.values.begin(), f.values.end(), out.values.begin(), fn);
    return out;
}

inline bool all_finite(const Field& f) noexcept {
    return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

inline void require_finite(const Field& f, const char* what) {
    if (!all_finite(f)) {
        throw InvalidArgument(std::string(what) + " contains non-finite values");
    }
}

inline void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) {
        throw InvalidArgument("fields live on different grids");
    }
}

/// Sum of values times cell measure (midpoint rule for the integral).
inline double integral(const Field& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum * f.grid.cell_measure();
}

/// Domain average (1/|Omega|) * integral; exact for constants.
inline double mean_integral(const Field& f) {
    require_finite(f, "field");
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum / static_cast<double>(f.size());
}

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// L^k norm with midpoint quadrature; k = kInfNorm gives the max norm.
inline double lk_norm(const Field& f, double k) {
    if (!(k >= 1.0)) {
        throw InvalidArgument("L^k norm needs k >= 1");
    }
    require_finite(f, "field");
    if (std::isinf(k)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    // Scale by the max to keep large k from overflowing.
    double scale = 0.0;
    for (double v : f.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : f.values) sum += std::pow(std::abs(v) / scale, k);
    return scale * std::pow(sum * f.grid.cell_measure(), 1.0 / k);
}

/**
 * Five-point (three-point in 1D) Laplacian with mirror ghost cells.
 *
 * Written in flux form: every interior face contributes (f_nb - f)/h^2 to
 * both neighbours with opposite sign, boundary faces contribute nothing, so
 * the weighted sum of the output telescopes to zero.
 */
inline Field laplacian_neumann(const Field& f) {
    require_finite(f, "field");
    const Grid& g = f.grid;
    Field out(g);
    const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const double flux = (f[k + 1] - f[k]) * ihx2;
            out[k] += flux;
            out[k + 1] -= flux;
        }
    }
    if (g.dim() == 2) {
        const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
        const std::size_t nx = g.nx();
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t k = g.index(i, j);
                const double flux = (f[k + nx] - f[k]) * ihy2;
                out[k] += flux;
                out[k + nx] -= flux;
            }
        }
    }
    return out;
}

}  // namespace nlks
