#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qad/empirical_copula.hpp"
#include "qad/error.hpp"
#include "qad/sample.hpp"

namespace qad {

/// Default tolerance for the doubly-stochastic invariant.
inline constexpr double checkerboard_tolerance = 1e-12;

/// N-checkerboard copula: mass(i, j) is the mass of the square
/// [i/N, (i+1)/N] x [j/N, (j+1)/N]; i runs over x-strips, j over y-cells
/// (zero-based). Every row and column sums to 1/N.
class CheckerboardCopula {
public:
    /// Validates the invariants; throws argument_error on violation.
    static CheckerboardCopula from_mass(std::size_t resolution, std::vector<double> mass,
                                        double tol = checkerboard_tolerance)
    {
        if (resolution == 0) throw argument_error("checkerboard resolution must be >= 1");
        if (mass.size() != resolution * resolution) {
            throw argument_error("checkerboard mass has " + std::to_string(mass.size()) +
                                 " entries, expected " + std::to_string(resolution * resolution));
        }
        CheckerboardCopula cb(resolution, std::move(mass));
        if (auto why = cb.invariant_violation(tol); !why.empty()) throw argument_error(why);
        return cb;
    }

    /// Independence: every cell holds 1/N^2.
    static CheckerboardCopula product(std::size_t resolution)
    {
        if (resolution == 0) throw argument_error("checkerboard resolution must be >= 1");
        const double nn = static_cast<double>(resolution);
        return CheckerboardCopula(resolution, std::vector<double>(resolution * resolution, 1.0 / (nn * nn)));
    }

    /// Checkerboard of the comonotone copula M: mass 1/N on the diagonal.
    static CheckerboardCopula comonotone(std::size_t resolution)
    {
        if (resolution == 0) throw argument_error("checkerboard resolution must be >= 1");
        std::vector<double> mass(resolution * resolution, 0.0);
        for (std::size_t i = 0; i < resolution; ++i) mass[i * resolution + i] = 1.0 / static_cast<double>(resolution);
        return CheckerboardCopula(resolution, std::move(mass));
    }

    std::size_t resolution() const noexcept { return n_; }
    double mass(std::size_t i, std::size_t j) const { return mass_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {mass_.data() + i * n_, n_}; }
    std::span<const double> masses() const noexcept { return mass_; }

    /// Empty string if the invariants hold within tol, otherwise a description.
    std::string invariant_violation(double tol = checkerboard_tolerance) const
    {
        std::vector<double> col(n_, 0.0);
        double total = 0.0;
        const double target = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double rs = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                const double m = mass_[i * n_ + j];
                if (!(m >= 0.0)) return "negative or NaN checkerboard mass";
                rs += m;
                col[j] += m;
            }
            if (std::abs(rs - target) > tol) return "row " + std::to_string(i) + " does not sum to 1/N";
            total += rs;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::abs(col[j] - target) > tol) return "column " + std::to_string(j) + " does not sum to 1/N";
        }
        if (std::abs(total - 1.0) > tol) return "checkerboard mass does not sum to 1";
        return {};
    }

    friend bool operator==(const CheckerboardCopula&, const CheckerboardCopula&) = default;

private:
    CheckerboardCopula(std::size_t n, std::vector<double> mass) : n_(n), mass_(std::move(mass)) {}

    friend CheckerboardCopula checkerboard_aggregate(const EmpiricalCopula&, std::size_t);
    friend CheckerboardCopula checkerboard_aggregate(const CheckerboardCopula&, std::size_t);
    friend CheckerboardCopula transpose(const CheckerboardCopula&);

    std::size_t n_ = 0;
    std::vector<double> mass_;
};

namespace detail {

/// Neumaier-compensated accumulation into a flat array.
class CompensatedGrid {
public:
    explicit CompensatedGrid(std::size_t size) : sum_(size, 0.0), comp_(size, 0.0) {}

    void add(std::size_t k, double x)
    {
        const double s = sum_[k];
        const double t = s + x;
        comp_[k] += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        sum_[k] = t;
    }

    std::vector<double> finish() &&
    {
        for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += comp_[k];
        comp_.clear();
        comp_.shrink_to_fit();
        return std::move(sum_);
    }

private:
    std::vector<double> sum_;
    std::vector<double> comp_;
};

/// Fractions of the interval [lo, hi) (units of 1/n) falling into each of the
/// N strips of [0, 1]. Overlaps are integers in units of 1/(n N).
struct StripOverlap {
    std::size_t strip;
    double fraction;
};

inline void strip_overlaps(std::uint64_t lo, std::uint64_t hi, std::uint64_t n, std::uint64_t N,
                           std::vector<StripOverlap>& out)
{
    out.clear();
    const std::uint64_t a = lo * N;
    const std::uint64_t b = hi * N;
    const std::uint64_t width = b - a;
    const std::uint64_t first = a / n;
    const std::uint64_t last = (b - 1) / n;
    for (std::uint64_t k = first; k <= last; ++k) {
        const std::uint64_t from = std::max(a, k * n);
        const std::uint64_t to = std::min(b, (k + 1) * n);
        if (to > from) {
            out.push_back({static_cast<std::size_t>(k),
                           static_cast<double>(to - from) / static_cast<double>(width)});
        }
    }
}

}  // namespace detail

/// N-checkerboard approximation of the empirical copula: each rectangle
/// contributes its mass times the fraction of its area inside each square.
inline CheckerboardCopula checkerboard_aggregate(const EmpiricalCopula& ecop, std::size_t N)
{
    if (N < 1) throw argument_error("checkerboard resolution must be >= 1");
    if (ecop.n == 0) throw data_error("empty input");
    const std::uint64_t n = ecop.n;
    const double inv_n = 1.0 / static_cast<double>(n);

    detail::CompensatedGrid grid(N * N);
    std::vector<detail::StripOverlap> xs, ys;
    for (const auto& rc : ecop.rects) {
        detail::strip_overlaps(rc.u_top - rc.r, rc.u_top, n, N, xs);
        detail::strip_overlaps(rc.v_top - rc.s, rc.v_top, n, N, ys);
        const double mass = rc.t * inv_n;
        for (const auto& ox : xs) {
            const double mx = mass * ox.fraction;
            for (const auto& oy : ys) grid.add(ox.strip * N + oy.strip, mx * oy.fraction);
        }
    }
    return CheckerboardCopula(N, std::move(grid).finish());
}

/// Re-aggregates a checkerboard of any resolution onto an N-grid. Aggregating
/// onto its own resolution returns the board unchanged.
inline CheckerboardCopula checkerboard_aggregate(const CheckerboardCopula& cb, std::size_t N)
{
    if (N < 1) throw argument_error("checkerboard resolution must be >= 1");
    const std::size_t M = cb.resolution();
    if (M == N) return cb;

    detail::CompensatedGrid grid(N * N);
    std::vector<detail::StripOverlap> xs, ys;
    for (std::size_t i = 0; i < M; ++i) {
        detail::strip_overlaps(i, i + 1, M, N, xs);
        for (std::size_t j = 0; j < M; ++j) {
            const double m = cb.mass(i, j);
            if (m == 0.0) continue;
            detail::strip_overlaps(j, j + 1, M, N, ys);
            for (const auto& ox : xs) {
                for (const auto& oy : ys) grid.add(ox.strip * N + oy.strip, m * ox.fraction * oy.fraction);
            }
        }
    }
    return CheckerboardCopula(N, std::move(grid).finish());
}

inline CheckerboardCopula transpose(const CheckerboardCopula& cb)
{
    const std::size_t N = cb.resolution();
    std::vector<double> out(N * N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) out[j * N + i] = cb.mass(i, j);
    }
    return CheckerboardCopula(N, std::move(out));
}

namespace detail {

/// Values of the strip conditional CDF at the cell boundaries j/N, j = 0..N.
inline void strip_cdf_knots(std::span<const double> row, std::vector<double>& knots)
{
    const std::size_t N = row.size();
    knots.resize(N + 1);
    knots[0] = 0.0;
    double running = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        running += row[j];
        knots[j + 1] = running * static_cast<double>(N);
    }
}

}  // namespace detail

/// Conditional CDF y -> K(x, [0, y]) for x in x-strip `strip` (zero-based):
/// piecewise linear between the cell boundaries.
inline double conditional_cdf(const CheckerboardCopula& cb, std::size_t strip, double y)
{
    const std::size_t N = cb.resolution();
    if (strip >= N) throw argument_error("conditional_cdf: strip index out of range");
    if (!(y >= 0.0 && y <= 1.0)) throw argument_error("conditional_cdf: y must lie in [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;
    const double scaled = y * static_cast<double>(N);
    const auto cell = std::min(static_cast<std::size_t>(scaled), N - 1);
    const auto row = cb.row(strip);
    double below = 0.0;
    for (std::size_t k = 0; k < cell; ++k) below += row[k];
    const double frac = scaled - static_cast<double>(cell);
    return std::clamp(static_cast<double>(N) * (below + frac * row[cell]), 0.0, 1.0);
}

/// Copula value C(x, y) of the checkerboard (bilinear inside every square).
inline double checkerboard_cdf(const CheckerboardCopula& cb, double x, double y)
{
    const std::size_t N = cb.resolution();
    const double nn = static_cast<double>(N);
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double fx = std::clamp(x * nn - static_cast<double>(i), 0.0, 1.0);
        if (fx == 0.0) break;
        for (std::size_t j = 0; j < N; ++j) {
            const double fy = std::clamp(y * nn - static_cast<double>(j), 0.0, 1.0);
            if (fy == 0.0) break;
            total += cb.mass(i, j) * fx * fy;
        }
    }
    return total;
}

/// Index of the half-open cell [k/N, (k+1)/N) containing t; the last cell is
/// closed at 1.
inline std::size_t cell_index(double t, std::size_t N)
{
    if (!(t >= 0.0 && t <= 1.0)) throw argument_error("cell_index: coordinate outside [0,1]");
    const auto k = static_cast<std::size_t>(t * static_cast<double>(N));
    return std::min(k, N - 1);
}

}  // namespace qad
