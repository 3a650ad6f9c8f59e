#pragma once

// Exact metrics between checkerboard copulas.
//
// Inside a strip the conditional CDF of a checkerboard is piecewise linear
// with knots at j/N, so every integrand below is |linear| on each cell and is
// integrated in closed form. The copula itself is bilinear on each square, so
// sup-norm distances are attained on the (N+1)^2 grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qad/checkerboard.hpp"
#include "qad/error.hpp"

namespace qad {

namespace detail {

/// Integral over [0, h] of |g0 + (g1 - g0) t / h|.
inline double abs_linear_integral(double g0, double g1, double h) noexcept
{
    if ((g0 >= 0.0 && g1 >= 0.0) || (g0 <= 0.0 && g1 <= 0.0)) {
        return 0.5 * h * (std::abs(g0) + std::abs(g1));
    }
    // sign change: two triangles meeting at the root
    return 0.5 * h * (g0 * g0 + g1 * g1) / (std::abs(g0) + std::abs(g1));
}

inline void require_same_resolution(const CheckerboardCopula& a, const CheckerboardCopula& b)
{
    if (a.resolution() != b.resolution()) {
        throw numeric_error("checkerboards have different resolutions (" + std::to_string(a.resolution()) +
                            " vs " + std::to_string(b.resolution()) + ")");
    }
}

/// Sum over strips of the integral of |F_i(y) - R(y)| where R has knots `ref`.
inline double strip_l1_against(const CheckerboardCopula& cb, const std::vector<double>& ref_row_knots,
                               std::size_t strip, std::vector<double>& knots)
{
    const std::size_t N = cb.resolution();
    const double h = 1.0 / static_cast<double>(N);
    strip_cdf_knots(cb.row(strip), knots);
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        acc += abs_linear_integral(knots[j] - ref_row_knots[j], knots[j + 1] - ref_row_knots[j + 1], h);
    }
    return acc;
}

}  // namespace detail

/// D1(A, B) = int_0^1 int_0^1 |K_A(x,[0,y]) - K_B(x,[0,y])| dx dy.
inline double d1(const CheckerboardCopula& a, const CheckerboardCopula& b)
{
    detail::require_same_resolution(a, b);
    const std::size_t N = a.resolution();
    std::vector<double> ka, kb;
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        detail::strip_cdf_knots(b.row(i), kb);
        total += detail::strip_l1_against(a, kb, i, ka);
    }
    return total / static_cast<double>(N);
}

/// D1(A, Pi). The reference knots come from the same routine applied to a
/// product-copula row, so d1_pi(cb) and d1(cb, product) agree bit for bit.
inline double d1_pi(const CheckerboardCopula& cb)
{
    const std::size_t N = cb.resolution();
    const double nn = static_cast<double>(N);
    const std::vector<double> product_row(N, 1.0 / (nn * nn));
    std::vector<double> ref, knots;
    detail::strip_cdf_knots(product_row, ref);
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) total += detail::strip_l1_against(cb, ref, i, knots);
    return total / nn;
}

/// zeta_1 = 3 D1(A, Pi), in [0, 1].
inline double zeta1(const CheckerboardCopula& cb)
{
    return std::clamp(3.0 * d1_pi(cb), 0.0, 1.0);
}

/// D_inf(A, B) = sup_y Phi(y), Phi(y) = int |K_A(x,[0,y]) - K_B(x,[0,y])| dx.
/// Phi is piecewise linear; it is evaluated at every cell boundary and at
/// every interior root of a strip difference.
inline double d_infty_markov(const CheckerboardCopula& a, const CheckerboardCopula& b)
{
    detail::require_same_resolution(a, b);
    const std::size_t N = a.resolution();
    const double nn = static_cast<double>(N);

    // diff[i * (N+1) + j] = F_i^A(j/N) - F_i^B(j/N)
    std::vector<double> diff(N * (N + 1));
    std::vector<double> ka, kb;
    for (std::size_t i = 0; i < N; ++i) {
        detail::strip_cdf_knots(a.row(i), ka);
        detail::strip_cdf_knots(b.row(i), kb);
        for (std::size_t j = 0; j <= N; ++j) diff[i * (N + 1) + j] = ka[j] - kb[j];
    }

    auto phi_at = [&](std::size_t j, double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double g0 = diff[i * (N + 1) + j];
            const double g1 = j < N ? diff[i * (N + 1) + j + 1] : g0;
            s += std::abs(g0 + (g1 - g0) * t);
        }
        return s / nn;
    };

    double best = 0.0;
    for (std::size_t j = 0; j <= N; ++j) best = std::max(best, phi_at(j, 0.0));
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
            const double g0 = diff[i * (N + 1) + j];
            const double g1 = diff[i * (N + 1) + j + 1];
            if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
                best = std::max(best, phi_at(j, g0 / (g0 - g1)));
            }
        }
    }
    return best;
}

/// Uniform metric d_inf(A, B) = max |A(x,y) - B(x,y)|, evaluated on the grid.
inline double d_infty(const CheckerboardCopula& a, const CheckerboardCopula& b)
{
    detail::require_same_resolution(a, b);
    const std::size_t N = a.resolution();
    // running column-prefix of (A - B) mass, swept row by row
    std::vector<double> col(N + 1, 0.0);
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row_running = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            row_running += a.mass(i, j) - b.mass(i, j);
            col[j + 1] += row_running;
            best = std::max(best, std::abs(col[j + 1]));
        }
    }
    return best;
}

}  // namespace qad
