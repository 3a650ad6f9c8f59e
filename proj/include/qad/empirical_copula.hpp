#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qad/error.hpp"
#include "qad/sample.hpp"

namespace qad {

/// One distinct pseudo-observation pair and the rectangle its mass is spread
/// over. Coordinates are in units of 1/n: mass t/n lies uniformly on
/// [u_top - r, u_top] x [v_top - s, v_top].
struct CopulaRect {
    std::uint32_t u_top = 0;
    std::uint32_t v_top = 0;
    std::uint32_t r = 0;  ///< multiplicity of u_top among all u
    std::uint32_t s = 0;  ///< multiplicity of v_top among all v
    std::uint32_t t = 0;  ///< multiplicity of the pair

    friend bool operator==(const CopulaRect&, const CopulaRect&) = default;
};

/// Bilinear extension of the empirical subcopula, stored as rectangle masses.
/// Rectangles appear in order of first occurrence in the sample.
struct EmpiricalCopula {
    std::size_t n = 0;
    std::vector<CopulaRect> rects;

    std::size_t m() const noexcept { return rects.size(); }
};

inline EmpiricalCopula empirical_copula(const PseudoObservations& pobs)
{
    const std::size_t n = pobs.n;
    if (n == 0) throw data_error("empty input");

    EmpiricalCopula out;
    out.n = n;

    // Without ties in one margin every pair is distinct.
    if (pobs.u.n_unique == n || pobs.v.n_unique == n) {
        out.rects.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.rects.push_back({pobs.u.rank[i], pobs.v.rank[i], pobs.u.mult[i], pobs.v.mult[i], 1});
        }
        return out;
    }

    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t key = (std::uint64_t{pobs.u.rank[i]} << 32) | pobs.v.rank[i];
        auto [it, inserted] = index.try_emplace(key, out.rects.size());
        if (inserted) {
            out.rects.push_back({pobs.u.rank[i], pobs.v.rank[i], pobs.u.mult[i], pobs.v.mult[i], 1});
        } else {
            ++out.rects[it->second].t;
        }
    }
    return out;
}

/// mu_{A_n}([0,u] x [0,v]) by exact rectangle-overlap summation.
inline double ecop_cdf(const EmpiricalCopula& ecop, double u, double v)
{
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
        throw argument_error("ecop_cdf: coordinates must lie in [0,1]^2");
    }
    const double n = static_cast<double>(ecop.n);
    const double un = u * n;
    const double vn = v * n;
    double total = 0.0;
    for (const auto& rc : ecop.rects) {
        const double lo_u = static_cast<double>(rc.u_top) - rc.r;
        const double lo_v = static_cast<double>(rc.v_top) - rc.s;
        const double fu = std::clamp((un - lo_u) / rc.r, 0.0, 1.0);
        const double fv = std::clamp((vn - lo_v) / rc.s, 0.0, 1.0);
        total += rc.t * fu * fv;
    }
    return total / n;
}

}  // namespace qad
