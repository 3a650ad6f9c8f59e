#pragma once

// The qad estimator: q(X,Y) = zeta_1 of the empirical N-checkerboard of the
// sample, q(Y,X) the same for the swapped sample, plus permutation p-values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qad/checkerboard.hpp"
#include "qad/empirical_copula.hpp"
#include "qad/error.hpp"
#include "qad/metrics.hpp"
#include "qad/parallel.hpp"
#include "qad/random.hpp"
#include "qad/sample.hpp"

namespace qad {

/// Produces one null replicate for the symmetry test from the observed
/// pseudo-observations. Must be a pure function of its arguments.
using AsymmetryResampler = std::function<PseudoObservations(const PseudoObservations&, Rng&)>;

/// Default symmetry null: each pair (u_i, v_i) is swapped to (v_i, u_i) with
/// probability 1/2, then both columns are re-ranked. Values that coincide only
/// because one came from u and the other from v are ordered by a per-replicate
/// coin; ties present in the data stay tied.
inline PseudoObservations coordinate_swap_resample(const PseudoObservations& pobs, Rng& rng)
{
    const std::size_t n = pobs.n;
    const bool u_first = rng.coin();
    const std::uint32_t u_bit = u_first ? 0u : 1u;
    const std::uint32_t v_bit = 1u - u_bit;
    std::vector<std::uint32_t> kx(n), ky(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t ku = 2 * pobs.u.rank[i] + u_bit;
        const std::uint32_t kv = 2 * pobs.v.rank[i] + v_bit;
        if (rng.coin()) {
            kx[i] = kv;
            ky[i] = ku;
        } else {
            kx[i] = ku;
            ky[i] = kv;
        }
    }
    const std::size_t bound = 2 * n + 2;
    return PseudoObservations{n, detail::max_ranks_from_keys(kx, bound), detail::max_ranks_from_keys(ky, bound)};
}

struct QadOptions {
    std::size_t permutations = 0;  ///< B; 0 skips the tests
    std::uint64_t seed = 0;
    std::optional<std::size_t> resolution_override;
    std::size_t min_n_warning_threshold = 16;
    unsigned threads = 0;  ///< 0 = $QAD_THREADS or hardware concurrency
    AsymmetryResampler asymmetry_resampler = coordinate_swap_resample;
};

struct QadResult {
    double q_xy = 0.0;  ///< dependence of Y on X
    double q_yx = 0.0;  ///< dependence of X on Y
    double mean_dependence = 0.0;
    double asymmetry = 0.0;
    std::optional<double> p_q_xy;
    std::optional<double> p_q_yx;
    std::optional<double> p_asymmetry;
    std::size_t n = 0;
    std::size_t n_unique_x = 0;
    std::size_t n_unique_y = 0;
    std::size_t resolution = 0;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct DependencePValues {
    double p_q_xy = 1.0;
    double p_q_yx = 1.0;
};

/// Replicate statistics within this distance below the observed value still
/// count as "at least as extreme".
inline constexpr double p_value_tolerance = 1e-12;

inline std::size_t isqrt(std::size_t m) noexcept
{
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
    while (r * r > m) --r;
    while ((r + 1) * (r + 1) <= m) ++r;
    return r;
}

/// N = max(1, floor(sqrt(min(n_unique_x, n_unique_y)))).
inline std::size_t resolution_rule(std::size_t n, std::size_t n_unique_x, std::size_t n_unique_y,
                                   std::vector<std::string>* warnings = nullptr,
                                   std::size_t min_n = 16)
{
    if (n < 1) throw argument_error("resolution_rule: n must be >= 1");
    if (warnings && n < min_n) {
        warnings->push_back("sample size " + std::to_string(n) + " is below recommended minimum of " +
                            std::to_string(min_n));
    }
    return std::max<std::size_t>(1, isqrt(std::min(n_unique_x, n_unique_y)));
}

namespace detail {

inline double q_of(const PseudoObservations& pobs, std::size_t N)
{
    return zeta1(checkerboard_aggregate(empirical_copula(pobs), N));
}

/// Pairs sorted by (u rank, v rank), so that every downstream result,
/// permutation p-values included, ignores the input row order.
inline PseudoObservations canonical_order(const PseudoObservations& pobs)
{
    const std::size_t n = pobs.n;
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (pobs.u.rank[a] != pobs.u.rank[b]) return pobs.u.rank[a] < pobs.u.rank[b];
        return pobs.v.rank[a] < pobs.v.rank[b];
    });
    PseudoObservations out{n, {}, {}};
    auto gather = [&](const MarginRanks& src, MarginRanks& dst) {
        dst.rank.resize(n);
        dst.mult.resize(n);
        dst.n_unique = src.n_unique;
        for (std::size_t i = 0; i < n; ++i) {
            dst.rank[i] = src.rank[idx[i]];
            dst.mult[i] = src.mult[idx[i]];
        }
    };
    gather(pobs.u, out.u);
    gather(pobs.v, out.v);
    return out;
}

inline constexpr std::uint64_t dependence_stream = 0x646570;  // "dep"
inline constexpr std::uint64_t asymmetry_stream = 0x617379;   // "asy"

inline std::size_t chosen_resolution(const PseudoObservations& pobs, const QadOptions& opts,
                                     std::vector<std::string>* warnings)
{
    const std::size_t ruled =
        resolution_rule(pobs.n, pobs.n_unique_u(), pobs.n_unique_v(), warnings, opts.min_n_warning_threshold);
    if (opts.resolution_override) {
        if (*opts.resolution_override < 1) throw argument_error("resolution override must be >= 1");
        return *opts.resolution_override;
    }
    return ruled;
}

inline double add_one_p(std::size_t hits, std::size_t B)
{
    return static_cast<double>(hits + 1) / static_cast<double>(B + 1);
}

inline DependencePValues dependence_pvalues(const PseudoObservations& pobs, std::size_t N, double q_xy,
                                            double q_yx, std::size_t B, std::uint64_t seed, unsigned threads)
{
    if (B < 1) throw argument_error("permutation test needs at least one permutation");
    const std::uint64_t base = derive_seed(seed, dependence_stream);
    std::vector<unsigned char> hit_xy(B, 0), hit_yx(B, 0);
    parallel_for(B, threads, [&](std::size_t b) {
        Rng rng(derive_seed(base, b));
        std::vector<std::uint32_t> perm(pobs.n);
        for (std::size_t i = 0; i < pobs.n; ++i) perm[i] = static_cast<std::uint32_t>(i);
        shuffle(std::span<std::uint32_t>(perm), rng);
        PseudoObservations shuffled{pobs.n, pobs.u, {}};
        shuffled.v.rank.resize(pobs.n);
        shuffled.v.mult.resize(pobs.n);
        shuffled.v.n_unique = pobs.v.n_unique;
        for (std::size_t i = 0; i < pobs.n; ++i) {
            shuffled.v.rank[i] = pobs.v.rank[perm[i]];
            shuffled.v.mult[i] = pobs.v.mult[perm[i]];
        }
        hit_xy[b] = q_of(shuffled, N) >= q_xy - p_value_tolerance;
        hit_yx[b] = q_of(shuffled.swapped(), N) >= q_yx - p_value_tolerance;
    });
    std::size_t cx = 0, cy = 0;
    for (std::size_t b = 0; b < B; ++b) {
        cx += hit_xy[b];
        cy += hit_yx[b];
    }
    return {add_one_p(cx, B), add_one_p(cy, B)};
}

inline double asymmetry_pvalue(const PseudoObservations& pobs, std::size_t N, double observed_a, std::size_t B,
                               std::uint64_t seed, unsigned threads, const AsymmetryResampler& resampler)
{
    if (B < 1) throw argument_error("permutation test needs at least one permutation");
    const AsymmetryResampler& draw = resampler ? resampler : AsymmetryResampler(coordinate_swap_resample);
    const std::uint64_t base = derive_seed(seed, asymmetry_stream);
    const double target = std::abs(observed_a) - p_value_tolerance;
    std::vector<unsigned char> hit(B, 0);
    parallel_for(B, threads, [&](std::size_t b) {
        Rng rng(derive_seed(base, b));
        const PseudoObservations rep = draw(pobs, rng);
        const double a = q_of(rep, N) - q_of(rep.swapped(), N);
        hit[b] = std::abs(a) >= target;
    });
    std::size_t c = 0;
    for (auto h : hit) c += h;
    return add_one_p(c, B);
}

}  // namespace detail

/// Permutation test of independence: the y-sequence is shuffled B times and
/// q recomputed at the observed resolution; p = (1 + #{q_b >= q}) / (B + 1).
inline DependencePValues permutation_test_dependence(const BivariateSample& sample, std::size_t B,
                                                     std::uint64_t seed, const QadOptions& opts = {})
{
    if (sample.size() < 2) throw numeric_error("need at least two observations");
    const PseudoObservations pobs = detail::canonical_order(pseudo_observations(sample));
    const std::size_t N = detail::chosen_resolution(pobs, opts, nullptr);
    return detail::dependence_pvalues(pobs, N, detail::q_of(pobs, N), detail::q_of(pobs.swapped(), N), B, seed,
                                      opts.threads);
}

/// Randomization test of H0: q(X,Y) = q(Y,X), using opts.asymmetry_resampler
/// to draw null replicates; p = (1 + #{|a_b| >= |a|}) / (B + 1).
inline double permutation_test_asymmetry(const BivariateSample& sample, std::size_t B, std::uint64_t seed,
                                         const QadOptions& opts = {})
{
    if (sample.size() < 2) throw numeric_error("need at least two observations");
    const PseudoObservations pobs = detail::canonical_order(pseudo_observations(sample));
    const std::size_t N = detail::chosen_resolution(pobs, opts, nullptr);
    const double a = detail::q_of(pobs, N) - detail::q_of(pobs.swapped(), N);
    return detail::asymmetry_pvalue(pobs, N, a, B, seed, opts.threads, opts.asymmetry_resampler);
}

inline QadResult qad_compute(const BivariateSample& sample, const QadOptions& opts = {})
{
    if (sample.size() < 2) throw numeric_error("need at least two observations");

    QadResult res;
    const PseudoObservations pobs = detail::canonical_order(pseudo_observations(sample));
    const PseudoObservations pobs_swapped = detail::canonical_order(pobs.swapped());
    const std::size_t N = detail::chosen_resolution(pobs, opts, &res.warnings);

    res.n = pobs.n;
    res.n_unique_x = pobs.n_unique_u();
    res.n_unique_y = pobs.n_unique_v();
    res.resolution = N;
    res.permutations = opts.permutations;
    res.seed = opts.seed;
    if (res.n_unique_x == 1 && res.n_unique_y == 1) {
        res.warnings.emplace_back("both variables are constant; dependence is zero by convention");
    } else if (res.n_unique_x == 1 || res.n_unique_y == 1) {
        res.warnings.emplace_back("one variable is constant; dependence is zero by convention");
    }

    res.q_xy = detail::q_of(pobs, N);
    res.q_yx = detail::q_of(pobs_swapped, N);
    res.mean_dependence = (res.q_xy + res.q_yx) / 2.0;
    res.asymmetry = res.q_xy - res.q_yx;

    if (opts.permutations > 0) {
        const auto dep =
            detail::dependence_pvalues(pobs, N, res.q_xy, res.q_yx, opts.permutations, opts.seed, opts.threads);
        res.p_q_xy = dep.p_q_xy;
        res.p_q_yx = dep.p_q_yx;
        res.p_asymmetry = detail::asymmetry_pvalue(pobs, N, res.asymmetry, opts.permutations, opts.seed,
                                                   opts.threads, opts.asymmetry_resampler);
    }
    return res;
}

}  // namespace qad
