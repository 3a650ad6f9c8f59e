#pragma once

// Conditional prediction tables: the checkerboard of one direction, rescaled
// to row-stochastic form, with data-scale interval endpoints for both margins.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qad/checkerboard.hpp"
#include "qad/empirical_copula.hpp"
#include "qad/error.hpp"
#include "qad/estimator.hpp"
#include "qad/sample.hpp"

namespace qad {

enum class Direction { xy, yx };

inline const char* to_string(Direction d) { return d == Direction::xy ? "xy" : "yx"; }

inline Direction parse_direction(const std::string& s)
{
    if (s == "xy") return Direction::xy;
    if (s == "yx") return Direction::yx;
    throw argument_error("direction must be 'xy' or 'yx', got '" + s + "'");
}

/// Rows are strips of the conditioning variable (X for xy, Y for yx);
/// x_breaks and y_breaks always refer to the X and Y margins.
struct PredictionTable {
    Direction direction = Direction::xy;
    std::size_t N = 0;
    std::vector<double> cond;  ///< N x N, row-major
    std::vector<double> x_breaks;
    std::vector<double> y_breaks;

    double at(std::size_t i, std::size_t j) const { return cond[i * N + j]; }
    const std::vector<double>& conditioning_breaks() const
    {
        return direction == Direction::xy ? x_breaks : y_breaks;
    }
    const std::vector<double>& target_breaks() const
    {
        return direction == Direction::xy ? y_breaks : x_breaks;
    }
};

struct PredictedInterval {
    double lo = 0.0;
    double hi = 0.0;
    double probability = 0.0;
};

struct Prediction {
    Direction direction = Direction::xy;
    double value = 0.0;
    std::size_t strip = 0;  ///< zero-based conditioning strip
    double strip_lo = 0.0;
    double strip_hi = 0.0;
    std::vector<PredictedInterval> intervals;  ///< one per target cell
};

/// Order statistics at positions ceil(j n / N), j = 0..N (position 0 read as 1).
inline std::vector<double> quantile_breaks(std::span<const double> values, std::size_t N)
{
    if (values.empty()) throw data_error("empty input");
    if (N < 1) throw argument_error("resolution must be >= 1");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> out(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        const std::size_t pos = (j * n + N - 1) / N;
        out[j] = sorted[std::max<std::size_t>(pos, 1) - 1];
    }
    return out;
}

/// N defaults to resolution_rule on the sample.
inline PredictionTable prediction_table(const BivariateSample& sample, Direction direction,
                                        std::optional<std::size_t> resolution = std::nullopt)
{
    if (sample.size() < 2) throw numeric_error("need at least two observations");
    const PseudoObservations forward = pseudo_observations(sample);
    const std::size_t N =
        resolution ? *resolution : resolution_rule(forward.n, forward.n_unique_u(), forward.n_unique_v());
    if (N < 1) throw argument_error("resolution must be >= 1");

    const PseudoObservations pobs = direction == Direction::xy ? forward : forward.swapped();
    const CheckerboardCopula cb = checkerboard_aggregate(empirical_copula(pobs), N);

    PredictionTable t;
    t.direction = direction;
    t.N = N;
    t.cond.resize(N * N);
    const double nn = static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) t.cond[i * N + j] = nn * cb.mass(i, j);
    t.x_breaks = quantile_breaks(sample.xs(), N);
    t.y_breaks = quantile_breaks(sample.ys(), N);
    return t;
}

/// Strip i covers [b_i, b_{i+1}); the last strip is closed.
inline std::size_t locate_strip(const std::vector<double>& breaks, double value)
{
    const std::size_t N = breaks.size() - 1;
    if (!(value >= breaks.front() && value <= breaks.back())) {
        throw data_error("extrapolation not supported: value outside the observed range [" +
                         std::to_string(breaks.front()) + ", " + std::to_string(breaks.back()) + "]");
    }
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), value);
    const auto k = static_cast<std::size_t>(it - breaks.begin());
    return std::min(k - 1, N - 1);
}

inline Prediction predict(const PredictionTable& table, double value)
{
    const auto& cb = table.conditioning_breaks();
    const auto& tb = table.target_breaks();
    Prediction p;
    p.direction = table.direction;
    p.value = value;
    p.strip = locate_strip(cb, value);
    p.strip_lo = cb[p.strip];
    p.strip_hi = cb[p.strip + 1];
    p.intervals.reserve(table.N);
    for (std::size_t j = 0; j < table.N; ++j) p.intervals.push_back({tb[j], tb[j + 1], table.at(p.strip, j)});
    return p;
}

/// Folds zero-width intervals into the following one (the preceding one for
/// the last), for display. Probabilities are preserved in total.
inline std::vector<PredictedInterval> merge_zero_width(const std::vector<PredictedInterval>& in)
{
    std::vector<PredictedInterval> out;
    double carry = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k) {
        if (in[k].lo == in[k].hi && k + 1 < in.size()) {
            carry += in[k].probability;
            continue;
        }
        if (in[k].lo == in[k].hi && !out.empty()) {
            out.back().probability += carry + in[k].probability;
            carry = 0.0;
            continue;
        }
        out.push_back({in[k].lo, in[k].hi, in[k].probability + carry});
        carry = 0.0;
    }
    return out;
}

}  // namespace qad
