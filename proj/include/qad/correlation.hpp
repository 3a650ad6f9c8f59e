#pragma once

// Pearson and Spearman baselines, pairwise complete.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "qad/data_table.hpp"
#include "qad/pairwise.hpp"

namespace qad {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 2) return missing_value;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return missing_value;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Ranks 1..n with ties averaged.
inline std::vector<double> average_ranks(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t s = 0; s < n;) {
        std::size_t e = s;
        while (e < n && v[order[e]] == v[order[s]]) ++e;
        const double mid = (static_cast<double>(s + 1) + static_cast<double>(e)) / 2.0;
        for (std::size_t t = s; t < e; ++t) r[order[t]] = mid;
        s = e;
    }
    return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    return pearson(average_ranks(x), average_ranks(y));
}

struct CorrelationMatrices {
    std::vector<std::string> variables;
    SquareMatrix pearson_r;
    SquareMatrix r_squared;
    SquareMatrix spearman_rho;
};

inline CorrelationMatrices baseline_correlations(const DataTable& data)
{
    const std::size_t k = data.cols();
    CorrelationMatrices out{data.names(), SquareMatrix(k), SquareMatrix(k), SquareMatrix(k)};
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t j = f; j < k; ++j) {
            const auto [x, y] = complete_pairs(data.column(f), data.column(j));
            const double r = pearson(x, y);
            const double rho = spearman(x, y);
            out.pearson_r(f, j) = out.pearson_r(j, f) = r;
            out.r_squared(f, j) = out.r_squared(j, f) = r * r;
            out.spearman_rho(f, j) = out.spearman_rho(j, f) = rho;
        }
    }
    return out;
}

}  // namespace qad
