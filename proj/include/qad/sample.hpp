#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qad/error.hpp"

namespace qad {

/// Paired real observations (x_i, y_i). Lengths match and every value is finite.
class BivariateSample {
public:
    BivariateSample() = default;

    BivariateSample(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys))
    {
        if (xs_.size() != ys_.size()) {
            throw data_error("sample columns differ in length (" + std::to_string(xs_.size()) +
                             " vs " + std::to_string(ys_.size()) + ")");
        }
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(xs_.begin(), xs_.end(), finite) ||
            !std::all_of(ys_.begin(), ys_.end(), finite)) {
            throw data_error("sample contains non-finite values");
        }
    }

    std::size_t size() const noexcept { return xs_.size(); }
    bool empty() const noexcept { return xs_.empty(); }
    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }

    /// The sample (y_i, x_i).
    BivariateSample swapped() const { return BivariateSample(ys_, xs_, unchecked{}); }

    friend bool operator==(const BivariateSample&, const BivariateSample&) = default;

private:
    struct unchecked {};
    BivariateSample(std::vector<double> xs, std::vector<double> ys, unchecked)
        : xs_(std::move(xs)), ys_(std::move(ys)) {}

    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// Max-ranks of one margin: rank[i] = #{j : value_j <= value_i}, so the
/// empirical CDF at value_i is rank[i] / n. mult[i] is the number of
/// observations sharing value_i.
struct MarginRanks {
    std::vector<std::uint32_t> rank;
    std::vector<std::uint32_t> mult;
    std::size_t n_unique = 0;
};

namespace detail {

inline MarginRanks max_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    MarginRanks out;
    out.rank.resize(n);
    out.mult.resize(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && values[order[stop]] == values[order[start]]) ++stop;
        const auto top = static_cast<std::uint32_t>(stop);
        const auto count = static_cast<std::uint32_t>(stop - start);
        for (std::size_t k = start; k < stop; ++k) {
            out.rank[order[k]] = top;
            out.mult[order[k]] = count;
        }
        ++out.n_unique;
        start = stop;
    }
    return out;
}

/// Same as max_ranks for integer keys in [0, key_bound), via counting.
inline MarginRanks max_ranks_from_keys(std::span<const std::uint32_t> keys, std::size_t key_bound)
{
    std::vector<std::uint32_t> count(key_bound + 1, 0);
    for (auto k : keys) ++count[k];

    // cum[k] = number of keys <= k
    std::vector<std::uint32_t> cum(key_bound, 0);
    std::uint32_t running = 0;
    std::size_t n_unique = 0;
    for (std::size_t k = 0; k < key_bound; ++k) {
        running += count[k];
        cum[k] = running;
        if (count[k] > 0) ++n_unique;
    }

    MarginRanks out;
    out.rank.resize(keys.size());
    out.mult.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        out.rank[i] = cum[keys[i]];
        out.mult[i] = count[keys[i]];
    }
    out.n_unique = n_unique;
    return out;
}

}  // namespace detail

/// Pseudo-observations (u_i, v_i) = (F_n(x_i), G_n(y_i)) stored as integer
/// max-ranks: u_i = rank_u[i] / n. Ties are kept, never broken.
struct PseudoObservations {
    std::size_t n = 0;
    MarginRanks u;
    MarginRanks v;

    double u_at(std::size_t i) const { return static_cast<double>(u.rank[i]) / static_cast<double>(n); }
    double v_at(std::size_t i) const { return static_cast<double>(v.rank[i]) / static_cast<double>(n); }

    std::vector<double> us() const
    {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = u_at(i);
        return out;
    }
    std::vector<double> vs() const
    {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = v_at(i);
        return out;
    }

    std::size_t n_unique_u() const noexcept { return u.n_unique; }
    std::size_t n_unique_v() const noexcept { return v.n_unique; }

    PseudoObservations swapped() const { return PseudoObservations{n, v, u}; }
};

inline PseudoObservations pseudo_observations(const BivariateSample& sample)
{
    if (sample.empty()) throw data_error("empty input");
    return PseudoObservations{sample.size(), detail::max_ranks(sample.xs()),
                              detail::max_ranks(sample.ys())};
}

}  // namespace qad
