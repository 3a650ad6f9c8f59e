#pragma once

// qad over every pair of columns, tie-based column filtering and the
// influence summary I_f^j = q[f][j] - q[j][f].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "qad/data_table.hpp"
#include "qad/error.hpp"
#include "qad/estimator.hpp"
#include "qad/parallel.hpp"
#include "qad/random.hpp"

namespace qad {

/// k x k matrix of doubles, row-major; NaN marks an absent cell.
struct SquareMatrix {
    std::size_t k = 0;
    std::vector<double> v;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : k(size), v(size * size, missing_value) {}

    double& operator()(std::size_t i, std::size_t j) { return v[i * k + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v[i * k + j]; }
};

struct DroppedColumn {
    std::string name;
    double max_single_value_prop = 0.0;
    double unique_prop = 0.0;
    std::string reason;
};

struct FilterResult {
    DataTable table;
    std::vector<DroppedColumn> dropped;
};

/// Drops columns whose most frequent value covers >= max_single_value_prop
/// of the present cells, or whose share of distinct values is below
/// min_unique_prop. All-missing columns are dropped.
inline FilterResult filter_columns(const DataTable& data, double max_single_value_prop = 0.25,
                                   std::optional<double> min_unique_prop = std::nullopt)
{
    if (!(max_single_value_prop > 0.0 && max_single_value_prop <= 1.0))
        throw argument_error("max_single_value_prop must lie in (0, 1]");
    FilterResult out;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        std::vector<double> present;
        for (double v : data.column(c))
            if (!is_missing(v)) present.push_back(v);
        DroppedColumn info{data.names()[c], 1.0, 0.0, {}};
        if (present.empty()) {
            info.reason = "no values";
            out.dropped.push_back(info);
            continue;
        }
        std::sort(present.begin(), present.end());
        std::size_t best = 0, unique = 0;
        for (std::size_t s = 0; s < present.size();) {
            std::size_t e = s;
            while (e < present.size() && present[e] == present[s]) ++e;
            best = std::max(best, e - s);
            ++unique;
            s = e;
        }
        const double m = static_cast<double>(present.size());
        info.max_single_value_prop = static_cast<double>(best) / m;
        info.unique_prop = static_cast<double>(unique) / m;
        if (info.max_single_value_prop >= max_single_value_prop) {
            info.reason = "single value proportion";
        } else if (min_unique_prop && info.unique_prop < *min_unique_prop) {
            info.reason = "unique proportion";
        }
        if (info.reason.empty()) {
            keep.push_back(c);
        } else {
            out.dropped.push_back(info);
        }
    }
    if (keep.empty()) throw data_error("all columns were dropped by the tie filter");
    out.table = data.select(keep);
    return out;
}

struct PairwiseOptions {
    QadOptions qad;
    bool listwise = false;
};

struct PairwiseResult {
    std::vector<std::string> variables;
    SquareMatrix q;    ///< q(f, j): dependence of column j on column f
    SquareMatrix p_q;
    SquareMatrix asymmetry;
    SquareMatrix p_asymmetry;
    SquareMatrix n_used;
    bool has_p_values = false;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t pair_seed(std::uint64_t seed, const std::string& a, const std::string& b)
{
    const std::string& lo = a < b ? a : b;
    const std::string& hi = a < b ? b : a;
    return derive_seed(seed, hash_name(lo + '\x1f' + hi));
}

}  // namespace detail

inline PairwiseResult pairwise_qad(const DataTable& data, const PairwiseOptions& opts = {})
{
    const std::size_t k = data.cols();
    if (k < 2) throw data_error("pairwise analysis needs at least two columns");
    const DataTable table = opts.listwise ? data.complete_rows() : data;

    PairwiseResult res;
    res.variables = table.names();
    res.q = res.p_q = res.asymmetry = res.p_asymmetry = res.n_used = SquareMatrix(k);
    res.has_p_values = opts.qad.permutations > 0;

    struct Job {
        std::size_t f, j;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < k; ++f)
        for (std::size_t j = f + 1; j < k; ++j) jobs.push_back({f, j});

    struct Outcome {
        std::optional<QadResult> r;
        std::size_t used = 0;
        std::string warning;
    };
    std::vector<Outcome> outcomes(jobs.size());

    parallel_for(jobs.size(), opts.qad.threads, [&](std::size_t idx) {
        // canonical orientation: the lexicographically smaller name plays X
        std::size_t a = jobs[idx].f, b = jobs[idx].j;
        if (table.names()[b] < table.names()[a]) std::swap(a, b);
        auto [xs, ys] = complete_pairs(table.column(a), table.column(b));
        outcomes[idx].used = xs.size();
        if (xs.size() < 2) {
            outcomes[idx].warning = "pair (" + table.names()[a] + ", " + table.names()[b] +
                                    ") has fewer than two complete rows; cell left missing";
            return;
        }
        QadOptions o = opts.qad;
        o.threads = 1;
        o.seed = detail::pair_seed(opts.qad.seed, table.names()[a], table.names()[b]);
        QadResult r = qad_compute(BivariateSample(std::move(xs), std::move(ys)), o);
        if (a != jobs[idx].f) {
            std::swap(r.q_xy, r.q_yx);
            std::swap(r.p_q_xy, r.p_q_yx);
            r.asymmetry = -r.asymmetry;
        }
        outcomes[idx].r = std::move(r);
    });

    for (std::size_t f = 0; f < k; ++f) {
        std::size_t present = 0;
        for (double v : table.column(f)) present += !is_missing(v);
        res.n_used(f, f) = static_cast<double>(present);
    }
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
        const auto [f, j] = jobs[idx];
        const auto& out = outcomes[idx];
        res.n_used(f, j) = res.n_used(j, f) = static_cast<double>(out.used);
        if (!out.warning.empty()) res.warnings.push_back(out.warning);
        if (!out.r) continue;
        const QadResult& r = *out.r;
        res.q(f, j) = r.q_xy;
        res.q(j, f) = r.q_yx;
        res.asymmetry(f, j) = r.asymmetry;
        res.asymmetry(j, f) = -r.asymmetry;
        if (r.p_q_xy) {
            res.p_q(f, j) = *r.p_q_xy;
            res.p_q(j, f) = *r.p_q_yx;
            res.p_asymmetry(f, j) = res.p_asymmetry(j, f) = *r.p_asymmetry;
        }
        for (const auto& w : r.warnings) {
            res.warnings.push_back(table.names()[f] + "/" + table.names()[j] + ": " + w);
        }
    }
    return res;
}

enum class InfluenceTest { sign, signed_rank, t_test };

inline InfluenceTest parse_influence_test(const std::string& s)
{
    if (s == "sign") return InfluenceTest::sign;
    if (s == "signed-rank" || s == "signed_rank") return InfluenceTest::signed_rank;
    if (s == "t" || s == "t-test" || s == "t_test") return InfluenceTest::t_test;
    throw argument_error("unknown influence test '" + s + "' (sign | signed-rank | t)");
}

struct InfluenceRow {
    std::string name;
    std::size_t partners = 0;
    double median_I = missing_value;
    double q25_I = missing_value;
    double q75_I = missing_value;
    double mean_influence_given = missing_value;
    double mean_influence_received = missing_value;
    double p_median_positive = missing_value;
};

/// Sample quantile, linear interpolation between order statistics (type 7).
inline double quantile_type7(std::vector<double> xs, double p)
{
    if (xs.empty()) return missing_value;
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

/// One-sided exact sign test of median > 0; zeros are discarded.
inline double sign_test_greater(const std::vector<double>& xs)
{
    std::size_t pos = 0, m = 0;
    for (double x : xs) {
        if (x == 0.0) continue;
        ++m;
        pos += x > 0.0;
    }
    if (m == 0 || pos == 0) return 1.0;
    const boost::math::binomial_distribution<double> bin(static_cast<double>(m), 0.5);
    return boost::math::cdf(boost::math::complement(bin, static_cast<double>(pos - 1)));
}

/// One-sided Wilcoxon signed-rank test of location > 0. Zeros are discarded,
/// tied magnitudes get midranks. Exact null distribution up to 300 nonzero
/// values, normal approximation with tie and continuity correction beyond.
inline double signed_rank_test_greater(const std::vector<double>& xs)
{
    std::vector<double> d;
    for (double x : xs)
        if (x != 0.0) d.push_back(x);
    const std::size_t m = d.size();
    if (m == 0) return 1.0;

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
    // doubled midranks are integers
    std::vector<std::size_t> r2(m);
    double tie_term = 0.0;
    for (std::size_t s = 0; s < m;) {
        std::size_t e = s;
        while (e < m && std::abs(d[order[e]]) == std::abs(d[order[s]])) ++e;
        const std::size_t doubled = s + 1 + e;  // 2 * midrank of ranks s+1..e
        for (std::size_t t = s; t < e; ++t) r2[order[t]] = doubled;
        const double g = static_cast<double>(e - s);
        tie_term += g * g * g - g;
        s = e;
    }
    std::size_t w2 = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (d[i] > 0) w2 += r2[i];

    if (m <= 300) {
        const std::size_t total = m * (m + 1);
        std::vector<double> dist(total + 1, 0.0);
        dist[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t i = 0; i < m; ++i) {
            reach += r2[i];
            for (std::size_t s = reach + 1; s-- > r2[i];) dist[s] = 0.5 * (dist[s] + dist[s - r2[i]]);
            for (std::size_t s = std::min(r2[i], reach + 1); s-- > 0;) dist[s] *= 0.5;
        }
        double p = 0.0;
        for (std::size_t s = w2; s <= total; ++s) p += dist[s];
        return std::min(1.0, p);
    }
    const double mm = static_cast<double>(m);
    const double mean = mm * (mm + 1) / 4.0;
    const double var = mm * (mm + 1) * (2 * mm + 1) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (static_cast<double>(w2) / 2.0 - mean - 0.5) / std::sqrt(var);
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

/// One-sided one-sample t test of mean > 0.
inline double t_test_greater(const std::vector<double>& xs)
{
    const std::size_t m = xs.size();
    if (m < 2) return missing_value;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    if (sd == 0.0) return mean > 0.0 ? 0.0 : 1.0;
    const double t = mean / (sd / std::sqrt(static_cast<double>(m)));
    const boost::math::students_t_distribution<double> dist(static_cast<double>(m - 1));
    return boost::math::cdf(boost::math::complement(dist, t));
}

inline std::vector<InfluenceRow> influence_summary(const PairwiseResult& pw, InfluenceTest test = InfluenceTest::sign)
{
    const std::size_t k = pw.variables.size();
    std::vector<InfluenceRow> out;
    out.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        InfluenceRow row;
        row.name = pw.variables[f];
        std::vector<double> inf;
        double given = 0.0, received = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == f || is_missing(pw.q(f, j)) || is_missing(pw.q(j, f))) continue;
            inf.push_back(pw.q(f, j) - pw.q(j, f));
            given += pw.q(f, j);
            received += pw.q(j, f);
        }
        row.partners = inf.size();
        if (!inf.empty()) {
            const double m = static_cast<double>(inf.size());
            row.median_I = quantile_type7(inf, 0.5);
            row.q25_I = quantile_type7(inf, 0.25);
            row.q75_I = quantile_type7(inf, 0.75);
            row.mean_influence_given = given / m;
            row.mean_influence_received = received / m;
            switch (test) {
            case InfluenceTest::sign: row.p_median_positive = sign_test_greater(inf); break;
            case InfluenceTest::signed_rank: row.p_median_positive = signed_rank_test_greater(inf); break;
            case InfluenceTest::t_test: row.p_median_positive = t_test_greater(inf); break;
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace qad
