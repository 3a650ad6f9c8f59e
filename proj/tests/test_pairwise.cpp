#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qad/correlation.hpp"
#include "qad/network.hpp"
#include "qad/pairwise.hpp"

using namespace qad;

namespace {

std::vector<double> uniform_column(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u;
    std::vector<double> c(n);
    for (auto& v : c) v = u(rng);
    return c;
}

// x drives several targets y_j = f_j(x) + noise; w is unrelated
DataTable driver_table(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> x(-1.0, 1.0), e(-0.05, 0.05);
    std::vector<double> xs(n), a(n), b(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x(rng);
        a[i] = xs[i] * xs[i] + e(rng);
        b[i] = std::abs(xs[i]) + e(rng);
        c[i] = std::cos(3.0 * xs[i]) + e(rng);
        d[i] = std::sin(4.0 * xs[i]) * std::sin(4.0 * xs[i]) + e(rng);
    }
    return DataTable({"x", "y1", "y2", "y3", "y4", "w"}, {xs, a, b, c, d, uniform_column(n, rng)});
}

PairwiseResult manual(std::vector<std::string> names, const std::vector<std::vector<double>>& q,
                      const std::vector<std::vector<double>>& p)
{
    PairwiseResult pw;
    const std::size_t k = names.size();
    pw.variables = std::move(names);
    pw.q = pw.p_q = pw.asymmetry = pw.p_asymmetry = pw.n_used = SquareMatrix(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            pw.q(i, j) = q[i][j];
            pw.p_q(i, j) = p[i][j];
        }
    pw.has_p_values = true;
    return pw;
}

// P(Bin(m, 1/2) >= k) by direct summation
double binomial_upper(std::size_t m, std::size_t k)
{
    double total = 0.0;
    for (std::size_t i = k; i <= m; ++i) total += std::exp(std::lgamma(m + 1.0) - std::lgamma(i + 1.0) -
                                                           std::lgamma(m - i + 1.0) - m * std::log(2.0));
    return total;
}

// signed-rank p-value by enumerating all sign flips of the midranks
double signed_rank_brute(const std::vector<double>& xs)
{
    std::vector<double> d;
    for (double x : xs)
        if (x != 0.0) d.push_back(x);
    const std::size_t m = d.size();
    std::vector<double> rank(m);
    for (std::size_t i = 0; i < m; ++i) {
        double less = 0, eq = 0;
        for (std::size_t j = 0; j < m; ++j) {
            less += std::abs(d[j]) < std::abs(d[i]);
            eq += std::abs(d[j]) == std::abs(d[i]);
        }
        rank[i] = less + (eq + 1) / 2.0;
    }
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (d[i] > 0) w += rank[i];
    std::size_t hits = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1u) s += rank[i];
        hits += s >= w - 1e-9;
    }
    return static_cast<double>(hits) / static_cast<double>(std::size_t{1} << m);
}

}  // namespace

TEST(FilterColumns, SingleValueShare)
{
    std::vector<double> tied(125);
    for (std::size_t i = 0; i < tied.size(); ++i) tied[i] = i < 32 ? 0.0 : static_cast<double>(i);
    std::vector<double> inc(125), cst(125, 3.0), under(125);
    for (std::size_t i = 0; i < 125; ++i) {
        inc[i] = static_cast<double>(i);
        under[i] = i < 31 ? 0.0 : static_cast<double>(i);
    }
    const DataTable t({"tied", "inc", "const", "under"}, {tied, inc, cst, under});
    const auto r = filter_columns(t, 0.25);
    EXPECT_EQ(r.table.names(), (std::vector<std::string>{"inc", "under"}));
    ASSERT_EQ(r.dropped.size(), 2u);
    EXPECT_EQ(r.dropped[0].name, "tied");
    EXPECT_DOUBLE_EQ(r.dropped[0].max_single_value_prop, 32.0 / 125.0);
    EXPECT_EQ(r.dropped[1].name, "const");
    EXPECT_DOUBLE_EQ(r.dropped[1].max_single_value_prop, 1.0);
}

TEST(FilterColumns, MissingCellsAndErrors)
{
    const double na = missing_value;
    const DataTable t({"a", "b", "c"}, {{1, 2, 3, na}, {na, na, na, na}, {1, 1, 2, 3}});
    const auto r = filter_columns(t, 0.5);
    EXPECT_EQ(r.table.names(), (std::vector<std::string>{"a"}));
    EXPECT_EQ(r.dropped[0].reason, "no values");
    EXPECT_THROW(filter_columns(DataTable({"c"}, {{1, 1, 1}}), 0.25), data_error);
    EXPECT_THROW(filter_columns(t, 0.0), argument_error);

    const auto u = filter_columns(DataTable({"a", "c"}, {{1, 2, 3, 4}, {1, 2, 2, 3}}), 0.9, 0.9);
    EXPECT_EQ(u.table.names(), (std::vector<std::string>{"a"}));
    EXPECT_EQ(u.dropped[0].reason, "unique proportion");
}

TEST(Pairwise, IndependentColumnsAreWeak)
{
    // calibrated against the finite-sample bias of the estimator at n = 5000
    std::mt19937_64 rng(1);
    const DataTable t({"a", "b", "c"}, {uniform_column(5000, rng), uniform_column(5000, rng), uniform_column(5000, rng)});
    const auto pw = pairwise_qad(t);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) EXPECT_LT(pw.q(i, j), 0.13);
}

TEST(Pairwise, DuplicateColumnIsComonotone)
{
    std::mt19937_64 rng(2);
    const auto z = uniform_column(400, rng);
    const auto pw = pairwise_qad(DataTable({"z1", "z2"}, {z, z}));
    EXPECT_NEAR(pw.q(0, 1), 1.0 - 1.0 / 40.0, 1e-12);
    EXPECT_NEAR(pw.q(1, 0), 1.0 - 1.0 / 40.0, 1e-12);
}

TEST(Pairwise, MatchesDirectComputationAndAntisymmetry)
{
    const auto t = driver_table(300, 3);
    PairwiseOptions o;
    o.qad.permutations = 49;
    o.qad.seed = 11;
    const auto pw = pairwise_qad(t, o);
    for (std::size_t f = 0; f < t.cols(); ++f) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (f == j) continue;
            EXPECT_EQ(pw.asymmetry(f, j), -pw.asymmetry(j, f));
            EXPECT_EQ(pw.p_asymmetry(f, j), pw.p_asymmetry(j, f));
            // computed with the lexicographically smaller name as X
            const bool fwd = t.names()[f] < t.names()[j];
            const std::size_t a = fwd ? f : j, b = fwd ? j : f;
            QadOptions q = o.qad;
            q.seed = detail::pair_seed(o.qad.seed, t.names()[a], t.names()[b]);
            const auto r = qad_compute(BivariateSample(t.column(a), t.column(b)), q);
            EXPECT_EQ(pw.q(a, b), r.q_xy);
            EXPECT_EQ(pw.q(b, a), r.q_yx);
            EXPECT_EQ(pw.p_q(a, b), *r.p_q_xy);
            EXPECT_EQ(pw.p_q(b, a), *r.p_q_yx);
            EXPECT_EQ(pw.p_asymmetry(a, b), *r.p_asymmetry);
        }
        EXPECT_TRUE(std::isnan(pw.q(f, f)));
    }
}

TEST(Pairwise, RowAndColumnPermutations)
{
    const auto t = driver_table(200, 4);
    PairwiseOptions o;
    o.qad.permutations = 19;
    o.qad.seed = 5;
    const auto base = pairwise_qad(t, o);

    std::vector<std::size_t> rows(t.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::mt19937_64 rng(9);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < t.cols(); ++c) {
        std::vector<double> v;
        for (auto r : rows) v.push_back(t.column(c)[r]);
        cols.push_back(v);
    }
    const auto shuffled = pairwise_qad(DataTable(t.names(), cols), o);
    for (std::size_t i = 0; i < base.q.v.size(); ++i) {
        if (std::isnan(base.q.v[i])) continue;
        EXPECT_EQ(base.q.v[i], shuffled.q.v[i]);
        EXPECT_EQ(base.p_q.v[i], shuffled.p_q.v[i]);
        EXPECT_EQ(base.p_asymmetry.v[i], shuffled.p_asymmetry.v[i]);
    }

    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    const auto reordered = pairwise_qad(t.select(perm), o);
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = 0; j < perm.size(); ++j) {
            if (i == j) continue;
            EXPECT_EQ(reordered.q(i, j), base.q(perm[i], perm[j]));
            EXPECT_EQ(reordered.p_q(i, j), base.p_q(perm[i], perm[j]));
        }
}

TEST(Pairwise, ThreadCountDoesNotMatter)
{
    const auto t = driver_table(150, 6);
    PairwiseOptions o;
    o.qad.permutations = 29;
    o.qad.threads = 1;
    const auto a = pairwise_qad(t, o);
    o.qad.threads = 4;
    const auto b = pairwise_qad(t, o);
    for (std::size_t i = 0; i < a.q.v.size(); ++i) {
        if (std::isnan(a.q.v[i])) continue;
        EXPECT_EQ(a.q.v[i], b.q.v[i]);
        EXPECT_EQ(a.p_q.v[i], b.p_q.v[i]);
    }
}

TEST(Pairwise, MissingDataPolicies)
{
    const double na = missing_value;
    std::vector<double> a, b, c;
    for (int i = 0; i < 40; ++i) {
        a.push_back(i);
        b.push_back(i % 5 == 0 ? na : i * 2.0);
        c.push_back(i % 7 == 0 ? na : 40.0 - i);
    }
    const DataTable t({"a", "b", "c"}, {a, b, c});
    const auto pw = pairwise_qad(t);
    EXPECT_EQ(pw.n_used(0, 1), 32.0);
    EXPECT_EQ(pw.n_used(0, 2), 34.0);
    EXPECT_EQ(pw.n_used(0, 0), 40.0);
    PairwiseOptions o;
    o.listwise = true;
    const auto lw = pairwise_qad(t, o);
    EXPECT_EQ(lw.n_used(0, 1), lw.n_used(0, 2));
    EXPECT_LT(lw.n_used(0, 1), 32.0);

    const DataTable sparse({"a", "b"}, {{1, na, 3}, {na, 2, na}});
    const auto sp = pairwise_qad(sparse);
    EXPECT_TRUE(std::isnan(sp.q(0, 1)));
    ASSERT_FALSE(sp.warnings.empty());
    EXPECT_NE(sp.warnings[0].find("fewer than two"), std::string::npos);
}

TEST(Influence, Quantiles)
{
    EXPECT_DOUBLE_EQ(quantile_type7({1, 2, 3, 4}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile_type7({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile_type7({1, 2, 3, 4}, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile_type7({7}, 0.3), 7.0);
}

TEST(Influence, SignTestMatchesBinomialSum)
{
    EXPECT_NEAR(sign_test_greater({1, 2, 3, -1, 0, 4}), binomial_upper(5, 4), 1e-12);
    EXPECT_NEAR(sign_test_greater({1, 1, 1, 1, 1, 1, 1, 1}), binomial_upper(8, 8), 1e-12);
    EXPECT_NEAR(sign_test_greater({-1, 2, -3, 4, -5, 6, -7}), binomial_upper(7, 3), 1e-12);
    EXPECT_DOUBLE_EQ(sign_test_greater({-1, -2}), 1.0);
    EXPECT_DOUBLE_EQ(sign_test_greater({0, 0}), 1.0);
}

TEST(Influence, SignedRankMatchesEnumeration)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-6, 9);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> xs(3 + rep % 10);
        for (auto& x : xs) x = d(rng) / 2.0;
        EXPECT_NEAR(signed_rank_test_greater(xs), signed_rank_brute(xs), 1e-12);
    }
}

TEST(Influence, SignedRankLargeSampleApproximation)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> xs(400);
    for (auto& x : xs) x = z(rng);
    const double p0 = signed_rank_test_greater(xs);
    EXPECT_GT(p0, 0.0);
    EXPECT_LT(p0, 1.0);
    for (auto& x : xs) x += 0.5;
    EXPECT_LT(signed_rank_test_greater(xs), 1e-6);
}

TEST(Influence, TTest)
{
    // mean 3, sd sqrt(2.5), n = 5: t = 4.2426, 4 df
    EXPECT_NEAR(t_test_greater({1, 2, 3, 4, 5}), 0.0066177, 1e-6);
    EXPECT_NEAR(t_test_greater({-1, 1}), 0.5, 1e-12);
    EXPECT_TRUE(std::isnan(t_test_greater({1})));
}

TEST(Influence, DriverHasPositiveMedian)
{
    const auto t = driver_table(600, 10);
    PairwiseOptions o;
    const auto pw = pairwise_qad(t, o);
    for (auto test : {InfluenceTest::sign, InfluenceTest::signed_rank, InfluenceTest::t_test}) {
        const auto rows = influence_summary(pw, test);
        ASSERT_EQ(rows.size(), 6u);
        EXPECT_EQ(rows[0].name, "x");
        EXPECT_GT(rows[0].median_I, 0.2);
        EXPECT_GT(rows[0].mean_influence_given, rows[0].mean_influence_received);
        for (const auto& r : rows) {
            EXPECT_LE(r.q25_I, r.median_I);
            EXPECT_LE(r.median_I, r.q75_I);
            EXPECT_EQ(r.partners, 5u);
        }
        // the unrelated column
        EXPECT_LT(std::abs(rows[5].median_I), 0.05);
    }
}

TEST(Influence, UnrelatedColumnRarelySignificant)
{
    std::size_t rejections = 0;
    const std::size_t reps = 40;
    for (std::uint64_t seed = 1; seed <= reps; ++seed) {
        std::mt19937_64 rng(seed);
        std::vector<std::vector<double>> cols;
        for (int c = 0; c < 8; ++c) cols.push_back(uniform_column(300, rng));
        const auto pw = pairwise_qad(DataTable({"a", "b", "c", "d", "e", "f", "g", "h"}, cols));
        const auto rows = influence_summary(pw);
        EXPECT_LT(std::abs(rows[0].median_I), 0.1);
        rejections += rows[0].p_median_positive < 0.05;
    }
    EXPECT_LE(rejections, 6u);
}

TEST(Influence, TwoVariablesAreMirrored)
{
    const auto pw = manual({"a", "b"}, {{0, 0.7}, {0.2, 0}}, {{0, 0.01}, {0.01, 0}});
    const auto rows = influence_summary(pw);
    EXPECT_DOUBLE_EQ(rows[0].median_I, 0.5);
    EXPECT_DOUBLE_EQ(rows[1].median_I, -0.5);
    EXPECT_EQ(parse_influence_test("signed-rank"), InfluenceTest::signed_rank);
    EXPECT_THROW(parse_influence_test("wilcox"), argument_error);
}

TEST(Network, EmptyGraph)
{
    const auto pw = manual({"a", "b", "c"}, {{0, 0.1, 0.2}, {0.1, 0, 0.3}, {0.2, 0.3, 0}},
                           {{0, 0.01, 0.01}, {0.01, 0, 0.01}, {0.01, 0.01, 0}});
    const auto net = build_network(pw);
    EXPECT_TRUE(net.edges.empty());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(net.degree[i], 0u);
        EXPECT_EQ(net.betweenness[i], 0.0);
        EXPECT_EQ(net.hub_score[i], 0.0);
    }
}

TEST(Network, StarHub)
{
    const std::size_t k = 5;
    std::vector<std::vector<double>> q(k, std::vector<double>(k, 0.1)), p(k, std::vector<double>(k, 0.01));
    for (std::size_t j = 1; j < k; ++j) q[0][j] = 0.8;
    const auto net = build_network(manual({"h", "l1", "l2", "l3", "l4"}, q, p));
    EXPECT_EQ(net.edges.size(), k - 1);
    EXPECT_EQ(net.degree[0], k - 1);
    EXPECT_NEAR(net.hub_score[0], 1.0, 1e-10);
    for (std::size_t j = 1; j < k; ++j) {
        EXPECT_NEAR(net.hub_score[j], 0.0, 1e-10);
        EXPECT_EQ(net.in_degree[j], 1u);
    }
}

TEST(Network, PathBetweenness)
{
    const auto pw = manual({"a", "b", "c"}, {{0, 0.5, 0.1}, {0.1, 0, 0.5}, {0.1, 0.1, 0}},
                           {{0, 0.01, 0.01}, {0.01, 0, 0.01}, {0.01, 0.01, 0}});
    const auto net = build_network(pw);
    EXPECT_EQ(net.edges.size(), 2u);
    EXPECT_DOUBLE_EQ(net.betweenness[0], 0.0);
    EXPECT_DOUBLE_EQ(net.betweenness[1], 1.0);
    EXPECT_DOUBLE_EQ(net.betweenness[2], 0.0);
}

TEST(Network, WeightsAsLengths)
{
    // a->c directly is weak (long); a->b->c is strong (short) so b lies on the shortest path
    const auto pw = manual({"a", "b", "c"}, {{0, 0.9, 0.4}, {0.1, 0, 0.9}, {0.1, 0.1, 0}},
                           {{0, 0.01, 0.01}, {0.01, 0, 0.01}, {0.01, 0.01, 0}});
    const auto net = build_network(pw);
    EXPECT_EQ(net.edges.size(), 3u);
    EXPECT_DOUBLE_EQ(net.betweenness[1], 1.0);
}

TEST(Network, EdgeRuleAndErrors)
{
    const auto pw = manual({"a", "b", "c"}, {{0, 0.5, 0.325}, {0.6, 0, 0.9}, {0.2, 0.9, 0}},
                           {{0, 0.01, 0.04}, {0.2, 0, 0.05}, {0.01, 0.049, 0}});
    const auto net = build_network(pw);
    ASSERT_EQ(net.edges.size(), 3u);
    for (const auto& e : net.edges) {
        EXPECT_NE(e.source, e.target);
        EXPECT_GE(e.weight, 0.325);
        EXPECT_LT(e.p_value, 0.05);
    }
    PairwiseResult nop = pw;
    nop.has_p_values = false;
    try {
        build_network(nop);
        FAIL();
    } catch (const argument_error& e) {
        EXPECT_NE(std::string(e.what()).find("run with permutations"), std::string::npos);
    }
}

TEST(Correlation, Baselines)
{
    std::vector<double> x, y, anti, sq, cst;
    for (int i = -50; i <= 50; ++i) {
        x.push_back(i);
        y.push_back(2.0 * i + 1.0);
        anti.push_back(std::exp(-0.1 * i));
        sq.push_back(static_cast<double>(i) * i);
        cst.push_back(1.0);
    }
    EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
    EXPECT_NEAR(spearman(x, y), 1.0, 1e-12);
    EXPECT_NEAR(spearman(x, anti), -1.0, 1e-12);
    EXPECT_NEAR(pearson(x, sq), 0.0, 1e-12);
    EXPECT_TRUE(std::isnan(pearson(x, cst)));

    const DataTable t({"x", "sq", "c"}, {x, sq, cst});
    const auto m = baseline_correlations(t);
    EXPECT_NEAR(m.r_squared(0, 1), 0.0, 1e-12);
    EXPECT_TRUE(std::isnan(m.pearson_r(0, 2)));
    EXPECT_NEAR(m.spearman_rho(0, 0), 1.0, 1e-12);
    const auto q = qad_compute(BivariateSample(x, sq));
    EXPECT_GT(q.q_xy, 0.7);
}

TEST(Correlation, AverageRanks)
{
    EXPECT_EQ(average_ranks({3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
}
