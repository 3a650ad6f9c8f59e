#pragma once

// Thresholded directed dependency network and node metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "qad/error.hpp"
#include "qad/pairwise.hpp"

namespace qad {

struct Edge {
    std::size_t source = 0;
    std::size_t target = 0;
    double weight = 0.0;  ///< q[source][target]
    double p_value = 0.0;
};

struct DependencyNetwork {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    double q_threshold = 0.0;
    double alpha = 0.0;
    std::vector<std::size_t> in_degree;
    std::vector<std::size_t> out_degree;
    std::vector<std::size_t> degree;
    std::vector<double> betweenness;
    std::vector<double> hub_score;
};

inline constexpr double default_q_threshold = 0.325;
inline constexpr double default_alpha = 0.05;

/// Brandes' algorithm on a directed graph with edge length 1/weight.
/// Unnormalized: each ordered (s, t) pair contributes at most 1.
inline std::vector<double> betweenness_centrality(std::size_t n, const std::vector<Edge>& edges)
{
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : edges) adj[e.source].push_back({e.target, 1.0 / e.weight});

    std::vector<double> cb(n, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(a, b)); };

    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> dist(n, inf), sigma(n, 0.0), delta(n, 0.0);
        std::vector<std::vector<std::size_t>> pred(n);
        std::vector<std::size_t> stack;
        std::vector<char> done(n, 0);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[s] = 0.0;
        sigma[s] = 1.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (done[v] || d > dist[v]) continue;
            done[v] = 1;
            stack.push_back(v);
            for (const auto& [w, len] : adj[v]) {
                const double nd = dist[v] + len;
                if (done[w]) continue;
                if (dist[w] == inf || (nd < dist[w] && !same(nd, dist[w]))) {
                    dist[w] = nd;
                    sigma[w] = sigma[v];
                    pred[w].assign(1, v);
                    pq.push({nd, w});
                } else if (same(nd, dist[w])) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        while (!stack.empty()) {
            const std::size_t w = stack.back();
            stack.pop_back();
            for (std::size_t v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) cb[w] += delta[w];
        }
    }
    return cb;
}

/// Principal eigenvector of A A^T (A weighted adjacency) by power iteration,
/// scaled to max 1. A graph without edges scores all zeros.
inline std::vector<double> hub_scores(std::size_t n, const std::vector<Edge>& edges, double tol = 1e-10,
                                      std::size_t max_iter = 100000)
{
    std::vector<double> x(n, 1.0), at(n), next(n);
    if (edges.empty()) return std::vector<double>(n, 0.0);
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::fill(at.begin(), at.end(), 0.0);
        for (const auto& e : edges) at[e.target] += e.weight * x[e.source];
        std::fill(next.begin(), next.end(), 0.0);
        for (const auto& e : edges) next[e.source] += e.weight * at[e.target];
        const double mx = *std::max_element(next.begin(), next.end());
        if (mx <= 0.0) return std::vector<double>(n, 0.0);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= mx;
            change = std::max(change, std::abs(next[i] - x[i]));
        }
        x.swap(next);
        if (change < tol) break;
    }
    return x;
}

inline DependencyNetwork build_network(const PairwiseResult& pw, double q_threshold = default_q_threshold,
                                       double alpha = default_alpha)
{
    if (!pw.has_p_values) throw argument_error("network needs p-values: run with permutations");
    if (!(q_threshold > 0.0 && q_threshold <= 1.0)) throw argument_error("q threshold must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw argument_error("alpha must lie in (0, 1]");

    DependencyNetwork net;
    const std::size_t k = pw.variables.size();
    net.nodes = pw.variables;
    net.q_threshold = q_threshold;
    net.alpha = alpha;
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t j = 0; j < k; ++j) {
            if (f == j) continue;
            const double q = pw.q(f, j), p = pw.p_q(f, j);
            if (is_missing(q) || is_missing(p)) continue;
            if (q >= q_threshold && p < alpha) net.edges.push_back({f, j, q, p});
        }
    }
    net.in_degree.assign(k, 0);
    net.out_degree.assign(k, 0);
    for (const auto& e : net.edges) {
        ++net.out_degree[e.source];
        ++net.in_degree[e.target];
    }
    net.degree.resize(k);
    for (std::size_t i = 0; i < k; ++i) net.degree[i] = net.in_degree[i] + net.out_degree[i];
    net.betweenness = betweenness_centrality(k, net.edges);
    net.hub_score = hub_scores(k, net.edges);
    return net;
}

}  // namespace qad
