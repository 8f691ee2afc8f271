// Test-only oracles, independent of the library code paths they check:
// brute-force enumeration over latent membership patterns, naive triple-loop
// statistics, classical Gram-Schmidt, and a truncated joint-law chi^2.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "latgraph/graph.hpp"
#include "latgraph/models.hpp"
#include "latgraph/numeric.hpp"

namespace oracles {

// Direct triple-loop signed triangle sum; quadratic-free reference for
// latgraph::signed_triangle_stat.
inline double naive_signed_triangles(const latgraph::Graph& g, double p) {
    double s = 0.0;
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j)
            for (int k = j + 1; k < g.n(); ++k)
                s += ((g.edge(i, j) ? 1.0 : 0.0) - p) * ((g.edge(i, k) ? 1.0 : 0.0) - p) *
                     ((g.edge(j, k) ? 1.0 : 0.0) - p);
    return s;
}

inline std::int64_t naive_triangles(const latgraph::Graph& g) {
    std::int64_t s = 0;
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j)
            for (int k = j + 1; k < g.n(); ++k)
                if (g.edge(i, j) && g.edge(i, k) && g.edge(j, k)) ++s;
    return s;
}

struct EnumMoments {
    double mean_signed = 0.0;
    double var_signed = 0.0;
    double mean_plain = 0.0;
    // raw pair moments of single-triple products, for intermediate checks
    double e_tau = 0.0;      // E[tau_123]
    double e_tau_sq = 0.0;   // E[tau_123^2]
    double e_share2 = 0.0;   // E[tau_123 tau_124] (n >= 4)
    double e_share1 = 0.0;   // E[tau_123 tau_145] (n >= 5)
};

// Exhaustive enumeration of all 2^{nd} membership patterns. The T_s moments
// are assembled from per-pattern triangle/cherry/edge counts; the single-triple
// products use the direct centered products. Capped at n*d <= 20.
inline EnumMoments enumerate_rig_moments(int n, int d, double delta) {
    if (n * d > 20) throw std::invalid_argument("enumerate_rig_moments: n*d <= 20 cap");
    if (n < 3) throw std::invalid_argument("enumerate_rig_moments: n >= 3 required");
    const int nd = n * d;
    const double p = 1.0 - std::pow(1.0 - delta * delta, d);
    const std::uint64_t mask = (std::uint64_t(1) << d) - 1;
    latgraph::KahanSum sT, sT2, sPlain, sTau, sTau2, sSh2, sSh1;
    std::vector<std::uint64_t> row(std::size_t(n));
    std::vector<std::uint32_t> adj(std::size_t(n));
    for (std::uint64_t pat = 0; pat < (std::uint64_t(1) << nd); ++pat) {
        int ones = std::popcount(pat);
        double w = std::pow(delta, ones) * std::pow(1.0 - delta, nd - ones);
        for (int i = 0; i < n; ++i) row[std::size_t(i)] = (pat >> (i * d)) & mask;
        for (int i = 0; i < n; ++i) adj[std::size_t(i)] = 0;
        int edges = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (row[std::size_t(i)] & row[std::size_t(j)]) {
                    adj[std::size_t(i)] |= 1u << j;
                    adj[std::size_t(j)] |= 1u << i;
                    ++edges;
                }
        std::int64_t tri = 0, cherries = 0;
        for (int i = 0; i < n; ++i) {
            int deg = std::popcount(adj[std::size_t(i)]);
            cherries += std::int64_t(deg) * (deg - 1) / 2;
            for (int j = i + 1; j < n; ++j)
                if (adj[std::size_t(i)] & (1u << j))
                    tri += std::popcount(adj[std::size_t(i)] & adj[std::size_t(j)] &
                                         ~((2u << j) - 1));
        }
        auto e = [&](int i, int j) { return (adj[std::size_t(i)] & (1u << j)) ? 1.0 : 0.0; };
        double triples = double(n) * (n - 1) * (n - 2) / 6.0;
        double ts = double(tri) - p * double(cherries) + p * p * (n - 2.0) * edges -
                    p * p * p * triples;
        sT.add(w * ts);
        sT2.add(w * ts * ts);
        sPlain.add(w * double(tri));
        double t123 = (e(0, 1) - p) * (e(0, 2) - p) * (e(1, 2) - p);
        sTau.add(w * t123);
        sTau2.add(w * t123 * t123);
        if (n >= 4) sSh2.add(w * t123 * (e(0, 1) - p) * (e(0, 3) - p) * (e(1, 3) - p));
        if (n >= 5) sSh1.add(w * t123 * (e(0, 3) - p) * (e(0, 4) - p) * (e(3, 4) - p));
    }
    EnumMoments m;
    m.mean_signed = sT.value();
    m.var_signed = sT2.value() - m.mean_signed * m.mean_signed;
    m.mean_plain = sPlain.value();
    m.e_tau = sTau.value();
    m.e_tau_sq = sTau2.value();
    m.e_share2 = sSh2.value();
    m.e_share1 = sSh1.value();
    return m;
}

// Conditional survival probabilities Q_m(x) = P[present triangle edges subset
// of supp(x) | |S_1| = m] by enumeration over S_2, S_3 with S_1 fixed.
inline double enumerate_q_given_m(int d, int m, double delta, const std::array<int, 3>& x) {
    if (d > 10) throw std::invalid_argument("enumerate_q_given_m: d <= 10 cap");
    std::uint64_t s1 = (std::uint64_t(1) << m) - 1; // exchangeable: which m is irrelevant
    latgraph::KahanSum acc;
    for (std::uint64_t pat = 0; pat < (std::uint64_t(1) << (2 * d)); ++pat) {
        std::uint64_t s2 = pat & ((std::uint64_t(1) << d) - 1);
        std::uint64_t s3 = pat >> d;
        int ones = std::popcount(pat);
        double w = std::pow(delta, ones) * std::pow(1.0 - delta, 2 * d - ones);
        int e12 = (s1 & s2) ? 1 : 0, e13 = (s1 & s3) ? 1 : 0, e23 = (s2 & s3) ? 1 : 0;
        if (e12 <= x[0] && e13 <= x[1] && e23 <= x[2]) acc.add(w);
    }
    return acc.value();
}

// Exact chi^2( POIM_P(n,t,lambda), POIM(n, lambda + C(t,2)/C(n,2)) ) over the
// joint entry space truncated where the residual Poisson mass is < 1e-12.
inline double enumerate_chi2_poim_planted(int n, int t, double lambda) {
    if (n != 4) throw std::invalid_argument("enumerate_chi2_poim_planted: written for n = 4");
    const int E = 6; // edges of K4, order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
    const int pairs[E][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const double tau = (double(t) * (t - 1) / 2.0) / 6.0;
    // truncation point: both the shifted planted entries and the null law
    int K = 1;
    while (latgraph::poisson_tail_ge(lambda + tau, K) > 1e-13 ||
           latgraph::poisson_tail_ge(lambda, K - 1) > 1e-13)
        ++K;
    std::vector<double> f_null(std::size_t(K) + 1), f_alt(std::size_t(K) + 1), f_q(std::size_t(K) + 1);
    for (int v = 0; v <= K; ++v) {
        f_null[std::size_t(v)] = std::exp(latgraph::poisson_log_pmf(v, lambda));
        f_alt[std::size_t(v)] = v == 0 ? 0.0 : std::exp(latgraph::poisson_log_pmf(v - 1, lambda));
        f_q[std::size_t(v)] = std::exp(latgraph::poisson_log_pmf(v, lambda + tau));
    }
    // subsets of size t and their edge sets
    std::vector<std::vector<int>> subset_edges;
    for (int mask = 0; mask < 16; ++mask) {
        if (std::popcount(unsigned(mask)) != t) continue;
        std::vector<int> es;
        for (int e = 0; e < E; ++e)
            if ((mask >> pairs[e][0] & 1) && (mask >> pairs[e][1] & 1)) es.push_back(e);
        subset_edges.push_back(es);
    }
    const double inv_subsets = 1.0 / double(subset_edges.size());
    std::array<int, E> x{};
    latgraph::KahanSum chi;
    for (;;) {
        double q = 1.0, base = 1.0;
        for (int e = 0; e < E; ++e) {
            q *= f_q[std::size_t(x[std::size_t(e)])];
            base *= f_null[std::size_t(x[std::size_t(e)])];
        }
        double mix = 0.0;
        for (const auto& es : subset_edges) {
            double prod = 1.0;
            for (int e : es) {
                int v = x[std::size_t(e)];
                double fn = f_null[std::size_t(v)];
                prod *= fn > 0.0 ? f_alt[std::size_t(v)] / fn : 0.0;
            }
            mix += prod;
        }
        double pa = base * mix * inv_subsets;
        if (q > 0.0) {
            double diff = pa - q;
            chi.add(diff * diff / q);
        }
        int e = 0;
        while (e < E && ++x[std::size_t(e)] > K) x[std::size_t(e)++] = 0;
        if (e == E) break;
    }
    return chi.value();
}

// Classical Gram-Schmidt without re-orthogonalization: independent recomputation
// path for the coupling basis and the conditional threshold.
inline std::vector<std::vector<double>> naive_gram_schmidt_reverse(
    const std::vector<std::vector<double>>& x) {
    int m = int(x.size());
    int d = int(x[0].size());
    std::vector<std::vector<double>> y(std::size_t(m));
    for (int k = m - 1; k >= 0; --k) {
        std::vector<double> v = x[std::size_t(k)];
        for (int j = k + 1; j < m; ++j) {
            double c = 0.0;
            for (int q = 0; q < d; ++q) c += v[std::size_t(q)] * y[std::size_t(j)][std::size_t(q)];
            for (int q = 0; q < d; ++q) v[std::size_t(q)] -= c * y[std::size_t(j)][std::size_t(q)];
        }
        double nrm = 0.0;
        for (double q : v) nrm += q * q;
        nrm = std::sqrt(nrm);
        for (double& q : v) q /= nrm;
        y[std::size_t(k)] = std::move(v);
    }
    return y;
}

} // namespace oracles
