#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latgraph/graph.hpp"
#include "latgraph/models.hpp"
#include "latgraph/numeric.hpp"
#include "latgraph/rng.hpp"

namespace latgraph {

// Explicit probability mass function over a finite set of opaque 64-bit keys.
// This is the oracle currency for exact TV / KL / chi^2 computations.
class FinitePmf {
public:
    FinitePmf() = default;

    // entries need not be sorted; duplicate keys are rejected. The mass must
    // sum to 1 within tol.
    explicit FinitePmf(std::vector<std::pair<std::uint64_t, double>> entries, double tol = 1e-12)
        : v_(std::move(entries)) {
        std::sort(v_.begin(), v_.end());
        KahanSum s;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            if (i > 0 && v_[i].first == v_[i - 1].first)
                throw std::invalid_argument("FinitePmf: duplicate key");
            if (v_[i].second < 0.0) throw std::invalid_argument("FinitePmf: negative probability");
            s.add(v_[i].second);
        }
        if (std::fabs(s.value() - 1.0) > tol)
            throw std::invalid_argument("FinitePmf: probabilities do not sum to 1");
    }

    const std::vector<std::pair<std::uint64_t, double>>& entries() const { return v_; }
    std::size_t size() const { return v_.size(); }

    double prob(std::uint64_t key) const {
        auto it = std::lower_bound(v_.begin(), v_.end(), std::make_pair(key, 0.0));
        return (it != v_.end() && it->first == key) ? it->second : 0.0;
    }

    // Merge two supports, calling f(pa, pb) for every key in the union.
    template <class F>
    static void joint_scan(const FinitePmf& a, const FinitePmf& b, F&& f) {
        std::size_t i = 0, j = 0;
        while (i < a.v_.size() || j < b.v_.size()) {
            if (j >= b.v_.size() || (i < a.v_.size() && a.v_[i].first < b.v_[j].first)) {
                f(a.v_[i].second, 0.0);
                ++i;
            } else if (i >= a.v_.size() || b.v_[j].first < a.v_[i].first) {
                f(0.0, b.v_[j].second);
                ++j;
            } else {
                f(a.v_[i].second, b.v_[j].second);
                ++i;
                ++j;
            }
        }
    }

private:
    std::vector<std::pair<std::uint64_t, double>> v_;
};

inline double tv_exact(const FinitePmf& a, const FinitePmf& b) {
    KahanSum s;
    FinitePmf::joint_scan(a, b, [&](double pa, double pb) { s.add(std::fabs(pa - pb)); });
    return 0.5 * s.value();
}

inline double kl_exact(const FinitePmf& a, const FinitePmf& b) {
    KahanSum s;
    bool infinite = false;
    FinitePmf::joint_scan(a, b, [&](double pa, double pb) {
        if (pa <= 0.0) return;
        if (pb <= 0.0) {
            infinite = true;
            return;
        }
        s.add(pa * std::log(pa / pb));
    });
    if (infinite) return std::numeric_limits<double>::infinity();
    return std::max(0.0, s.value());
}

inline double chi2_exact(const FinitePmf& a, const FinitePmf& b) {
    KahanSum s;
    bool infinite = false;
    FinitePmf::joint_scan(a, b, [&](double pa, double pb) {
        if (pb <= 0.0) {
            if (pa > 0.0) infinite = true;
            return;
        }
        double diff = pa - pb;
        s.add(diff * diff / pb);
    });
    if (infinite) return std::numeric_limits<double>::infinity();
    return std::max(0.0, s.value());
}

// ---------------------------------------------------------------------------
// Canonical graph <-> key encoding: bit e(i,j) at the row-major upper-triangle
// index. Requires C(n,2) <= 64, i.e. n <= 11.

inline std::size_t pair_bit(int n, int i, int j) {
    return std::size_t(i) * (2 * n - i - 1) / 2 + std::size_t(j - i - 1);
}

inline std::uint64_t graph_key(const Graph& g) {
    int n = g.n();
    if (n > 11) throw std::invalid_argument("graph_key: n <= 11 required for 64-bit keys");
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (g.edge(i, j)) key |= std::uint64_t(1) << pair_bit(n, i, j);
    return key;
}

inline Graph graph_from_key(int n, std::uint64_t key) {
    Graph::Builder b(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((key >> pair_bit(n, i, j)) & 1u) b.set(i, j);
    return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Exact labeled-graph laws at toy scale.

inline FinitePmf er_graph_pmf(int n, double p) {
    if (n < 1 || n > 6) throw std::invalid_argument("er_graph_pmf: n <= 6 cap");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("er_graph_pmf: p in [0,1]");
    int npairs = n * (n - 1) / 2;
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(std::size_t(1) << npairs);
    for (std::uint64_t key = 0; key < (std::uint64_t(1) << npairs); ++key) {
        int k = std::popcount(key);
        double lp = (p > 0 ? k * std::log(p) : (k ? -std::numeric_limits<double>::infinity() : 0.0)) +
                    (p < 1 ? (npairs - k) * std::log1p(-p)
                           : (npairs - k ? -std::numeric_limits<double>::infinity() : 0.0));
        double w = std::exp(lp);
        if (w > 0.0) out.emplace_back(key, w);
    }
    return FinitePmf(std::move(out), 1e-11);
}

// Uniform mixture over all C(n,t) planted subsets of the product law with the
// clique edges forced present.
inline FinitePmf planted_clique_graph_pmf(int n, int t, double q) {
    if (n < 2 || n > 6) throw std::invalid_argument("planted_clique_graph_pmf: n <= 6 cap");
    if (t < 2 || t > n) throw std::invalid_argument("planted_clique_graph_pmf: need 2 <= t <= n");
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("planted_clique_graph_pmf: q in [0,1)");
    int npairs = n * (n - 1) / 2;
    std::vector<double> mass(std::size_t(1) << npairs, 0.0);
    // enumerate t-subsets
    std::vector<int> idx(t);
    for (int i = 0; i < t; ++i) idx[i] = i;
    int nsubsets = 0;
    for (;;) {
        std::uint64_t clique = 0;
        for (int a = 0; a < t; ++a)
            for (int b = a + 1; b < t; ++b) clique |= std::uint64_t(1) << pair_bit(n, idx[a], idx[b]);
        int forced = std::popcount(clique);
        for (std::uint64_t key = 0; key < (std::uint64_t(1) << npairs); ++key) {
            if ((key & clique) != clique) continue;
            int extra = std::popcount(key) - forced;
            int freepairs = npairs - forced;
            mass[key] += std::exp((q > 0 ? extra * std::log(q) : (extra ? -1e300 : 0.0)) +
                                  (freepairs - extra) * std::log1p(-q));
        }
        ++nsubsets;
        int i = t - 1;
        while (i >= 0 && idx[i] == n - t + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
    }
    std::vector<std::pair<std::uint64_t, double>> out;
    for (std::size_t key = 0; key < mass.size(); ++key)
        if (mass[key] > 0.0) out.emplace_back(std::uint64_t(key), mass[key] / nsubsets);
    return FinitePmf(std::move(out), 1e-11);
}

// Exact labeled-graph law of RIG_tau(n, d, delta) by summing product-Bernoulli
// weights over all 2^{nd} membership patterns, keyed by the resulting graph.
inline FinitePmf rig_graph_pmf(int n, int d, double delta, std::int64_t tau) {
    if (n * d > 20) throw std::invalid_argument("rig_graph_pmf: n*d <= 20 cap");
    if (n > 11) throw std::invalid_argument("rig_graph_pmf: n <= 11 cap for graph keys");
    if (tau < 1) throw std::invalid_argument("rig_graph_pmf: tau >= 1 required");
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("rig_graph_pmf: delta in [0,1]");
    int nd = n * d;
    std::unordered_map<std::uint64_t, double> acc;
    for (std::uint64_t pat = 0; pat < (std::uint64_t(1) << nd); ++pat) {
        int ones = std::popcount(pat);
        double w = std::exp((delta > 0 ? ones * std::log(delta) : (ones ? -1e300 : 0.0)) +
                            (delta < 1 ? (nd - ones) * std::log1p(-delta)
                                       : (nd - ones ? -1e300 : 0.0)));
        if (w <= 0.0) continue;
        std::uint64_t key = 0;
        for (int i = 0; i < n; ++i) {
            std::uint64_t si = (pat >> (i * d)) & ((std::uint64_t(1) << d) - 1);
            for (int j = i + 1; j < n; ++j) {
                std::uint64_t sj = (pat >> (j * d)) & ((std::uint64_t(1) << d) - 1);
                if (std::popcount(si & sj) >= tau) key |= std::uint64_t(1) << pair_bit(n, i, j);
            }
        }
        acc[key] += w;
    }
    std::vector<std::pair<std::uint64_t, double>> out(acc.begin(), acc.end());
    KahanSum total;
    for (auto& e : out) total.add(e.second);
    for (auto& e : out) e.second /= total.value(); // remove fp accumulation drift
    return FinitePmf(std::move(out));
}

// ---------------------------------------------------------------------------
// Closed-form chi^2 divergences via the second moment method.

inline double hypergeom_log_pmf(int k, int n, int t) {
    return log_binom(t, k) + log_binom(n - t, t - k) - log_binom(n, t);
}

// chi^2( G(n,t,q), G(n, q + (1-q) C(t,2)/C(n,2)) ): a (t+1)-term hypergeometric
// sum over the overlap of two independent planted subsets, in log space.
inline double chi2_planted_clique(int n, int t, double q) {
    if (t < 2 || t > n) throw std::invalid_argument("chi2_planted_clique: need 2 <= t <= n");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("chi2_planted_clique: q in (0,1)");
    double ct2 = double(t) * (t - 1) / 2.0;
    double N = double(n) * (n - 1) / 2.0;
    double tau = (1.0 - q) * ct2 / N;
    double p = q + tau;
    if (!(p < 1.0)) throw std::invalid_argument("chi2_planted_clique: degenerate density p >= 1");
    KahanSum s;
    for (int k = 0; k <= t; ++k) {
        double ck = double(k) * (k - 1) / 2.0;
        double lw = hypergeom_log_pmf(k, n, t);
        if (!std::isfinite(lw)) continue;
        double L = -ck * std::log(p) + (2.0 * ct2 - 2.0 * ck) * std::log1p(-tau / p) +
                   (N - 2.0 * ct2 + ck) * std::log1p(tau * tau / (p * (1.0 - p)));
        s.add(std::exp(lw) * std::expm1(L));
    }
    return std::max(0.0, s.value());
}

// chi^2( POIM_P(n,t,lambda), POIM(n, lambda + C(t,2)/C(n,2)) ).
inline double chi2_poim_planted(int n, int t, double lambda) {
    if (t < 2 || t > n) throw std::invalid_argument("chi2_poim_planted: need 2 <= t <= n");
    if (!(lambda > 0.0)) throw std::invalid_argument("chi2_poim_planted: lambda > 0 required");
    double ct2 = double(t) * (t - 1) / 2.0;
    double N = double(n) * (n - 1) / 2.0;
    double tau = ct2 / N;
    double base = N * tau * tau / (lambda + tau) + 2.0 * ct2 * std::log(lambda / (lambda + tau));
    double ratio = (lambda * lambda + lambda + tau) / (lambda * lambda + lambda * tau);
    KahanSum s;
    for (int k = 0; k <= t; ++k) {
        double ck = double(k) * (k - 1) / 2.0;
        double lw = hypergeom_log_pmf(k, n, t);
        if (!std::isfinite(lw)) continue;
        s.add(std::exp(lw) * std::expm1(base + ck * std::log(ratio)));
    }
    return std::max(0.0, s.value());
}

// ---------------------------------------------------------------------------
// Binomial / Poisson total variation: closed-form upper bounds and exact sums.

inline double tv_binom_bound(std::int64_t N, double p, double q) {
    if (!(0.0 < p && p < q && q < 1.0))
        throw std::invalid_argument("tv_binom_bound: need 0 < p < q < 1");
    double gamma = (q - p) * std::sqrt(double(N) / (p * (1.0 - p)));
    return gamma + 3.0 * gamma * gamma;
}

inline double tv_binom_exact(std::int64_t N, double p, double q) {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("tv_binom_exact: p,q in [0,1]");
    KahanSum s;
    for (std::int64_t k = 0; k <= N; ++k)
        s.add(std::fabs(std::exp(binom_log_pmf(N, k, p)) - std::exp(binom_log_pmf(N, k, q))));
    return 0.5 * s.value();
}

// Lemma-form bound sqrt((e^{(l1-l2)^2/l1} - 1)/2); stated for l1 >= l2, inputs
// are swapped (with a stderr note) otherwise.
inline double tv_poisson_bound(double lambda1, double lambda2) {
    if (!(lambda1 > 0.0 && lambda2 > 0.0))
        throw std::invalid_argument("tv_poisson_bound: lambdas must be positive");
    if (lambda2 > lambda1) {
        std::fprintf(stderr, "tv_poisson_bound: swapping lambda1 < lambda2 (one-sided bound)\n");
        std::swap(lambda1, lambda2);
    }
    double diff = lambda1 - lambda2;
    return std::sqrt(0.5 * std::expm1(diff * diff / lambda1));
}

inline double tv_poisson_exact(double lambda1, double lambda2) {
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw std::invalid_argument("tv_poisson_exact: lambdas must be nonnegative");
    KahanSum s;
    double cum1 = 0.0, cum2 = 0.0;
    for (std::int64_t k = 0;; ++k) {
        double a = std::exp(poisson_log_pmf(k, lambda1));
        double b = std::exp(poisson_log_pmf(k, lambda2));
        s.add(std::fabs(a - b));
        cum1 += a;
        cum2 += b;
        if (1.0 - cum1 < 1e-14 && 1.0 - cum2 < 1e-14) break;
        if (k > 3000000) break;
    }
    return 0.5 * s.value();
}

// ---------------------------------------------------------------------------
// Empirical TV lower bound through a feature pushforward (data processing).

struct PluginTv {
    double estimate = 0.0; // half L1 distance of the empirical feature histograms
    double radius = 0.0;   // bias + fluctuation allowance at the 99% level
    std::size_t support = 0;
};

template <class SamplerA, class SamplerB, class Feature>
inline PluginTv tv_plugin_lower_bound(SamplerA&& sample_a, SamplerB&& sample_b, Feature&& feature,
                                      std::size_t m, Rng& rng) {
    if (m < 100) throw std::invalid_argument("tv_plugin_lower_bound: m >= 100 required");
    std::unordered_map<std::int64_t, std::int64_t> ha, hb;
    for (std::size_t i = 0; i < m; ++i) ++ha[feature(sample_a(rng))];
    for (std::size_t i = 0; i < m; ++i) ++hb[feature(sample_b(rng))];
    std::unordered_map<std::int64_t, std::pair<std::int64_t, std::int64_t>> joint;
    for (auto& [k, c] : ha) joint[k].first = c;
    for (auto& [k, c] : hb) joint[k].second = c;
    KahanSum l1;
    for (auto& [k, cc] : joint)
        l1.add(std::fabs(double(cc.first) - double(cc.second)) / double(m));
    PluginTv out;
    out.estimate = 0.5 * l1.value();
    out.support = joint.size();
    // bias <= sqrt(k/2m) by Cauchy-Schwarz over per-bin sampling noise;
    // fluctuation from bounded differences at confidence 0.99
    out.radius = std::sqrt(double(joint.size()) / (2.0 * double(m))) +
                 std::sqrt(std::log(2.0 / 0.01) / double(m));
    return out;
}

} // namespace latgraph
