#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "latgraph/graph.hpp"
#include "latgraph/numeric.hpp"
#include "latgraph/rng.hpp"

namespace latgraph {

// ---------------------------------------------------------------------------
// Latent sets S_1..S_n over the ground set [d], bit-packed per set.

class LatentSets {
public:
    LatentSets(int n, std::int64_t d)
        : n_(n), d_(d), words_(std::size_t(d + 63) / 64), bits_(std::size_t(n) * words_, 0) {
        if (n < 0 || d < 0) throw std::invalid_argument("LatentSets: negative size");
    }

    int n() const { return n_; }
    std::int64_t d() const { return d_; }

    bool contains(int i, std::int64_t e) const {
        return (bits_[std::size_t(i) * words_ + std::size_t(e) / 64] >> (e % 64)) & 1u;
    }
    void insert(int i, std::int64_t e) {
        bits_[std::size_t(i) * words_ + std::size_t(e) / 64] |= std::uint64_t(1) << (e % 64);
    }

    std::int64_t set_size(int i) const {
        const std::uint64_t* r = row(i);
        std::int64_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(r[w]);
        return c;
    }

    std::int64_t intersection_size(int i, int j) const {
        const std::uint64_t* a = row(i);
        const std::uint64_t* b = row(j);
        std::int64_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
        return c;
    }

private:
    const std::uint64_t* row(int i) const { return bits_.data() + std::size_t(i) * words_; }

    int n_;
    std::int64_t d_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

// Symmetric nonnegative-integer matrix with zero diagonal, upper triangle stored.
class IntersectionMatrix {
public:
    explicit IntersectionMatrix(int n) : n_(n), v_(std::size_t(n) * (n - 1) / 2, 0) {
        if (n < 0) throw std::invalid_argument("IntersectionMatrix: negative size");
    }

    int n() const { return n_; }

    std::int64_t at(int i, int j) const {
        if (i == j) return 0;
        return v_[idx(i, j)];
    }
    void set(int i, int j, std::int64_t value) {
        if (i == j) throw std::invalid_argument("IntersectionMatrix: diagonal is fixed at zero");
        if (value < 0) throw std::invalid_argument("IntersectionMatrix: negative entry");
        v_[idx(i, j)] = value;
    }

private:
    std::size_t idx(int i, int j) const {
        if (i > j) std::swap(i, j);
        // row-major upper triangle
        return std::size_t(i) * (2 * n_ - i - 1) / 2 + std::size_t(j - i - 1);
    }
    int n_;
    std::vector<std::int64_t> v_;
};

// ---------------------------------------------------------------------------
// Parameter conversions.

// Solve p = 1 - (1 - delta^2)^d for delta.
inline double delta_from_p(double p, std::int64_t d) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("delta_from_p: need 0 <= p < 1");
    if (d < 1) throw std::invalid_argument("delta_from_p: d >= 1 required");
    return std::sqrt(-std::expm1(std::log1p(-p) / double(d)));
}

// p = P[Binom(d, delta^2) >= tau]; the tau = 1 case reduces to 1-(1-delta^2)^d.
inline double p_from_delta_tau(double delta, std::int64_t d, std::int64_t tau) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("p_from_delta_tau: delta in [0,1]");
    if (tau < 1 || tau > d + 1) throw std::invalid_argument("p_from_delta_tau: need 1 <= tau <= d+1");
    if (tau == 1) return -std::expm1(double(d) * std::log1p(-delta * delta));
    return binom_tail_ge(d, delta * delta, tau);
}

// Invert p_from_delta_tau in delta by monotone bisection in delta^2.
inline double delta_for_tau(double p, std::int64_t d, std::int64_t tau) {
    if (tau == 1) return delta_from_p(p, d);
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("delta_for_tau: need 0 <= p < 1");
    if (tau > d)
        throw std::invalid_argument("delta_for_tau: tau > d gives p = 0 only; parameters infeasible");
    if (p == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0; // bisect in s = delta^2; tail is increasing in s
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double val = binom_tail_ge(d, mid, tau);
        if (std::fabs(val - p) <= 1e-12 && hi - lo <= 1e-15) break;
        if (val < p)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(0.5 * (lo + hi));
}

// Total-variation bound for the Poissonized generation, n^2 log(1-p)^{-1} / d.
inline double poissonization_tv_bound(int n, std::int64_t d, double p) {
    return double(n) * double(n) * (-std::log1p(-p)) / double(d);
}

// ---------------------------------------------------------------------------
// Samplers. All take an explicit Rng stream.

inline Graph sample_er(int n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_er: p in [0,1]");
    Graph::Builder b(n);
    std::bernoulli_distribution coin(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) b.set(i, j);
    return std::move(b).build();
}

inline LatentSets sample_latent_sets(int n, std::int64_t d, double delta, Rng& rng) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("sample_latent_sets: delta in [0,1]");
    LatentSets s(n, d);
    if (delta == 0.0) return s;
    if (delta == 1.0) {
        for (int i = 0; i < n; ++i)
            for (std::int64_t e = 0; e < d; ++e) s.insert(i, e);
        return s;
    }
    if (delta < 0.05) {
        // geometric gap skipping; exact and far cheaper when sets are sparse
        std::geometric_distribution<std::int64_t> gap(delta);
        for (int i = 0; i < n; ++i) {
            std::int64_t e = gap(rng);
            while (e < d) {
                s.insert(i, e);
                e += 1 + gap(rng);
            }
        }
        return s;
    }
    std::bernoulli_distribution coin(delta);
    for (int i = 0; i < n; ++i)
        for (std::int64_t e = 0; e < d; ++e)
            if (coin(rng)) s.insert(i, e);
    return s;
}

inline Graph intersection_graph(const LatentSets& sets, std::int64_t tau) {
    if (tau < 1) throw std::invalid_argument("intersection_graph: tau >= 1 required");
    Graph::Builder b(sets.n());
    for (int i = 0; i < sets.n(); ++i)
        for (int j = i + 1; j < sets.n(); ++j)
            if (sets.intersection_size(i, j) >= tau) b.set(i, j);
    return std::move(b).build();
}

inline IntersectionMatrix intersection_matrix(const LatentSets& sets) {
    IntersectionMatrix m(sets.n());
    for (int i = 0; i < sets.n(); ++i)
        for (int j = i + 1; j < sets.n(); ++j) m.set(i, j, sets.intersection_size(i, j));
    return m;
}

inline Graph threshold_matrix(const IntersectionMatrix& m, std::int64_t tau) {
    if (tau < 1) throw std::invalid_argument("threshold_matrix: tau >= 1 required");
    Graph::Builder b(m.n());
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            if (m.at(i, j) >= tau) b.set(i, j);
    return std::move(b).build();
}

// RIG_tau(n, d, p): latent Bernoulli(delta) sets thresholded at tau, with
// delta calibrated so the marginal edge probability is exactly p.
inline Graph sample_rig(int n, std::int64_t d, double p, std::int64_t tau, Rng& rng) {
    double delta = delta_for_tau(p, d, tau);
    LatentSets s = sample_latent_sets(n, d, delta, rng);
    return intersection_graph(s, tau);
}

// Uniform k-subset of {0..n-1} by partial Fisher-Yates.
inline std::vector<int> uniform_subset(int n, int k, Rng& rng) {
    if (k < 0 || k > n) throw std::invalid_argument("uniform_subset: need 0 <= k <= n");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

inline Graph sample_planted_clique(int n, int t, double q, Rng& rng) {
    if (t < 2 || t > n) throw std::invalid_argument("sample_planted_clique: need 2 <= t <= n");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("sample_planted_clique: q in [0,1]");
    Graph::Builder b(n);
    std::bernoulli_distribution coin(q);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) b.set(i, j);
    std::vector<int> s = uniform_subset(n, t, rng);
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t c = a + 1; c < s.size(); ++c) b.set(s[a], s[c]);
    return std::move(b).build();
}

inline IntersectionMatrix sample_poim(int n, double lambda, Rng& rng) {
    if (lambda < 0.0) throw std::invalid_argument("sample_poim: lambda >= 0 required");
    IntersectionMatrix m(n);
    if (lambda == 0.0) return m;
    std::poisson_distribution<std::int64_t> pois(lambda);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.set(i, j, pois(rng));
    return m;
}

// Planted Poisson matrix: 1 + Poisson(lambda) inside a hidden uniform t-subset.
inline IntersectionMatrix sample_poim_planted(int n, int t, double lambda, Rng& rng) {
    if (t < 2 || t > n) throw std::invalid_argument("sample_poim_planted: need 2 <= t <= n");
    if (lambda < 0.0) throw std::invalid_argument("sample_poim_planted: lambda >= 0 required");
    IntersectionMatrix m(n);
    std::vector<char> in(n, 0);
    for (int v : uniform_subset(n, t, rng)) in[v] = 1;
    std::poisson_distribution<std::int64_t> pois(lambda > 0.0 ? lambda : 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::int64_t base = lambda > 0.0 ? pois(rng) : 0;
            m.set(i, j, base + ((in[i] && in[j]) ? 1 : 0));
        }
    return m;
}

// Poissonized RIG generation (tau = 1): a Poisson number of cliques with
// multinomially split sizes, planted on uniform vertex subsets.
inline Graph rig_poissonized_sample(int n, std::int64_t d, double p, Rng& rng) {
    double delta = delta_from_p(p, d);
    // p_k = C(n,k) delta^k (1-delta)^{n-k}; tail = 1 - p_0 - p_1 in log space
    double tail = binom_tail_ge(n, delta, 2);
    Graph::Builder b(n);
    if (tail <= 0.0) return std::move(b).build();
    std::poisson_distribution<std::int64_t> pois(double(d) * tail);
    std::int64_t total = pois(rng);
    // split clique-size counts sequentially with conditional binomials
    double rest = tail;
    for (int k = 2; k <= n && total > 0; ++k) {
        double pk = std::exp(binom_log_pmf(n, k, delta));
        std::int64_t mk;
        if (k == n) {
            mk = total;
        } else {
            double frac = std::min(1.0, std::max(0.0, pk / rest));
            std::binomial_distribution<std::int64_t> bin(total, frac);
            mk = bin(rng);
        }
        for (std::int64_t rep = 0; rep < mk; ++rep) {
            std::vector<int> s = uniform_subset(n, k, rng);
            for (std::size_t a = 0; a < s.size(); ++a)
                for (std::size_t c = a + 1; c < s.size(); ++c) b.set(s[a], s[c]);
        }
        total -= mk;
        rest -= pk;
        if (rest <= 0.0) break;
    }
    return std::move(b).build();
}

// ---------------------------------------------------------------------------
// ModelSpec: uniform CLI/config currency for all ensembles.

enum class ModelKind { ER, RIG, RIG_TAU, RIG_P, PLANTED_CLIQUE, RIM, POIM, POIM_P, RGG };

struct ModelSpec {
    ModelKind kind = ModelKind::ER;
    int n = 0;
    std::int64_t d = 0;
    std::optional<double> p;
    std::optional<double> delta;
    std::int64_t tau = 1;
    int t = 0;
    double lambda = 0.0;

    bool is_matrix_model() const {
        return kind == ModelKind::RIM || kind == ModelKind::POIM || kind == ModelKind::POIM_P;
    }

    static ModelKind kind_from_string(const std::string& s) {
        if (s == "er") return ModelKind::ER;
        if (s == "rig") return ModelKind::RIG;
        if (s == "rig_tau") return ModelKind::RIG_TAU;
        if (s == "rig_p" || s == "rig_pois") return ModelKind::RIG_P;
        if (s == "planted_clique" || s == "pc") return ModelKind::PLANTED_CLIQUE;
        if (s == "rim") return ModelKind::RIM;
        if (s == "poim") return ModelKind::POIM;
        if (s == "poim_p" || s == "poim_planted") return ModelKind::POIM_P;
        if (s == "rgg") return ModelKind::RGG;
        throw std::invalid_argument("unknown model '" + s + "'");
    }

    static std::string kind_name(ModelKind k) {
        switch (k) {
            case ModelKind::ER: return "er";
            case ModelKind::RIG: return "rig";
            case ModelKind::RIG_TAU: return "rig_tau";
            case ModelKind::RIG_P: return "rig_p";
            case ModelKind::PLANTED_CLIQUE: return "planted_clique";
            case ModelKind::RIM: return "rim";
            case ModelKind::POIM: return "poim";
            case ModelKind::POIM_P: return "poim_p";
            case ModelKind::RGG: return "rgg";
        }
        return "?";
    }

    // Build from key=value pairs (the config-file format and the --a/--b CLI form).
    static ModelSpec from_kv(const std::map<std::string, std::string>& kv);

    void validate() const;
};

inline ModelSpec ModelSpec::from_kv(const std::map<std::string, std::string>& kv) {
    ModelSpec s;
    auto it = kv.find("model");
    if (it == kv.end()) throw std::invalid_argument("ModelSpec: missing 'model' key");
    s.kind = kind_from_string(it->second);
    for (const auto& [k, v] : kv) {
        if (k == "model") continue;
        if (k == "n") s.n = std::stoi(v);
        else if (k == "d") s.d = std::stoll(v);
        else if (k == "p" || k == "q") s.p = std::stod(v);
        else if (k == "delta") s.delta = std::stod(v);
        else if (k == "tau") s.tau = std::stoll(v);
        else if (k == "t") s.t = std::stoi(v);
        else if (k == "lambda") s.lambda = std::stod(v);
        else throw std::invalid_argument("ModelSpec: unknown key '" + k + "'");
    }
    // exactly the parameters the tag needs may appear
    static const std::map<ModelKind, std::vector<std::string>> allowed = {
        {ModelKind::ER, {"n", "p", "q"}},
        {ModelKind::RIG, {"n", "d", "p", "q"}},
        {ModelKind::RIG_TAU, {"n", "d", "tau", "p", "q", "delta"}},
        {ModelKind::RIG_P, {"n", "d", "p", "q"}},
        {ModelKind::PLANTED_CLIQUE, {"n", "t", "p", "q"}},
        {ModelKind::RIM, {"n", "d", "delta"}},
        {ModelKind::POIM, {"n", "lambda"}},
        {ModelKind::POIM_P, {"n", "t", "lambda"}},
        {ModelKind::RGG, {"n", "d", "p", "q"}},
    };
    const auto& ok = allowed.at(s.kind);
    for (const auto& [k, v] : kv) {
        if (k == "model") continue;
        bool found = false;
        for (const auto& a : ok) found = found || a == k;
        if (!found)
            throw std::invalid_argument("ModelSpec: key '" + k + "' is not a parameter of model '" +
                                        kind_name(s.kind) + "'");
    }
    s.validate();
    return s;
}

inline void ModelSpec::validate() const {
    if (n <= 0) throw std::invalid_argument("ModelSpec: n must be positive");
    auto need_p = [&] {
        if (!p) throw std::invalid_argument("ModelSpec: p required");
        if (!(*p >= 0.0 && *p <= 1.0)) throw std::invalid_argument("ModelSpec: p outside [0,1]");
    };
    auto need_d = [&] {
        if (d <= 0) throw std::invalid_argument("ModelSpec: d must be positive");
    };
    switch (kind) {
        case ModelKind::ER:
            need_p();
            break;
        case ModelKind::RIG:
        case ModelKind::RIG_P:
            need_p();
            need_d();
            break;
        case ModelKind::RIG_TAU:
            need_d();
            if (tau < 1) throw std::invalid_argument("ModelSpec: tau >= 1 required");
            // exactly one of p, delta may be given; the other is derived
            if (p && delta)
                throw std::invalid_argument("ModelSpec: rig_tau is over-determined; give p or delta, not both");
            if (!p && !delta) throw std::invalid_argument("ModelSpec: rig_tau needs p or delta");
            break;
        case ModelKind::PLANTED_CLIQUE:
            need_p();
            if (t < 2 || t > n) throw std::invalid_argument("ModelSpec: need 2 <= t <= n");
            break;
        case ModelKind::RIM:
            need_d();
            if (!delta) throw std::invalid_argument("ModelSpec: rim needs delta");
            break;
        case ModelKind::POIM:
            if (lambda < 0) throw std::invalid_argument("ModelSpec: lambda >= 0 required");
            break;
        case ModelKind::POIM_P:
            if (lambda < 0) throw std::invalid_argument("ModelSpec: lambda >= 0 required");
            if (t < 2 || t > n) throw std::invalid_argument("ModelSpec: need 2 <= t <= n");
            break;
        case ModelKind::RGG:
            need_p();
            need_d();
            if (d < 2) throw std::invalid_argument("ModelSpec: rgg needs d >= 2");
            break;
    }
}

} // namespace latgraph
