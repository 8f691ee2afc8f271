#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "latgraph/graph.hpp"
#include "latgraph/numeric.hpp"
#include "latgraph/rng.hpp"
#include "latgraph/sphere.hpp"

namespace latgraph {

// n unit vectors in R^d, stored flat.
class SpherePointSet {
public:
    SpherePointSet(int n, int d) : n_(n), d_(d), x_(std::size_t(n) * d, 0.0) {
        if (n < 0 || d < 1) throw std::invalid_argument("SpherePointSet: bad dimensions");
    }

    int n() const { return n_; }
    int d() const { return d_; }

    double* point(int i) { return x_.data() + std::size_t(i) * d_; }
    const double* point(int i) const { return x_.data() + std::size_t(i) * d_; }

    double inner(int i, int j) const {
        const double* a = point(i);
        const double* b = point(j);
        double s = 0.0;
        for (int k = 0; k < d_; ++k) s += a[k] * b[k];
        return s;
    }

    double norm(int i) const { return std::sqrt(inner(i, i)); }

private:
    int n_, d_;
    std::vector<double> x_;
};

namespace vec {

inline double dot(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

inline void axpy(double alpha, const double* x, double* y, int d) {
    for (int k = 0; k < d; ++k) y[k] += alpha * x[k];
}

inline void scale(double alpha, double* x, int d) {
    for (int k = 0; k < d; ++k) x[k] *= alpha;
}

} // namespace vec

inline SpherePointSet sample_sphere_points(int n, int d, Rng& rng) {
    SpherePointSet pts(n, d);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        double* p = pts.point(i);
        double s2;
        do {
            s2 = 0.0;
            for (int k = 0; k < d; ++k) {
                p[k] = nd(rng);
                s2 += p[k] * p[k];
            }
        } while (s2 <= 0.0);
        vec::scale(1.0 / std::sqrt(s2), p, d);
    }
    return pts;
}

// Edge {i,j} iff <X_i, X_j> >= t (closed threshold).
inline Graph geometric_graph(const SpherePointSet& pts, double t) {
    Graph::Builder b(pts.n());
    for (int i = 0; i < pts.n(); ++i)
        for (int j = i + 1; j < pts.n(); ++j)
            if (pts.inner(i, j) >= t) b.set(i, j);
    return std::move(b).build();
}

inline Graph sample_rgg(int n, int d, double p, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sample_rgg: p in (0,1) required");
    if (d < 2) throw std::invalid_argument("sample_rgg: d >= 2 required");
    SpherePointSet pts = sample_sphere_points(n, d, rng);
    return geometric_graph(pts, threshold_t(p, d));
}

// ---------------------------------------------------------------------------
// The coupling that generates X_1 from an orthonormal basis of span(X_2..X_n)
// and independent coordinates Gamma_i ~ psi_{d-n+i}. Logical indices follow
// the construction: slot i of gamma/t_coeff refers to vertex i, 1-based, with
// slots [2..n] (and t_coeff[1]) in use.

struct CouplingState {
    int n = 0;
    int d = 0;
    std::vector<std::vector<double>> basis; // basis[i] = Y_i, slots 1..n
    std::vector<double> gamma;              // Gamma_i, slots 2..n
    std::vector<double> t_coeff;            // T_i, slots 1..n
    std::vector<double> a2;                 // a_{2j} = <X_2, Y_j>, slots 2..n
    std::vector<double> x1;                 // the coupled X_1
    const SpherePointSet* points = nullptr; // X_2..X_n as given (points->point(i-2) is X_i)

    double a22() const { return a2[2]; }
    double sum_t_squared() const {
        KahanSum s;
        for (int i = 1; i <= n; ++i) s.add(t_coeff[i] * t_coeff[i]);
        return s.value();
    }
};

// Reverse-order Gram-Schmidt (Y_n = X_n downward) with one re-orthogonalization
// pass. Throws if the input vectors are numerically rank deficient.
inline std::vector<std::vector<double>> gram_schmidt_reverse(const SpherePointSet& pts) {
    int m = pts.n(); // m = n-1 vectors, X_2..X_n
    int d = pts.d();
    std::vector<std::vector<double>> y{std::size_t(m)};
    // y[k] holds Y_{k+2}; fill from the top (Y_n) down
    for (int k = m - 1; k >= 0; --k) {
        std::vector<double> v(pts.point(k), pts.point(k) + d);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = k + 1; j < m; ++j) {
                double c = vec::dot(v.data(), y[j].data(), d);
                vec::axpy(-c, y[j].data(), v.data(), d);
            }
        double nrm = std::sqrt(vec::dot(v.data(), v.data(), d));
        if (!(nrm > 1e-10))
            throw std::runtime_error("gram_schmidt_reverse: rank-deficient input (residual norm " +
                                     std::to_string(nrm) + ")");
        vec::scale(1.0 / nrm, v.data(), d);
        y[k] = std::move(v);
    }
    return y;
}

// Build the full coupling from X_2..X_n. The returned X_1 is uniform on the
// sphere and independent of the input points.
inline CouplingState build_coupling(const SpherePointSet& x2_to_xn, Rng& rng) {
    int m = x2_to_xn.n();
    int n = m + 1;
    int d = x2_to_xn.d();
    if (d < n) throw std::invalid_argument("build_coupling: d >= n required");

    CouplingState st;
    st.n = n;
    st.d = d;
    st.points = &x2_to_xn;
    st.basis.assign(std::size_t(n) + 1, {});
    auto ortho = gram_schmidt_reverse(x2_to_xn);
    for (int i = 2; i <= n; ++i) st.basis[i] = std::move(ortho[i - 2]);

    // Gamma_i ~ psi_{d-n+i}
    st.gamma.assign(std::size_t(n) + 1, 0.0);
    for (int i = 2; i <= n; ++i) st.gamma[i] = sample_psi(d - n + i, rng);

    // T_i = Gamma_i prod_{j>i} sqrt(1-Gamma_j^2); T_1 picks up the whole product
    st.t_coeff.assign(std::size_t(n) + 1, 0.0);
    double prod = 1.0;
    for (int i = n; i >= 2; --i) {
        st.t_coeff[i] = st.gamma[i] * prod;
        prod *= std::sqrt(std::max(0.0, 1.0 - st.gamma[i] * st.gamma[i]));
    }
    st.t_coeff[1] = prod;

    // Y_1: Haar on the unit sphere of the orthogonal complement of span(Y_2..Y_n)
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> y1(std::size_t(d), 0.0);
    for (;;) {
        for (int k = 0; k < d; ++k) y1[k] = nd(rng);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 2; i <= n; ++i) {
                double c = vec::dot(y1.data(), st.basis[i].data(), d);
                vec::axpy(-c, st.basis[i].data(), y1.data(), d);
            }
        double nrm = std::sqrt(vec::dot(y1.data(), y1.data(), d));
        if (nrm > 1e-8) {
            vec::scale(1.0 / nrm, y1.data(), d);
            break;
        }
    }
    st.basis[1] = std::move(y1);

    st.x1.assign(std::size_t(d), 0.0);
    for (int i = 1; i <= n; ++i) vec::axpy(st.t_coeff[i], st.basis[i].data(), st.x1.data(), d);

    // a_{2j} = <X_2, Y_j> for j >= 3; a_22 = sqrt(1 - sum a_{2j}^2) > 0
    st.a2.assign(std::size_t(n) + 1, 0.0);
    const double* x2 = x2_to_xn.point(0);
    KahanSum sq;
    for (int j = 3; j <= n; ++j) {
        st.a2[j] = vec::dot(x2, st.basis[j].data(), d);
        sq.add(st.a2[j] * st.a2[j]);
    }
    st.a2[2] = std::sqrt(std::max(0.0, 1.0 - sq.value()));
    return st;
}

// t'_{p,d} = (t_{p,d} - sum_{j>=3} a_{2j} T_j) / (a_22 prod_{j>=3} sqrt(1-Gamma_j^2)).
inline double conditional_threshold(const CouplingState& st, double t_pd) {
    KahanSum num;
    for (int j = 3; j <= st.n; ++j) num.add(st.a2[j] * st.t_coeff[j]);
    double denom = st.a2[2];
    for (int j = 3; j <= st.n; ++j)
        denom *= std::sqrt(std::max(0.0, 1.0 - st.gamma[j] * st.gamma[j]));
    if (!(denom > 0.0)) throw std::runtime_error("conditional_threshold: nonpositive denominator");
    return (t_pd - num.value()) / denom;
}

// Q_0 = Psi_{d-n+2}(t'), with t' clamped to the support of the density.
inline double q0(int d, int n, double t_prime) {
    if (d - n + 2 < 2) throw std::invalid_argument("q0: d-n+2 >= 2 required");
    if (t_prime >= 1.0) return 0.0;
    if (t_prime <= -1.0) return 1.0;
    return psi_tail(d - n + 2, t_prime);
}

// The graph on {1..n} minus the edge {1,2}, as a deterministic function of
// (Gamma_3..Gamma_n, X_2..X_n) only: edges inside {2..n} threshold the pairwise
// inner products; edges {1,i} use <X_1, X_i> = sum_{j>=i} a_{ij} T_j, which
// involves neither Gamma_2 nor Y_1. Vertex v of the result is v+1 here.
inline Graph coupling_graph_minus_e0(const CouplingState& st, double t_pd) {
    int n = st.n;
    int d = st.d;
    const SpherePointSet& pts = *st.points;
    Graph::Builder b(n);
    for (int i = 2; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (pts.inner(i - 2, j - 2) >= t_pd) b.set(i - 1, j - 1);
    for (int i = 3; i <= n; ++i) {
        KahanSum ip;
        for (int j = i; j <= n; ++j)
            ip.add(vec::dot(pts.point(i - 2), st.basis[j].data(), d) * st.t_coeff[j]);
        if (ip.value() >= t_pd) b.set(0, i - 1);
    }
    return std::move(b).build();
}

// Replace X_2 by X_2' = (tau, g X_22, ..., g X_2d), g = sqrt((1-tau^2)/(1-X_21^2)),
// tau ~ psi^+_{d,p}; requires the convention X_1 = e_1 so that <X_1, X_2'> = tau.
inline SpherePointSet sparse_recouple_x2(const SpherePointSet& pts, double p, Rng& rng) {
    int d = pts.d();
    if (pts.n() < 2) throw std::invalid_argument("sparse_recouple_x2: need at least two points");
    const double* x1 = pts.point(0);
    if (std::fabs(x1[0] - 1.0) > 1e-9)
        throw std::invalid_argument("sparse_recouple_x2: X_1 = e_1 convention required");
    double x21 = pts.point(1)[0];
    if (!(std::fabs(x21) < 1.0))
        throw std::runtime_error("sparse_recouple_x2: |X_21| = 1, resample the input");
    double tau = sample_psi_plus(d, p, rng);
    double g = std::sqrt((1.0 - tau * tau) / (1.0 - x21 * x21));
    SpherePointSet out = pts;
    double* x2 = out.point(1);
    x2[0] = tau;
    for (int k = 1; k < d; ++k) x2[k] = g * pts.point(1)[k];
    return out;
}

// Monte Carlo estimates of E|Q_0 - p| and E(Q_0 - p)^2 over independent
// couplings, with standard errors and the implied KL surrogate
// C(n,2) E[(Q_0-p)^2] / (p(1-p)).
struct QDeviation {
    double mean_abs = 0.0;
    double se_abs = 0.0;
    double mean_sq = 0.0;
    double se_sq = 0.0;
    double mean_q0 = 0.0;
    double se_q0 = 0.0;
    double kl_surrogate = 0.0;
    std::size_t draws = 0;
};

inline QDeviation estimate_q_deviation(int n, int d, double p, std::size_t m, Rng& rng) {
    if (n < 3 || d < n) throw std::invalid_argument("estimate_q_deviation: need d >= n >= 3");
    if (m < 100) throw std::invalid_argument("estimate_q_deviation: m >= 100 required");
    double t_pd = threshold_t(p, d);
    KahanSum s_abs, s_sq, s_abs2, s_sq2, s_q, s_q2;
    for (std::size_t it = 0; it < m; ++it) {
        SpherePointSet pts = sample_sphere_points(n - 1, d, rng);
        CouplingState st = build_coupling(pts, rng);
        double tp = conditional_threshold(st, t_pd);
        double q = q0(d, n, tp);
        double dev = q - p;
        s_abs.add(std::fabs(dev));
        s_abs2.add(dev * dev);
        s_sq.add(dev * dev);
        s_sq2.add(dev * dev * dev * dev);
        s_q.add(q);
        s_q2.add(q * q);
    }
    auto finish = [m](const KahanSum& s1, const KahanSum& s2, double& mean, double& se) {
        mean = s1.value() / double(m);
        double var = std::max(0.0, s2.value() / double(m) - mean * mean);
        se = std::sqrt(var / double(m));
    };
    QDeviation out;
    out.draws = m;
    finish(s_abs, s_abs2, out.mean_abs, out.se_abs);
    finish(s_sq, s_sq2, out.mean_sq, out.se_sq);
    finish(s_q, s_q2, out.mean_q0, out.se_q0);
    out.kl_surrogate = (double(n) * (n - 1) / 2.0) * out.mean_sq / (p * (1.0 - p));
    return out;
}

} // namespace latgraph
