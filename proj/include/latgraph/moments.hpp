#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "latgraph/numeric.hpp"

namespace latgraph {

// Exact (pre-asymptotic) moments of the triangle count T(G) and the signed
// triangle count T_s(G) under RIG(n,d,p), p = 1 - (1-delta^2)^d. Every d-th
// power is evaluated as expm1(d*log1p(.)) so the identities survive d ~ 1e9
// without cancellation; the constant parts of each expansion cancel exactly
// and are dropped algebraically rather than numerically.

struct TriangleMoments {
    double mean_signed = 0.0;
    double var_signed = 0.0;
    double mean_plain = 0.0;
    int n = 0;
    std::int64_t d = 0;
    double delta = 0.0;
    double p = 0.0;
};

namespace detail {

inline double choose(double n, double k) {
    if (k < 0 || n < k) return 0.0;
    double r = 1.0;
    for (int i = 0; i < int(k); ++i) r = r * (n - i) / (i + 1);
    return r;
}

// (1+eps)^d - 1 where base = (1-delta^2)^k (1+eps) and base = 1 + bm1.
inline double pow_ratio_m1(std::int64_t d, double bm1, int k, double delta) {
    double eps = std::expm1(std::log1p(bm1) - k * std::log1p(-delta * delta));
    return std::expm1(double(d) * std::log1p(eps));
}

// (1 - delta + delta*x)^d - 1 with x = (1-delta)^alpha (1-delta^2)^(-beta).
inline double mgf_pow_m1(std::int64_t d, int alpha, int beta, double delta) {
    double xm1 = std::expm1(alpha * std::log1p(-delta) - beta * std::log1p(-delta * delta));
    return std::expm1(double(d) * std::log1p(delta * xm1));
}

struct RigTriangleCore {
    double p;     // marginal edge probability
    double q1;    // E[tau_123]
    double q2;    // E[tau_123^2]
    double e34;   // E[tau_123 tau_124]   (triangles sharing one edge)
    double e35;   // E[tau_123 tau_145]   (triangles sharing one vertex)
    double p111;  // P[all three edges of a triple present]
};

inline RigTriangleCore rig_triangle_core(std::int64_t d, double delta) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("rig moments: delta in [0,1) required");
    if (d < 1) throw std::invalid_argument("rig moments: d >= 1 required");
    const double dd = delta;
    const double p = -std::expm1(double(d) * std::log1p(-dd * dd));
    const double om = 1.0 - p;
    // (1-2d^2+d^3) = B^2 (1+D1), (1-3d^2+2d^3) = B^3 (1+D2) with B = 1-delta^2
    const double x1 = pow_ratio_m1(d, dd * dd * (dd - 2.0), 2, dd);                    // (1+D1)^d-1
    const double x2 = pow_ratio_m1(d, dd * dd * (2.0 * dd - 3.0), 3, dd);              // (1+D2)^d-1
    const double x5 = pow_ratio_m1(d, dd * dd * (-3.0 + 3.0 * dd - dd * dd), 3, dd);   // base 1-3d^2+3d^3-d^4
    const double xb = pow_ratio_m1(d, dd * dd * (-4.0 + 4.0 * dd - dd * dd), 4, dd);   // base 1-4d^2+4d^3-d^4
    const double xa = pow_ratio_m1(d, dd * dd * (-5.0 + 6.0 * dd - 2.0 * dd * dd), 5, dd); // base 1-5d^2+6d^3-2d^4

    RigTriangleCore c{};
    c.p = p;
    const double om3 = om * om * om;
    const double b = 1.0 - 2.0 * p;
    c.q1 = om3 * (3.0 * x1 - x2);
    c.q2 = p * p * p * om3 + 3.0 * om3 * om * b * b * x1 - om3 * b * b * b * x2;
    // tau_123 tau_124 via the 2^5 pattern table; constants cancel exactly,
    // leaving five ratio powers with coefficients in u = (1-2p)/(1-p)
    const double u = b / om;
    const double om6 = om3 * om3;
    c.e34 = om6 * ((4.0 + 4.0 * u) * (x1 - x2) - 2.0 * u * x5 + (1.0 + 4.0 * u) * xb - u * xa);
    // tau_123 tau_145 via E[(tau^m)^2] with m = |S_1| ~ Bin(d,delta) and the
    // binomial MGF identity E[x^m] = (1 - delta + delta x)^d; nine MGF powers
    const double om2 = om * om;
    double e35 = 0.0;
    e35 += 4.0 * om2 * mgf_pow_m1(d, 2, 2, dd) - 4.0 * om * mgf_pow_m1(d, 3, 2, dd) + mgf_pow_m1(d, 4, 2, dd);
    e35 += -8.0 * om2 * mgf_pow_m1(d, 2, 1, dd) + 8.0 * om * mgf_pow_m1(d, 3, 1, dd) - 2.0 * mgf_pow_m1(d, 4, 1, dd);
    e35 += 4.0 * om2 * mgf_pow_m1(d, 2, 0, dd) - 4.0 * om * mgf_pow_m1(d, 3, 0, dd) + mgf_pow_m1(d, 4, 0, dd);
    c.e35 = om2 * e35;
    c.p111 = p * p * p + 3.0 * om * om * x1 - om3 * x2;
    return c;
}

} // namespace detail

// Survival probabilities Q(x) for one triangle of RIG(n,d,p): the probability
// that the present edges among {1,2},{1,3},{2,3} form a subset of the support
// of x. Depends on x only through |x|.
inline double q_survival(std::int64_t d, double delta, const std::array<int, 3>& x) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("q_survival: delta in [0,1]");
    int w = (x[0] != 0) + (x[1] != 0) + (x[2] != 0);
    switch (w) {
        case 0: return std::exp(double(d) * (std::log1p(2.0 * delta) + 2.0 * std::log1p(-delta)));
        case 1: return std::exp(double(d) * (std::log1p(-delta) + std::log1p(delta - delta * delta)));
        case 2: return std::exp(double(d) * (std::log1p(-delta) + std::log1p(delta)));
        default: return 1.0;
    }
}

inline double rig_signed_triangle_mean(int n, std::int64_t d, double delta) {
    auto c = detail::rig_triangle_core(d, delta);
    return detail::choose(n, 3) * c.q1;
}

// Variance of T_s(G) assembled from the exact covariance of triangle pairs
// sharing two vertices (12 C(n,4) ordered pairs) and one vertex (30 C(n,5)).
inline double rig_signed_triangle_var(int n, std::int64_t d, double delta) {
    if (n < 3) return 0.0;
    auto c = detail::rig_triangle_core(d, delta);
    double q = c.q1;
    double var1 = c.q2 - q * q;
    double cov2 = c.e34 - q * q;
    double cov1 = c.e35 - q * q;
    return detail::choose(n, 3) * var1 + 12.0 * detail::choose(n, 4) * cov2 +
           30.0 * detail::choose(n, 5) * cov1;
}

inline double rig_triangle_mean(int n, std::int64_t d, double delta) {
    auto c = detail::rig_triangle_core(d, delta);
    return detail::choose(n, 3) * c.p111;
}

inline TriangleMoments rig_triangle_moments(int n, std::int64_t d, double delta) {
    auto c = detail::rig_triangle_core(d, delta);
    TriangleMoments m;
    m.n = n;
    m.d = d;
    m.delta = delta;
    m.p = c.p;
    double q = c.q1;
    m.mean_signed = detail::choose(n, 3) * q;
    m.var_signed = detail::choose(n, 3) * (c.q2 - q * q) +
                   12.0 * detail::choose(n, 4) * (c.e34 - q * q) +
                   30.0 * detail::choose(n, 5) * (c.e35 - q * q);
    m.mean_plain = detail::choose(n, 3) * c.p111;
    return m;
}

// Erdos-Renyi counterparts: E[T_s] = 0, E[T] = C(n,3) p^3, Var[T_s] = C(n,3) p^3 (1-p)^3.
inline TriangleMoments er_counts(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("er_counts: p in [0,1]");
    TriangleMoments m;
    m.n = n;
    m.p = p;
    double triples = detail::choose(n, 3);
    m.mean_signed = 0.0;
    m.mean_plain = triples * p * p * p;
    m.var_signed = triples * p * p * p * (1.0 - p) * (1.0 - p) * (1.0 - p);
    return m;
}

// Detection signal-to-noise E[T_s] / sqrt(Var[T_s]) for RIG(n,d,p).
inline double rig_snr(int n, std::int64_t d, double delta) {
    double v = rig_signed_triangle_var(n, d, delta);
    if (!(v > 0.0)) throw std::domain_error("rig_snr: zero variance");
    return rig_signed_triangle_mean(n, d, delta) / std::sqrt(v);
}

} // namespace latgraph
