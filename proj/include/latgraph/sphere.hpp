#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "latgraph/numeric.hpp"
#include "latgraph/rng.hpp"

namespace latgraph {

// psi_d is the marginal density of one coordinate of a Haar-uniform point on
// the (d-1)-sphere: psi_d(x) = Gamma(d/2) / (Gamma((d-1)/2) sqrt(pi)) * (1-x^2)^{(d-3)/2}.
// Psi_d(x) = int_x^1 psi_d is its upper tail. Defined for d >= 2; d = 2 has
// integrable singularities at the endpoints, d = 3 is uniform on [-1,1].

inline double psi_log_norm(int d) {
    return log_gamma(0.5 * d) - log_gamma(0.5 * (d - 1)) - 0.5 * std::log(kPi);
}

inline double psi_density(int d, double x) {
    if (d < 2) throw std::invalid_argument("psi_density: d >= 2 required");
    if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("psi_density: x outside [-1,1]");
    if (d == 2 && (x == 1.0 || x == -1.0))
        throw std::invalid_argument("psi_density: singular endpoint for d=2");
    double one_minus_x2 = (1.0 - x) * (1.0 + x);
    if (one_minus_x2 <= 0.0) return d == 3 ? std::exp(psi_log_norm(d)) : 0.0;
    return std::exp(psi_log_norm(d) + 0.5 * (d - 3) * std::log(one_minus_x2));
}

// Upper tail through the regularized incomplete beta; the small side is always
// the one evaluated directly, so deep tails keep full relative precision.
// A quadrature fallback guards the (never expected) case where the continued
// fraction fails to produce a finite value.
inline double psi_tail(int d, double x) {
    if (d < 2) throw std::invalid_argument("psi_tail: d >= 2 required");
    if (x >= 1.0) return 0.0;
    if (x <= -1.0) return 1.0;
    if (x < 0.0) return 1.0 - psi_tail(d, -x);
    double y = (1.0 - x) * (1.0 + x);
    double v = 0.5 * reg_inc_beta(0.5 * (d - 1), 0.5, y);
    if (!std::isfinite(v)) {
        v = integrate([d](double t) { return psi_density(d, t); }, x, 1.0, 1e-13);
    }
    return v;
}

// Standard normal upper tail.
inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// t_{p,d}: the unique t with Psi_d(t) = p, by bisection to |Psi - p| <= 1e-12.
inline double threshold_t(double p, int d) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("threshold_t: p in (0,1) required");
    if (d < 2) throw std::invalid_argument("threshold_t: d >= 2 required");
    const double eps = 1e-15;
    return bisect_decreasing([d](double t) { return psi_tail(d, t); }, -1.0 + eps, 1.0 - eps, p,
                             1e-12);
}

// One draw from psi_d: first coordinate of a normalized d-dimensional standard
// Gaussian, generated as Z / sqrt(Z^2 + S) with S ~ chi^2_{d-1}.
inline double sample_psi(int d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("sample_psi: d >= 2 required");
    std::normal_distribution<double> nd(0.0, 1.0);
    std::gamma_distribution<double> chi2(0.5 * (d - 1), 2.0);
    double z = nd(rng);
    double s = chi2(rng);
    return z / std::sqrt(z * z + s);
}

// Draw from psi_d conditioned on exceeding t_{p,d}. Rejection from psi_d for
// moderate p; inverse-CDF bisection when p < 1e-3 (expected rejection cost
// beyond 10^3 draws).
inline double sample_psi_plus(int d, double p, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sample_psi_plus: p in (0,1) required");
    double t = threshold_t(p, d);
    if (p >= 1e-3) {
        for (;;) {
            double x = sample_psi(d, rng);
            if (x >= t) return x;
        }
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * p; // Psi_d(X) ~ U(0,p) on the conditioned event
    if (u <= 0.0) u = p * 1e-17;
    double x = threshold_t(u, d);
    return x < t ? t : x;
}

} // namespace latgraph
