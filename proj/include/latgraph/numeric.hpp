#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace latgraph {

constexpr double kPi = 3.14159265358979323846;

// Kahan-Neumaier compensated accumulator. Many of the divergence sums have
// heavy cancellation, so plain += is not good enough.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline double log_gamma(double x) { return std::lgamma(x); }

inline double log_binom(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

inline double binom_log_pmf(std::int64_t n, std::int64_t k, double p) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_binom(double(n), double(k)) + k * std::log(p) + (n - k) * std::log1p(-p);
}

inline double poisson_log_pmf(std::int64_t k, double lambda) {
    if (k < 0) return -std::numeric_limits<double>::infinity();
    if (lambda <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -lambda + k * std::log(lambda) - log_gamma(double(k) + 1.0);
}

// P[Bin(n,p) >= k], summed from whichever tail is smaller in log space.
inline double binom_tail_ge(std::int64_t n, double p, std::int64_t k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    double mean = n * p;
    KahanSum acc;
    if (double(k) > mean) {
        for (std::int64_t j = k; j <= n; ++j) acc.add(std::exp(binom_log_pmf(n, j, p)));
        return std::min(1.0, acc.value());
    }
    for (std::int64_t j = 0; j < k; ++j) acc.add(std::exp(binom_log_pmf(n, j, p)));
    return std::max(0.0, 1.0 - acc.value());
}

// P[Poisson(lambda) >= k].
inline double poisson_tail_ge(double lambda, std::int64_t k) {
    if (k <= 0) return 1.0;
    if (lambda <= 0.0) return 0.0;
    if (double(k) > lambda) {
        KahanSum acc;
        double term = std::exp(poisson_log_pmf(k, lambda));
        std::int64_t j = k;
        while (term > 0.0) {
            acc.add(term);
            ++j;
            term *= lambda / double(j);
            if (double(j) > lambda && term < 1e-320) break;
        }
        return std::min(1.0, acc.value());
    }
    KahanSum acc;
    for (std::int64_t j = 0; j < k; ++j) acc.add(std::exp(poisson_log_pmf(j, lambda)));
    return std::max(0.0, 1.0 - acc.value());
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double ibeta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a,b), with the standard symmetry split so
// the continued fraction always runs on its convergent side. Callers that
// need a tiny tail should arrange for the result itself to be the small side.
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("reg_inc_beta: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = log_gamma(a) + log_gamma(b) - log_gamma(a + b);
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::ibeta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

// Regularized incomplete gamma Q(a,x) = P[Gamma(a) > x]; series for x < a+1,
// continued fraction otherwise.
inline double reg_gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("reg_gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Adaptive Gauss-Kronrod (G7,K15) quadrature.
namespace detail {

struct GK15 {
    // K15 nodes (symmetric) and weights; G7 weights on the shared nodes.
    static constexpr double xk[8] = {
        0.0, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
        0.7415311855993945, 0.8648644233597691, 0.9491079123427585, 0.9914553711208126};
    static constexpr double wk[8] = {
        0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
        0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
    static constexpr double wg[4] = {
        0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697};
};

template <class F>
inline void gk15(const F& f, double a, double b, double& res, double& err) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double resk = GK15::wk[0] * fc;
    double resg = GK15::wg[0] * fc;
    for (int j = 1; j < 8; ++j) {
        double fl = f(c - h * GK15::xk[j]);
        double fr = f(c + h * GK15::xk[j]);
        resk += GK15::wk[j] * (fl + fr);
        if (j % 2 == 0) resg += GK15::wg[j / 2] * (fl + fr);
    }
    res = resk * h;
    err = std::fabs((resk - resg) * h);
}

} // namespace detail

// Integrate f over [a,b] to absolute tolerance tol by interval bisection.
template <class F>
inline double integrate(const F& f, double a, double b, double tol = 1e-12) {
    struct Seg { double a, b, res, err; };
    double res, err;
    detail::gk15(f, a, b, res, err);
    std::vector<Seg> segs{{a, b, res, err}};
    double total_err = err;
    int iter = 0;
    while (total_err > tol && ++iter < 2000) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        Seg s = segs[worst];
        double m = 0.5 * (s.a + s.b);
        Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
        detail::gk15(f, l.a, l.b, l.res, l.err);
        detail::gk15(f, r.a, r.b, r.res, r.err);
        total_err += l.err + r.err - s.err;
        segs[worst] = l;
        segs.push_back(r);
    }
    KahanSum acc;
    for (const auto& s : segs) acc.add(s.res);
    return acc.value();
}

// Monotone-function root finder: returns x in [lo,hi] with f(x) ~ target,
// assuming f is decreasing. Bisection to the requested function tolerance.
template <class F>
inline double bisect_decreasing(const F& f, double lo, double hi, double target, double ftol,
                                int max_iter = 300) {
    double flo = f(lo), fhi = f(hi);
    if (!(flo >= target && target >= fhi))
        throw std::domain_error("bisect_decreasing: target not bracketed");
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < max_iter; ++i) {
        mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (std::fabs(fm - target) <= ftol) {
            double width = hi - lo;
            if (width <= 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(mid) + 1.0))
                return mid;
        }
        if (fm > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace latgraph
