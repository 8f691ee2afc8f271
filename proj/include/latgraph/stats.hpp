#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "latgraph/numeric.hpp"

namespace latgraph {

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    double n = double(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::max(double(i + 1) / n - f, f - double(i) / n));
    }
    return d;
}

// Asymptotic KS critical value: sqrt(-ln(alpha/2)/2) / sqrt(n). Valid for the
// sample sizes (>= 1e4) used here.
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(double(n));
}

struct GofResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson GOF of an integer-keyed histogram against expected probabilities.
// Adjacent bins are pooled until every expected count reaches min_expected.
inline GofResult chi2_gof_pmf(const std::map<std::int64_t, std::int64_t>& hist,
                              const std::function<double(std::int64_t)>& pmf, std::size_t m,
                              double min_expected = 5.0) {
    if (hist.empty()) throw std::invalid_argument("chi2_gof_pmf: empty histogram");
    std::int64_t lo = hist.begin()->first, hi = hist.rbegin()->first;
    std::vector<double> exp_bins, obs_bins;
    double e_acc = 0.0, o_acc = 0.0, p_rest = 1.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
        double pk = pmf(k);
        p_rest -= pk;
        e_acc += double(m) * pk;
        auto it = hist.find(k);
        o_acc += it == hist.end() ? 0.0 : double(it->second);
        if (e_acc >= min_expected) {
            exp_bins.push_back(e_acc);
            obs_bins.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    // everything outside [lo,hi] plus any unflushed remainder forms the tail bin
    e_acc += double(m) * std::max(0.0, p_rest);
    if (!exp_bins.empty() && e_acc < min_expected) {
        exp_bins.back() += e_acc;
        obs_bins.back() += o_acc;
    } else {
        exp_bins.push_back(std::max(e_acc, 1e-12));
        obs_bins.push_back(o_acc);
    }
    GofResult r;
    for (std::size_t i = 0; i < exp_bins.size(); ++i) {
        double diff = obs_bins[i] - exp_bins[i];
        r.statistic += diff * diff / exp_bins[i];
    }
    r.dof = int(exp_bins.size()) - 1;
    if (r.dof < 1) r.dof = 1;
    r.p_value = reg_gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

// Two-sample Pearson chi^2 on integer-keyed histograms, pooling adjacent bins
// until the pooled count reaches min_pooled in each sample's scale.
inline GofResult chi2_two_sample(const std::map<std::int64_t, std::int64_t>& a,
                                 const std::map<std::int64_t, std::int64_t>& b,
                                 double min_pooled = 10.0) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chi2_two_sample: empty histogram");
    double na = 0.0, nb = 0.0;
    std::map<std::int64_t, std::pair<double, double>> joint;
    for (auto& [k, c] : a) {
        joint[k].first += double(c);
        na += double(c);
    }
    for (auto& [k, c] : b) {
        joint[k].second += double(c);
        nb += double(c);
    }
    double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    std::vector<std::pair<double, double>> bins;
    double ca = 0.0, cb = 0.0;
    for (auto& [k, cc] : joint) {
        ca += cc.first;
        cb += cc.second;
        if (ca + cb >= min_pooled) {
            bins.emplace_back(ca, cb);
            ca = cb = 0.0;
        }
    }
    if (ca + cb > 0.0) {
        if (!bins.empty()) {
            bins.back().first += ca;
            bins.back().second += cb;
        } else {
            bins.emplace_back(ca, cb);
        }
    }
    GofResult r;
    for (auto& [oa, ob] : bins) {
        double num = ka * oa - kb * ob;
        r.statistic += num * num / (oa + ob);
    }
    r.dof = int(bins.size()) - 1;
    if (r.dof < 1) r.dof = 1;
    r.p_value = reg_gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

// Streaming mean / variance / standard error.
struct RunningMoments {
    std::size_t count = 0;
    KahanSum sum, sumsq;
    void add(double x) {
        ++count;
        sum.add(x);
        sumsq.add(x * x);
    }
    double mean() const { return sum.value() / double(count); }
    double variance() const {
        double m = mean();
        double v = sumsq.value() / double(count) - m * m;
        return std::max(0.0, v) * double(count) / double(count > 1 ? count - 1 : 1);
    }
    double se() const { return std::sqrt(variance() / double(count)); }
};

inline double binomial_se(double rate, std::size_t trials) {
    return std::sqrt(std::max(0.0, rate * (1.0 - rate)) / double(trials));
}

} // namespace latgraph
