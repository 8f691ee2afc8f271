#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "latgraph/graph.hpp"
#include "latgraph/models.hpp"
#include "latgraph/moments.hpp"
#include "latgraph/rng.hpp"
#include "latgraph/stats.hpp"

namespace latgraph {

// Decision threshold of the signed-triangle test: half the leading term of the
// RIG mean, (1/2) C(n,3) (1-p)^3 d delta^3 with delta calibrated from (p,d).
inline double signed_triangle_threshold(int n, std::int64_t d, double p) {
    double delta = delta_from_p(p, d);
    double triples = double(n) * (n - 1) * (n - 2) / 6.0;
    return 0.5 * triples * (1.0 - p) * (1.0 - p) * (1.0 - p) * double(d) * delta * delta * delta;
}

enum class Decision { Geometry, Null };

inline Decision signed_triangle_test(const Graph& g, int n, std::int64_t d, double p) {
    if (g.n() != n) throw std::invalid_argument("signed_triangle_test: vertex count mismatch");
    return signed_triangle_stat(g, p) >= signed_triangle_threshold(n, d, p) ? Decision::Geometry
                                                                            : Decision::Null;
}

struct SweepConfig {
    std::vector<int> n_values;
    std::vector<std::int64_t> d_values;       // the primary (log-spaced) grid
    std::vector<double> p_values;
    std::vector<std::int64_t> tau_values{1};
    int trials = 100;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const {
        if (n_values.empty() || d_values.empty() || p_values.empty() || tau_values.empty())
            throw std::invalid_argument("SweepConfig: empty grid");
        if (trials < 1) throw std::invalid_argument("SweepConfig: trials >= 1 required");
        if (workers < 1) throw std::invalid_argument("SweepConfig: workers >= 1 required");
    }
};

struct StatSummary {
    int n = 0;
    std::int64_t d = 0;
    double p = 0.0;
    std::int64_t tau = 1;
    int trials = 0;
    double power = 0.0;      // geometry rate under RIG
    double fpr = 0.0;        // geometry rate under ER
    double snr = 0.0;        // closed-form E[T_s]/sd[T_s] (tau = 1 only)
    double tv_lower = 0.0;   // |power - fpr|: TV through the decision feature
    double se_power = 0.0;
    double se_fpr = 0.0;
    bool ok = true;
    std::string error;
};

inline std::vector<std::int64_t> log_spaced(std::int64_t lo, std::int64_t hi, int count) {
    if (count < 1 || lo < 1 || hi < lo) throw std::invalid_argument("log_spaced: bad range");
    std::vector<std::int64_t> out;
    for (int i = 0; i < count; ++i) {
        double f = count == 1 ? 0.0 : double(i) / double(count - 1);
        auto v = std::int64_t(std::llround(std::exp(std::log(double(lo)) * (1.0 - f) +
                                                    std::log(double(hi)) * f)));
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    return out;
}

// One sweep cell: `trials` RIG draws and `trials` ER draws, each through the
// event-E signed triangle test. Trial RNG streams are derived from
// (seed, cell, trial) so the result is independent of worker scheduling.
inline StatSummary run_cell(int n, std::int64_t d, double p, std::int64_t tau, int trials,
                            std::uint64_t seed, std::size_t cell_index, int workers) {
    StatSummary row;
    row.n = n;
    row.d = d;
    row.p = p;
    row.tau = tau;
    row.trials = trials;
    try {
        (void)delta_for_tau(p, d, tau); // fail fast on infeasible cells
        std::vector<std::uint8_t> rig_hit(std::size_t(trials), 0);
        std::vector<std::uint8_t> er_hit(std::size_t(trials), 0);
        std::atomic<int> next{0};
        auto work = [&] {
            for (;;) {
                int t = next.fetch_add(1);
                if (t >= trials) break;
                Rng rng = make_rng(seed, cell_index, std::uint64_t(t));
                Graph g = sample_rig(n, d, p, tau, rng);
                rig_hit[std::size_t(t)] =
                    signed_triangle_test(g, n, d, p) == Decision::Geometry ? 1 : 0;
                Graph h = sample_er(n, p, rng);
                er_hit[std::size_t(t)] =
                    signed_triangle_test(h, n, d, p) == Decision::Geometry ? 1 : 0;
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        int hits_rig = 0, hits_er = 0;
        for (int t = 0; t < trials; ++t) {
            hits_rig += rig_hit[std::size_t(t)];
            hits_er += er_hit[std::size_t(t)];
        }
        row.power = double(hits_rig) / trials;
        row.fpr = double(hits_er) / trials;
        row.se_power = binomial_se(row.power, std::size_t(trials));
        row.se_fpr = binomial_se(row.fpr, std::size_t(trials));
        row.tv_lower = std::fabs(row.power - row.fpr);
        row.snr = tau == 1 ? rig_snr(n, d, delta_from_p(p, d))
                           : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

inline std::vector<StatSummary> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<StatSummary> rows;
    std::size_t cell = 0;
    for (int n : cfg.n_values)
        for (double p : cfg.p_values)
            for (std::int64_t tau : cfg.tau_values)
                for (std::int64_t d : cfg.d_values)
                    rows.push_back(run_cell(n, d, p, tau, cfg.trials, cfg.seed, cell++, cfg.workers));
    return rows;
}

} // namespace latgraph
