// latgraph: samplers, exact statistics and divergence tools for random graph
// ensembles with latent structure (intersection graphs, Poisson matrices,
// geometric graphs on the sphere) against the Erdos-Renyi baseline.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latgraph/coupling.hpp"
#include "latgraph/divergences.hpp"
#include "latgraph/graph.hpp"
#include "latgraph/io.hpp"
#include "latgraph/models.hpp"
#include "latgraph/moments.hpp"
#include "latgraph/rng.hpp"
#include "latgraph/sphere.hpp"
#include "latgraph/stats.hpp"
#include "latgraph/sweep.hpp"

using namespace latgraph;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out;
    std::string format = "csv";
};

void emit(const GlobalOpts& g, const std::string& content) {
    if (g.out.empty())
        std::cout << content;
    else
        atomic_write_file(g.out, content);
}

using KV = std::map<std::string, std::string>;

ModelSpec spec_from_arg(const std::string& arg) {
    // accepts "model=rig,n=6,d=100,p=0.2" or a path to a key=value file
    if (arg.find('=') == std::string::npos) return ModelSpec::from_kv(parse_kv_file(arg));
    return ModelSpec::from_kv(parse_kv_inline(arg));
}

struct Sampled {
    std::optional<Graph> graph;
    std::optional<IntersectionMatrix> matrix;
};

Sampled sample_model(const ModelSpec& s, Rng& rng) {
    Sampled out;
    switch (s.kind) {
        case ModelKind::ER: out.graph = sample_er(s.n, *s.p, rng); break;
        case ModelKind::RIG: out.graph = sample_rig(s.n, s.d, *s.p, 1, rng); break;
        case ModelKind::RIG_TAU: {
            double delta = s.delta ? *s.delta : delta_for_tau(*s.p, s.d, s.tau);
            out.graph = intersection_graph(sample_latent_sets(s.n, s.d, delta, rng), s.tau);
            break;
        }
        case ModelKind::RIG_P: out.graph = rig_poissonized_sample(s.n, s.d, *s.p, rng); break;
        case ModelKind::PLANTED_CLIQUE: out.graph = sample_planted_clique(s.n, s.t, *s.p, rng); break;
        case ModelKind::RIM: out.matrix = intersection_matrix(sample_latent_sets(s.n, s.d, *s.delta, rng)); break;
        case ModelKind::POIM: out.matrix = sample_poim(s.n, s.lambda, rng); break;
        case ModelKind::POIM_P: out.matrix = sample_poim_planted(s.n, s.t, s.lambda, rng); break;
        case ModelKind::RGG: out.graph = sample_rgg(s.n, int(s.d), *s.p, rng); break;
    }
    return out;
}

FinitePmf exact_graph_pmf(const ModelSpec& s) {
    switch (s.kind) {
        case ModelKind::ER: return er_graph_pmf(s.n, *s.p);
        case ModelKind::PLANTED_CLIQUE: return planted_clique_graph_pmf(s.n, s.t, *s.p);
        case ModelKind::RIG: return rig_graph_pmf(s.n, int(s.d), delta_from_p(*s.p, s.d), 1);
        case ModelKind::RIG_TAU: {
            double delta = s.delta ? *s.delta : delta_for_tau(*s.p, s.d, s.tau);
            return rig_graph_pmf(s.n, int(s.d), delta, s.tau);
        }
        default:
            throw std::invalid_argument("exact mode supports er, rig, rig_tau, planted_clique only");
    }
}

std::int64_t feature_value(const std::string& name, const Graph& g, double p) {
    if (name == "edge_count") return g.edge_count();
    if (name == "signed_triangles") {
        // integer-binned signed triangle value; sign and coarse magnitude
        double v = signed_triangle_stat(g, p);
        return std::int64_t(std::llround(v * 4.0));
    }
    throw std::invalid_argument("unknown feature '" + name + "'");
}

int cmd_verify(const GlobalOpts& g);

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random graph ensembles with latent structure: samplers, exact statistics, divergences"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
    app.add_option("--workers", g.workers, "worker threads")->capture_default_str();
    app.add_option("--out", g.out, "output path (atomic write); stdout if empty");
    app.add_option("--format", g.format, "csv|json")->capture_default_str();

    // ---- sample ----
    auto* sc_sample = app.add_subcommand("sample", "draw samples from a model");
    std::string s_model, s_config;
    int s_n = 0, s_t = 0, s_count = 1;
    std::int64_t s_d = 0, s_tau = -1;
    double s_p = -1.0, s_delta = -1.0, s_lambda = -1.0;
    sc_sample->add_option("--model", s_model, "er|rig|rig_tau|rig_p|planted_clique|rim|poim|poim_p|rgg");
    sc_sample->add_option("--config", s_config, "key=value config file defining the model");
    sc_sample->add_option("--n", s_n, "vertex count");
    sc_sample->add_option("--d", s_d, "latent dimension / ground set size");
    sc_sample->add_option("--p", s_p, "edge probability");
    sc_sample->add_option("--delta", s_delta, "latent membership probability");
    sc_sample->add_option("--tau", s_tau, "intersection threshold");
    sc_sample->add_option("--t", s_t, "planted subset size");
    sc_sample->add_option("--lambda", s_lambda, "Poisson rate");
    sc_sample->add_option("--count", s_count, "number of samples")->capture_default_str();

    // ---- stats ----
    auto* sc_stats = app.add_subcommand("stats", "closed-form RIG triangle moments over a d-grid");
    int st_n = 0;
    double st_p = 0.0;
    std::vector<std::int64_t> st_d;
    std::int64_t st_dmin = 0, st_dmax = 0;
    int st_dcount = 0;
    sc_stats->add_option("--n", st_n)->required();
    sc_stats->add_option("--p", st_p)->required();
    sc_stats->add_option("--d", st_d, "explicit d values");
    sc_stats->add_option("--d-min", st_dmin);
    sc_stats->add_option("--d-max", st_dmax);
    sc_stats->add_option("--d-count", st_dcount, "log-spaced grid size");

    // ---- tv ----
    auto* sc_tv = app.add_subcommand("tv", "total variation between two models");
    std::string tv_a, tv_b, tv_mode = "exact", tv_feature = "edge_count";
    std::size_t tv_samples = 10000;
    sc_tv->add_option("--a", tv_a, "model spec: 'model=rig,n=6,d=100,p=0.2' or config path")->required();
    sc_tv->add_option("--b", tv_b)->required();
    sc_tv->add_option("--mode", tv_mode, "exact|bound|plugin")->capture_default_str();
    sc_tv->add_option("--feature", tv_feature, "edge_count|signed_triangles (plugin mode)")->capture_default_str();
    sc_tv->add_option("--samples", tv_samples, "plugin-mode sample count per model")->capture_default_str();

    // ---- chi2 ----
    auto* sc_chi2 = app.add_subcommand("chi2", "chi-square divergence between two models");
    std::string c_a, c_b, c_mode = "closed";
    sc_chi2->add_option("--a", c_a)->required();
    sc_chi2->add_option("--b", c_b)->required();
    sc_chi2->add_option("--mode", c_mode, "closed|exact")->capture_default_str();

    // ---- sweep ----
    auto* sc_sweep = app.add_subcommand("sweep", "signed-triangle detection sweep over (n,d,p,tau)");
    SweepConfig sw;
    std::int64_t sw_dmin = 0, sw_dmax = 0;
    int sw_dcount = 0;
    sc_sweep->add_option("--n", sw.n_values, "vertex counts")->required();
    sc_sweep->add_option("--p", sw.p_values, "edge probabilities")->required();
    sc_sweep->add_option("--tau", sw.tau_values, "intersection thresholds");
    sc_sweep->add_option("--d", sw.d_values, "explicit d values");
    sc_sweep->add_option("--d-min", sw_dmin);
    sc_sweep->add_option("--d-max", sw_dmax);
    sc_sweep->add_option("--d-count", sw_dcount, "log-spaced grid size");
    sc_sweep->add_option("--trials", sw.trials, "trials per cell")->capture_default_str();

    // ---- couple ----
    auto* sc_couple = app.add_subcommand("couple", "Gram-Schmidt coupling draws: Q0 and threshold diagnostics");
    int cp_n = 8, cp_d = 64;
    double cp_p = 0.3;
    std::size_t cp_draws = 1000;
    sc_couple->add_option("--n", cp_n)->capture_default_str();
    sc_couple->add_option("--d", cp_d)->capture_default_str();
    sc_couple->add_option("--p", cp_p)->capture_default_str();
    sc_couple->add_option("--draws", cp_draws)->capture_default_str();

    // ---- verify ----
    app.add_subcommand("verify", "run the invariant checks; nonzero exit on any failure");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_sample->parsed()) {
            KV kv;
            if (!s_config.empty()) kv = parse_kv_file(s_config);
            if (!s_model.empty()) kv["model"] = s_model;
            if (s_n > 0) kv["n"] = std::to_string(s_n);
            if (s_d > 0) kv["d"] = std::to_string(s_d);
            if (s_p >= 0) kv["p"] = std::to_string(s_p);
            if (s_delta >= 0) kv["delta"] = std::to_string(s_delta);
            if (s_tau >= 0) kv["tau"] = std::to_string(s_tau);
            if (s_t > 0) kv["t"] = std::to_string(s_t);
            if (s_lambda >= 0) kv["lambda"] = std::to_string(s_lambda);
            ModelSpec spec = ModelSpec::from_kv(kv);
            Rng rng = make_rng(g.seed);
            std::ostringstream os;
            for (int c = 0; c < s_count; ++c) {
                Sampled s = sample_model(spec, rng);
                if (s.graph) {
                    if (g.format == "json")
                        os << graph_to_json(*s.graph) << '\n';
                    else
                        os << "# sample " << c << '\n' << graph_to_edge_list(*s.graph);
                } else {
                    if (c > 0) os << "# sample " << c << '\n';
                    os << matrix_to_csv(*s.matrix);
                }
            }
            emit(g, os.str());
            return 0;
        }

        if (sc_stats->parsed()) {
            std::vector<std::int64_t> ds = st_d;
            if (ds.empty()) {
                if (st_dcount < 1) throw std::invalid_argument("stats: give --d or --d-min/--d-max/--d-count");
                ds = log_spaced(st_dmin, st_dmax, st_dcount);
            }
            std::ostringstream os;
            os << "n,d,p,delta,mean_signed,var_signed,mean_plain,snr\n";
            for (auto dv : ds) {
                double delta = delta_from_p(st_p, dv);
                TriangleMoments m = rig_triangle_moments(st_n, dv, delta);
                os << st_n << ',' << dv << ',' << st_p << ',' << delta << ',' << m.mean_signed << ','
                   << m.var_signed << ',' << m.mean_plain << ',' << rig_snr(st_n, dv, delta) << '\n';
            }
            emit(g, os.str());
            return 0;
        }

        if (sc_tv->parsed()) {
            ModelSpec a = spec_from_arg(tv_a), b = spec_from_arg(tv_b);
            double value = 0.0, radius = 0.0;
            if (tv_mode == "exact") {
                value = tv_exact(exact_graph_pmf(a), exact_graph_pmf(b));
            } else if (tv_mode == "bound") {
                if (!((a.kind == ModelKind::RIG && b.kind == ModelKind::RIG_P) ||
                      (a.kind == ModelKind::RIG_P && b.kind == ModelKind::RIG)))
                    throw std::invalid_argument("bound mode covers the rig / rig_p pair");
                value = poissonization_tv_bound(a.n, a.d, *a.p);
            } else if (tv_mode == "plugin") {
                double pa = a.p ? *a.p : 0.5;
                Rng rng = make_rng(g.seed);
                auto fa = [&](Rng& r) { return *sample_model(a, r).graph; };
                auto fb = [&](Rng& r) { return *sample_model(b, r).graph; };
                auto feat = [&](const Graph& gr) { return feature_value(tv_feature, gr, pa); };
                PluginTv est = tv_plugin_lower_bound(fa, fb, feat, tv_samples, rng);
                value = est.estimate;
                radius = est.radius;
            } else {
                throw std::invalid_argument("tv: mode must be exact|bound|plugin");
            }
            std::ostringstream os;
            os << "a,b,mode,feature,samples,value,radius\n"
               << '"' << tv_a << "\",\"" << tv_b << "\"," << tv_mode << ',' << tv_feature << ','
               << tv_samples << ',' << value << ',' << radius << '\n';
            emit(g, os.str());
            return 0;
        }

        if (sc_chi2->parsed()) {
            ModelSpec a = spec_from_arg(c_a), b = spec_from_arg(c_b);
            double value = 0.0;
            if (c_mode == "closed") {
                if (a.kind == ModelKind::PLANTED_CLIQUE && b.kind == ModelKind::ER)
                    value = chi2_planted_clique(a.n, a.t, *a.p);
                else if (a.kind == ModelKind::POIM_P && b.kind == ModelKind::POIM)
                    value = chi2_poim_planted(a.n, a.t, a.lambda);
                else
                    throw std::invalid_argument(
                        "closed mode covers (planted_clique, er) and (poim_p, poim)");
            } else if (c_mode == "exact") {
                value = chi2_exact(exact_graph_pmf(a), exact_graph_pmf(b));
            } else {
                throw std::invalid_argument("chi2: mode must be closed|exact");
            }
            std::ostringstream os;
            os << "a,b,mode,value\n"
               << '"' << c_a << "\",\"" << c_b << "\"," << c_mode << ',' << value << '\n';
            emit(g, os.str());
            return 0;
        }

        if (sc_sweep->parsed()) {
            if (sw.d_values.empty()) {
                if (sw_dcount < 1) throw std::invalid_argument("sweep: give --d or --d-min/--d-max/--d-count");
                sw.d_values = log_spaced(sw_dmin, sw_dmax, sw_dcount);
            }
            sw.seed = g.seed;
            sw.workers = g.workers;
            auto rows = run_sweep(sw);
            std::ostringstream os;
            if (g.format == "json") {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& r : rows) {
                    nlohmann::json j{{"n", r.n},         {"d", r.d},           {"p", r.p},
                                     {"tau", r.tau},     {"trials", r.trials}, {"power", r.power},
                                     {"fpr", r.fpr},     {"snr", r.snr},       {"tv_lower", r.tv_lower},
                                     {"se_power", r.se_power}, {"se_fpr", r.se_fpr}};
                    if (!r.ok) j["error"] = r.error;
                    arr.push_back(j);
                }
                os << arr.dump() << '\n';
            } else {
                os << "n,d,p,tau,trials,power,fpr,snr,tv_lower,se_power,se_fpr\n";
                for (const auto& r : rows) {
                    if (!r.ok) {
                        std::cerr << "cell n=" << r.n << " d=" << r.d << " p=" << r.p
                                  << " tau=" << r.tau << " infeasible: " << r.error << '\n';
                        os << r.n << ',' << r.d << ',' << r.p << ',' << r.tau << ',' << r.trials
                           << ",nan,nan,nan,nan,nan,nan\n";
                        continue;
                    }
                    os << r.n << ',' << r.d << ',' << r.p << ',' << r.tau << ',' << r.trials << ','
                       << r.power << ',' << r.fpr << ',' << r.snr << ',' << r.tv_lower << ','
                       << r.se_power << ',' << r.se_fpr << '\n';
                }
            }
            emit(g, os.str());
            return 0;
        }

        if (sc_couple->parsed()) {
            Rng rng = make_rng(g.seed);
            double t_pd = threshold_t(cp_p, cp_d);
            std::ostringstream os;
            os << "draw,q0,t_prime,a22,max_abs_gamma\n";
            RunningMoments q_m, sq_m;
            for (std::size_t i = 0; i < cp_draws; ++i) {
                SpherePointSet pts = sample_sphere_points(cp_n - 1, cp_d, rng);
                CouplingState st = build_coupling(pts, rng);
                double tp = conditional_threshold(st, t_pd);
                double q = q0(cp_d, cp_n, tp);
                double mg = 0.0;
                for (int j = 3; j <= st.n; ++j) mg = std::max(mg, std::fabs(st.gamma[j]));
                os << i << ',' << q << ',' << tp << ',' << st.a22() << ',' << mg << '\n';
                q_m.add(q);
                sq_m.add((q - cp_p) * (q - cp_p));
            }
            double klsur = (double(cp_n) * (cp_n - 1) / 2.0) * sq_m.mean() / (cp_p * (1 - cp_p));
            os << "summary,mean_q0=" << q_m.mean() << ",se_q0=" << q_m.se()
               << ",mean_sq_dev=" << sq_m.mean() << ",kl_surrogate=" << klsur << '\n';
            emit(g, os.str());
            return 0;
        }

        if (app.get_subcommand("verify")->parsed()) return cmd_verify(g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

namespace {

// Invariant suite behind `latgraph verify`: each check prints one CSV row and
// the command exits nonzero if any fails.
int cmd_verify(const GlobalOpts& g) {
    std::ostringstream os;
    os << "check,observed,requirement,pass\n";
    bool all_ok = true;
    auto row = [&](const std::string& name, double observed, const std::string& req, bool ok) {
        os << name << ',' << observed << ',' << req << ',' << (ok ? "yes" : "no") << '\n';
        all_ok = all_ok && ok;
    };

    Rng rng = make_rng(g.seed ? g.seed : 1234567);

    // information chain 2 TV^2 <= KL <= chi^2 on random pmf pairs
    {
        std::uniform_real_distribution<double> u(0.01, 1.0);
        int bad = 0;
        for (int it = 0; it < 200; ++it) {
            int k = 2 + int(it % 7);
            std::vector<std::pair<std::uint64_t, double>> ea, eb;
            double sa = 0, sb = 0;
            for (int i = 0; i < k; ++i) {
                double x = u(rng), y = u(rng);
                ea.emplace_back(i, x);
                eb.emplace_back(i, y);
                sa += x;
                sb += y;
            }
            for (auto& e : ea) e.second /= sa;
            for (auto& e : eb) e.second /= sb;
            FinitePmf a(std::move(ea)), b(std::move(eb));
            double tv = tv_exact(a, b), kl = kl_exact(a, b), c2 = chi2_exact(a, b);
            if (!(2 * tv * tv <= kl + 1e-12 && kl <= c2 + 1e-12)) ++bad;
        }
        row("information_chain_violations", bad, "= 0", bad == 0);
    }

    // delta <-> p round trip at tau = 1
    {
        double worst = 0.0;
        for (std::int64_t d : {1, 2, 10, 100, 10000})
            for (double p : {1e-6, 0.01, 0.3, 0.9, 0.999}) {
                double back = p_from_delta_tau(delta_from_p(p, d), d, 1);
                worst = std::max(worst, std::fabs(back - p));
            }
        row("delta_p_round_trip", worst, "<= 1e-12", worst <= 1e-12);
    }

    // threshold_matrix(intersection_matrix(s), tau) == intersection_graph(s, tau)
    {
        int mismatches = 0;
        for (int it = 0; it < 50; ++it) {
            LatentSets s = sample_latent_sets(8, 20, 0.25, rng);
            for (std::int64_t tau : {1, 2, 3})
                if (!(threshold_matrix(intersection_matrix(s), tau) == intersection_graph(s, tau)))
                    ++mismatches;
        }
        row("threshold_matrix_identity_mismatches", mismatches, "= 0", mismatches == 0);
    }

    // psi_d density integrates to 1; threshold round trip
    {
        double worst = 0.0;
        for (int d : {2, 5, 50}) {
            double v = integrate([d](double x) { return psi_density(d, x); }, -1.0 + 1e-12,
                                 1.0 - 1e-12, 1e-12);
            worst = std::max(worst, std::fabs(v - 1.0));
        }
        row("psi_density_mass_error", worst, "<= 1e-10", worst <= 1e-10);
        double worst2 = 0.0;
        for (int d : {2, 10, 500})
            for (double p : {0.01, 0.3, 0.5})
                worst2 = std::max(worst2, std::fabs(psi_tail(d, threshold_t(p, d)) - p));
        row("threshold_round_trip", worst2, "<= 1e-12", worst2 <= 1e-12);
    }

    // bound domination on a spot grid
    {
        int bad = 0;
        for (std::int64_t N : {10, 100})
            for (double p : {0.05, 0.3})
                for (double q : {0.31, 0.5, 0.9})
                    if (q > p && tv_binom_bound(N, p, q) < tv_binom_exact(N, p, q)) ++bad;
        for (double l1 : {0.5, 2.0, 10.0})
            for (double frac : {0.3, 0.8, 0.99})
                if (tv_poisson_bound(l1, l1 * frac) < tv_poisson_exact(l1, l1 * frac)) ++bad;
        row("tv_bound_domination_violations", bad, "= 0", bad == 0);
    }

    // coupling invariants on a handful of draws
    {
        double worst = 0.0;
        bool a22pos = true;
        for (int it = 0; it < 10; ++it) {
            SpherePointSet pts = sample_sphere_points(7, 32, rng);
            CouplingState st = build_coupling(pts, rng);
            worst = std::max(worst, std::fabs(st.sum_t_squared() - 1.0));
            a22pos = a22pos && st.a22() > 0.0;
        }
        row("coupling_sum_t_sq_error", worst, "<= 1e-10", worst <= 1e-10);
        row("coupling_a22_positive", a22pos ? 1 : 0, "= 1", a22pos);
    }

    // closed-form chi^2 against the brute-force pmf oracle at n=4
    {
        double q = 0.3;
        double closed = chi2_planted_clique(4, 3, q);
        double tau = (1 - q) * 3.0 / 6.0;
        double exact = chi2_exact(planted_clique_graph_pmf(4, 3, q), er_graph_pmf(4, q + tau));
        double err = std::fabs(closed - exact);
        row("chi2_planted_clique_vs_oracle", err, "<= 1e-10", err <= 1e-10);
    }

    // exact signed-triangle mean vs direct enumeration at n=3, d=2
    {
        int n = 3, d = 2;
        double delta = 0.5;
        double p = p_from_delta_tau(delta, d, 1);
        double mean = 0.0;
        for (std::uint64_t pat = 0; pat < 64; ++pat) {
            double w = 1.0;
            std::uint64_t rows[3];
            for (int i = 0; i < n; ++i) {
                rows[i] = (pat >> (i * d)) & 3u;
                int ones = std::popcount(rows[i]);
                w *= std::pow(delta, ones) * std::pow(1 - delta, d - ones);
            }
            double e12 = (rows[0] & rows[1]) ? 1 : 0, e13 = (rows[0] & rows[2]) ? 1 : 0,
                   e23 = (rows[1] & rows[2]) ? 1 : 0;
            mean += w * (e12 - p) * (e13 - p) * (e23 - p);
        }
        double err = std::fabs(mean - rig_signed_triangle_mean(n, d, delta));
        row("rig_signed_mean_vs_enumeration", err, "<= 1e-12", err <= 1e-12);
    }

    emit(g, os.str());
    if (!g.out.empty()) std::cout << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return all_ok ? 0 : 1;
}

} // namespace
