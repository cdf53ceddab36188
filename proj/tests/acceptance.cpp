// Acceptance gate: every release-blocking check on one line each, measured
// values printed next to the tolerances they are held to. All tolerances are
// pinned here or in the experiment catalog defaults; nothing is tuned at run
// time. Exit 0 iff every criterion that ran passed.
//
//   acceptance            full gate (roughly 40 minutes single-threaded)
//   acceptance --ci       criterion 10 at its reduced size (same elsewhere)
//   acceptance --only 3,7 restrict to listed criteria
//
// Seeds are fixed a priori (master 0 for catalog studies, small documented
// constants for the direct checks) and are never adjusted to flip a verdict;
// a red line is a measurement, not a malfunction. See the catalog summaries
// for what each study samples.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylab/coupling.hpp"
#include "polylab/drift.hpp"
#include "polylab/env.hpp"
#include "polylab/experiments.hpp"
#include "polylab/logsum.hpp"
#include "polylab/lpp.hpp"
#include "polylab/polymer.hpp"
#include "polylab/rmt.hpp"
#include "polylab/rng.hpp"
#include "polylab/scaling.hpp"
#include "polylab/stats.hpp"

using namespace polylab;
using experiments::McReport;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double dval(const McReport& r, const std::string& key) {
    for (const auto& [k, v] : r.derived)
        if (k == key) return v;
    throw std::logic_error("missing derived key: " + key);
}

bool verdict(const McReport& r, const std::string& key) {
    for (const auto& [k, v] : r.verdicts)
        if (k == key) return v;
    throw std::logic_error("missing verdict key: " + key);
}

std::string num(double x, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

// ---- 1: passage constant in strips of width N^a ------------------------
Outcome c01() {
    experiments::ExperimentConfig cfg = experiments::default_config("glynn_whitt");
    const McReport g = experiments::run_experiment(cfg);
    cfg.dist.kind = env::DistKind::rademacher;
    const McReport r = experiments::run_experiment(cfg);
    Outcome o;
    o.pass = g.pass && r.pass;
    o.detail = "mean T/N^0.7: gaussian " + num(dval(g, "mean_ratio")) + ", rademacher " +
               num(dval(r, "mean_ratio")) + ", need [1.90, 2.05] (N=1e5, a=0.4, 20 reps)";
    return o;
}

// ---- 2: near-axis rays, T(N, hN)/N against 2 sqrt(h) --------------------
Outcome c02() {
    experiments::ExperimentConfig cfg = experiments::default_config("near_axis");
    cfg.n_values = {100000};
    const McReport r = experiments::run_experiment(cfg);
    Outcome o;
    o.pass = verdict(r, "rel_err_h001");
    o.detail = "T/(2 sqrt(N m)) at h=0.01: " + num(dval(r, "mean_h001")) +
               ", need within 0.15 of 1 (N=1e5, 10 reps; h=0.04 rides along at " +
               num(dval(r, "mean_h004")) + ")";
    return o;
}

// ---- 3: deterministic sandwich around the zero-temperature value --------
Outcome c03() {
    rng::Stream s(3);
    const env::DistKind kinds[4] = {env::DistKind::gaussian, env::DistKind::rademacher,
                                    env::DistKind::centered_exponential,
                                    env::DistKind::centered_uniform};
    int violations = 0;
    double margin = 1e300; // smallest distance from either bound, in slack units
    for (int t = 0; t < 1000; ++t) {
        const std::int64_t n = 1 + std::int64_t(s.next_u64() % 50);
        const std::int64_t m = 1 + std::int64_t(s.next_u64() % 50);
        const double beta = 0.05 + 2.45 * s.next_unit();
        env::EnvField f({kinds[t % 4], rng::replicate_seed(3, std::uint64_t(t))},
                        {n + 1, m + 1});
        const double bt = beta * lpp::passage_time(f, n, m);
        const double logz = polymer::log_partition(f, n, m, beta, true).log_value;
        const double logc = lpp::log_path_count(n, m);
        const double slack = 1e-9 * std::max({1.0, std::abs(bt), logc});
        if (!(logz <= bt + slack && logz >= bt - logc - slack)) ++violations;
        margin = std::min({margin, (bt + slack - logz) / slack, (logz - (bt - logc - slack)) / slack});
    }
    Outcome o;
    o.pass = violations == 0;
    o.detail = "violations " + std::to_string(violations) +
               "/1000 (n,m <= 50, beta in [0.05, 2.5], slack 1e-9, min margin " + num(margin, 3) +
               " slacks)";
    return o;
}

// ---- 4: sweeps against exhaustive path enumeration ----------------------
double brute_logz(const env::EnvField& f, const std::vector<std::int64_t>& end, double beta) {
    LogSumAcc acc;
    std::vector<std::int64_t> pos(end.size(), 0);
    auto rec = [&](auto&& self, double h) -> void {
        if (pos == end) {
            acc.add(beta * h);
            return;
        }
        for (std::size_t k = 0; k < end.size(); ++k)
            if (pos[k] < end[k]) {
                ++pos[k];
                self(self, h + f.at(pos));
                --pos[k];
            }
    };
    rec(rec, 0.0); // origin carries no energy
    return acc.value();
}

Outcome c04() {
    rng::Stream s(4);
    const env::DistKind kinds[4] = {env::DistKind::gaussian, env::DistKind::rademacher,
                                    env::DistKind::centered_exponential,
                                    env::DistKind::centered_uniform};
    int bad = 0;
    double worst_rel = 0.0;
    for (int t = 0; t < 200; ++t) {
        const env::DistKind kind = kinds[t % 4];
        const std::uint64_t seed = rng::replicate_seed(4, std::uint64_t(t));
        const double beta = 0.3 + s.next_unit();
        { // planar pair: passage_time and log_partition
            const std::int64_t n = std::int64_t(s.next_u64() % 8);
            const std::int64_t m = std::int64_t(s.next_u64() % 8);
            env::EnvField f({kind, seed}, {n + 1, m + 1});
            if (lpp::passage_time(f, n, m) != lpp::passage_time_bruteforce(f, {n, m})) ++bad;
            const double raw = polymer::log_partition(f, n, m, beta, false).log_value;
            const double ref = brute_logz(f, {n, m}, beta);
            const double rel = std::abs(raw - ref) / std::max(1.0, std::abs(ref));
            worst_rel = std::max(worst_rel, rel);
            if (rel > 1e-10) ++bad;
        }
        { // three-dimensional pair: passage_time_d and log_partition_d
            std::vector<std::int64_t> end{std::int64_t(s.next_u64() % 4),
                                          std::int64_t(s.next_u64() % 4),
                                          std::int64_t(s.next_u64() % 4)};
            std::vector<std::int64_t> shape{end[0] + 1, end[1] + 1, end[2] + 1};
            env::EnvField f({kind, seed ^ 1}, shape);
            if (lpp::passage_time_d(f, end) != lpp::passage_time_bruteforce(f, end)) ++bad;
            const double raw = polymer::log_partition_d(f, end, beta, false).log_value;
            const double ref = brute_logz(f, end, beta);
            const double rel = std::abs(raw - ref) / std::max(1.0, std::abs(ref));
            worst_rel = std::max(worst_rel, rel);
            if (rel > 1e-10) ++bad;
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = "mismatches " + std::to_string(bad) +
               "/200 instances x 4 ops (max-plus exact, log-sum worst rel err " +
               num(worst_rel, 2) + " vs 1e-10)";
    return o;
}

// ---- 5: continuum polymer free energy against the digamma closed form ---
Outcome c05() {
    const McReport r = experiments::run_experiment(experiments::default_config("brownian_free_energy"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "log Z/N = " + num(dval(r, "mean_free_energy")) + " vs exact " +
               num(r.targets[0].second) + ", rel err " + num(dval(r, "rel_err"), 3) +
               " <= 0.10 (N=150, dt=0.02, 20 reps)";
    return o;
}

// ---- 6: vanishing-temperature strip free energy, with universality ------
Outcome c06() {
    const McReport r = experiments::run_experiment(experiments::default_config("mo_regime"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "estimate " + num(dval(r, "mean_primary")) + " (rel err " +
               num(dval(r, "rel_err"), 3) + " <= 0.10), gaussian vs rademacher gap " +
               num(dval(r, "universality_gap"), 3) + " <= 0.05 (N=1e5, a=0.5)";
    return o;
}

// ---- 7: Brownian last passage vs GUE top eigenvalue ---------------------
Outcome c07() {
    const McReport r = experiments::run_experiment(experiments::default_config("gue_link"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "KS " + num(dval(r, "ks"), 3) + " < 0.08 at 1000+1000 (50 lines, 2^20 steps; means " +
               num(dval(r, "mean_grid"), 4) + " vs " + num(dval(r, "mean_gue"), 4) + ")";
    return o;
}

// ---- 8: GUE edge fluctuations against the tabulated law -----------------
Outcome c08() {
    const std::int64_t n = 1000;
    rng::Stream s(rng::replicate_seed(0, 8));
    std::vector<double> xs(2000);
    const double center = 2.0 * std::sqrt(double(n));
    const double scale = std::pow(double(n), 1.0 / 6.0);
    for (double& x : xs) x = (rmt::sample_gue_top(s, n) - center) * scale;
    const double ks = stats::ks_one_sample(xs, [](double t) { return rmt::tw_cdf(t); });
    Outcome o;
    o.pass = ks < 0.05;
    o.detail = "KS " + num(ks, 3) + " < 0.05 (n=1000, 2000 samples, rescale n^(1/6)(l-2 sqrt n))";
    return o;
}

// ---- 9: cubic left tail and 3/2-power right tail of the edge law --------
Outcome c09() {
    const auto& t = rmt::TwTable::standard();
    const double left = -t.log_cdf(-8.0) / 512.0;
    const double right = -t.log_upper_tail(4.0) / 8.0;
    const bool left_ok = left >= 0.85 / 12.0 && left <= 1.3 / 12.0;
    const bool right_ok = right >= 0.8 * (4.0 / 3.0) && right <= 1.2 * (4.0 / 3.0);
    Outcome o;
    o.pass = left_ok && right_ok;
    o.detail = "-log F(-8)/8^3 = " + num(left, 4) + " need [0.0708, 0.1083]; -log(1-F(4))/4^1.5 = " +
               num(right, 4) + " need [1.067, 1.600]";
    return o;
}

// ---- 10: strip passage-time fluctuations follow the edge law ------------
Outcome c10(bool ci) {
    experiments::ExperimentConfig cfg = experiments::default_config("tw_discrete");
    if (ci) {
        cfg.n_values = {10000};
        cfg.tolerances["ks_max"] = 0.15;
    }
    const McReport r = experiments::run_experiment(cfg);
    Outcome o;
    o.pass = r.pass;
    o.detail = "KS " + num(dval(r, "ks"), 3) + " < " + num(cfg.tolerances.at("ks_max"), 2) +
               " (N=" + std::to_string(cfg.n_values[0]) + ", a=0.3, 500 reps" +
               (ci ? ", reduced ci size)" : ")");
    return o;
}

// ---- 11: diffusive scaling of Brownian last passage ----------------------
Outcome c11() {
    const McReport r = experiments::run_experiment(experiments::default_config("scaling_identity"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "KS " + num(dval(r, "ks"), 3) +
               " < 0.06 between sqrt(n) D[0,1] and D[0,n] (n=25, 10 lines, 2000 reps)";
    return o;
}

// ---- 12: drifted free energy limit, two site laws ------------------------
Outcome c12() {
    const McReport r = experiments::run_experiment(experiments::default_config("drift_free_energy"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "log Z/(N^0.625): gaussian " + num(dval(r, "mean_primary")) +
               ", centered_exponential " + num(dval(r, "mean_secondary")) +
               ", need within 0.10 of 1 (N=1e5, a=0.25)";
    return o;
}

// ---- 13: growth order of the drifted second moment -----------------------
Outcome c13() {
    const McReport r = experiments::run_experiment(experiments::default_config("drift_fluctuations"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "slope of log m2 vs log N: " + num(dval(r, "slope")) +
               ", need 0.9167 +- 0.25 (N=2^12..2^17, 50 reps; bootstrap [" +
               num(dval(r, "slope_lo"), 3) + ", " + num(dval(r, "slope_hi"), 3) + "])";
    return o;
}

// ---- 14: closed-form maximizer of the tilted variational problem ---------
Outcome c14() {
    const std::int64_t n = 100000000;
    const ScalingRegime regime{0.25, 1.0, 1.0};
    const auto p = drift::laplace_predictor(n, regime);
    const double u_norm = p.u_star * std::pow(double(n), 1.0 - regime.a);
    const double v_norm = p.value / std::pow(double(n), (1.0 + regime.a) / 2.0);
    Outcome o;
    o.pass = std::abs(u_norm - 1.0) <= 0.02 && std::abs(v_norm - 1.0) <= 0.02;
    o.detail = "u* N^0.75 = " + num(u_norm, 6) + ", value/N^0.625 = " + num(v_norm, 6) +
               ", both need within 0.02 of 1 (N=1e8)";
    return o;
}

// ---- 15: deviation frequencies of the drifted value ----------------------
Outcome c15() {
    const McReport r = experiments::run_experiment(experiments::default_config("deviation_tails"));
    Outcome o;
    o.pass = r.pass;
    o.detail = std::string("monotone in eps: ") + (verdict(r, "monotone_slack") ? "yes" : "no") +
               "; freq(0.2)/freq(0.1) = " + num(dval(r, "halving_ratio"), 3) +
               " need <= 0.5 (N=1e4, 1e4 reps)";
    return o;
}

// ---- 16: coupling gap grows at most logarithmically -----------------------
Outcome c16() {
    const McReport r = experiments::run_experiment(experiments::default_config("coupling_gap"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "median sup-gap ratio 2^16/2^10 = " + num(dval(r, "median_ratio"), 3) +
               " <= 3.2 over 200 seeds; gaussian gap " + num(dval(r, "gaussian_max_gap"), 2) +
               " == 0";
    return o;
}

// ---- 17: concentration tightens with N at critical temperature -----------
Outcome c17() {
    const McReport r = experiments::run_experiment(experiments::default_config("concentration_decay"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "sd of log Z/N^a: " + num(dval(r, "sd_n1000"), 3) + " > " +
               num(dval(r, "sd_n10000"), 3) + " > " + num(dval(r, "sd_n100000"), 3) +
               " (strictly decreasing, 50 reps each)";
    return o;
}

// ---- 18: free energy is continuous down to the boundary ray ---------------
Outcome c18() {
    const McReport r = experiments::run_experiment(experiments::default_config("boundary_continuity"));
    Outcome o;
    o.pass = r.pass;
    o.detail = "|psi(h)-psi(0)| along h=0.2,0.1,0.05,0.02: " + num(dval(r, "gap_h_0.20"), 3) +
               " > " + num(dval(r, "gap_h_0.10"), 3) + " > " + num(dval(r, "gap_h_0.05"), 3) +
               " > " + num(dval(r, "gap_h_0.02"), 3) + "; count vs phi rel err " +
               num(dval(r, "phi_rel_err_max"), 4) + " <= 0.01 (N=2e4)";
    return o;
}

void print_info_lines() {
    std::puts("[INFO] 19 checked in mean or in probability at fixed N only; almost-sure "
              "convergence is outside desk scale");
    std::puts("[INFO] 19 coupling is asserted through the median sup-gap growth ratio; sharp "
              "constants of the log-gap bound are not reproduced");
    std::puts("[INFO] 19 the drifted model's fluctuation law is not known; only the N^(1-a/3) "
              "growth order is asserted (criterion 13)");
    std::puts("[INFO] 19 no closed form exists for the limit with two transverse widths; "
              "mo_regime_d checks stabilization across N only");
}

} // namespace

int main(int argc, char** argv) {
    bool ci = false;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--ci") {
            ci = true;
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: acceptance [--ci] [--only k[,k,...]]\n");
            return 2;
        }
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> gate{
        {1, "strip_passage_constant", c01},
        {2, "near_axis_constant", c02},
        {3, "sandwich_inequality", c03},
        {4, "bruteforce_equivalence", c04},
        {5, "brownian_free_energy", c05},
        {6, "mo_regime_limit", c06},
        {7, "gue_link", c07},
        {8, "tw_convergence", c08},
        {9, "tw_tails", c09},
        {10, "tw_discrete_fluctuations", [&] { return c10(ci); }},
        {11, "scaling_identity", c11},
        {12, "drift_free_energy", c12},
        {13, "drift_fluctuation_order", c13},
        {14, "laplace_predictor", c14},
        {15, "deviation_tails", c15},
        {16, "coupling_growth", c16},
        {17, "concentration_decay", c17},
        {18, "boundary_continuity", c18},
    };

    int ran = 0, failed = 0;
    for (const auto& c : gate) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %02d %-26s %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        ++ran;
        failed += o.pass ? 0 : 1;
    }
    if (only.empty() || only.count(19)) print_info_lines();
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
