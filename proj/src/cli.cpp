#include "polylab/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "polylab/brownian.hpp"
#include "polylab/coupling.hpp"
#include "polylab/drift.hpp"
#include "polylab/env.hpp"
#include "polylab/errors.hpp"
#include "polylab/experiments.hpp"
#include "polylab/lpp.hpp"
#include "polylab/polymer.hpp"
#include "polylab/rmt.hpp"
#include "polylab/rng.hpp"
#include "polylab/scaling.hpp"

namespace polylab::cli {
namespace {

using nlohmann::ordered_json;

// Uniform envelope for single computations; serialized layout pinned by
// schemas/scalar.schema.json.
struct ScalarResult {
    std::string op;
    ordered_json params = ordered_json::object();
    std::optional<double> value;
    ordered_json derived = ordered_json::object();
    std::vector<double> samples;
};

std::string scalar_json(const ScalarResult& r) {
    ordered_json j;
    j["schema_version"] = "1";
    j["op"] = r.op;
    j["params"] = r.params;
    if (r.value) j["value"] = *r.value;
    if (!r.derived.empty()) j["derived"] = r.derived;
    if (!r.samples.empty()) j["samples"] = r.samples;
    return j.dump(2) + "\n";
}

std::string csv_cell(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    const std::string text = v.dump();
    if (text.find(',') == std::string::npos) return text;
    return '"' + text + '"';
}

std::string scalar_csv(const ScalarResult& r) {
    std::ostringstream os;
    os.precision(17);
    if (!r.samples.empty()) {
        os << "rep,value\n";
        for (std::size_t i = 0; i < r.samples.size(); ++i) os << i << ',' << r.samples[i] << '\n';
        return os.str();
    }
    std::ostringstream head, row;
    row.precision(17);
    head << "op";
    row << r.op;
    for (const auto& [key, v] : r.params.items()) {
        head << ',' << key;
        row << ',' << csv_cell(v);
    }
    if (r.value) {
        head << ",value";
        row << ',' << *r.value;
    }
    for (const auto& [key, v] : r.derived.items()) {
        head << ',' << key;
        row << ',' << csv_cell(v);
    }
    os << head.str() << '\n' << row.str() << '\n';
    return os.str();
}

void write_output(const std::string& path, const std::string& body, std::ostream& out) {
    if (path == "-") {
        out << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw refusal_error("cannot open --out path: " + path);
    f << body;
    f.flush();
    if (!f) throw refusal_error("short write to --out path: " + path);
}

void guard_budget(const std::string& what, double seconds, double budget) {
    if (seconds > budget) {
        std::ostringstream os;
        os << what << " projects to about " << seconds << " s against a budget of " << budget
           << " s; shrink the size or raise --budget-seconds";
        throw refusal_error(os.str());
    }
}

// Flags shared by every subcommand that samples or writes a document.
struct Common {
    std::uint64_t seed = 0;
    std::string dist = "gaussian";
    std::string out_path = "-";
    std::string format = "json";
    double budget = 900.0;
};

const std::vector<std::string>& kind_names() {
    static const std::vector<std::string> names{"gaussian", "rademacher", "centered_exponential",
                                                "centered_uniform"};
    return names;
}

void add_common(CLI::App* cmd, Common& c, bool with_dist) {
    cmd->add_option("--seed", c.seed, "rng seed")->capture_default_str();
    if (with_dist)
        cmd->add_option("--dist", c.dist, "site law")
            ->check(CLI::IsMember(kind_names()))
            ->capture_default_str();
    cmd->add_option("--out", c.out_path, "output path, - for stdout")->capture_default_str();
    cmd->add_option("--format", c.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--budget-seconds", c.budget, "refuse work projected beyond this")
        ->capture_default_str();
}

// Calibrated on the reference build: lattice site sampling plus the
// max-plus/log-sum-exp cell work lands near 30 ns, the streamed Brownian
// recursion near 15 ns per line-step, a GUE top eigenvalue near 0.4 us per
// unit of matrix size, the coupling near 250 ns per step.
constexpr double kLatticeCellSeconds = 30e-9;
constexpr double kBrownianCellSeconds = 15e-9;
constexpr double kGuePerSizeSeconds = 0.4e-6;
constexpr double kCoupleStepSeconds = 250e-9;

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"directed polymer, last passage and random matrix numerics"};
    app.require_subcommand(1);
    int rc = 0;

    auto emit = [&out](const Common& c, const ScalarResult& r) {
        write_output(c.out_path, c.format == "csv" ? scalar_csv(r) : scalar_json(r), out);
    };

    // ---- lpp ----------------------------------------------------------
    struct {
        Common c;
        std::int64_t n = 10;
        std::int64_t m = -1;
        std::vector<std::int64_t> end;
        bool brute = false;
    } lp;
    auto* lpp_cmd = app.add_subcommand("lpp", "last passage value over a fresh environment");
    lpp_cmd->add_option("--n", lp.n, "endpoint row")->capture_default_str();
    lpp_cmd->add_option("--m", lp.m, "endpoint column (default: --n)");
    lpp_cmd->add_option("--end", lp.end, "d-dimensional endpoint, comma separated")
        ->delimiter(',');
    lpp_cmd->add_flag("--brute", lp.brute, "exhaustive path enumeration instead of the sweep");
    add_common(lpp_cmd, lp.c, true);
    lpp_cmd->callback([&] {
        const env::DistSpec spec{env::parse_kind(lp.c.dist), lp.c.seed};
        ScalarResult r;
        if (!lp.end.empty()) {
            if (lp.end.size() < 2)
                throw std::invalid_argument("lpp: --end needs at least two coordinates");
            std::vector<std::int64_t> shape;
            double cells = 1.0;
            for (std::int64_t e : lp.end) {
                if (e < 0) throw std::invalid_argument("lpp: --end coordinates must be >= 0");
                shape.push_back(e + 1);
                cells *= static_cast<double>(e + 1);
            }
            guard_budget("lpp", kLatticeCellSeconds * cells * double(lp.end.size()), lp.c.budget);
            env::EnvField field(spec, shape);
            r.op = "passage_time_d";
            r.params["end"] = lp.end;
            r.value = lp.brute ? lpp::passage_time_bruteforce(field, lp.end)
                               : lpp::passage_time_d(field, lp.end);
            if (lp.brute) r.op = "passage_time_bruteforce";
        } else {
            const std::int64_t m = lp.m < 0 ? lp.n : lp.m;
            if (lp.n < 0 || m < 0) throw std::invalid_argument("lpp: --n and --m must be >= 0");
            guard_budget("lpp",
                         kLatticeCellSeconds * double(lp.n + 1) * double(m + 1), lp.c.budget);
            env::EnvField field(spec, {lp.n + 1, m + 1});
            r.op = lp.brute ? "passage_time_bruteforce" : "passage_time";
            r.params["n"] = lp.n;
            r.params["m"] = m;
            r.value = lp.brute ? lpp::passage_time_bruteforce(field, {lp.n, m})
                               : lpp::passage_time(field, lp.n, m);
        }
        r.params["dist"] = lp.c.dist;
        r.params["seed"] = lp.c.seed;
        emit(lp.c, r);
    });

    // ---- polymer ------------------------------------------------------
    struct {
        Common c;
        std::int64_t n = 10;
        std::int64_t m = -1;
        std::vector<std::int64_t> end;
        double beta = 1.0;
        bool raw = false;
    } po;
    auto* poly_cmd = app.add_subcommand("polymer", "log partition function of the lattice polymer");
    poly_cmd->add_option("--n", po.n, "endpoint row")->capture_default_str();
    poly_cmd->add_option("--m", po.m, "endpoint column (default: --n)");
    poly_cmd->add_option("--end", po.end, "d-dimensional endpoint, comma separated")
        ->delimiter(',');
    poly_cmd->add_option("--beta", po.beta, "inverse temperature")->capture_default_str();
    poly_cmd->add_flag("--raw", po.raw, "sum over paths instead of the path average");
    add_common(poly_cmd, po.c, true);
    poly_cmd->callback([&] {
        const env::DistSpec spec{env::parse_kind(po.c.dist), po.c.seed};
        ScalarResult r;
        const bool normalized = !po.raw;
        if (!po.end.empty()) {
            if (po.end.size() < 2)
                throw std::invalid_argument("polymer: --end needs at least two coordinates");
            std::vector<std::int64_t> shape;
            double cells = 1.0;
            for (std::int64_t e : po.end) {
                if (e < 0) throw std::invalid_argument("polymer: --end coordinates must be >= 0");
                shape.push_back(e + 1);
                cells *= static_cast<double>(e + 1);
            }
            guard_budget("polymer", kLatticeCellSeconds * cells * double(po.end.size()),
                         po.c.budget);
            env::EnvField field(spec, shape);
            r.op = "log_partition_d";
            r.params["end"] = po.end;
            r.value = polymer::log_partition_d(field, po.end, po.beta, normalized).log_value;
        } else {
            const std::int64_t m = po.m < 0 ? po.n : po.m;
            if (po.n < 0 || m < 0)
                throw std::invalid_argument("polymer: --n and --m must be >= 0");
            guard_budget("polymer", kLatticeCellSeconds * double(po.n + 1) * double(m + 1),
                         po.c.budget);
            env::EnvField field(spec, {po.n + 1, m + 1});
            r.op = "log_partition";
            r.params["n"] = po.n;
            r.params["m"] = m;
            r.value = polymer::log_partition(field, po.n, m, po.beta, normalized).log_value;
        }
        r.params["beta"] = po.beta;
        r.params["normalized"] = normalized;
        r.params["dist"] = po.c.dist;
        r.params["seed"] = po.c.seed;
        emit(po.c, r);
    });

    // ---- brownian -----------------------------------------------------
    struct {
        Common c;
        std::int64_t lines = 2;
        std::int64_t steps = 0;
        double horizon = 1.0;
        double beta = 1.0;
        bool logz = false;
        bool normalized = false;
    } br;
    auto* br_cmd = app.add_subcommand("brownian", "semi-discrete last passage or polymer value");
    br_cmd->add_option("--lines", br.lines, "number of Brownian lines")->capture_default_str();
    br_cmd->add_option("--steps", br.steps, "grid steps (default: 50 per line)");
    br_cmd->add_option("--horizon", br.horizon, "time horizon")->capture_default_str();
    br_cmd->add_option("--beta", br.beta, "inverse temperature (with --logz)")
        ->capture_default_str();
    br_cmd->add_flag("--logz", br.logz, "log partition function instead of last passage");
    br_cmd->add_flag("--normalized", br.normalized, "divide Z by the simplex volume");
    add_common(br_cmd, br.c, false);
    br_cmd->callback([&] {
        if (br.lines < 1) throw std::invalid_argument("brownian: --lines must be >= 1");
        if (!(br.horizon > 0.0)) throw std::invalid_argument("brownian: --horizon must be > 0");
        const std::int64_t steps = br.steps > 0 ? br.steps : 50 * br.lines;
        guard_budget("brownian", kBrownianCellSeconds * double(br.lines) * double(steps),
                     br.c.budget);
        ScalarResult r;
        r.op = br.logz ? "log_partition_brownian" : "last_passage_brownian";
        r.params["lines"] = br.lines;
        r.params["steps"] = steps;
        r.params["horizon"] = br.horizon;
        if (br.logz) {
            r.params["beta"] = br.beta;
            r.params["normalized"] = br.normalized;
        }
        r.params["seed"] = br.c.seed;
        r.value = br.logz
                      ? brownian::log_partition_brownian(br.c.seed, br.horizon, br.lines, steps,
                                                         br.beta, br.normalized)
                      : brownian::last_passage_brownian(br.c.seed, br.horizon, br.lines, steps);
        emit(br.c, r);
    });

    // ---- gue ----------------------------------------------------------
    struct {
        Common c;
        std::int64_t n = 50;
        int reps = 1;
    } gu;
    auto* gue_cmd = app.add_subcommand("gue", "top eigenvalue samples of the tridiagonal model");
    gue_cmd->add_option("--n", gu.n, "matrix size")->capture_default_str();
    gue_cmd->add_option("--reps", gu.reps, "number of samples")->capture_default_str();
    add_common(gue_cmd, gu.c, false);
    gue_cmd->callback([&] {
        if (gu.n < 1) throw std::invalid_argument("gue: --n must be >= 1");
        if (gu.reps < 1) throw std::invalid_argument("gue: --reps must be >= 1");
        guard_budget("gue", kGuePerSizeSeconds * double(gu.n) * double(gu.reps), gu.c.budget);
        ScalarResult r;
        r.op = "gue_top";
        r.params["n"] = gu.n;
        r.params["reps"] = gu.reps;
        r.params["seed"] = gu.c.seed;
        rng::Stream stream(gu.c.seed);
        r.samples.resize(static_cast<std::size_t>(gu.reps));
        for (double& x : r.samples) x = rmt::sample_gue_top(stream, gu.n);
        emit(gu.c, r);
    });

    // ---- tw -----------------------------------------------------------
    auto* tw_cmd = app.add_subcommand("tw", "top-eigenvalue fluctuation law");
    tw_cmd->require_subcommand(1);
    struct {
        double smin = -10.0;
        double smax = 6.0;
        int points = 161;
        double tol = 1e-17;
        std::string out_path = "-";
    } twt;
    auto* twt_cmd = tw_cmd->add_subcommand("table", "tabulate the cdf as two-column CSV");
    twt_cmd->add_option("--smin", twt.smin, "left end of the grid")->capture_default_str();
    twt_cmd->add_option("--smax", twt.smax, "right end of the grid (<= 8)")
        ->capture_default_str();
    twt_cmd->add_option("--points", twt.points, "grid size")
        ->check(CLI::Range(2, 1000001))
        ->capture_default_str();
    twt_cmd->add_option("--tol", twt.tol, "local error target of the integrator")
        ->check(CLI::Range(1e-18, 1e-2))
        ->capture_default_str();
    twt_cmd->add_option("--out", twt.out_path, "output path, - for stdout")
        ->capture_default_str();
    twt_cmd->callback([&] {
        const auto table = rmt::TwTable::build(twt.smin, twt.smax, twt.tol);
        std::ostringstream os;
        os.precision(17);
        os << "s,F\n";
        for (int k = 0; k < twt.points; ++k) {
            const double s =
                twt.smin + (twt.smax - twt.smin) * double(k) / double(twt.points - 1);
            os << s << ',' << table->cdf(s) << '\n';
        }
        write_output(twt.out_path, os.str(), out);
    });
    struct {
        Common c;
        double s = 0.0;
    } twe;
    auto* twe_cmd = tw_cmd->add_subcommand("eval", "cdf, density and log tails at one point");
    twe_cmd->add_option("--s", twe.s, "evaluation point")->required();
    add_common(twe_cmd, twe.c, false);
    twe_cmd->callback([&] {
        const rmt::TwTable& table = rmt::TwTable::standard();
        ScalarResult r;
        r.op = "tw_eval";
        r.params["s"] = twe.s;
        r.value = table.cdf(twe.s);
        r.derived["pdf"] = table.pdf(twe.s);
        r.derived["log_cdf"] = table.log_cdf(twe.s);
        r.derived["log_upper_tail"] = table.log_upper_tail(twe.s);
        emit(twe.c, r);
    });

    // ---- couple -------------------------------------------------------
    struct {
        Common c;
        int levels = 10;
    } cp;
    auto* cp_cmd = app.add_subcommand("couple", "dyadic walk/Gaussian coupling and its sup gap");
    cp_cmd->add_option("--levels", cp.levels, "dyadic levels, horizon 2^levels")
        ->check(CLI::Range(1, 22))
        ->capture_default_str();
    add_common(cp_cmd, cp.c, true);
    cp_cmd->callback([&] {
        const double n = std::ldexp(1.0, cp.levels);
        guard_budget("couple", kCoupleStepSeconds * n, cp.c.budget);
        const auto paths =
            coupling::dyadic_coupling(env::parse_kind(cp.c.dist), cp.levels, cp.c.seed);
        ScalarResult r;
        r.op = "dyadic_coupling";
        r.params["levels"] = cp.levels;
        r.params["n"] = paths.n;
        r.params["dist"] = cp.c.dist;
        r.params["seed"] = cp.c.seed;
        r.value = coupling::sup_gap(paths);
        r.derived["endpoint_walk"] = paths.walk.back();
        r.derived["endpoint_brownian"] = paths.brownian.back();
        emit(cp.c, r);
    });

    // ---- drift --------------------------------------------------------
    struct {
        Common c;
        std::int64_t n = 10000;
        double a = 0.25;
        double beta = 1.0;
        double gamma = 1.0;
        bool predict_only = false;
    } dr;
    auto* dr_cmd = app.add_subcommand("drift", "tilted anti-diagonal partition function");
    dr_cmd->add_option("--n", dr.n, "anti-diagonal index")->capture_default_str();
    dr_cmd->add_option("--a", dr.a, "transverse exponent, 0 < a < 1")->capture_default_str();
    dr_cmd->add_option("--beta", dr.beta, "inverse temperature")->capture_default_str();
    dr_cmd->add_option("--gamma", dr.gamma, "tilt strength")->capture_default_str();
    dr_cmd->add_flag("--laplace", dr.predict_only, "print the Laplace prediction only");
    add_common(dr_cmd, dr.c, true);
    dr_cmd->callback([&] {
        const ScalingRegime regime{dr.a, dr.beta, dr.gamma};
        regime.validate();
        if (dr.n < 2) throw std::invalid_argument("drift: --n must be >= 2");
        const double scale = std::pow(double(dr.n), (1.0 + dr.a) / 2.0);
        ScalarResult r;
        r.params["n"] = dr.n;
        r.params["a"] = dr.a;
        r.params["beta"] = dr.beta;
        r.params["gamma"] = dr.gamma;
        if (dr.predict_only) {
            const auto pred = drift::laplace_predictor(dr.n, regime);
            r.op = "laplace_predictor";
            r.value = pred.value;
            r.derived["u_star"] = pred.u_star;
            r.derived["normalized"] = pred.value / scale;
        } else {
            const std::int64_t width = drift::truncation_width(dr.n, regime);
            guard_budget("drift", kLatticeCellSeconds * double(dr.n) * double(width),
                         dr.c.budget);
            const env::DistSpec spec{env::parse_kind(dr.c.dist), dr.c.seed};
            const auto res = drift::drifted_log_partition(spec, dr.n, regime);
            r.op = "drifted_log_partition";
            r.params["dist"] = dr.c.dist;
            r.params["seed"] = dr.c.seed;
            r.value = res.log_z.log_value;
            r.derived["normalized"] = res.log_z.log_value / scale;
            r.derived["argmax_n"] = double(res.argmax_n);
            r.derived["predictor"] = res.predictor;
        }
        emit(dr.c, r);
    });

    // ---- experiment ---------------------------------------------------
    struct {
        std::string name;
        std::vector<std::int64_t> ns;
        std::optional<int> reps;
        std::optional<double> a, beta, gamma, budget;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> dist;
        std::string out_path = "-";
        std::string format = "json";
    } ex;
    auto* ex_cmd = app.add_subcommand("experiment", "run one catalog study and write its report");
    ex_cmd->add_option("name", ex.name, "study name, see `catalog`")->required();
    ex_cmd->add_option("--n", ex.ns, "override sizes, comma separated")->delimiter(',');
    ex_cmd->add_option("--reps", ex.reps, "override replicate count");
    ex_cmd->add_option("--a", ex.a, "override the transverse exponent");
    ex_cmd->add_option("--beta", ex.beta, "override the inverse temperature");
    ex_cmd->add_option("--gamma", ex.gamma, "override the tilt strength");
    ex_cmd->add_option("--seed", ex.seed, "override the master seed");
    ex_cmd->add_option("--dist", ex.dist, "override the site law")
        ->check(CLI::IsMember(kind_names()));
    ex_cmd->add_option("--budget-seconds", ex.budget, "override the admission budget");
    ex_cmd->add_option("--out", ex.out_path, "output path, - for stdout")
        ->capture_default_str();
    ex_cmd->add_option("--format", ex.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    ex_cmd->callback([&] {
        experiments::ExperimentConfig config = experiments::default_config(ex.name);
        if (!ex.ns.empty()) config.n_values = ex.ns;
        if (ex.reps) config.reps = *ex.reps;
        if (ex.a) config.regime.a = *ex.a;
        if (ex.beta) config.regime.beta = *ex.beta;
        if (ex.gamma) config.regime.gamma = *ex.gamma;
        if (ex.dist) config.dist.kind = env::parse_kind(*ex.dist);
        if (ex.seed) {
            config.seed = *ex.seed;
            config.dist.seed = *ex.seed;
        }
        if (ex.budget) config.budget_seconds = *ex.budget;
        const experiments::McReport report = experiments::run_experiment(config);
        write_output(ex.out_path,
                     ex.format == "csv" ? experiments::to_csv(report)
                                        : experiments::to_json(report) + "\n",
                     out);
        if (!report.pass) rc = 1;
    });

    // ---- catalog ------------------------------------------------------
    bool long_form = false;
    auto* cat_cmd = app.add_subcommand("catalog", "list the built-in studies");
    cat_cmd->add_flag("--long", long_form, "include each study's sampling summary");
    cat_cmd->callback([&] {
        for (const auto& entry : experiments::catalog()) {
            out << std::left << std::setw(22) << entry.name << ' ' << entry.anchor << '\n';
            if (long_form) out << std::string(23, ' ') << entry.summary << '\n';
        }
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("polylab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    } catch (const refusal_error& e) {
        err << "refused: " << e.what() << '\n';
        return 3;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return rc;
}

} // namespace polylab::cli
