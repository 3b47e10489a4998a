#ifndef MINEGAME_CLI_HPP
#define MINEGAME_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minegame/io.hpp"

namespace minegame {
namespace cli_detail {

// Log verbosity is controlled by a single environment variable.  0 (default)
// keeps stderr quiet apart from errors and verification lines; >= 1 adds
// progress notes and timing.
inline int log_level() {
    static const int level = [] {
        const char* v = std::getenv("MINEGAME_LOG");
        return (v && *v) ? std::atoi(v) : 0;
    }();
    return level;
}

inline void info(std::ostream& err, const std::string& msg) {
    if (log_level() >= 1) err << "info: " << msg << "\n";
}

// Shortest decimal string that parses back to the same double; used for
// manifest command strings so they stay readable yet exact.
inline std::string fmt_shortest(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return std::string(buf);
}

inline void write_output(const std::string& text, const std::string& out_path, std::ostream& out,
                         std::ostream& err) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("failed while writing '" + out_path + "'");
    info(err, "wrote " + out_path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read policy file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// --------------------------------------------------------------------------
// Verification suites
// --------------------------------------------------------------------------

inline SuiteResult run_bounds_suite(double p, int d, double tol) {
    SuiteResult sr{"bounds", {}};
    GameParams gp{Model::immediate, p, d, 0};
    SolveReport rep = solve(gp);
    sr.checks = verify_lemma_bounds(rep, tol);

    LemmaCheck fc{"frontier gap identity", CheckStatus::pass, 0.0, ""};
    try {
        const double gap = check_frontier_condition(rep, tol);
        fc.margin = gap - (rep.g_star - p) / (1.0 - p);
    } catch (const std::runtime_error& e) {
        fc.status = CheckStatus::fail;
        fc.margin = NAN;
        fc.note = e.what();
    }
    sr.checks.push_back(fc);
    return sr;
}

inline SuiteResult run_sol_suite(double p, int range, double tol) {
    SuiteResult sr{"sol", {}};
    if (!(p < 0.5)) {
        sr.checks.push_back(
            {"sol recurrence", CheckStatus::skipped, NAN, "defined only for p < 1/2"});
        return sr;
    }
    GameParams gp{Model::immediate, p, range + 2, 0};
    SolveReport rep = solve(gp);
    SolCheck c = verify_sol_recurrence(rep, range, range, tol);
    LemmaCheck lc{"sol recurrence", CheckStatus::pass, NAN, ""};
    if (c.pass) {
        lc.note = "a,b in [0," + std::to_string(range) + "], " + std::to_string(c.states_checked) +
                  " states";
    } else {
        lc.status = CheckStatus::fail;
        lc.margin = c.margin;
        lc.note = c.detail + " at (" + std::to_string(c.first_violation.a) + "," +
                  std::to_string(c.first_violation.b) + "), " + std::to_string(c.violations) +
                  " violation(s)";
    }
    sr.checks.push_back(lc);
    return sr;
}

inline SuiteResult run_rinf_suite(double p_user) {
    constexpr double kTol = 1e-12;
    SuiteResult sr{"rinf", {}};
    std::vector<double> ps = {0.1, 0.2, 0.3, 0.4};
    bool user_covered = !(p_user > 0.0 && p_user < 0.5);
    for (double pv : ps) user_covered = user_covered || std::fabs(pv - p_user) < 1e-12;
    if (!user_covered && p_user <= 0.45) ps.push_back(p_user);

    for (double pv : ps) {
        double maxdiff = 0.0;
        for (int deficit = 0; deficit <= 20; ++deficit)
            maxdiff = std::max(maxdiff, std::fabs(r_infinity(pv, {1, deficit}) -
                                                  overtake_probability_chain(pv, deficit)));
        LemmaCheck c{"overtake closed form vs chain (p=" + fmt_shortest(pv) + ")",
                     maxdiff <= kTol ? CheckStatus::pass : CheckStatus::fail, maxdiff,
                     "max |difference| over deficits 0..20"};
        sr.checks.push_back(std::move(c));
    }
    if (!user_covered && p_user > 0.45)
        sr.checks.push_back({"overtake closed form vs chain (p=" + fmt_shortest(p_user) + ")",
                             CheckStatus::skipped, NAN,
                             "chain oracle is validated for p <= 0.45 only"});
    return sr;
}

inline void print_suite_lines(std::ostream& err, const SuiteResult& sr) {
    for (const auto& c : sr.checks) {
        const char* tag = c.status == CheckStatus::pass   ? "[PASS]"
                          : c.status == CheckStatus::fail ? "[FAIL]"
                                                          : "[SKIP]";
        err << tag << " " << sr.suite << ": " << c.name;
        if (c.status != CheckStatus::skipped && !std::isnan(c.margin))
            err << " (margin " << fmt_shortest(c.margin) << ")";
        if (!c.note.empty()) err << " -- " << c.note;
        err << "\n";
    }
}

// --------------------------------------------------------------------------
// Command handlers
// --------------------------------------------------------------------------

inline int do_solve(const std::string& model_s, double p, int d, int a_max, bool amax_given,
                    double tol, long max_iters, const std::string& format,
                    const std::string& out_path, std::ostream& out, std::ostream& err) {
    Model model = parse_model(model_s);
    if (model == Model::immediate && amax_given)
        throw std::invalid_argument("--a-max applies to the strategic model only");
    GameParams gp{model, p, d, a_max};
    validate_params(gp);

    std::ostringstream cmd;
    cmd << "solve --model " << model_s << " --p " << fmt_shortest(p) << " --d " << d;
    if (model == Model::strategic) cmd << " --a-max " << effective_a_max(gp);
    cmd << " --tol " << fmt_shortest(tol) << " --max-iters " << max_iters << " --format "
        << format;

    ojson params;
    params["model"] = model_s;
    params["p"] = p;
    params["d"] = d;
    if (model == Model::strategic) params["a_max"] = effective_a_max(gp);
    params["format"] = format;
    ojson tols;
    tols["tol"] = tol;
    tols["max_iters"] = max_iters;
    ojson manifest = make_manifest(cmd.str(), params, tols);

    std::string text;
    if (model == Model::immediate) {
        SolveReport rep = solve(gp, tol, max_iters);
        info(err, "g_star = " + fmt_shortest(rep.g_star) + " after " +
                      std::to_string(rep.iterations) + " sweeps (residual " +
                      fmt_shortest(rep.residual) + ")");
        text = format == "json" ? solve_report_to_json(rep, manifest).dump(2) + "\n"
                                : solve_report_to_csv(rep, manifest, rep.phi);
    } else {
        StrategicSolveReport rep = solve_strategic(gp, tol, max_iters);
        info(err, "g_star = " + fmt_shortest(rep.g_star) + " after " +
                      std::to_string(rep.iterations) + " sweeps (residual " +
                      fmt_shortest(rep.residual) + ", truncation sensitivity " +
                      fmt_shortest(rep.truncation_sensitivity) + ")");
        text = format == "json" ? solve_report_to_json(rep, manifest).dump(2) + "\n"
                                : solve_report_to_csv(rep, manifest, rep.psi);
    }
    write_output(text, out_path, out, err);
    return 0;
}

inline int do_threshold(const std::string& model_s, int d, double p_tol, double deviation_eps,
                        int a_max, bool amax_given, const std::string& format,
                        const std::string& out_path, std::ostream& out, std::ostream& err) {
    Model model = parse_model(model_s);
    if (model == Model::immediate && amax_given)
        throw std::invalid_argument("--a-max applies to the strategic model only");

    ThresholdResult r = find_threshold(model, d, p_tol, deviation_eps, 0.25, 0.50, a_max);
    info(err, "threshold = " + fmt_shortest(r.p_hat) + " in [" + fmt_shortest(r.bracket_lo) +
                  ", " + fmt_shortest(r.bracket_hi) + "]");

    std::ostringstream cmd;
    cmd << "threshold --model " << model_s << " --d " << d;
    if (model == Model::strategic) cmd << " --a-max " << r.a_max;
    cmd << " --p-tol " << fmt_shortest(p_tol) << " --deviation-eps " << fmt_shortest(deviation_eps)
        << " --format " << format;

    ojson params;
    params["model"] = model_s;
    params["d"] = d;
    if (model == Model::strategic) params["a_max"] = r.a_max;
    params["format"] = format;
    ojson tols;
    tols["p_tol"] = p_tol;
    tols["deviation_eps"] = deviation_eps;
    ojson manifest = make_manifest(cmd.str(), params, tols);

    std::string text = format == "json" ? threshold_to_json(r, manifest).dump(2) + "\n"
                                        : threshold_table_to_csv({r}, manifest);
    write_output(text, out_path, out, err);
    return 0;
}

inline int do_table(const std::string& model_s, const std::vector<int>& d_list, double p_tol,
                    double deviation_eps, const std::string& format, const std::string& out_path,
                    std::ostream& out, std::ostream& err) {
    Model model = parse_model(model_s);
    if (d_list.empty()) throw std::invalid_argument("--d-list must not be empty");

    std::vector<ThresholdResult> rows = reproduce_table(model, d_list, p_tol, deviation_eps);
    for (const auto& r : rows)
        info(err, "d = " + std::to_string(r.d) + ": threshold = " + fmt_shortest(r.p_hat));

    std::ostringstream dl;
    for (std::size_t i = 0; i < d_list.size(); ++i) dl << (i ? "," : "") << d_list[i];
    std::ostringstream cmd;
    cmd << "table --model " << model_s << " --d-list " << dl.str() << " --p-tol "
        << fmt_shortest(p_tol) << " --deviation-eps " << fmt_shortest(deviation_eps)
        << " --format " << format;

    ojson params;
    params["model"] = model_s;
    params["d_list"] = d_list;
    params["format"] = format;
    ojson tols;
    tols["p_tol"] = p_tol;
    tols["deviation_eps"] = deviation_eps;
    ojson manifest = make_manifest(cmd.str(), params, tols);

    std::string text = format == "json" ? threshold_table_to_json(rows, manifest).dump(2) + "\n"
                                        : threshold_table_to_csv(rows, manifest);
    write_output(text, out_path, out, err);
    return 0;
}

inline Policy resolve_policy(const std::string& spec, const GameParams& gp, double tol,
                             std::ostream& err) {
    if (spec == "frontier" || spec == "deviator-d3") return load_builtin(spec, gp);
    if (spec == "optimal") {
        info(err, "solving for the optimal policy");
        if (gp.model == Model::immediate) return solve(gp, tol).policy;
        return solve_strategic(gp, tol, 1000000, nullptr, false).policy;
    }
    Policy pol = policy_from_string(read_file(spec), gp.p);
    if (pol.params.model != gp.model || pol.params.d != gp.d ||
        (gp.model == Model::strategic && effective_a_max(pol.params) != effective_a_max(gp)))
        throw std::invalid_argument("policy file '" + spec +
                                    "' is inconsistent with the requested model parameters");
    return pol;
}

inline int do_simulate(const std::string& model_s, double p, int d, int a_max, bool amax_given,
                       long levels, int trials, std::uint64_t seed, const std::string& policy_s,
                       double tol, const std::string& plot_path, const std::string& out_path,
                       std::ostream& out, std::ostream& err) {
    Model model = parse_model(model_s);
    if (model == Model::immediate && amax_given)
        throw std::invalid_argument("--a-max applies to the strategic model only");
    GameParams gp{model, p, d, a_max};
    validate_params(gp);

    SimConfig cfg;
    cfg.policy = resolve_policy(policy_s, gp, tol, err);
    cfg.target_levels = levels;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.policy_label = policy_s;
    SimReport rep = simulate(cfg);
    info(err, "empirical gain = " + fmt_shortest(rep.empirical_gain) + " +/- " +
                  fmt_shortest(rep.std_error) + " over " + std::to_string(trials) + " trial(s)");

    std::ostringstream cmd;
    cmd << "simulate --model " << model_s << " --p " << fmt_shortest(p) << " --d " << d;
    if (model == Model::strategic) cmd << " --a-max " << effective_a_max(gp);
    cmd << " --policy " << policy_s << " --levels " << levels << " --trials " << trials
        << " --seed " << seed << " --tol " << fmt_shortest(tol);

    ojson params;
    params["model"] = model_s;
    params["p"] = p;
    params["d"] = d;
    if (model == Model::strategic) params["a_max"] = effective_a_max(gp);
    params["policy"] = policy_s;
    params["levels"] = levels;
    params["trials"] = trials;
    ojson tols;
    tols["solve_tol"] = tol;
    ojson manifest = make_manifest(cmd.str(), params, tols, seed);

    write_output(sim_report_to_json(rep, manifest).dump(2) + "\n", out_path, out, err);
    if (!plot_path.empty()) {
        std::ofstream f(plot_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open plot data file '" + plot_path + "'");
        f << sim_plot_data_csv(rep);
        info(err, "wrote " + plot_path);
    }
    return 0;
}

inline int do_verify(const std::string& suite_s, double p, int d, int range, double tol,
                     const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("p out of range: need 0 <= p < 1");
    if (d < 2) throw std::invalid_argument("d must be at least 2");
    if (range < 0) throw std::invalid_argument("--range must be nonnegative");

    std::vector<SuiteResult> suites;
    if (suite_s == "bounds" || suite_s == "all") suites.push_back(run_bounds_suite(p, d, tol));
    if (suite_s == "sol" || suite_s == "all") suites.push_back(run_sol_suite(p, range, tol));
    if (suite_s == "rinf" || suite_s == "all") suites.push_back(run_rinf_suite(p));

    bool all_pass = true;
    for (const auto& sr : suites) {
        print_suite_lines(err, sr);
        all_pass = all_pass && sr.passed();
    }

    std::ostringstream cmd;
    cmd << "verify --suite " << suite_s << " --p " << fmt_shortest(p) << " --d " << d
        << " --range " << range << " --tol " << fmt_shortest(tol);
    ojson params;
    params["suite"] = suite_s;
    params["p"] = p;
    params["d"] = d;
    params["range"] = range;
    ojson tols;
    tols["tol"] = tol;
    tols["rinf_tol"] = 1e-12;
    ojson manifest = make_manifest(cmd.str(), params, tols);

    write_output(verify_summary_to_json(suites, manifest).dump(2) + "\n", out_path, out, err);
    return all_pass ? 0 : 1;
}

}  // namespace cli_detail

// Entry point shared by the binary and the CLI tests.  args excludes the
// program name.  Returns the process exit code: 0 success, 1 numeric or
// verification failure, 2 usage error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;

    CLI::App app{"average-reward solver for two-miner release games"};
    app.name("minegame");
    app.require_subcommand(1);

    // solve
    auto* c_solve = app.add_subcommand("solve", "solve a model; emit gain, potential and policy");
    std::string so_model, so_format = "json", so_out;
    double so_p = 0.0, so_tol = 1e-12;
    int so_d = 0, so_amax = 0;
    long so_max_iters = 1000000;
    c_solve->add_option("--model", so_model, "immediate or strategic")
        ->required()
        ->check(CLI::IsMember({"immediate", "strategic"}));
    c_solve->add_option("--p", so_p, "miner 1 per-phase win probability")->required();
    c_solve->add_option("--d", so_d, "defender chain cap")->required();
    auto* so_amax_opt =
        c_solve->add_option("--a-max", so_amax, "attacker chain cap (strategic only)");
    c_solve->add_option("--tol", so_tol, "convergence tolerance");
    c_solve->add_option("--max-iters", so_max_iters, "sweep limit");
    c_solve->add_option("--format", so_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    c_solve->add_option("--out", so_out, "write the report to a file instead of stdout");

    // threshold
    auto* c_thr = app.add_subcommand("threshold", "locate the profitability threshold in p");
    std::string th_model, th_format = "json", th_out;
    double th_ptol = 1e-4, th_dev = 1e-7;
    int th_d = 0, th_amax = 0;
    c_thr->add_option("--model", th_model, "immediate or strategic")
        ->required()
        ->check(CLI::IsMember({"immediate", "strategic"}));
    c_thr->add_option("--d", th_d, "defender chain cap")->required();
    auto* th_amax_opt =
        c_thr->add_option("--a-max", th_amax, "attacker chain cap (strategic only)");
    c_thr->add_option("--p-tol", th_ptol, "bisection tolerance on p");
    c_thr->add_option("--deviation-eps", th_dev, "profitability margin defining a crossing");
    c_thr->add_option("--format", th_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    c_thr->add_option("--out", th_out, "write the report to a file instead of stdout");

    // table
    auto* c_tab = app.add_subcommand("table", "thresholds for a list of d values");
    std::string ta_model, ta_format = "csv", ta_out;
    std::vector<int> ta_dlist = {2, 3, 5, 10, 15, 50};
    double ta_ptol = 1e-4, ta_dev = 1e-7;
    c_tab->add_option("--model", ta_model, "immediate or strategic")
        ->required()
        ->check(CLI::IsMember({"immediate", "strategic"}));
    c_tab->add_option("--d-list", ta_dlist, "comma-separated d values")->delimiter(',');
    c_tab->add_option("--p-tol", ta_ptol, "bisection tolerance on p");
    c_tab->add_option("--deviation-eps", ta_dev, "profitability margin defining a crossing");
    c_tab->add_option("--format", ta_format, "csv or json")
        ->check(CLI::IsMember({"json", "csv"}));
    c_tab->add_option("--out", ta_out, "write the table to a file instead of stdout");

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo check of a policy's gain");
    std::string si_model, si_policy, si_plot, si_out;
    double si_p = 0.0, si_tol = 1e-12;
    int si_d = 0, si_amax = 0, si_trials = 1;
    long si_levels = 1000000;
    std::uint64_t si_seed = 1;
    c_sim->add_option("--model", si_model, "immediate or strategic")
        ->required()
        ->check(CLI::IsMember({"immediate", "strategic"}));
    c_sim->add_option("--p", si_p, "miner 1 per-phase win probability")->required();
    c_sim->add_option("--d", si_d, "defender chain cap")->required();
    auto* si_amax_opt =
        c_sim->add_option("--a-max", si_amax, "attacker chain cap (strategic only)");
    c_sim->add_option("--levels", si_levels, "levels to advance per trial (>= 10000)");
    c_sim->add_option("--trials", si_trials, "independent trials");
    c_sim->add_option("--seed", si_seed, "base RNG seed");
    c_sim->add_option("--policy", si_policy, "frontier, deviator-d3, optimal, or a policy file")
        ->required();
    c_sim->add_option("--tol", si_tol, "solver tolerance when --policy optimal");
    c_sim->add_option("--emit-plot-data", si_plot, "also write per-trial gains as CSV");
    c_sim->add_option("--out", si_out, "write the report to a file instead of stdout");

    // verify
    auto* c_ver = app.add_subcommand("verify", "run analytic consistency suites");
    std::string ve_suite, ve_out;
    double ve_p = 0.0, ve_tol = 1e-9;
    int ve_d = 30, ve_range = 50;
    c_ver->add_option("--suite", ve_suite, "bounds, sol, rinf or all")
        ->required()
        ->check(CLI::IsMember({"bounds", "sol", "rinf", "all"}));
    c_ver->add_option("--p", ve_p, "win probability the suites are evaluated at")->required();
    c_ver->add_option("--d", ve_d, "defender chain cap for the bounds suite");
    c_ver->add_option("--range", ve_range, "a,b range for the sol suite");
    c_ver->add_option("--tol", ve_tol, "comparison tolerance");
    c_ver->add_option("--out", ve_out, "write the JSON summary to a file instead of stdout");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    Timer timer;
    int rc = 0;
    std::string cmd_name;
    try {
        if (c_solve->parsed()) {
            cmd_name = "solve";
            rc = do_solve(so_model, so_p, so_d, so_amax, so_amax_opt->count() > 0, so_tol,
                          so_max_iters, so_format, so_out, out, err);
        } else if (c_thr->parsed()) {
            cmd_name = "threshold";
            rc = do_threshold(th_model, th_d, th_ptol, th_dev, th_amax, th_amax_opt->count() > 0,
                              th_format, th_out, out, err);
        } else if (c_tab->parsed()) {
            cmd_name = "table";
            rc = do_table(ta_model, ta_dlist, ta_ptol, ta_dev, ta_format, ta_out, out, err);
        } else if (c_sim->parsed()) {
            cmd_name = "simulate";
            rc = do_simulate(si_model, si_p, si_d, si_amax, si_amax_opt->count() > 0, si_levels,
                             si_trials, si_seed, si_policy, si_tol, si_plot, si_out, out, err);
        } else if (c_ver->parsed()) {
            cmd_name = "verify";
            rc = do_verify(ve_suite, ve_p, ve_d, ve_range, ve_tol, ve_out, out, err);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        err << "error: convergence failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    info(err, cmd_name + " completed in " + fmt_shortest(timer.ms()) + " ms");
    return rc;
}

}  // namespace minegame

#endif  // MINEGAME_CLI_HPP
