#ifndef MINEGAME_IO_HPP
#define MINEGAME_IO_HPP

#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minegame/bounds.hpp"
#include "minegame/game.hpp"
#include "minegame/immediate.hpp"
#include "minegame/simulate.hpp"
#include "minegame/strategic.hpp"
#include "minegame/version.hpp"

namespace minegame {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// String conversions
// ---------------------------------------------------------------------------

inline std::string model_name(Model m) {
    return m == Model::immediate ? "immediate" : "strategic";
}

inline Model parse_model(const std::string& s) {
    if (s == "immediate") return Model::immediate;
    if (s == "strategic") return Model::strategic;
    throw std::invalid_argument("unknown model '" + s + "' (expected immediate or strategic)");
}

inline std::string action_name(ActionKind k) {
    switch (k) {
        case ActionKind::mine: return "mine";
        case ActionKind::capitulate: return "capitulate";
        case ActionKind::release: return "release";
    }
    throw std::logic_error("unreachable action kind");
}

inline ActionKind parse_action_kind(const std::string& s) {
    if (s == "mine") return ActionKind::mine;
    if (s == "capitulate") return ActionKind::capitulate;
    if (s == "release") return ActionKind::release;
    throw std::invalid_argument("unknown action '" + s + "'");
}

// Fixed-precision float formatting for CSV output. 17 significant digits
// round-trip any IEEE double exactly.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Run manifest: everything needed to reproduce an invocation bit for bit.
// Wall-clock duration is reported on stderr, never serialized, so that a
// rerun of the same command yields byte-identical output.
// ---------------------------------------------------------------------------

inline ojson make_manifest(const std::string& command, ojson params, ojson tolerances,
                           ojson seed = nullptr) {
    ojson m;
    m["command"] = command;
    m["tool_version"] = tool_version;
    m["params"] = std::move(params);
    m["tolerances"] = std::move(tolerances);
    m["seed"] = std::move(seed);
    return m;
}

// ---------------------------------------------------------------------------
// Policy files
// ---------------------------------------------------------------------------

inline ojson policy_to_json(const Policy& pol) {
    const GameParams& gp = pol.params;
    StateGrid grid = StateGrid::of(gp);
    ojson j;
    j["model"] = model_name(gp.model);
    j["d"] = gp.d;
    if (gp.model == Model::strategic) j["a_max"] = effective_a_max(gp);
    j["default_landing_s"] = 0;
    ojson entries = ojson::array();
    for (int b = 0; b <= gp.d; ++b) {
        for (int a = 0; a <= grid.max_a(b); ++a) {
            GameState s{a, b};
            if (classify(gp, s) == StateClass::winning) continue;
            const Action& act = pol.at(s);
            ojson e;
            e["a"] = a;
            e["b"] = b;
            e["action"] = action_name(act.kind);
            if (act.kind == ActionKind::capitulate) e["s"] = act.landing;
            entries.push_back(std::move(e));
        }
    }
    j["entries"] = std::move(entries);
    return j;
}

// Rebuilds a full policy table from a policy file. The file pins model, d and
// a_max; the win probability p comes from the caller since play semantics do
// not depend on it but solver interop does. States missing from the entry
// list fall back to capitulating at default_landing_s (clamped), matching the
// compact-policy expansion rules.
inline Policy policy_from_json(const ojson& j, double p) {
    if (!j.is_object()) throw std::invalid_argument("policy file: top level must be an object");
    GameParams gp;
    try {
        gp.model = parse_model(j.at("model").get<std::string>());
        gp.p = p;
        gp.d = j.at("d").get<int>();
        gp.a_max = (gp.model == Model::strategic) ? j.value("a_max", 0) : 0;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("policy file: ") + e.what());
    }
    validate_params(gp);

    int default_s = j.value("default_landing_s", 0);
    Policy pol = expand(CompactPolicy{{}, default_s}, gp);
    StateGrid grid = StateGrid::of(gp);

    if (!j.contains("entries") || !j.at("entries").is_array())
        throw std::invalid_argument("policy file: missing entries array");
    for (const auto& e : j.at("entries")) {
        GameState s{};
        Action act{};
        try {
            s.a = e.at("a").get<int>();
            s.b = e.at("b").get<int>();
            std::string kind = e.at("action").get<std::string>();
            act.kind = parse_action_kind(kind);
            act.landing = (act.kind == ActionKind::capitulate) ? e.at("s").get<int>() : 0;
        } catch (const nlohmann::json::exception& ex) {
            throw std::invalid_argument(std::string("policy file: bad entry: ") + ex.what());
        }
        if (!grid.contains(s))
            throw std::invalid_argument("policy file: entry state (" + std::to_string(s.a) + "," +
                                        std::to_string(s.b) + ") is outside the (model, d) grid");
        if (classify(gp, s) == StateClass::winning)
            throw std::invalid_argument("policy file: entry for winning state (" +
                                        std::to_string(s.a) + "," + std::to_string(s.b) + ")");
        pol.actions[grid.index(s)] = act;
    }
    validate_policy(pol);
    return pol;
}

inline std::string policy_to_string(const Policy& pol) { return policy_to_json(pol).dump(2) + "\n"; }

inline Policy policy_from_string(const std::string& text, double p) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("policy file: invalid JSON: ") + e.what());
    }
    return policy_from_json(j, p);
}

// ---------------------------------------------------------------------------
// Solver reports
// ---------------------------------------------------------------------------

namespace detail {

inline ojson potential_triples(const GameParams& gp, const std::vector<double>& table) {
    StateGrid grid = StateGrid::of(gp);
    ojson arr = ojson::array();
    for (int b = 0; b <= gp.d; ++b)
        for (int a = 0; a <= grid.max_a(b); ++a)
            arr.push_back(ojson::array({a, b, table[grid.row_offset(b) + a]}));
    return arr;
}

inline void params_common(ojson& p, const GameParams& gp) {
    p["model"] = model_name(gp.model);
    p["p"] = gp.p;
    p["d"] = gp.d;
    if (gp.model == Model::strategic) p["a_max"] = effective_a_max(gp);
}

}  // namespace detail

inline ojson solve_report_to_json(const SolveReport& rep, const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "solve_report";
    j["manifest"] = manifest;
    detail::params_common(j, rep.params);
    j["tol"] = rep.tol;
    j["iterations"] = rep.iterations;
    j["residual"] = rep.residual;
    j["g_star"] = rep.g_star;
    j["frontier_is_best_response"] = rep.frontier_is_best_response;
    j["p_at_least_half"] = rep.p_at_least_half;
    j["potential"] = detail::potential_triples(rep.params, rep.phi);
    j["policy"] = policy_to_json(rep.policy);
    return j;
}

inline ojson solve_report_to_json(const StrategicSolveReport& rep, const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "solve_report";
    j["manifest"] = manifest;
    detail::params_common(j, rep.params);
    j["tol"] = rep.tol;
    j["iterations"] = rep.iterations;
    j["residual"] = rep.residual;
    j["g_star"] = rep.g_star;
    j["frontier_is_best_response"] = rep.frontier_is_best_response;
    j["p_at_least_half"] = rep.p_at_least_half;
    if (!std::isnan(rep.truncation_sensitivity))
        j["truncation_sensitivity"] = rep.truncation_sensitivity;
    j["potential"] = detail::potential_triples(rep.params, rep.psi);
    j["policy"] = policy_to_json(rep.policy);
    return j;
}

// CSV rendering of a potential table: a manifest comment, summary comments,
// then one (a, b, phi) row per state.
template <typename Report>
inline std::string solve_report_to_csv(const Report& rep, const ojson& manifest,
                                       const std::vector<double>& table) {
    std::ostringstream out;
    out << "# manifest " << manifest.dump() << "\n";
    out << "# g_star " << fmt17(rep.g_star) << "\n";
    out << "a,b,phi\n";
    StateGrid grid = StateGrid::of(rep.params);
    for (int b = 0; b <= rep.params.d; ++b)
        for (int a = 0; a <= grid.max_a(b); ++a)
            out << a << "," << b << "," << fmt17(table[grid.row_offset(b) + a]) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Threshold and table reports
// ---------------------------------------------------------------------------

inline ojson threshold_to_json(const ThresholdResult& r, const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "threshold_result";
    j["manifest"] = manifest;
    j["model"] = model_name(r.model);
    j["d"] = r.d;
    if (r.model == Model::strategic) j["a_max"] = r.a_max;
    j["threshold"] = r.p_hat;
    j["bracket_low"] = r.bracket_lo;
    j["bracket_high"] = r.bracket_hi;
    j["gap_at_bracket"] = r.gap_at_bracket;
    j["p_tol"] = r.p_tol;
    j["deviation_eps"] = r.deviation_eps;
    return j;
}

inline std::string threshold_table_to_csv(const std::vector<ThresholdResult>& rows,
                                          const ojson& manifest) {
    std::ostringstream out;
    out << "# manifest " << manifest.dump() << "\n";
    out << "d,threshold,bracket_low,bracket_high\n";
    for (const auto& r : rows)
        out << r.d << "," << fmt17(r.p_hat) << "," << fmt17(r.bracket_lo) << ","
            << fmt17(r.bracket_hi) << "\n";
    return out.str();
}

inline ojson threshold_table_to_json(const std::vector<ThresholdResult>& rows,
                                     const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "threshold_table";
    j["manifest"] = manifest;
    ojson arr = ojson::array();
    for (const auto& r : rows) {
        ojson row;
        row["d"] = r.d;
        row["threshold"] = r.p_hat;
        row["bracket_low"] = r.bracket_lo;
        row["bracket_high"] = r.bracket_hi;
        arr.push_back(std::move(row));
    }
    j["rows"] = std::move(arr);
    return j;
}

// ---------------------------------------------------------------------------
// Simulation reports
// ---------------------------------------------------------------------------

inline ojson sim_report_to_json(const SimReport& rep, const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "sim_report";
    j["manifest"] = manifest;
    detail::params_common(j, rep.params);
    j["policy"] = rep.policy_label;
    j["target_levels"] = rep.target_levels;
    j["trials"] = rep.trials;
    j["seed"] = rep.seed;
    j["empirical_gain"] = rep.empirical_gain;
    j["std_error"] = rep.std_error;
    j["ci95"] = ojson::array({rep.ci95_lo, rep.ci95_hi});
    j["phases_run"] = rep.phases_run;
    j["cutoff_rule"] = rep.cutoff_rule;
    j["per_trial_gain"] = rep.per_trial;
    return j;
}

inline std::string sim_plot_data_csv(const SimReport& rep) {
    std::ostringstream out;
    out << "trial,gain\n";
    for (std::size_t i = 0; i < rep.per_trial.size(); ++i)
        out << i << "," << fmt17(rep.per_trial[i]) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Verification summaries
// ---------------------------------------------------------------------------

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skipped: return "skipped";
    }
    return "?";
}

struct SuiteResult {
    std::string suite;
    std::vector<LemmaCheck> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::fail) return false;
        return true;
    }
};

inline ojson verify_summary_to_json(const std::vector<SuiteResult>& suites, const ojson& manifest) {
    ojson j;
    j["schema_version"] = report_schema_version;
    j["kind"] = "verify_summary";
    j["manifest"] = manifest;
    bool all_pass = true;
    ojson arr = ojson::array();
    for (const auto& s : suites) {
        ojson sj;
        sj["suite"] = s.suite;
        ojson checks = ojson::array();
        for (const auto& c : s.checks) {
            ojson cj;
            cj["name"] = c.name;
            cj["status"] = status_name(c.status);
            if (!std::isnan(c.margin)) cj["margin"] = c.margin;
            if (!c.note.empty()) cj["note"] = c.note;
            checks.push_back(std::move(cj));
            if (c.status == CheckStatus::fail) all_pass = false;
        }
        sj["checks"] = std::move(checks);
        sj["pass"] = s.passed();
        arr.push_back(std::move(sj));
    }
    j["suites"] = std::move(arr);
    j["pass"] = all_pass;
    return j;
}

}  // namespace minegame

#endif  // MINEGAME_IO_HPP
