#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pullback/scenario.hpp"
#include "pullback/svg.hpp"
#include "pullback/version.hpp"

namespace pullback::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictMismatch = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitSystemError = 3;

struct DiagnosticOutcome {
    json verdicts = json::object();
    json details = json::object();
    // label -> (curve, y axis name)
    std::vector<std::tuple<std::string, std::vector<std::pair<double, double>>, std::string>>
        curves;
    // label -> point cloud, written as CSV next to the curves
    std::vector<std::pair<std::string, SampledSet>> point_sets;
};

namespace detail {

inline std::vector<SampledSet> parse_set_list(const json& arr, const ProcessHandle& p,
                                              std::uint64_t seed) {
    if (!arr.is_array() || arr.empty())
        throw ScenarioError("expected a nonempty array of set specs");
    std::vector<SampledSet> out;
    std::size_t i = 0;
    for (const auto& s : arr) out.push_back(parse_set(s, p, mix_seed(seed, 7000 + i++)));
    return out;
}

inline std::vector<double> parse_sample_times(const json& spec) {
    if (spec.is_array()) return spec.get<std::vector<double>>();
    if (spec.is_object() && spec.contains("step") && spec.contains("count")) {
        const double step = spec["step"].get<double>();
        const auto count = spec["count"].get<std::size_t>();
        std::vector<double> ts;
        for (std::size_t i = 1; i <= count; ++i) ts.push_back(step * static_cast<double>(i));
        return ts;
    }
    throw ScenarioError("sample_times must be an array or {step, count}");
}

inline json curve_preview(const std::vector<std::pair<double, double>>& curve) {
    json arr = json::array();
    for (const auto& [x, y] : curve) arr.push_back(json::array({x, y}));
    return arr;
}

inline DiagnosticOutcome run_diagnostic(const DiagnosticSpec& spec, const ProcessHandle& p,
                                        const ScheduleSpec& sched, std::uint64_t seed) {
    const json& prm = spec.params;
    const double tol = detail::get_num(prm, "tol", 1e-6);
    const int budget = static_cast<int>(detail::get_size(prm, "budget", 1));
    DiagnosticOutcome out;

    if (spec.kind == "check-axioms") {
        if (!prm.contains("probes") || !prm["probes"].is_array() || prm["probes"].empty())
            throw ScenarioError("check-axioms needs a 'probes' array");
        std::vector<AxiomProbe> probes;
        for (const auto& pr : prm["probes"]) {
            AxiomProbe probe{pr.at("t").get<double>(), pr.at("s").get<double>(),
                             pr.at("tau").get<double>(), parse_point(pr.at("x"), p.dimension)};
            probes.push_back(std::move(probe));
        }
        const auto report = check_axioms(p, probes, tol, budget, seed);
        out.verdicts["identity_ok"] = report.identity_ok;
        out.verdicts["subcomposition_ok"] = report.subcomposition_ok;
        out.verdicts["strict_ok"] = report.strict_ok;
        out.details["max_identity_residual"] = report.max_identity;
        out.details["max_subcomposition_residual"] = report.max_subcomposition;
        out.details["max_strictness_residual"] = report.max_strictness;
        out.details["caveat"] = report.caveat;
        return out;
    }

    if (spec.kind == "omega-limit") {
        const double t = detail::get_num(prm, "t", 0.0);
        const auto B = parse_set(prm.at("set"), p, mix_seed(seed, 1));
        const double cluster_eps = detail::get_num(prm, "cluster_eps", 0.25);
        const auto res = omega_limit(p, t, B, sched.build(t), cluster_eps, tol, budget, seed);
        out.verdicts["converged"] = res.converged;
        out.verdicts["limit_size"] = res.limit_set.size();
        out.details["limit_set"] = to_json(res.limit_set);
        out.details["caveat"] = kSamplingCaveat;
        out.curves.emplace_back("omega-curve", res.attraction_curve, "semidistance");
        out.point_sets.emplace_back("limit-set", res.limit_set);
        return out;
    }

    if (spec.kind == "attraction") {
        const double t = detail::get_num(prm, "t", 0.0);
        const auto K = parse_family(prm.at("family"), p, mix_seed(seed, 2));
        const auto B = parse_set(prm.at("set"), p, mix_seed(seed, 3));
        const auto res = attraction_test(p, K, B, t, sched.build(t), tol, budget, seed);
        out.verdicts["attracted"] = res.attracted;
        out.details["caveat"] = res.caveat;
        out.curves.emplace_back("attraction-curve", res.curve, "semidistance");
        return out;
    }

    if (spec.kind == "dissipativity") {
        const auto candidate = parse_family(prm.at("candidate"), p, mix_seed(seed, 4));
        const auto test_sets = parse_set_list(prm.at("test_sets"), p, seed);
        std::vector<double> times = prm.contains("times")
                                        ? prm["times"].get<std::vector<double>>()
                                        : candidate.times;
        const auto report = dissipativity_classify(
            p, candidate, test_sets, times, sched, tol, budget, seed,
            detail::get_num(prm, "backward_cap", 1e6),
            detail::get_num(prm, "point_horizon_factor", 8.0));
        out.verdicts["absorbing"] = report.absorbing;
        out.verdicts["monotone"] = report.monotone;
        out.verdicts["backward_bounded"] = report.backward_bounded;
        out.verdicts["point_dissipative"] = report.point_dissipative;
        json rows = json::array();
        for (const auto& row : report.entering_times) {
            json r{{"t", row.t}, {"label", row.label}, {"absorbed", row.absorbed}};
            if (row.absorbed) r["entering_elapsed"] = row.elapsed;
            rows.push_back(std::move(r));
        }
        out.details["entering_times"] = std::move(rows);
        out.details["backward_diameter"] = report.backward_diameter;
        out.details["caveat"] = report.caveat;
        return out;
    }

    if (spec.kind == "point-dissipativity") {
        const auto candidate = parse_set(prm.at("candidate"), p, mix_seed(seed, 5));
        if (!prm.contains("points") || !prm["points"].is_array() || prm["points"].empty())
            throw ScenarioError("point-dissipativity needs a 'points' array");
        std::vector<StatePoint> points;
        for (const auto& row : prm["points"]) points.push_back(parse_point(row, p.dimension));
        const auto times = parse_sample_times(prm.at("sample_times"));
        const auto report = point_dissipativity_test(p, candidate, points, times, tol, budget,
                                                     seed);
        out.verdicts["point_dissipative"] = report.point_dissipative;
        json rows = json::array();
        double worst = 0.0;
        for (const auto& row : report.rows) {
            json r{{"point", row.point.coords}, {"entered", row.entered}};
            if (row.entered) {
                r["entering_time"] = row.entering_time;
                worst = std::max(worst, row.entering_time);
            }
            rows.push_back(std::move(r));
        }
        out.verdicts["max_entering_time"] = worst;
        out.details["rows"] = std::move(rows);
        out.details["caveat"] = report.caveat;
        return out;
    }

    if (spec.kind == "flattening") {
        const double t = detail::get_num(prm, "t", 0.0);
        const auto B = parse_set(prm.at("set"), p, mix_seed(seed, 6));
        const auto m = detail::get_size(prm, "m", 1);
        const double eps = detail::get_num(prm, "eps", tol);
        const auto res = flattening_test(p, B, t, m, sched.build(t), budget, seed);
        out.verdicts["flattened"] = res.sup_tail <= eps;
        out.verdicts["sup_tail"] = res.sup_tail;
        out.details["modes_kept"] = res.modes_kept;
        out.details["caveat"] = res.caveat;
        out.curves.emplace_back("tail-curve", res.tail_curve, "tail-norm");
        return out;
    }

    if (spec.kind == "closedness") {
        const double t = detail::get_num(prm, "t", 0.0);
        const double t_star = detail::get_num(prm, "t_star", 1.0);
        const auto& eta = prm.at("eta");
        const auto gen = EtaSequence::geometric_approach(
            parse_point(eta.at("limit"), p.dimension),
            parse_point(eta.at("direction"), p.dimension), detail::get_num(eta, "ratio", 0.5),
            detail::get_size(eta, "count", 45));
        const auto witness = closedness_probe(p, t, t_star, gen, tol, budget, seed);
        out.verdicts["verdict"] = to_string(witness.verdict);
        out.verdicts["gap"] = witness.gap;
        out.details["limit_xi"] = witness.limit_xi.coords;
        out.details["caveat"] = witness.caveat;
        return out;
    }

    if (spec.kind == "attractor") {
        const auto B0 = parse_family(prm.at("absorbing"), p, mix_seed(seed, 8));
        std::vector<double> times = prm.contains("times")
                                        ? prm["times"].get<std::vector<double>>()
                                        : B0.times;
        const double cluster_eps = detail::get_num(prm, "cluster_eps", 0.25);
        std::vector<SampledSet> test_sets;
        if (prm.contains("test_sets")) test_sets = parse_set_list(prm["test_sets"], p, seed);
        try {
            const auto result = attractor_construct(p, B0, times, sched, cluster_eps, tol,
                                                    budget, seed, test_sets);
            out.verdicts["constructed"] = true;
            out.verdicts["limit_size"] = result.attractor.sets.front().size();
            bool attracted = true;
            for (const auto& check : result.attraction_checks) attracted &= check.attracted;
            out.verdicts["test_sets_attracted"] = attracted;
            out.details["attractor"] = to_json(result.attractor);
            std::size_t i = 0;
            for (const auto& omega : result.omegas)
                out.curves.emplace_back("omega-curve-" + std::to_string(i++),
                                        omega.attraction_curve, "semidistance");
            for (std::size_t j = 0; j < result.attractor.sets.size(); ++j)
                out.point_sets.emplace_back("section-" + std::to_string(j),
                                            result.attractor.sets[j]);
        } catch (const std::runtime_error& e) {
            out.verdicts["constructed"] = false;
            out.verdicts["limit_size"] = 0;
            out.verdicts["test_sets_attracted"] = false;
            out.details["error"] = e.what();
        }
        out.details["caveat"] = kSamplingCaveat;
        return out;
    }

    if (spec.kind == "invariance") {
        const auto A = parse_family(prm.at("family"), p, mix_seed(seed, 9));
        if (!prm.contains("pairs") || !prm["pairs"].is_array() || prm["pairs"].empty())
            throw ScenarioError("invariance needs a 'pairs' array of [s, t]");
        std::vector<std::pair<double, double>> pairs;
        for (const auto& pr : prm["pairs"]) {
            if (!pr.is_array() || pr.size() != 2)
                throw ScenarioError("invariance pairs must be [s, t] arrays");
            pairs.emplace_back(pr[0].get<double>(), pr[1].get<double>());
        }
        const auto report = invariance_check(p, A, pairs, tol, budget, seed);
        out.verdicts["negatively_invariant"] = report.negatively_invariant;
        out.verdicts["fully_invariant"] = report.fully_invariant;
        double neg = 0.0, full = 0.0;
        json rows = json::array();
        for (const auto& row : report.pairs) {
            neg = std::max(neg, row.negative_residual);
            full = std::max(full, row.full_residual);
            rows.push_back(json{{"s", row.s},
                                {"t", row.t},
                                {"negative_residual", row.negative_residual},
                                {"full_residual", row.full_residual}});
        }
        out.verdicts["max_negative_residual"] = neg;
        out.verdicts["max_full_residual"] = full;
        out.details["pairs"] = std::move(rows);
        out.details["caveat"] = report.caveat;
        return out;
    }

    throw ScenarioError("unknown diagnostic kind '" + spec.kind + "'");
}

/// Expected verdicts: booleans, integers and strings compare exactly; numbers
/// may give a {"min": .., "max": ..} range.
inline bool matches_expected(const json& expected, const json& verdicts,
                             std::string* why = nullptr) {
    for (const auto& [key, want] : expected.items()) {
        if (!verdicts.contains(key)) {
            if (why) *why = "missing verdict '" + key + "'";
            return false;
        }
        const json& have = verdicts[key];
        bool ok = true;
        if (want.is_object()) {
            const double v = have.get<double>();
            if (want.contains("min") && v < want["min"].get<double>()) ok = false;
            if (want.contains("max") && v > want["max"].get<double>()) ok = false;
        } else {
            ok = want == have;
        }
        if (!ok) {
            if (why) *why = "verdict '" + key + "' = " + have.dump() + ", expected " + want.dump();
            return false;
        }
    }
    return true;
}

inline std::string slug(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
    return s;
}

}  // namespace detail

/// Execute one scenario file: write report.json, curves/*.csv, plots/*.svg and
/// manifest.json; the exit code reflects expected-verdict matching.
inline int run_scenario_file(const std::string& scenario_path, const std::string& output_override,
                             const std::uint64_t* seed_override, std::ostream& log) {
    const auto started = std::chrono::steady_clock::now();

    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) {
        log << "error: cannot read scenario '" << scenario_path << "'\n";
        return kExitSchema;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();

    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const std::exception& e) {
        log << "error: malformed JSON: " << e.what() << "\n";
        return kExitSchema;
    }

    Scenario sc;
    ProcessHandle process;
    try {
        sc = parse_scenario(doc);
        if (seed_override) sc.seed = *seed_override;
        process = make_system(sc.system);
    } catch (const ScenarioError& e) {
        log << "error: scenario schema: " << e.what() << "\n";
        return kExitSchema;
    }

    std::filesystem::path out_dir = !output_override.empty()
                                        ? std::filesystem::path(output_override)
                                        : !sc.output_dir.empty()
                                              ? std::filesystem::path(sc.output_dir)
                                              : std::filesystem::path(
                                                    std::filesystem::path(scenario_path).stem()
                                                        .string() +
                                                    "-out");

    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["toolkit_version"] = kToolkitVersion;
    report["scenario_hash"] = hash_hex;
    report["seed"] = sc.seed;
    report["system"] = json{{"name", sc.system.name}, {"params", sc.system.params}};
    report["caveat"] = kSamplingCaveat;
    report["diagnostics"] = json::array();

    struct CurveFile {
        std::string path;
        std::string content;
        std::vector<std::pair<double, double>> curve;
        std::string title, y_name;
    };
    std::vector<CurveFile> curve_files;
    std::vector<std::pair<std::string, std::string>> set_files;  // path, csv

    bool all_matched = true;
    json manifest_rows = json::array();
    for (std::size_t i = 0; i < sc.diagnostics.size(); ++i) {
        const auto& spec = sc.diagnostics[i];
        DiagnosticOutcome outcome;
        try {
            outcome = detail::run_diagnostic(spec, process, sc.schedule, mix_seed(sc.seed, i));
        } catch (const ScenarioError& e) {
            log << "error: diagnostic '" << spec.name << "': " << e.what() << "\n";
            return kExitSchema;
        } catch (const std::exception& e) {
            log << "error: diagnostic '" << spec.name << "' failed: " << e.what() << "\n";
            return kExitSystemError;
        }

        std::string why;
        const bool matched = detail::matches_expected(spec.expected, outcome.verdicts, &why);
        all_matched &= matched;

        json entry;
        entry["kind"] = spec.kind;
        entry["name"] = spec.name;
        entry["verdicts"] = outcome.verdicts;
        entry["expected"] = spec.expected;
        entry["matched"] = matched;
        if (!matched) entry["mismatch"] = why;
        entry["details"] = outcome.details;
        json curve_paths = json::array();
        for (const auto& [label, curve, y_name] : outcome.curves) {
            const std::string base =
                std::to_string(i) + "-" + detail::slug(spec.name) + "-" + label;
            CurveFile file;
            file.path = "curves/" + base + ".csv";
            file.content = curve_csv(curve, "tau", y_name);
            file.curve = curve;
            file.title = spec.name + " " + label;
            file.y_name = y_name;
            curve_paths.push_back(file.path);
            curve_files.push_back(std::move(file));
        }
        entry["curves"] = curve_paths;
        json set_paths = json::array();
        for (const auto& [label, set] : outcome.point_sets) {
            const std::string path =
                "sets/" + std::to_string(i) + "-" + detail::slug(spec.name) + "-" + label +
                ".csv";
            set_paths.push_back(path);
            set_files.emplace_back(path, to_csv(set));
        }
        entry["sets"] = set_paths;
        report["diagnostics"].push_back(std::move(entry));
        manifest_rows.push_back(json{{"kind", spec.kind}, {"name", spec.name},
                                     {"matched", matched}});
        log << (matched ? "[ OK ] " : "[MISS] ") << spec.kind << " '" << spec.name << "'"
            << (matched ? "" : "  (" + why + ")") << "\n";
    }
    report["all_matched"] = all_matched;

    try {
        std::filesystem::create_directories(out_dir / "curves");
        std::filesystem::create_directories(out_dir / "plots");
        if (!set_files.empty()) std::filesystem::create_directories(out_dir / "sets");
        write_file((out_dir / "report.json").string(), report.dump(2) + "\n");
        for (const auto& [path, csv] : set_files) write_file((out_dir / path).string(), csv);
        for (const auto& file : curve_files) {
            write_file((out_dir / file.path).string(), file.content);
            const std::string svg_path =
                "plots/" + std::filesystem::path(file.path).stem().string() + ".svg";
            write_file((out_dir / svg_path).string(),
                       svg_line_plot(file.curve, file.title, "tau", file.y_name));
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json manifest;
        manifest["schema_version"] = kReportSchemaVersion;
        manifest["scenario_hash"] = hash_hex;
        manifest["toolkit_version"] = kToolkitVersion;
        manifest["wall_clock_seconds"] = wall;
        manifest["diagnostics"] = manifest_rows;
        manifest["all_matched"] = all_matched;
        write_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "error: writing outputs: " << e.what() << "\n";
        return kExitSystemError;
    }

    log << (all_matched ? "all diagnostics matched" : "verdict mismatch") << "; outputs in "
        << out_dir.string() << "\n";
    return all_matched ? kExitOk : kExitVerdictMismatch;
}

inline int list_systems(bool as_json, std::ostream& out) {
    if (as_json) {
        json arr = json::array();
        for (const auto& entry : system_registry())
            arr.push_back(json{{"name", entry.name}, {"params", entry.param_schema}});
        out << arr.dump(2) << "\n";
        return kExitOk;
    }
    for (const auto& entry : system_registry()) {
        out << entry.name << "\n";
        for (const auto& [key, desc] : entry.param_schema.items())
            out << "    " << key << ": " << desc.get<std::string>() << "\n";
    }
    return kExitOk;
}

inline void print_usage(std::ostream& out) {
    out << kToolkitName << " " << kToolkitVersion << "\n"
        << "usage:\n"
        << "  " << kToolkitName << " run <scenario.json> [--output DIR] [--seed N]\n"
        << "  " << kToolkitName << " list-systems [--json]\n"
        << "  " << kToolkitName << " version\n"
        << "environment: PULLBACK_LAB_THREADS caps ensemble parallelism\n"
        << "exit codes: 0 verdicts matched, 1 mismatch, 2 schema/usage, 3 system error\n";
}

/// Argument-level entry point, shared by the binary and the tests.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    if (args.empty()) {
        print_usage(err);
        return kExitSchema;
    }
    const std::string& cmd = args[0];
    if (cmd == "version") {
        out << kToolkitName << " " << kToolkitVersion << "\n";
        return kExitOk;
    }
    if (cmd == "list-systems") {
        bool as_json = false;
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i] == "--json") {
                as_json = true;
            } else {
                err << "error: unknown option '" << args[i] << "'\n";
                print_usage(err);
                return kExitSchema;
            }
        }
        return list_systems(as_json, out);
    }
    if (cmd == "run") {
        std::string scenario, output;
        std::uint64_t seed = 0;
        bool have_seed = false;
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i] == "--output" && i + 1 < args.size()) {
                output = args[++i];
            } else if (args[i] == "--seed" && i + 1 < args.size()) {
                try {
                    seed = std::stoull(args[++i]);
                } catch (const std::exception&) {
                    err << "error: --seed needs a nonnegative integer\n";
                    return kExitSchema;
                }
                have_seed = true;
            } else if (!args[i].empty() && args[i][0] == '-') {
                err << "error: unknown option '" << args[i] << "'\n";
                print_usage(err);
                return kExitSchema;
            } else if (scenario.empty()) {
                scenario = args[i];
            } else {
                err << "error: multiple scenario paths\n";
                return kExitSchema;
            }
        }
        if (scenario.empty()) {
            err << "error: run needs a scenario path\n";
            print_usage(err);
            return kExitSchema;
        }
        return run_scenario_file(scenario, output, have_seed ? &seed : nullptr, err);
    }
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        print_usage(out);
        return kExitOk;
    }
    err << "error: unknown subcommand '" << cmd << "'\n";
    print_usage(err);
    return kExitSchema;
}

}  // namespace pullback::cli
