#include "wfpc/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wfpc/parallel.hpp"

namespace wfpc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunContext {
    const Scenario& scenario;
    Provenance prov;
    fs::path dir;
    std::vector<std::string> artifacts;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit RunContext(const Scenario& s)
        : scenario(s), prov{config_hash(s), s.seed.value_or(0)}, dir(s.output.dir) {
        fs::create_directories(dir);
    }

    fs::path artifact(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }

    json stamp(json j) const {
        j["config_hash"] = prov.config_hash;
        j["seed"] = prov.seed;
        return j;
    }

    void write_json(const std::string& name, const json& j) {
        std::ofstream out(artifact(name), std::ios::binary);
        if (!out) throw IOError("cannot write " + (dir / name).string());
        out << j.dump(2) << '\n';
    }

    void write_manifest(const std::string& command, const json& extra) {
        json m = extra;
        m["command"] = command;
        m["config"] = to_json(scenario);
        m["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::time_t now = std::time(nullptr);
        std::ostringstream ts;
        ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
        m["created_at"] = ts.str();
        artifacts.push_back("manifest.json");
        m["artifacts"] = artifacts;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw IOError("cannot write manifest");
        out << stamp(m).dump(2) << '\n';
    }
};

Method scenario_method(const Scenario& s) { return parse_method(s.protocol.method); }

StepScheme scenario_scheme(const Scenario& s) {
    return s.protocol.scheme == "midpoint" ? StepScheme::Midpoint : StepScheme::Split;
}

DetectOptions detect_options(const Scenario& s) {
    DetectOptions o;
    o.threshold = s.protocol.wfpc_threshold;
    o.method = scenario_method(s);
    o.scheme = scenario_scheme(s);
    o.workers = s.workers;
    return o;
}

json grid_check(const Scenario& s, const SystemModel& model, const CorrelatedState& state,
                const std::vector<SpectralPulse>& family, const TimeGrid& grid) {
    if (!s.protocol.verify_grid) return nullptr;
    return grid_convergence(scenario_method(s), model, state, family.front(), grid, scenario_scheme(s));
}

void require_protocol(const Scenario& s, std::string_view kind) {
    if (s.protocol.kind != kind)
        throw SchemaError("protocol.kind", "expected '" + std::string(kind) + "' for this command, got '" +
                                               s.protocol.kind + "'");
}

void export_states(RunContext& ctx, const CorrelatedState& initial, const std::vector<Trajectory>& trajs) {
    if (!ctx.scenario.output.export_states) return;
    write_matrix(ctx.artifact("initial_state.txt"), initial.joint.mat(), initial.layout());
    for (std::size_t i = 0; i < trajs.size(); ++i)
        if (trajs[i].final_state)
            write_matrix(ctx.artifact("final_state_" + std::to_string(i) + ".txt"), trajs[i].final_state->mat(),
                         initial.layout());
}

void export_fields(RunContext& ctx, const std::vector<SpectralPulse>& family, const TimeGrid& grid) {
    if (!ctx.scenario.output.export_fields) return;
    const auto nodes = grid.nodes();
    for (std::size_t i = 0; i < family.size(); ++i)
        write_field_csv(ctx.artifact("field_" + std::to_string(i) + ".csv"), to_time_domain(family[i], nodes),
                        ctx.prov);
}

json read_json_if(const fs::path& p) {
    std::ifstream in(p);
    if (!in) return nullptr;
    return json::parse(in, nullptr, false);
}

} // namespace

void apply_overrides(Scenario& s, const RunOptions& opts) {
    if (opts.out_dir) s.output.dir = opts.out_dir->string();
    if (opts.seed) s.seed = *opts.seed;
    if (opts.workers) s.workers = *opts.workers;
    if (opts.method) {
        try {
            parse_method(*opts.method);
        } catch (const InvalidArgument&) {
            throw SchemaError("--method", "expected exact|pert2, got '" + *opts.method + "'");
        }
        s.protocol.method = *opts.method;
    }
    if (opts.verify_grid) s.protocol.verify_grid = true;
}

json to_json(const PhaseControlReport& r) {
    json yields = json::array();
    for (const auto& [id, p] : r.yields) yields.push_back({{"mask_id", id}, {"p", p}});
    json scaling = {{"ok", r.scaling.ok}, {"ratio", nullptr}};
    if (r.scaling.ratio) scaling["ratio"] = *r.scaling.ratio;
    return {{"contrast", r.contrast}, {"threshold", r.threshold}, {"detected", r.detected},
            {"yields", yields},       {"scaling", scaling}};
}

json to_json(const ConditionReport& r) {
    json c1 = {{"pass", r.condition1.ok}, {"ratio", nullptr}};
    if (r.condition1.ratio) c1["ratio"] = *r.condition1.ratio;
    return {{"condition1", c1},
            {"condition2", {{"norm", r.condition2_norm}, {"pass", r.condition2_pass}}},
            {"condition3", {{"norm", r.condition3_norm}, {"pass", r.condition3_pass}}},
            {"tolerance", kConditionTol},
            {"all_pass", r.all_pass()}};
}

json to_json(const WitnessVerdict& v) {
    return {{"quadrant", std::string(to_string(v.quadrant))},
            {"summary", v.summary},
            {"correlations_witnessed", v.correlations_witnessed},
            {"condition2_caveat", v.condition2_caveat},
            {"profile_distance", v.profile_distance},
            {"before", to_json(v.report_before)},
            {"after", to_json(v.report_after)},
            {"conditions", to_json(v.conditions)}};
}

void cmd_simulate(const Scenario& s, std::ostream& log) {
    RunContext ctx(s);
    const SystemModel model = build_model(s);
    const CorrelatedState state = build_state(s, model);
    const auto family = build_family(s);
    const TimeGrid grid = build_grid(s);
    const Method method = scenario_method(s);

    auto trajs = parallel_map(family.size(), s.workers, [&](std::size_t i) {
        return propagate(method, model, state, family[i], grid, scenario_scheme(s));
    });
    write_trajectories_csv(ctx.artifact("trajectories.csv"), trajs, ctx.prov);
    export_states(ctx, state, trajs);
    export_fields(ctx, family, grid);

    double lo = trajs.front().final_population(), hi = lo;
    for (const auto& t : trajs) {
        lo = std::min(lo, t.final_population());
        hi = std::max(hi, t.final_population());
    }
    const json conv = grid_check(s, model, state, family, grid);
    ctx.write_manifest("simulate", {{"masks", family.size()},
                                    {"method", std::string(to_string(method))},
                                    {"contrast", hi - lo},
                                    {"grid_convergence", conv}});
    log << "simulate: " << family.size() << " masks, method " << to_string(method) << ", contrast "
        << format_double(hi - lo) << '\n';
    if (!conv.is_null()) log << "grid convergence |p_N - p_2N| = " << format_double(conv.get<double>()) << '\n';
}

void cmd_witness(const Scenario& s, std::ostream& log) {
    require_protocol(s, "witness");
    RunContext ctx(s);
    const SystemModel model = build_model(s);
    const CorrelatedState state = build_state(s, model);
    const auto family = build_family(s);
    const TimeGrid grid = build_grid(s);
    const WitnessThresholds th{s.protocol.wfpc_threshold, s.protocol.profile_threshold};

    const WitnessVerdict v = s.protocol.intermediate_t1
                                 ? intermediate_wfpc_witness(model, state, *s.protocol.intermediate_t1, family,
                                                             grid, th, detect_options(s))
                                 : run_witness_protocol(model, state, family, grid, th, detect_options(s));

    write_trajectories_csv(ctx.artifact("trajectories.csv"), v.report_before.trajectories, ctx.prov);
    write_trajectories_csv(ctx.artifact("trajectories_after.csv"), v.report_after.trajectories, ctx.prov);
    json vj = to_json(v);
    if (s.protocol.intermediate_t1) vj["intermediate_t1"] = *s.protocol.intermediate_t1;
    ctx.write_json("verdict.json", ctx.stamp(vj));
    ctx.write_json("conditions.json", ctx.stamp(to_json(v.conditions)));
    export_states(ctx, state, v.report_before.trajectories);
    export_fields(ctx, family, grid);
    ctx.write_manifest("witness", {{"masks", family.size()},
                                   {"quadrant", std::string(to_string(v.quadrant))},
                                   {"grid_convergence", grid_check(s, model, state, family, grid)}});

    log << "verdict: " << to_string(v.quadrant) << '\n' << v.summary << '\n';
    log << "contrast before " << format_double(v.report_before.contrast) << ", after "
        << format_double(v.report_after.contrast) << ", profile distance " << format_double(v.profile_distance)
        << '\n';
    if (v.condition2_caveat) log << "caveat: [P,H0] != 0, rho-borne and coupling-borne control are not separable\n";
}

void cmd_qrf(const Scenario& s, std::ostream& log) {
    require_protocol(s, "qrf");
    RunContext ctx(s);
    const SystemModel model = build_model(s);
    const CorrelatedState state = build_state(s, model);
    const ComplexMatrix a = build_operator(s.protocol.operator_a, model);
    const ComplexMatrix b = build_operator(s.protocol.operator_b, model);
    if (s.protocol.t1_grid.empty()) throw SchemaError("protocol.t1_grid", "expected at least one time");
    if (s.protocol.delta_grid.empty()) throw SchemaError("protocol.delta_grid", "expected at least one time");

    const auto reports =
        qrf_scan(model, state, a, b, s.protocol.t1_grid, s.protocol.delta_grid, s.protocol.qrf_threshold, s.workers);
    write_qrf_csv(ctx.artifact("qrf_scan.csv"), reports, ctx.prov);

    json summary = {{"cells", reports.size()}, {"threshold", s.protocol.qrf_threshold}, {"first_violated", nullptr}};
    double max_dev = 0.0;
    std::size_t violated = 0;
    for (const auto& r : reports) {
        max_dev = std::max(max_dev, r.deviation);
        if (!r.violated) continue;
        if (violated++ == 0)
            summary["first_violated"] = {{"t1", r.t1}, {"t2", r.t2}, {"deviation", r.deviation}, {"chi_norm", r.chi_norm}};
    }
    summary["max_deviation"] = max_dev;
    summary["violated_cells"] = violated;
    ctx.write_json("qrf_summary.json", ctx.stamp(summary));

    if (s.protocol.intermediate_t1) {
        const auto family = build_family(s);
        const WitnessVerdict v =
            intermediate_wfpc_witness(model, state, *s.protocol.intermediate_t1, family, build_grid(s),
                                      {s.protocol.wfpc_threshold, s.protocol.profile_threshold}, detect_options(s));
        json vj = to_json(v);
        vj["intermediate_t1"] = *s.protocol.intermediate_t1;
        ctx.write_json("verdict.json", ctx.stamp(vj));
        log << "intermediate witness at t1=" << format_double(*s.protocol.intermediate_t1) << ": "
            << to_string(v.quadrant) << '\n';
    }
    ctx.write_manifest("qrf", {{"cells", reports.size()}});
    log << "qrf: " << violated << " of " << reports.size() << " cells violated, max deviation "
        << format_double(max_dev) << '\n';
}

void cmd_nogo(const Scenario& s, std::ostream& log) {
    require_protocol(s, "nogo");
    RunContext ctx(s);
    const SystemModel model = build_model(s);
    const CorrelatedState state = build_state(s, model);
    const auto family = build_family(s);
    const TimeGrid grid = build_grid(s);

    const ConditionReport rep = check_nogo_conditions(model, state, family.front(), grid);
    DetectOptions opts = detect_options(s);
    opts.check_scaling = false;
    const PhaseControlReport pc = detect_wfpc(model, state, family, grid, opts);

    json cj = to_json(rep);
    cj["contrast"] = pc.contrast;
    cj["detected"] = pc.detected;
    ctx.write_json("conditions.json", ctx.stamp(cj));
    write_trajectories_csv(ctx.artifact("trajectories.csv"), pc.trajectories, ctx.prov);
    ctx.write_manifest("nogo", {{"masks", family.size()},
                                {"grid_convergence", grid_check(s, model, state, family, grid)}});

    auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
    log << "condition 1 (weak-field scaling): " << verdict(rep.condition1.ok);
    if (rep.condition1.ratio) log << "  ratio " << format_double(*rep.condition1.ratio);
    log << '\n';
    log << "condition 2 ([P,H0] = 0): " << verdict(rep.condition2_pass) << "  norm "
        << format_double(rep.condition2_norm) << '\n';
    log << "condition 3 ([H0,R] = 0): " << verdict(rep.condition3_pass) << "  norm "
        << format_double(rep.condition3_norm) << '\n';
    log << "phase-control contrast " << format_double(pc.contrast) << (pc.detected ? " (detected)" : "") << '\n';
}

void cmd_report(const fs::path& dir, std::ostream& log) {
    const json manifest = read_json_if(dir / "manifest.json");
    if (manifest.is_null() || manifest.is_discarded()) throw IOError("no readable manifest.json in " + dir.string());
    log << "run: " << manifest.value("command", "?") << "  config " << manifest.value("config_hash", "?")
        << "  seed " << manifest.value("seed", 0ULL) << '\n';
    if (manifest.contains("wall_time_s")) log << "wall time " << manifest["wall_time_s"].get<double>() << " s\n";
    if (manifest.contains("contrast")) log << "contrast " << manifest["contrast"].get<double>() << '\n';
    if (manifest.contains("grid_convergence") && !manifest["grid_convergence"].is_null())
        log << "grid convergence " << manifest["grid_convergence"].get<double>() << '\n';

    if (const json v = read_json_if(dir / "verdict.json"); v.is_object()) {
        log << "verdict " << v.value("quadrant", "?") << ": " << v.value("summary", "") << '\n';
        if (v.value("condition2_caveat", false)) log << "caveat: condition 2 violated\n";
    }
    if (const json c = read_json_if(dir / "conditions.json"); c.is_object()) {
        log << "conditions: 1 " << (c["condition1"].value("pass", false) ? "pass" : "FAIL") << ", 2 "
            << (c["condition2"].value("pass", false) ? "pass" : "FAIL") << ", 3 "
            << (c["condition3"].value("pass", false) ? "pass" : "FAIL") << '\n';
    }
    if (const json q = read_json_if(dir / "qrf_summary.json"); q.is_object()) {
        log << "qrf: " << q.value("violated_cells", 0) << " of " << q.value("cells", 0)
            << " cells violated, max deviation " << q.value("max_deviation", 0.0) << '\n';
    }
}

int run_command(std::string_view command, Scenario s, const RunOptions& opts, std::ostream& log,
                std::ostream& err) {
    try {
        apply_overrides(s, opts);
        if (command == "simulate") cmd_simulate(s, log);
        else if (command == "witness") cmd_witness(s, log);
        else if (command == "qrf") cmd_qrf(s, log);
        else if (command == "nogo") cmd_nogo(s, log);
        else {
            err << "unknown command '" << command << "'\n";
            return kExitUsage;
        }
        return kExitOk;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnknownBuilder& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "invalid scenario: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DimensionMismatch& e) {
        err << "invalid scenario: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MemoryCapExceeded& e) {
        err << "invalid scenario: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConditionViolated& e) {
        err << "method not applicable: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IOError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run_command(std::string_view command, const fs::path& config, const RunOptions& opts, std::ostream& log,
                std::ostream& err) {
    Scenario s;
    try {
        s = parse_scenario(config);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    return run_command(command, std::move(s), opts, log, err);
}

} // namespace wfpc
