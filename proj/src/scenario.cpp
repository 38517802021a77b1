#include "wfpc/scenario.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace wfpc {

using nlohmann::json;

namespace {

constexpr std::array kModelBuilders{"commuting", "noncommuting", "manifold"};
constexpr std::array kStateBuilders{"gibbs", "diagonal_product", "witness", "matrix_file"};
constexpr std::array kShapes{"gaussian", "zero"};
constexpr std::array kFamilyKinds{"constant", "linear", "chirp", "random"};
constexpr std::array kProtocols{"simulate", "witness", "qrf", "nogo"};
constexpr std::array kSchemes{"split", "midpoint"};
constexpr std::array kOperators{"dipole", "projector"};

template <std::size_t N>
bool one_of(const std::string& v, const std::array<const char*, N>& names) {
    return std::any_of(names.begin(), names.end(), [&](const char* n) { return v == n; });
}

template <std::size_t N>
std::string choices(const std::array<const char*, N>& names) {
    std::string s;
    for (const char* n : names) s += (s.empty() ? "" : "|") + std::string(n);
    return s;
}

// Typed accessors over one JSON object; records visited keys so that unknown
// keys (usually typos) can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) out = as_number(*v, key_path(key));
    }
    void number(const std::string& key, std::optional<double>& out) {
        if (const json* v = find(key)) out = as_number(*v, key_path(key));
    }
    void count(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) out = as_count(*v, key_path(key));
    }
    void flag(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw SchemaError(key_path(key), "expected boolean");
            out = v->get<bool>();
        }
    }
    void text(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw SchemaError(key_path(key), "expected string");
            out = v->get<std::string>();
        }
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            const auto p = key_path(key);
            if (!v->is_array()) throw SchemaError(p, "expected array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                out.push_back(as_number((*v)[i], p + "[" + std::to_string(i) + "]"));
        }
    }
    void counts(const std::string& key, std::vector<std::size_t>& out) {
        if (const json* v = find(key)) {
            const auto p = key_path(key);
            if (!v->is_array()) throw SchemaError(p, "expected array of non-negative integers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                out.push_back(as_count((*v)[i], p + "[" + std::to_string(i) + "]"));
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw SchemaError(key_path(it.key()), "unknown key");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw SchemaError(path, "expected number");
        return v.get<double>();
    }
    static std::size_t as_count(const json& v, const std::string& path) {
        if (v.is_number_unsigned()) return v.get<std::size_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
            throw SchemaError(path, "expected non-negative integer, got " + v.dump());
        }
        throw SchemaError(path, "expected non-negative integer");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <std::size_t N>
void require_choice(const std::string& v, const std::string& path, const std::array<const char*, N>& names) {
    if (!one_of(v, names)) throw SchemaError(path, "expected one of " + choices(names) + ", got '" + v + "'");
}

void require_positive(double v, const std::string& path) {
    if (!(v > 0.0)) throw SchemaError(path, "expected positive number");
}

ModelSpec parse_model(const json& j) {
    ModelSpec m;
    Section s(j, "model");
    s.text("builder", m.builder);
    s.number("omega_s", m.omega_s);
    s.numbers("omega_env", m.omega_env);
    s.number("g", m.g);
    s.count("system_cutoff", m.system_cutoff);
    s.counts("env_cutoffs", m.env_cutoffs);
    s.numbers("ground_energies", m.ground_energies);
    s.numbers("excited_energies", m.excited_energies);
    s.finish();

    if (!one_of(m.builder, kModelBuilders)) throw UnknownBuilder("model.builder", m.builder);
    for (std::size_t i = 0; i < m.env_cutoffs.size(); ++i)
        if (m.env_cutoffs[i] == 0)
            throw SchemaError("model.env_cutoffs[" + std::to_string(i) + "]", "cutoff must be at least 1");
    if (m.env_cutoffs.size() != m.omega_env.size())
        throw SchemaError("model.env_cutoffs", "need one cutoff per entry of model.omega_env");
    if (m.builder == "manifold") {
        if (m.ground_energies.empty()) throw SchemaError("model.ground_energies", "required for manifold builder");
        if (m.excited_energies.empty())
            throw SchemaError("model.excited_energies", "required for manifold builder");
    } else if (m.system_cutoff < 2) {
        throw SchemaError("model.system_cutoff", "oscillator system needs at least 2 levels");
    }
    return m;
}

StateSpec parse_state(const json& j) {
    StateSpec st;
    Section s(j, "state");
    s.text("builder", st.builder);
    s.number("beta", st.beta);
    s.numbers("system_weights", st.system_weights);
    s.numbers("env_weights", st.env_weights);
    s.flag("offdiag_in_rho", st.offdiag_in_rho);
    s.flag("offdiag_in_chi", st.offdiag_in_chi);
    s.number("ready_at", st.ready_at);
    s.text("path", st.path);
    s.finish();

    if (!one_of(st.builder, kStateBuilders)) throw UnknownBuilder("state.builder", st.builder);
    if (st.builder == "gibbs" && !(st.beta >= 0.0)) throw SchemaError("state.beta", "expected non-negative number");
    if (st.builder == "diagonal_product") {
        if (st.system_weights.empty()) throw SchemaError("state.system_weights", "required for diagonal_product");
        if (st.env_weights.empty()) throw SchemaError("state.env_weights", "required for diagonal_product");
    }
    if (st.builder == "matrix_file" && st.path.empty()) throw SchemaError("state.path", "required for matrix_file");
    return st;
}

FamilyGroup parse_group(const json& j, const std::string& path) {
    FamilyGroup g;
    Section s(j, path);
    s.text("kind", g.kind);
    s.numbers("values", g.values);
    s.count("count", g.count);
    s.finish();
    require_choice(g.kind, path + ".kind", kFamilyKinds);
    if (g.kind == "random") {
        if (g.count < 2) throw SchemaError(path + ".count", "random group needs at least two masks");
    } else if (g.values.size() < 2) {
        throw SchemaError(path + ".values", "expected at least two values");
    }
    return g;
}

PulseSpec parse_pulse(const json& j) {
    PulseSpec p;
    Section s(j, "pulse");
    s.text("shape", p.shape);
    s.number("omega0", p.omega0);
    s.number("sigma", p.sigma);
    s.count("bins", p.bins);
    s.number("span_sigmas", p.span_sigmas);
    s.number("weak_scale", p.weak_scale);
    s.number("delay", p.delay);
    s.number("chirp_center", p.chirp_center);
    if (const json* fam = s.find("family")) {
        if (!fam->is_array() || fam->empty())
            throw SchemaError("pulse.family", "expected non-empty array of groups");
        p.family.clear();
        for (std::size_t i = 0; i < fam->size(); ++i)
            p.family.push_back(parse_group((*fam)[i], "pulse.family[" + std::to_string(i) + "]"));
    }
    s.finish();

    require_choice(p.shape, "pulse.shape", kShapes);
    require_positive(p.sigma, "pulse.sigma");
    require_positive(p.span_sigmas, "pulse.span_sigmas");
    require_positive(p.weak_scale, "pulse.weak_scale");
    if (p.bins < 2) throw SchemaError("pulse.bins", "need at least 2 frequency bins");
    return p;
}

GridSpec parse_grid(const json& j) {
    GridSpec g;
    Section s(j, "grid");
    s.number("t0", g.t0);
    s.number("t1", g.t1);
    s.count("steps", g.steps);
    s.finish();
    if (!(g.t1 > g.t0)) throw SchemaError("grid.t1", "must exceed grid.t0");
    if (g.steps == 0) throw SchemaError("grid.steps", "must be positive");
    return g;
}

ProtocolSpec parse_protocol(const json& j) {
    ProtocolSpec p;
    Section s(j, "protocol");
    s.text("kind", p.kind);
    s.text("method", p.method);
    s.text("scheme", p.scheme);
    s.number("wfpc_threshold", p.wfpc_threshold);
    s.number("profile_threshold", p.profile_threshold);
    s.number("qrf_threshold", p.qrf_threshold);
    s.numbers("t1_grid", p.t1_grid);
    s.numbers("delta_grid", p.delta_grid);
    s.text("operator_a", p.operator_a);
    s.text("operator_b", p.operator_b);
    s.number("intermediate_t1", p.intermediate_t1);
    s.flag("verify_grid", p.verify_grid);
    s.finish();

    require_choice(p.kind, "protocol.kind", kProtocols);
    try {
        parse_method(p.method);
    } catch (const InvalidArgument&) {
        throw SchemaError("protocol.method", "expected exact|pert2, got '" + p.method + "'");
    }
    require_choice(p.scheme, "protocol.scheme", kSchemes);
    require_choice(p.operator_a, "protocol.operator_a", kOperators);
    require_choice(p.operator_b, "protocol.operator_b", kOperators);
    require_positive(p.wfpc_threshold, "protocol.wfpc_threshold");
    require_positive(p.profile_threshold, "protocol.profile_threshold");
    require_positive(p.qrf_threshold, "protocol.qrf_threshold");
    for (std::size_t i = 0; i < p.t1_grid.size(); ++i)
        if (!(p.t1_grid[i] >= 0.0))
            throw SchemaError("protocol.t1_grid[" + std::to_string(i) + "]", "expected non-negative time");
    for (std::size_t i = 0; i < p.delta_grid.size(); ++i)
        if (!(p.delta_grid[i] >= 0.0))
            throw SchemaError("protocol.delta_grid[" + std::to_string(i) + "]", "expected non-negative time");
    if (p.intermediate_t1 && !(*p.intermediate_t1 >= 0.0))
        throw SchemaError("protocol.intermediate_t1", "expected non-negative time");
    return p;
}

OutputSpec parse_output(const json& j) {
    OutputSpec o;
    Section s(j, "output");
    s.text("dir", o.dir);
    s.flag("export_states", o.export_states);
    s.flag("export_fields", o.export_fields);
    s.finish();
    return o;
}

bool needs_seed(const Scenario& s) {
    if (s.state.builder == "witness") return true;
    return std::any_of(s.pulse.family.begin(), s.pulse.family.end(),
                       [](const FamilyGroup& g) { return g.kind == "random"; });
}

} // namespace

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    Section root(j, "");
    if (const json* v = root.find("model")) sc.model = parse_model(*v);
    if (const json* v = root.find("state")) sc.state = parse_state(*v);
    if (const json* v = root.find("pulse")) sc.pulse = parse_pulse(*v);
    else sc.pulse = parse_pulse(json::object());
    if (const json* v = root.find("grid")) sc.grid = parse_grid(*v);
    if (const json* v = root.find("protocol")) sc.protocol = parse_protocol(*v);
    if (const json* v = root.find("output")) sc.output = parse_output(*v);
    if (const json* v = root.find("seed")) sc.seed = Section::as_count(*v, "seed");
    root.count("workers", sc.workers);
    root.finish();

    if (needs_seed(sc) && !sc.seed) throw SchemaError("seed", "required when the state or phase family is random");
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

json to_json(const Scenario& s) {
    json j;
    const auto& m = s.model;
    j["model"] = {{"builder", m.builder},         {"omega_s", m.omega_s},
                  {"omega_env", m.omega_env},     {"g", m.g},
                  {"system_cutoff", m.system_cutoff}, {"env_cutoffs", m.env_cutoffs},
                  {"ground_energies", m.ground_energies}, {"excited_energies", m.excited_energies}};

    const auto& st = s.state;
    j["state"] = {{"builder", st.builder},
                  {"beta", st.beta},
                  {"system_weights", st.system_weights},
                  {"env_weights", st.env_weights},
                  {"offdiag_in_rho", st.offdiag_in_rho},
                  {"offdiag_in_chi", st.offdiag_in_chi},
                  {"path", st.path}};
    if (st.ready_at) j["state"]["ready_at"] = *st.ready_at;

    const auto& p = s.pulse;
    json fam = json::array();
    for (const auto& g : p.family) fam.push_back({{"kind", g.kind}, {"values", g.values}, {"count", g.count}});
    j["pulse"] = {{"shape", p.shape},   {"omega0", p.omega0},         {"sigma", p.sigma},
                  {"bins", p.bins},     {"span_sigmas", p.span_sigmas}, {"weak_scale", p.weak_scale},
                  {"delay", p.delay},   {"family", fam}};
    if (p.chirp_center) j["pulse"]["chirp_center"] = *p.chirp_center;

    j["grid"] = {{"t0", s.grid.t0}, {"t1", s.grid.t1}, {"steps", s.grid.steps}};

    const auto& pr = s.protocol;
    j["protocol"] = {{"kind", pr.kind},
                     {"method", pr.method},
                     {"scheme", pr.scheme},
                     {"wfpc_threshold", pr.wfpc_threshold},
                     {"profile_threshold", pr.profile_threshold},
                     {"qrf_threshold", pr.qrf_threshold},
                     {"t1_grid", pr.t1_grid},
                     {"delta_grid", pr.delta_grid},
                     {"operator_a", pr.operator_a},
                     {"operator_b", pr.operator_b},
                     {"verify_grid", pr.verify_grid}};
    if (pr.intermediate_t1) j["protocol"]["intermediate_t1"] = *pr.intermediate_t1;

    j["output"] = {{"dir", s.output.dir},
                   {"export_states", s.output.export_states},
                   {"export_fields", s.output.export_fields}};
    if (s.seed) j["seed"] = *s.seed;
    j["workers"] = s.workers;
    return j;
}

std::string config_hash(const Scenario& s) {
    // Output location and worker count do not affect results.
    json j = to_json(s);
    j.erase("output");
    j.erase("workers");
    return hex64(fnv1a64(j.dump()));
}

SpaceLayout build_layout(const Scenario& s) {
    const auto& m = s.model;
    SpaceLayout layout = m.builder == "manifold"
                             ? SpaceLayout{m.ground_energies.size(), m.excited_energies.size(), m.env_cutoffs}
                             : SpaceLayout{1, m.system_cutoff - 1, m.env_cutoffs};
    layout.validate();
    return layout;
}

SystemModel build_model(const Scenario& s) {
    const auto& m = s.model;
    const SpaceLayout layout = build_layout(s);
    if (m.builder == "commuting") return build_h0_commuting(m.omega_s, m.omega_env, m.g, layout);
    if (m.builder == "noncommuting") return build_h0_noncommuting(m.omega_s, m.omega_env, m.g, layout);
    if (m.builder == "manifold")
        return build_h0_manifold(m.ground_energies, m.excited_energies, m.omega_env, m.g, layout);
    throw UnknownBuilder("model.builder", m.builder);
}

CorrelatedState build_state(const Scenario& s, const SystemModel& model) {
    const auto& st = s.state;
    const auto& layout = model.layout;
    auto built = [&]() -> CorrelatedState {
        if (st.builder == "gibbs") return gibbs_state(model, st.beta);
        if (st.builder == "diagonal_product") {
            if (st.system_weights.size() != layout.system_dim())
                throw SchemaError("state.system_weights", "expected " + std::to_string(layout.system_dim()) + " entries");
            if (st.env_weights.size() != layout.env_dim())
                throw SchemaError("state.env_weights", "expected " + std::to_string(layout.env_dim()) + " entries");
            return diagonal_product_state(st.system_weights, st.env_weights, layout);
        }
        if (st.builder == "witness") {
            if (!s.seed) throw SchemaError("seed", "required for the witness state builder");
            return build_witness_state(layout, {st.offdiag_in_rho, st.offdiag_in_chi}, *s.seed);
        }
        if (st.builder == "matrix_file") {
            MatrixFile mf = read_matrix(st.path);
            if (!(mf.layout == layout)) throw SchemaError("state.path", "matrix layout does not match the model");
            return make_state(std::move(mf.matrix), layout);
        }
        throw UnknownBuilder("state.builder", st.builder);
    }();
    if (st.ready_at) return free_evolve(model, built, -*st.ready_at);
    return built;
}

SpectralPulse build_base_pulse(const Scenario& s) {
    const auto& p = s.pulse;
    SpectralPulse base = gaussian_pulse(p.omega0, p.sigma, p.bins, p.span_sigmas, p.weak_scale, p.delay);
    if (p.shape == "zero") std::fill(base.amplitude.begin(), base.amplitude.end(), 0.0);
    return base;
}

std::vector<SpectralPulse> build_family(const Scenario& s) {
    const SpectralPulse base = build_base_pulse(s);
    const double center = s.pulse.chirp_center.value_or(s.pulse.omega0);
    std::vector<SpectralPulse> out;
    for (std::size_t i = 0; i < s.pulse.family.size(); ++i) {
        const auto& g = s.pulse.family[i];
        const std::uint64_t seed = s.seed.value_or(0) + i;
        for (auto& p : phase_family(base, parse_phase_kind(g.kind), g.values, g.count, seed, center))
            out.push_back(std::move(p));
    }
    return out;
}

TimeGrid build_grid(const Scenario& s) {
    TimeGrid g{s.grid.t0, s.grid.t1, s.grid.steps};
    g.validate();
    return g;
}

ComplexMatrix build_operator(const std::string& name, const SystemModel& model) {
    if (name == "dipole") return model.dipole;
    if (name == "projector") return model.proj_excited;
    throw SchemaError("protocol.operator", "unknown operator '" + name + "'");
}

} // namespace wfpc
