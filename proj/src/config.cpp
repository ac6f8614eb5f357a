#include "pathparse/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "pathparse/error.hpp"

namespace pathparse {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& message) {
    throw ValidationError("malformed_config", message);
}

void allow_keys(const json& object, const char* where, std::initializer_list<const char*> keys) {
    if (!object.is_object()) malformed(std::string(where) + " must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : object.items()) {
        if (!allowed.count(key)) malformed("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& object, const char* key, T fallback) {
    if (!object.contains(key)) return fallback;
    try {
        return object.at(key).get<T>();
    } catch (const json::exception& e) {
        malformed(std::string("bad value for '") + key + "': " + e.what());
    }
}

// Accepts a flat row-major list or a list of per-slice rows.
std::vector<double> read_grid(const json& values) {
    std::vector<double> out;
    if (!values.is_array()) malformed("grid values must be an array");
    for (const json& v : values) {
        if (v.is_array()) {
            for (const json& x : v) out.push_back(x.get<double>());
        } else {
            out.push_back(v.get<double>());
        }
    }
    return out;
}

LatticeParams read_lattice(const json& j) {
    allow_keys(j, "lattice",
               {"num_slices", "num_sites", "dt", "dx", "start_site", "end_site", "blocked"});
    LatticeParams p;
    p.num_slices = get_or(j, "num_slices", p.num_slices);
    p.num_sites = get_or(j, "num_sites", p.num_sites);
    p.dt = get_or(j, "dt", p.dt);
    p.dx = get_or(j, "dx", p.dx);
    p.start_site = get_or(j, "start_site", p.start_site);
    p.end_site = get_or(j, "end_site", p.end_site);
    if (j.contains("blocked")) {
        for (const json& b : j.at("blocked")) {
            if (!b.is_array() || b.size() != 2) malformed("blocked entries are [slice, site] pairs");
            p.blocked.push_back({b[0].get<int>(), b[1].get<int>()});
        }
    }
    return p;
}

ActionFunctional read_functional(const json& j) {
    const std::string kind = get_or<std::string>(j, "kind", "free");
    if (kind == "free") {
        allow_keys(j, "functional", {"kind"});
        return FreeAction{};
    }
    if (kind == "harmonic") {
        allow_keys(j, "functional", {"kind", "omega"});
        return HarmonicAction{get_or(j, "omega", 0.0)};
    }
    if (kind == "potential_grid") {
        allow_keys(j, "functional", {"kind", "values"});
        if (!j.contains("values")) malformed("potential_grid needs values");
        return PotentialGrid{read_grid(j.at("values"))};
    }
    if (kind == "optical_index") {
        allow_keys(j, "functional", {"kind", "values", "k0"});
        if (!j.contains("values")) malformed("optical_index needs values");
        return OpticalIndex{read_grid(j.at("values")), get_or(j, "k0", 1.0)};
    }
    malformed("unknown functional kind '" + kind + "'");
}

SolverConfig read_solver(const json& j) {
    allow_keys(j, "solver",
               {"epsilon_X", "epsilon_F", "strategy", "max_paths_exhaustive", "seed", "mode",
                "annealing"});
    SolverConfig s;
    if (j.contains("epsilon_X")) s.epsilon_X = get_or(j, "epsilon_X", 0.0);
    if (j.contains("epsilon_F")) s.epsilon_F = get_or(j, "epsilon_F", 0.0);
    if (j.contains("strategy")) {
        const auto strategy = parse_strategy(get_or<std::string>(j, "strategy", ""));
        if (!strategy) malformed("unknown solver strategy");
        s.strategy = *strategy;
    }
    if (j.contains("mode")) {
        const auto mode = parse_validity_mode(get_or<std::string>(j, "mode", ""));
        if (!mode) malformed("unknown validity mode");
        s.mode = *mode;
    }
    s.max_paths_exhaustive = get_or<std::size_t>(j, "max_paths_exhaustive", s.max_paths_exhaustive);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    if (j.contains("annealing")) {
        const json& a = j.at("annealing");
        allow_keys(a, "solver.annealing",
                   {"initial_temperature", "cooling_rate", "move_budget", "chains"});
        s.annealing.initial_temperature = get_or(a, "initial_temperature", s.annealing.initial_temperature);
        s.annealing.cooling_rate = get_or(a, "cooling_rate", s.annealing.cooling_rate);
        s.annealing.move_budget = get_or<std::uint64_t>(a, "move_budget", s.annealing.move_budget);
        s.annealing.chains = get_or<unsigned>(a, "chains", s.annealing.chains);
    }
    validate_solver_config(s);
    return s;
}

ScenarioConfig read_scenario(const json& j, const ConfigDocument& doc) {
    allow_keys(j, "scenario",
               {"kind", "barrier_slice", "slit_sites", "closed_slits", "slit_phase_offsets",
                "target_site", "focusing"});
    ScenarioConfig c;
    const auto kind = parse_scenario_kind(get_or<std::string>(j, "kind", ""));
    if (!kind) malformed("unknown scenario kind");
    c.kind = *kind;
    if (!doc.lattice) malformed("scenarios need a lattice section");
    c.lattice = *doc.lattice;
    c.functional = doc.functional;
    c.physics = doc.physics;
    c.solver = doc.solver;
    c.path_budget = doc.path_budget;
    c.barrier_slice = get_or(j, "barrier_slice", c.barrier_slice);
    c.slit_sites = get_or(j, "slit_sites", c.slit_sites);
    c.closed_slits = get_or(j, "closed_slits", c.closed_slits);
    c.slit_phase_offsets = get_or(j, "slit_phase_offsets", c.slit_phase_offsets);
    if (j.contains("target_site")) c.target_site = get_or(j, "target_site", 0);
    if (j.contains("focusing")) {
        const json& f = j.at("focusing");
        allow_keys(f, "scenario.focusing", {"auto_lens", "k0", "boundary_index", "values"});
        c.focusing.auto_lens = get_or(f, "auto_lens", c.focusing.auto_lens);
        c.focusing.k0 = get_or(f, "k0", c.focusing.k0);
        c.focusing.boundary_index = get_or(f, "boundary_index", c.focusing.boundary_index);
        if (f.contains("values")) c.focusing.values = read_grid(f.at("values"));
    }
    return c;
}

}  // namespace

ConfigDocument parse_config(const json& document) {
    allow_keys(document, "config",
               {"lattice", "functional", "physics", "explicit_actions", "solver", "path_budget",
                "scenario"});
    ConfigDocument doc;
    doc.effective = document;
    try {
        if (document.contains("lattice")) doc.lattice = read_lattice(document.at("lattice"));
        if (document.contains("functional")) doc.functional = read_functional(document.at("functional"));
        if (document.contains("physics")) {
            const json& p = document.at("physics");
            allow_keys(p, "physics", {"hbar", "mass"});
            doc.physics.hbar = get_or(p, "hbar", doc.physics.hbar);
            doc.physics.mass = get_or(p, "mass", doc.physics.mass);
        }
        validate_physics(doc.physics);
        if (document.contains("explicit_actions")) {
            doc.explicit_actions = document.at("explicit_actions").get<std::vector<double>>();
        }
        if (document.contains("solver")) doc.solver = read_solver(document.at("solver"));
        doc.path_budget = get_or<std::uint64_t>(document, "path_budget", doc.path_budget);
        if (document.contains("scenario")) doc.scenario = read_scenario(document.at("scenario"), doc);
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    if (!doc.lattice && !doc.explicit_actions) {
        malformed("config needs a lattice section or explicit_actions");
    }
    return doc;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config_unreadable", "cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        malformed(std::string("config is not valid JSON: ") + e.what());
    }
}

std::uint64_t config_hash(const json& document) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : document.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace pathparse
