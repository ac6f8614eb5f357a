#include "pathparse/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pathparse/config.hpp"
#include "pathparse/error.hpp"
#include "pathparse/field.hpp"
#include "pathparse/report.hpp"

namespace pathparse {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string command;
    fs::path config_path;
    fs::path out_dir = "out";
    std::string format = "both";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<std::string> mode;
    std::optional<std::string> strategy;
    int verbosity = 0;
};

class Emitter {
public:
    Emitter(fs::path dir, const RunConfig& run, const ConfigDocument& doc)
        : dir_(std::move(dir)), run_(run), doc_(doc), hash_(hex64(config_hash(doc.effective))) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw ValidationError("output_unwritable", "cannot create output directory " + dir_.string());
        }
    }

    bool json_enabled() const { return run_.format != "csv"; }
    bool csv_enabled() const { return run_.format != "json"; }

    void report(const std::string& name, json body) {
        if (!json_enabled()) return;
        body["seed"] = doc_.solver.seed;
        body["config_hash"] = hash_;
        write(name, body.dump(2) + "\n");
    }

    void table(const std::string& name, const std::string& csv) {
        if (csv_enabled()) write(name, csv);
    }

    void manifest() {
        json m = {{"schema", "pathparse.manifest/1"},
                  {"tool_version", kToolVersion},
                  {"command", run_.command},
                  {"config_hash", hash_},
                  {"seed", doc_.solver.seed},
                  {"config", doc_.effective},
                  {"files", files_}};
        write("manifest.json", m.dump(2) + "\n");
    }

    const fs::path& dir() const { return dir_; }
    const std::string& hash() const { return hash_; }

private:
    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out) throw ValidationError("output_unwritable", "cannot write " + (dir_ / name).string());
        if (name != "manifest.json") files_.push_back(name);
    }

    fs::path dir_;
    const RunConfig& run_;
    const ConfigDocument& doc_;
    std::string hash_;
    std::vector<std::string> files_;
};

PathEnsemble build_ensemble(const ConfigDocument& doc, unsigned threads) {
    if (doc.explicit_actions) return PathEnsemble::from_actions(*doc.explicit_actions, doc.physics);
    const SpacetimeLattice lattice = build_lattice(*doc.lattice);
    return evaluate_ensemble(enumerate_paths(lattice, doc.path_budget), doc.functional, doc.physics,
                             threads);
}

SolverConfig solver_for(const ConfigDocument& doc, const RunConfig& run) {
    SolverConfig s = doc.solver;
    s.threads = run.threads;
    return s;
}

int cmd_propagate(const RunConfig& run, const ConfigDocument& doc, std::ostream& out) {
    Emitter emit(run.out_dir, run, doc);
    ProbabilityReport report;
    if (doc.explicit_actions) {
        report = joint_probability(build_ensemble(doc, run.threads), run.threads);
        report.notes.push_back("explicit actions: no lattice, no conditional distribution");
    } else {
        const SpacetimeLattice lattice = build_lattice(*doc.lattice);
        try {
            report = conditional_distribution(lattice, doc.functional, doc.physics,
                                              {doc.path_budget, run.threads});
        } catch (const NormalizationError& e) {
            report = joint_probability(build_ensemble(doc, run.threads), run.threads);
            report.notes.push_back(std::string("conditional distribution undefined: ") + e.what());
        }
    }
    emit.report("probability_report.json", to_json(report));
    if (!report.conditional.empty()) emit.table("conditional.csv", conditional_csv(report.conditional));
    emit.manifest();
    if (run.verbosity > 0) out << "joint probability " << format_double(report.joint) << "\n";
    return kExitOk;
}

json tolerance_block(const SolverConfig& solver, std::size_t n) {
    const Tolerances tol = resolve_tolerances(solver, n);
    return {{"epsilon_X", tol.epsilon_X}, {"epsilon_F", tol.epsilon_F}};
}

int cmd_parse(const RunConfig& run, const ConfigDocument& doc, std::ostream& out) {
    Emitter emit(run.out_dir, run, doc);
    const PathEnsemble ensemble = build_ensemble(doc, run.threads);
    const SolverConfig solver = solver_for(doc, run);
    const ParsingResult result = find_parsing(ensemble, solver);
    json body = to_json(result);
    body["schema"] = "pathparse.partition/1";
    body["path_count"] = ensemble.size();
    body["tolerances"] = tolerance_block(solver, ensemble.size());
    emit.report("partition_report.json", std::move(body));
    emit.manifest();
    if (run.verbosity > 0) {
        out << "parsing with " << result.partition.sets.size() << " sets ("
            << (result.finer_than_trivial ? "finer than trivial" : "trivial") << ")\n";
    }
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& run, const ConfigDocument& doc, std::ostream& out) {
    if (!doc.lattice) {
        throw ValidationError("no_lattice", "reconstruct needs a lattice config");
    }
    Emitter emit(run.out_dir, run, doc);
    const PathEnsemble ensemble = build_ensemble(doc, run.threads);
    const ParsingResult result = find_parsing(ensemble, solver_for(doc, run));
    json summary = {{"schema", "pathparse.reconstruction/1"}, {"parsing", to_json(result)}};
    json fields = json::array();
    for (std::size_t i = 0; i < result.partition.sets.size(); ++i) {
        const PathSet& set = result.partition.sets[i];
        const FieldHistory field = reconstruct_field(set, ensemble);
        const PhaseFrontReport fronts = phase_front_check(field, set, ensemble);
        json fj = to_json(field);
        fj["phase_fronts"] = to_json(fronts);
        emit.report("field_" + std::to_string(i) + ".json", std::move(fj));
        emit.table("field_" + std::to_string(i) + ".csv", field_csv(field, &fronts));
        fields.push_back({{"set", i}, {"coherence", field.coherence}, {"anomaly", field.anomaly}});
    }
    summary["fields"] = std::move(fields);
    emit.report("reconstruction_report.json", std::move(summary));
    emit.manifest();
    if (run.verbosity > 0) out << "reconstructed " << result.partition.sets.size() << " fields\n";
    return kExitOk;
}

int cmd_scenario(const RunConfig& run, const ConfigDocument& doc, std::ostream& out) {
    if (!doc.scenario) throw ValidationError("no_scenario", "config has no scenario section");
    ScenarioConfig config = *doc.scenario;
    config.solver = solver_for(doc, run);
    config.threads = run.threads;
    const std::string dir_name =
        std::string(to_string(config.kind)) + "-" + hex64(config_hash(doc.effective));
    Emitter emit(run.out_dir / dir_name, run, doc);

    const ScenarioReport report = run_scenario(config);
    emit.report("scenario_report.json", to_json(report));
    if (report.double_slit) emit.table("fringe.csv", fringe_csv(report.double_slit->fringe));
    if (report.triple_slit) emit.table("sorkin.csv", sorkin_csv(*report.triple_slit));
    for (const GroupReport& g : report.geometric_groups) {
        if (g.field) emit.table("field_group_" + g.label + ".csv", field_csv(*g.field, &*g.fronts));
    }
    for (const GroupReport& g : report.parsing_sets) {
        if (g.field) emit.table("field_" + g.label + ".csv", field_csv(*g.field, &*g.fronts));
    }
    emit.manifest();
    out << (emit.dir()).string() << "\n";
    return kExitOk;
}

int cmd_oracle(const RunConfig& run, const ConfigDocument& doc, std::ostream& out) {
    const PathEnsemble ensemble = build_ensemble(doc, run.threads);
    const SolverConfig solver = solver_for(doc, run);
    // Refuse before touching the output directory.
    const std::vector<Partition> valid = enumerate_all_parsings(ensemble, solver);
    Emitter emit(run.out_dir, run, doc);
    json parts = json::array();
    for (const Partition& p : valid) parts.push_back(to_json(p));
    emit.report("oracle_report.json",
                {{"schema", "pathparse.oracle/1"},
                 {"path_count", ensemble.size()},
                 {"partitions_enumerated", bell_number(static_cast<unsigned>(ensemble.size()))},
                 {"mode", to_string(solver.mode)},
                 {"tolerances", tolerance_block(solver, ensemble.size())},
                 {"valid_partitions", std::move(parts)}});
    emit.manifest();
    if (run.verbosity > 0) out << valid.size() << " valid partitions\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Path-ensemble parsing laboratory"};
    RunConfig run;
    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    std::string mode, strategy;
    app.add_option("command", run.command, "propagate | parse | reconstruct | scenario | oracle")
        ->required()
        ->check(CLI::IsMember({"propagate", "parse", "reconstruct", "scenario", "oracle"}));
    app.add_option("--config", config_path, "config document (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "solver seed (overrides the config)");
    app.add_option("--threads", run.threads, "worker thread cap")->check(CLI::PositiveNumber);
    app.add_option("--format", run.format, "json | csv | both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    auto* mode_opt = app.add_option("--mode", mode, "strict | relaxed")
                         ->check(CLI::IsMember({"strict", "relaxed"}));
    auto* strategy_opt = app.add_option("--strategy", strategy, "exhaustive | phase_binning | annealing")
                             ->check(CLI::IsMember({"exhaustive", "phase_binning", "annealing"}));
    app.add_flag("-v,--verbose", run.verbosity, "print a summary line");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    run.config_path = config_path;
    run.out_dir = out_dir;
    if (*seed_opt) run.seed = seed;
    if (*mode_opt) run.mode = mode;
    if (*strategy_opt) run.strategy = strategy;

    try {
        json document = read_json_file(run.config_path);
        if (!document.is_object()) throw ValidationError("malformed_config", "config must be a JSON object");
        // Overrides land in the effective config so the hash covers them.
        if (run.seed || run.mode || run.strategy) {
            json& solver = document["solver"];
            if (solver.is_null()) solver = json::object();
            if (run.seed) solver["seed"] = *run.seed;
            if (run.mode) solver["mode"] = *run.mode;
            if (run.strategy) solver["strategy"] = *run.strategy;
        }
        const ConfigDocument doc = parse_config(document);
        if (run.command == "propagate") return cmd_propagate(run, doc, out);
        if (run.command == "parse") return cmd_parse(run, doc, out);
        if (run.command == "reconstruct") return cmd_reconstruct(run, doc, out);
        if (run.command == "scenario") return cmd_scenario(run, doc, out);
        return cmd_oracle(run, doc, out);
    } catch (const NumericalIntegrityError& e) {
        err << "numerical integrity error [" << e.code() << "]: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NormalizationError& e) {
        err << "normalization error [" << e.code() << "]: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "validation error [" << e.code() << "]: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace pathparse
