// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "oracles.hpp"
#include "pathparse/cli.hpp"
#include "pathparse/field.hpp"
#include "pathparse/parsing.hpp"
#include "pathparse/propagator.hpp"
#include "pathparse/scenario.hpp"

using namespace pathparse;
using oracle::kPi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s [%s] (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) / scale;
}

LatticeParams grid(int T, int M, int start, int end) {
    LatticeParams p;
    p.num_slices = T;
    p.num_sites = M;
    p.start_site = start;
    p.end_site = end;
    return p;
}

Outcome algebraic_identities() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 500;
        const auto e = oracle::ensemble_of(oracle::uniform_phases(rng, n));
        const double joint = joint_probability(e).joint;
        const double direct = pair_sum(e, PairSumRoute::direct);
        const double squared = pair_sum(e, PairSumRoute::squared_sums);
        worst = std::max({worst, rel_diff(joint, direct), rel_diff(joint, squared), rel_diff(direct, squared)});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-10 && secs < 5.0, "max relative gap " + fmt(worst) + ", " + fmt(secs) + "s"};
}

ActionFunctional functional_of(int kind, const SpacetimeLattice& lat, std::mt19937_64& rng) {
    auto u = [&] { return std::generate_canonical<double, 53>(rng); };
    switch (kind) {
        case 0: return FreeAction{};
        case 1: return HarmonicAction{0.25 + u()};
        case 2: {
            PotentialGrid g{std::vector<double>(lat.grid_size())};
            for (double& v : g.values) v = 2.0 * u() - 1.0;
            return g;
        }
        default: {
            OpticalIndex o{std::vector<double>(lat.grid_size()), 1.0 + u()};
            for (double& v : o.values) v = 1.0 + u();
            return o;
        }
    }
}

Outcome transfer_matrix() {
    std::mt19937_64 rng(2002);
    double worst = 0.0;
    int cases = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int T = 2; T <= 6; ++T) {
        for (int M = 1; M <= 9; ++M) {
            for (int kind = 0; kind < 4; ++kind) {
                const int start = static_cast<int>(rng() % M);
                auto lat = build_lattice(grid(T, M, start, 0));
                const ActionFunctional f = functional_of(kind, lat, rng);
                const auto amps = transfer_matrix_propagator(lat, f, {});
                for (int end = 0; end < M; ++end) {
                    const auto e = evaluate_ensemble(enumerate_paths(lat.with_end_site(end)), f, {});
                    const std::complex<double> path_sum(e.phase_sums().C, e.phase_sums().D);
                    worst = std::max(worst, std::abs(path_sum - amps[static_cast<std::size_t>(end)]));
                }
                ++cases;
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-12 && secs < 30.0,
            std::to_string(cases) + " cases, max entry gap " + fmt(worst) + ", " + fmt(secs) + "s"};
}

Outcome partition_conservation() {
    std::mt19937_64 rng(3003);
    int checked = 0, fine = 0;
    std::string why;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        // Half the ensembles carry quantized phases so nontrivial parsings exist.
        const auto phases = trial % 2 ? oracle::uniform_phases(rng, n)
                                      : oracle::quantized_phases(rng, n, 3 + static_cast<int>(rng() % 6));
        const auto e = oracle::ensemble_of(phases);
        for (Strategy s : {Strategy::exhaustive, Strategy::phase_binning, Strategy::annealing}) {
            SolverConfig c;
            c.strategy = s;
            c.seed = static_cast<std::uint64_t>(trial);
            c.annealing.move_budget = 4000;
            if (s == Strategy::exhaustive && n > c.max_paths_exhaustive) continue;
            const auto r = find_parsing(e, c);
            const Partition& p = r.partition;
            if (!p.strict_valid) continue;
            ++checked;
            if (p.sets.size() > 1) ++fine;
            double sum_f = 0.0;
            for (const auto& set : p.sets) {
                sum_f += set.probability;
                if (std::abs(set.residual) > p.epsilon_X) why = "residual above epsilon_X";
                if (set.probability < -1e-9) why = "negative set probability";
            }
            const double P = p.total_probability;
            if (std::abs(sum_f - P) > std::max(1e-8 * P, p.epsilon_X)) why = "sum of F differs from P";
            if (std::abs(P - e.total_probability()) > 1e-12 * std::max(1.0, P)) why = "P mismatch";
        }
    }
    return {why.empty() && checked > 0,
            std::to_string(checked) + " strict-valid partitions, " + std::to_string(fine) + " finer than trivial" +
                (why.empty() ? "" : ", " + why)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(4004);
    int contained = 0, eligible = 0, hits = 0;
    bool never_empty = true;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const auto e = oracle::ensemble_of(oracle::quantized_phases(rng, n, 4 + static_cast<int>(rng() % 5)));
        SolverConfig c;
        c.seed = static_cast<std::uint64_t>(trial);
        const auto valid = enumerate_all_parsings(e, c);
        if (valid.empty()) never_empty = false;
        const auto r = find_parsing(e, c);
        const bool in_list = std::any_of(valid.begin(), valid.end(),
                                         [&](const Partition& q) { return q.blocks() == r.partition.blocks(); });
        if (in_list) ++contained;
        const bool oracle_fine = std::any_of(valid.begin(), valid.end(), [](const Partition& q) { return q.sets.size() >= 2; });
        if (oracle_fine) {
            ++eligible;
            if (r.partition.sets.size() >= 2 && !r.trace.fell_back) ++hits;
        }
    }
    const double rate = eligible ? static_cast<double>(hits) / eligible : 1.0;
    return {contained == 25 && never_empty && rate >= 0.8,
            std::to_string(contained) + "/25 contained, fine parsing found in " + std::to_string(hits) + "/" +
                std::to_string(eligible) + " eligible cases"};
}

Outcome worked_case() {
    const auto e = oracle::ensemble_of({0.0, 0.0, kPi / 2});
    const double P = joint_probability(e).joint;
    const auto good = validate_partition({{0, 1}, {2}}, e, {});
    const auto bad = validate_partition({{0, 2}, {1}}, e, {});
    const bool pass = std::abs(P - 5.0) <= 1e-12 && good.strict_valid &&
                      std::abs(good.sets[0].probability - 4.0) <= 1e-12 &&
                      std::abs(good.sets[1].probability - 1.0) <= 1e-12 &&
                      good.max_abs_residual() <= 1e-12 && !bad.strict_valid &&
                      std::abs(bad.sets[0].residual - 1.0) <= 1e-12;
    return {pass, "P = " + fmt(P) + ", F = {" + fmt(good.sets[0].probability) + ", " +
                      fmt(good.sets[1].probability) + "}, bad residual " + fmt(bad.sets[0].residual)};
}

ScenarioConfig slit_config(ScenarioKind kind, int T, int M, int barrier, std::vector<int> slits, int start, int end) {
    ScenarioConfig c;
    c.kind = kind;
    c.lattice = grid(T, M, start, end);
    c.barrier_slice = barrier;
    c.slit_sites = std::move(slits);
    return c;
}

Outcome double_slit() {
    auto c = slit_config(ScenarioKind::double_slit, 5, 9, 2, {2, 6}, 4, 4);
    const auto on = run_double_slit(c);
    c.slit_phase_offsets = {0.0, kPi};
    const auto off = run_double_slit(c);
    const double ratio = on.double_slit->constructive_ratio;
    const double dark = off.double_slit->joint_both;
    return {std::abs(ratio - 4.0) <= 1e-9 && std::abs(dark) <= 1e-10,
            "ratio " + fmt(ratio) + ", pi-offset joint " + fmt(dark)};
}

Outcome triple_slit() {
    std::mt19937_64 rng(7007);
    double worst = 0.0;
    for (int g = 0; g < 10; ++g) {
        const int T = 3 + static_cast<int>(rng() % 4);
        const int M = 5 + static_cast<int>(rng() % 5);
        const int barrier = 1 + static_cast<int>(rng() % (T - 2));
        std::vector<int> sites(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) sites[static_cast<std::size_t>(i)] = i;
        std::shuffle(sites.begin(), sites.end(), rng);
        sites.resize(3);
        auto c = slit_config(ScenarioKind::triple_slit, T, M, barrier, sites, static_cast<int>(rng() % M),
                             static_cast<int>(rng() % M));
        c.functional = functional_of(static_cast<int>(rng() % 3), build_lattice(c.lattice), rng);
        const auto r = run_triple_slit(c);
        worst = std::max(worst, r.triple_slit->max_abs_parameter);
    }
    return {worst <= 1e-9, "max |Sorkin parameter| " + fmt(worst)};
}

Outcome reconstruction() {
    auto lat = build_lattice(grid(5, 6, 1, 4));
    const auto e = evaluate_ensemble(enumerate_paths(lat), HarmonicAction{0.7}, {});
    double singleton = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto set = make_path_set({i}, e);
        const auto fronts = phase_front_check(reconstruct_field(set, e), set, e);
        singleton = std::max({singleton, fronts.max_deviation, fronts.locus_max_deviation});
    }

    ScenarioConfig focus;
    focus.kind = ScenarioKind::focusing_index;
    focus.lattice = grid(3, 9, 4, 4);
    focus.focusing.boundary_index = 1.33;
    const auto fr = run_focusing_index(focus);
    const double coherence = fr.parsing_sets.at(0).field->coherence;
    const double anomaly = fr.parsing_sets.at(0).anomaly;

    ScenarioConfig fig;
    fig.lattice = grid(3, 7, 3, 3);
    const auto xr = run_free_exchange(fig);
    std::vector<int> locus;
    for (const auto& g : xr.parsing_sets) {
        for (int k : g.fronts->locus_slices) locus.push_back(k);
    }
    std::sort(locus.begin(), locus.end());
    locus.erase(std::unique(locus.begin(), locus.end()), locus.end());

    const bool pass = singleton == 0.0 && std::abs(coherence - 1.0) <= 1e-12 && std::abs(anomaly) <= 1e-12 &&
                      locus == std::vector<int>{1};
    std::string locus_text;
    for (int k : locus) locus_text += std::to_string(k) + " ";
    return {pass, "singleton deviation " + fmt(singleton) + ", focusing coherence 1-" + fmt(1.0 - coherence) +
                      ", three-slice locus slices { " + locus_text + "}"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

bool numerically_close(const nlohmann::json& a, const nlohmann::json& b) {
    if (a.is_number() && b.is_number()) {
        return std::abs(a.get<double>() - b.get<double>()) <= 1e-12 * std::max(1.0, std::abs(a.get<double>()));
    }
    if (a.type() != b.type() || a.size() != b.size()) return false;
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()) || !numerically_close(it.value(), b[it.key()])) return false;
        }
        return true;
    }
    if (a.is_array()) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!numerically_close(a[i], b[i])) return false;
        }
        return true;
    }
    return a == b;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("pathparse_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const nlohmann::json parse_cfg = {
        {"lattice", {{"num_slices", 5}, {"num_sites", 6}, {"start_site", 1}, {"end_site", 3}}},
        {"functional", {{"kind", "harmonic"}, {"omega", 0.5}}},
        {"solver", {{"strategy", "annealing"}, {"seed", 17}, {"annealing", {{"move_budget", 5000}}}}}};
    const nlohmann::json scen_cfg = {
        {"lattice", {{"num_slices", 4}, {"num_sites", 7}, {"start_site", 3}, {"end_site", 3}}},
        {"solver", {{"strategy", "annealing"}, {"seed", 5}}},
        {"scenario", {{"kind", "double_slit"}, {"barrier_slice", 1}, {"slit_sites", {2, 4}}}}};
    std::ofstream(root / "parse.json") << parse_cfg.dump();
    std::ofstream(root / "scen.json") << scen_cfg.dump();

    auto run = [&](const std::string& cmd, const std::string& cfg, const std::string& out, const std::string& threads) {
        std::ostringstream o, e;
        return run_cli({"pathparse", cmd, "--config", (root / cfg).string(), "--out", (root / out).string(),
                        "--threads", threads},
                       o, e);
    };
    int code = 0;
    for (std::string cmd : {"parse", "reconstruct", "scenario"}) {
        const std::string cfg = cmd == "scenario" ? "scen.json" : "parse.json";
        code |= run(cmd, cfg, cmd + "-a", "1");
        code |= run(cmd, cfg, cmd + "-b", "1");
        code |= run(cmd, cfg, cmd + "-c", "4");
    }
    if (code != 0) {
        fs::remove_all(root);
        return {false, "a CLI run failed"};
    }

    int files = 0;
    bool identical = true, close = true;
    for (std::string cmd : {"parse", "reconstruct", "scenario"}) {
        for (const auto& entry : fs::recursive_directory_iterator(root / (cmd + "-a"))) {
            if (!entry.is_regular_file()) continue;
            const fs::path rel = fs::relative(entry.path(), root / (cmd + "-a"));
            const std::string a = slurp(entry.path());
            const std::string b = slurp(root / (cmd + "-b") / rel);
            const std::string c = slurp(root / (cmd + "-c") / rel);
            ++files;
            if (a != b) identical = false;
            if (a != c) {
                if (entry.path().extension() == ".json") {
                    close = close && numerically_close(nlohmann::json::parse(a), nlohmann::json::parse(c));
                } else {
                    close = false;
                }
            }
        }
    }
    fs::remove_all(root);
    return {identical && close && files > 0,
            std::to_string(files) + " files compared; repeat runs " + (identical ? "byte-identical" : "DIFFER") +
                ", 1 vs 4 threads " + (close ? "agree" : "DIFFER")};
}

}  // namespace

int main() {
    report(1, "algebraic identity suite", algebraic_identities);
    report(2, "transfer-matrix oracle", transfer_matrix);
    report(3, "partition conservation", partition_conservation);
    report(4, "oracle equivalence", oracle_equivalence);
    report(5, "worked hand case", worked_case);
    report(6, "double slit", double_slit);
    report(7, "triple slit Sorkin parameter", triple_slit);
    report(8, "reconstruction", reconstruction);
    report(9, "determinism", determinism);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
