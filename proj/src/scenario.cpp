#include "pathparse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"

namespace pathparse {

namespace {

PathEnsemble evaluated_ensemble(const SpacetimeLattice& lattice, const ActionFunctional& functional,
                                const ScenarioConfig& config) {
    return evaluate_ensemble(enumerate_paths(lattice, config.path_budget), functional,
                             config.physics, config.threads);
}

PropagationOptions propagation(const ScenarioConfig& config) {
    return {config.path_budget, config.threads};
}

GroupReport describe_set(std::string label, PathSet set, const PathEnsemble& ensemble) {
    GroupReport g;
    g.label = std::move(label);
    g.anomaly = anomaly_measure(set);
    if (ensemble.lattice()) {
        g.field = reconstruct_field(set, ensemble);
        g.fronts = phase_front_check(*g.field, set, ensemble);
    }
    g.set = std::move(set);
    return g;
}

void attach_parsing(ScenarioReport& report, const PathEnsemble& ensemble,
                    const ScenarioConfig& config) {
    SolverConfig solver = config.solver;
    solver.threads = config.threads;
    report.parsing = find_parsing(ensemble, solver);
    for (std::size_t i = 0; i < report.parsing.partition.sets.size(); ++i) {
        report.parsing_sets.push_back(
            describe_set("set-" + std::to_string(i), report.parsing.partition.sets[i], ensemble));
    }
}

void validate_slits(const ScenarioConfig& config, std::size_t expected) {
    if (config.slit_sites.size() != expected) {
        throw ValidationError("slit_count", std::string(to_string(config.kind)) + " needs exactly " +
                                                std::to_string(expected) + " slit sites");
    }
    if (config.barrier_slice < 1 || config.barrier_slice > config.lattice.num_slices - 2) {
        throw ValidationError("barrier_slice",
                              "barrier slice must be an interior slice of the lattice");
    }
    std::set<int> distinct;
    for (int s : config.slit_sites) {
        if (s < 0 || s >= config.lattice.num_sites) {
            throw ValidationError("slit_out_of_range", "slit site " + std::to_string(s) +
                                                           " is outside the lattice");
        }
        distinct.insert(s);
    }
    if (distinct.size() != config.slit_sites.size()) {
        throw ValidationError("duplicate_slit", "slit sites must be distinct");
    }
    for (int c : config.closed_slits) {
        if (c < 0 || static_cast<std::size_t>(c) >= config.slit_sites.size()) {
            throw ValidationError("closed_slit_index", "closed slit index out of range");
        }
    }
    if (!config.slit_phase_offsets.empty() && config.slit_phase_offsets.size() != expected) {
        throw ValidationError("slit_offsets", "need one phase offset per slit");
    }
}

// Offsets become potential patches on the slit sites: a path through the
// slit picks up -V*dt of action, i.e. a phase of +offset.
ActionFunctional slit_functional(const ScenarioConfig& config, const SpacetimeLattice& lattice) {
    const bool any = std::any_of(config.slit_phase_offsets.begin(), config.slit_phase_offsets.end(),
                                 [](double o) { return o != 0.0; });
    if (!any) return config.functional;
    std::vector<std::pair<SiteRef, double>> patches;
    for (std::size_t i = 0; i < config.slit_sites.size(); ++i) {
        const double v = -config.slit_phase_offsets[i] * config.physics.hbar / lattice.dt();
        patches.push_back({SiteRef{config.barrier_slice, config.slit_sites[i]}, v});
    }
    return with_potential_patch(config.functional, lattice, config.physics, patches);
}

int slit_of(const Path& path, const ScenarioConfig& config) {
    const int site = path.sites[static_cast<std::size_t>(config.barrier_slice)];
    const auto it = std::find(config.slit_sites.begin(), config.slit_sites.end(), site);
    return static_cast<int>(it - config.slit_sites.begin());
}

bool slit_pure(const Partition& p, const PathEnsemble& ensemble, const ScenarioConfig& config) {
    const auto paths = ensemble.paths();
    for (const PathSet& s : p.sets) {
        const int first = slit_of(paths[s.members.front()], config);
        for (std::size_t m : s.members) {
            if (slit_of(paths[m], config) != first) return false;
        }
    }
    return true;
}

SlitPurityReport slit_purity(const ScenarioConfig& config, const ActionFunctional& functional,
                             const PathEnsemble& target) {
    SlitPurityReport r;
    SolverConfig solver = config.solver;
    solver.mode = ValidityMode::strict;

    // One set per slit family at the far measurement.
    std::map<int, std::vector<std::size_t>> families;
    for (std::size_t i = 0; i < target.size(); ++i) families[slit_of(target.paths()[i], config)].push_back(i);
    if (families.size() >= 2) {
        std::vector<std::vector<std::size_t>> blocks;
        for (auto& [slit, members] : families) blocks.push_back(members);
        const Partition family = validate_partition(blocks, target, solver);
        r.far_slit_family_residual = family.max_abs_residual();
        r.far_slit_family_valid = family.strict_valid;
    }

    // Near measurement: final slice directly after the barrier.
    LatticeParams near = config.lattice;
    near.num_slices = config.barrier_slice + 2;
    std::erase_if(near.blocked, [&](const SiteRef& b) { return b.slice >= near.num_slices; });
    const SpacetimeLattice barrier_lat = slit_lattice(config, {0, 1});
    for (const SiteRef& b : barrier_lat.blocked_sites()) {
        if (b.slice == config.barrier_slice) near.blocked.push_back(b);
    }
    std::vector<PathEnsemble> near_ensembles;
    for (int e = 0; e < near.num_sites; ++e) {
        LatticeParams p = near;
        p.end_site = e;
        const bool blocked_end = std::any_of(p.blocked.begin(), p.blocked.end(), [&](const SiteRef& b) {
            return b.slice == p.num_slices - 1 && b.site == e;
        });
        if (blocked_end) continue;
        const SpacetimeLattice lat = build_lattice(p);
        const ActionFunctional near_functional = [&]() -> ActionFunctional {
            // Grids are cropped to the shorter lattice.
            return std::visit(
                [&](const auto& f) -> ActionFunctional {
                    using F = std::decay_t<decltype(f)>;
                    if constexpr (std::is_same_v<F, PotentialGrid> || std::is_same_v<F, OpticalIndex>) {
                        F copy = f;
                        copy.values.resize(lat.grid_size());
                        return copy;
                    } else {
                        return f;
                    }
                },
                functional);
        }();
        near_ensembles.push_back(evaluated_ensemble(lat, near_functional, config));
    }

    const std::size_t budget = config.solver.max_paths_exhaustive;
    const bool near_ok = std::all_of(near_ensembles.begin(), near_ensembles.end(),
                                     [&](const PathEnsemble& e) { return e.size() <= budget; });
    if (!near_ok || target.size() > budget) {
        r.note = "ensembles exceed max_paths_exhaustive; exhaustive slit-purity check skipped";
        return r;
    }
    r.evaluated = true;
    r.near_ensembles = near_ensembles.size();
    for (const PathEnsemble& e : near_ensembles) {
        if (e.empty()) continue;
        for (const Partition& p : enumerate_all_parsings(e, solver)) {
            if (p.sets.size() < 2) continue;
            ++r.near_fine_partitions;
            if (!slit_pure(p, e, config)) r.near_all_slit_pure = false;
        }
    }
    if (!target.empty()) {
        const std::vector<Partition> far = enumerate_all_parsings(target, solver);
        r.far_valid_partitions = far.size();
        for (const Partition& p : far) {
            if (p.sets.size() < 2) continue;
            ++r.far_fine_partitions;
            if (slit_pure(p, target, config)) r.far_slit_pure_fine_exists = true;
        }
    }
    return r;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::free_exchange: return "free_exchange";
        case ScenarioKind::double_slit: return "double_slit";
        case ScenarioKind::triple_slit: return "triple_slit";
        case ScenarioKind::focusing_index: return "focusing_index";
    }
    return "free_exchange";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
    for (ScenarioKind k : {ScenarioKind::free_exchange, ScenarioKind::double_slit,
                           ScenarioKind::triple_slit, ScenarioKind::focusing_index}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

int kink_count(const Path& path) {
    int kinks = 0;
    for (std::size_t k = 1; k + 1 < path.sites.size(); ++k) {
        if (path.sites[k] - path.sites[k - 1] != path.sites[k + 1] - path.sites[k]) ++kinks;
    }
    return kinks;
}

std::string kink_family(int kinks) {
    return kinks >= 3 ? "many-kink" : std::to_string(kinks) + "-kink";
}

OpticalIndex focusing_lens(const SpacetimeLattice& lattice, const FocusingProfile& profile) {
    if (!profile.auto_lens) return OpticalIndex{profile.values, profile.k0};
    if (lattice.num_slices() != 3) {
        throw ValidationError("lens_needs_three_slices",
                              "the automatic focusing lens is defined for 3-slice lattices");
    }
    if (profile.boundary_index < 1.0) {
        throw ValidationError("index_below_one", "boundary index must be >= 1");
    }
    const double nb = profile.boundary_index;
    auto half_length = [&](int j) {
        const double a = std::hypot((j - lattice.start_site()) * lattice.dx(), lattice.dt());
        const double b = std::hypot((lattice.end_site() - j) * lattice.dx(), lattice.dt());
        return 0.5 * (a + b);
    };
    double target = 0.0;
    for (int j = 0; j < lattice.num_sites(); ++j) target = std::max(target, half_length(j) * (nb + 1.0));
    OpticalIndex lens;
    lens.k0 = profile.k0;
    lens.values.assign(lattice.grid_size(), nb);
    for (int j = 0; j < lattice.num_sites(); ++j) {
        lens.values[lattice.flat_index(1, j)] = std::max(1.0, target / half_length(j) - nb);
    }
    return lens;
}

SpacetimeLattice slit_lattice(const ScenarioConfig& config, const std::vector<int>& open) {
    LatticeParams p = config.lattice;
    for (int x = 0; x < p.num_sites; ++x) {
        bool is_open = false;
        for (int i : open) {
            const bool closed = std::find(config.closed_slits.begin(), config.closed_slits.end(), i) !=
                                config.closed_slits.end();
            if (!closed && config.slit_sites[static_cast<std::size_t>(i)] == x) is_open = true;
        }
        if (!is_open) p.blocked.push_back({config.barrier_slice, x});
    }
    return build_lattice(p);
}

ScenarioReport run_free_exchange(const ScenarioConfig& config) {
    const SpacetimeLattice lattice = build_lattice(config.lattice);
    if (!lattice.blocked_sites().empty()) {
        throw ValidationError("barriers_present", "free exchange runs on a barrier-free lattice");
    }
    if (!std::holds_alternative<FreeAction>(config.functional) &&
        !std::holds_alternative<OpticalIndex>(config.functional)) {
        throw ValidationError("functional_kind", "free exchange needs a free or optical functional");
    }
    ScenarioReport report;
    report.kind = config.kind;
    report.target_site = lattice.end_site();
    const PathEnsemble ensemble = evaluated_ensemble(lattice, config.functional, config);
    report.probability = joint_probability(ensemble, config.threads);
    if (ensemble.empty()) return report;

    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        groups[std::min(kink_count(ensemble.paths()[i]), 3)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> blocks;
    for (auto& [kinks, members] : groups) {
        blocks.push_back(members);
        report.geometric_groups.push_back(
            describe_set(kink_family(kinks), make_path_set(members, ensemble), ensemble));
    }
    SolverConfig strict = config.solver;
    strict.mode = ValidityMode::strict;
    report.geometric_partition = validate_partition(blocks, ensemble, strict);
    if (!report.geometric_partition->strict_valid) {
        report.notes.push_back("kink-signature grouping violates the cross-set interference condition");
    }
    attach_parsing(report, ensemble, config);
    return report;
}

ScenarioReport run_focusing_index(const ScenarioConfig& config) {
    ScenarioConfig lens_config = config;
    const SpacetimeLattice lattice = build_lattice(config.lattice);
    lens_config.functional = focusing_lens(lattice, config.focusing);
    ScenarioReport report = run_free_exchange(lens_config);
    report.kind = ScenarioKind::focusing_index;
    report.notes.push_back("optical-phase model: S/hbar = k0 * optical path length");
    return report;
}

ScenarioReport run_double_slit(const ScenarioConfig& config) {
    validate_slits(config, 2);
    const SpacetimeLattice lattice = slit_lattice(config, {0, 1});
    const ActionFunctional functional = slit_functional(config, lattice);

    ScenarioReport report;
    report.kind = ScenarioKind::double_slit;
    report.target_site = config.target_site.value_or(lattice.end_site());
    const PathEnsemble target = evaluated_ensemble(lattice.with_end_site(report.target_site), functional, config);
    report.probability = joint_probability(target, config.threads);

    DoubleSlitMetrics m;
    m.target_site = report.target_site;
    m.joint_both = report.probability.joint;
    try {
        m.fringe = conditional_distribution(lattice, functional, config.physics, propagation(config))
                       .conditional;
    } catch (const NormalizationError& e) {
        report.notes.push_back(std::string("fringe: ") + e.what());
    }
    const SpacetimeLattice one = slit_lattice(config, {0}).with_end_site(report.target_site);
    const PathEnsemble single = evaluated_ensemble(one, functional, config);
    m.joint_single = single.empty() ? 0.0 : single.total_probability();
    if (m.joint_single > 0.0) {
        m.constructive_ratio = m.joint_both / m.joint_single;
    } else {
        m.constructive_ratio = std::numeric_limits<double>::quiet_NaN();
        report.notes.push_back("single-slit joint probability is zero; ratio undefined");
    }
    m.purity = slit_purity(config, functional, target);
    if (!m.purity.note.empty()) report.notes.push_back(m.purity.note);
    report.double_slit = std::move(m);
    attach_parsing(report, target, config);
    return report;
}

ScenarioReport run_triple_slit(const ScenarioConfig& config) {
    validate_slits(config, 3);
    const SpacetimeLattice all_open = slit_lattice(config, {0, 1, 2});
    const ActionFunctional functional = slit_functional(config, all_open);

    // Bit i of a mask opens slit i; order gives I1, I2, I3, I12, I13, I23, I123.
    constexpr std::array<int, 7> masks = {1, 2, 4, 3, 5, 6, 7};
    std::array<std::vector<double>, 7> joints;
    for (std::size_t c = 0; c < masks.size(); ++c) {
        std::vector<int> open;
        for (int i = 0; i < 3; ++i) {
            if (masks[c] >> i & 1) open.push_back(i);
        }
        joints[c] = final_site_joints(slit_lattice(config, open), functional, config.physics,
                                      propagation(config));
    }

    TripleSlitMetrics t;
    for (int site = 0; site < all_open.num_sites(); ++site) {
        if (all_open.is_blocked(all_open.last_slice(), site)) continue;
        SorkinRow row;
        row.site = site;
        row.position = all_open.position(site);
        for (std::size_t c = 0; c < 7; ++c) row.intensities[c] = joints[c][static_cast<std::size_t>(site)];
        const auto& I = row.intensities;
        CompensatedSum s;
        s.add(I[6]).add(-I[3]).add(-I[4]).add(-I[5]).add(I[0]).add(I[1]).add(I[2]);
        row.parameter = s.value();
        t.max_abs_parameter = std::max(t.max_abs_parameter, std::abs(row.parameter));
        t.rows.push_back(row);
    }

    ScenarioReport report;
    report.kind = ScenarioKind::triple_slit;
    report.target_site = config.target_site.value_or(all_open.end_site());
    const PathEnsemble target = evaluated_ensemble(all_open.with_end_site(report.target_site), functional, config);
    report.probability = joint_probability(target, config.threads);
    report.triple_slit = std::move(t);
    attach_parsing(report, target, config);
    return report;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
    switch (config.kind) {
        case ScenarioKind::free_exchange: return run_free_exchange(config);
        case ScenarioKind::double_slit: return run_double_slit(config);
        case ScenarioKind::triple_slit: return run_triple_slit(config);
        case ScenarioKind::focusing_index: return run_focusing_index(config);
    }
    return run_free_exchange(config);
}

}  // namespace pathparse
