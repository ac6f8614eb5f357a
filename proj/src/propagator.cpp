#include "pathparse/propagator.hpp"

#include <cmath>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"

namespace pathparse {

ProbabilityReport joint_probability(const PathEnsemble& ensemble, unsigned threads) {
    ProbabilityReport report;
    report.path_count = ensemble.size();
    if (ensemble.empty()) {
        report.notes.push_back("severed: no path connects the two events");
        return report;
    }
    const EnsemblePhaseSums& sums = ensemble.phase_sums();
    report.amplitude = {sums.C, sums.D};
    report.joint = ensemble.total_probability();
    report.pair_sum = pair_sum(ensemble, PairSumRoute::automatic, threads);
    return report;
}

double pair_sum(const PathEnsemble& ensemble, PairSumRoute route, unsigned threads) {
    if (ensemble.empty()) return 0.0;
    const auto phases = ensemble.phases();
    const std::size_t n = phases.size();
    if (route == PairSumRoute::automatic) {
        route = n <= kDirectPairSumLimit ? PairSumRoute::direct : PairSumRoute::squared_sums;
    }
    if (route == PairSumRoute::squared_sums) return ensemble.total_probability();

    std::vector<double> rows(n);
    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t a = begin; a < end; ++a) {
            CompensatedSum row;
            for (std::size_t b = 0; b < n; ++b) row.add(std::cos(phases[a] - phases[b]));
            rows[a] = row.value();
        }
    });
    return compensated_total(rows);
}

std::vector<double> final_site_joints(const SpacetimeLattice& lattice,
                                      const ActionFunctional& functional,
                                      const PhysicsConfig& physics,
                                      const PropagationOptions& options) {
    std::vector<double> joints(static_cast<std::size_t>(lattice.num_sites()), 0.0);
    for (int site = 0; site < lattice.num_sites(); ++site) {
        if (lattice.is_blocked(lattice.last_slice(), site)) continue;
        const SpacetimeLattice target = lattice.with_end_site(site);
        const PathEnsemble ensemble = evaluate_ensemble(
            enumerate_paths(target, options.path_budget), functional, physics, options.threads);
        joints[static_cast<std::size_t>(site)] = ensemble.empty() ? 0.0 : ensemble.total_probability();
    }
    return joints;
}

ProbabilityReport conditional_distribution(const SpacetimeLattice& lattice,
                                           const ActionFunctional& functional,
                                           const PhysicsConfig& physics,
                                           const PropagationOptions& options) {
    ProbabilityReport report = joint_probability(
        evaluate_ensemble(enumerate_paths(lattice, options.path_budget), functional, physics,
                          options.threads),
        options.threads);

    const std::vector<double> joints = final_site_joints(lattice, functional, physics, options);
    const double total = compensated_total(joints);
    if (!(total > 0.0)) {
        throw NormalizationError("zero_normalization",
                                 "every final-site joint probability is zero; the conditional "
                                 "distribution is undefined");
    }
    for (int site = 0; site < lattice.num_sites(); ++site) {
        if (lattice.is_blocked(lattice.last_slice(), site)) continue;
        const double joint = joints[static_cast<std::size_t>(site)];
        report.conditional.push_back({site, lattice.position(site), joint, joint / total});
    }
    return report;
}

std::vector<std::complex<double>> transfer_matrix_propagator(const SpacetimeLattice& lattice,
                                                             const ActionFunctional& functional,
                                                             const PhysicsConfig& physics) {
    validate_physics(physics);
    validate_functional(functional, lattice);
    const int M = lattice.num_sites();
    const auto m = static_cast<std::size_t>(M);

    std::vector<std::complex<double>> psi(m, {0.0, 0.0});
    psi[static_cast<std::size_t>(lattice.start_site())] = {1.0, 0.0};
    for (int k = 0; k + 1 < lattice.num_slices(); ++k) {
        std::vector<std::complex<double>> next(m, {0.0, 0.0});
        for (int y = 0; y < M; ++y) {
            if (lattice.is_blocked(k + 1, y)) continue;
            // The last slice keeps every site reachable so the result covers
            // all candidate end sites, not just the lattice's own end site.
            PhasorSum acc;
            for (int x = 0; x < M; ++x) {
                const std::complex<double> amp = psi[static_cast<std::size_t>(x)];
                if (amp == std::complex<double>{0.0, 0.0}) continue;
                const double phase = step_action(functional, physics, lattice, k, x, y) / physics.hbar;
                const std::complex<double> term = amp * std::polar(1.0, phase);
                acc.add(term.real(), term.imag());
            }
            next[static_cast<std::size_t>(y)] = acc.value();
        }
        psi = std::move(next);
    }
    return psi;
}

}  // namespace pathparse
