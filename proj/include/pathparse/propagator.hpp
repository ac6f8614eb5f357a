#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pathparse/action.hpp"
#include "pathparse/ensemble.hpp"

namespace pathparse {

struct ConditionalEntry {
    int site = 0;
    double position = 0.0;
    double joint = 0.0;
    double probability = 0.0;
};

struct ProbabilityReport {
    double joint = 0.0;
    std::complex<double> amplitude;
    double pair_sum = 0.0;
    std::size_t path_count = 0;
    std::vector<std::string> notes;
    // Filled only by conditional_distribution.
    std::vector<ConditionalEntry> conditional;
};

enum class PairSumRoute { automatic, direct, squared_sums };

inline constexpr std::size_t kDirectPairSumLimit = 200;

// |sum exp(iS/hbar)|^2 over the ensemble, plus the pair-sum value.
// An empty ensemble yields zero with a "severed" note.
ProbabilityReport joint_probability(const PathEnsemble& ensemble, unsigned threads = 1);

// Sum over ordered pairs (A, B) of cos((S_A - S_B)/hbar). `automatic` runs the
// direct double sum up to kDirectPairSumLimit paths and C^2 + D^2 beyond.
double pair_sum(const PathEnsemble& ensemble, PairSumRoute route = PairSumRoute::automatic,
                unsigned threads = 1);

struct PropagationOptions {
    std::uint64_t path_budget = kDefaultPathBudget;
    unsigned threads = 1;
};

// Joint probability for every unblocked final site, normalized by their sum.
// The returned top-level fields describe the lattice's own end site.
// Throws NormalizationError if every joint is zero.
ProbabilityReport conditional_distribution(const SpacetimeLattice& lattice,
                                           const ActionFunctional& functional,
                                           const PhysicsConfig& physics,
                                           const PropagationOptions& options = {});

// Joint probability per final site without normalizing (0 for blocked sites).
std::vector<double> final_site_joints(const SpacetimeLattice& lattice,
                                      const ActionFunctional& functional,
                                      const PhysicsConfig& physics,
                                      const PropagationOptions& options = {});

// Amplitude per final site from the slice-by-slice product of step kernels
// exp(i S_step / hbar). Independent of path enumeration.
std::vector<std::complex<double>> transfer_matrix_propagator(const SpacetimeLattice& lattice,
                                                             const ActionFunctional& functional,
                                                             const PhysicsConfig& physics);

}  // namespace pathparse
