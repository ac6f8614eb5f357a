#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathparse/ensemble.hpp"

namespace pathparse {

enum class Classification { positive, null_set, invalid };
enum class ValidityMode { strict, relaxed };
enum class Strategy { exhaustive, phase_binning, annealing };

std::string_view to_string(Classification c);
std::string_view to_string(ValidityMode m);
std::string_view to_string(Strategy s);
std::optional<ValidityMode> parse_validity_mode(std::string_view text);
std::optional<Strategy> parse_strategy(std::string_view text);

// One set c_i of single paths. probability is |sum over members of
// exp(iS/hbar)|^2; residual is its cross-set interference with the rest of
// the ensemble.
struct PathSet {
    std::vector<std::size_t> members;  // ascending path indices
    double set_cos = 0.0;
    double set_sin = 0.0;
    double probability = 0.0;
    double residual = 0.0;
    Classification classification = Classification::positive;
};

struct Partition {
    std::vector<PathSet> sets;  // ordered by smallest member
    double total_probability = 0.0;
    double global_residual = 0.0;  // total_probability - sum of set probabilities
    ValidityMode mode = ValidityMode::strict;
    bool strict_valid = false;
    bool relaxed_valid = false;
    double epsilon_X = 0.0;
    double epsilon_F = 0.0;

    bool valid() const noexcept { return mode == ValidityMode::strict ? strict_valid : relaxed_valid; }
    double max_abs_residual() const noexcept;
    std::vector<std::vector<std::size_t>> blocks() const;
};

struct AnnealingConfig {
    double initial_temperature = 1.0;
    double cooling_rate = 0.9995;
    std::uint64_t move_budget = 20000;
    unsigned chains = 4;
};

struct SolverConfig {
    // Unset tolerances default to 1e-9 * n and 1e-9 * n^2.
    std::optional<double> epsilon_X;
    std::optional<double> epsilon_F;
    Strategy strategy = Strategy::phase_binning;
    std::size_t max_paths_exhaustive = 10;
    AnnealingConfig annealing;
    std::uint64_t seed = 0;
    ValidityMode mode = ValidityMode::strict;
    unsigned threads = 1;
};

struct Tolerances {
    double epsilon_X = 0.0;
    double epsilon_F = 0.0;
};

Tolerances resolve_tolerances(const SolverConfig& config, std::size_t n);
void validate_solver_config(const SolverConfig& config);

// Members need not be sorted; they are sorted and the set sums accumulated
// in path order (so the whole ensemble reproduces C and D bit for bit).
PathSet make_path_set(std::vector<std::size_t> members, const PathEnsemble& ensemble);

// sum_c cos * (C - sum_c cos) + sum_c sin * (D - sum_c sin).
double cross_interference(const PathSet& set, const PathEnsemble& ensemble);

// set_cos^2 + set_sin^2.
double set_probability(const PathSet& set);

// The same probability as the double sum of cos((S_A - S_B)/hbar) over
// member pairs. Throws ValidationError above kDirectPairSumLimit members.
double set_probability_pair_form(const PathSet& set, const PathEnsemble& ensemble);

// Fills set sums, probabilities, residuals, classifications and validity.
// Throws StructuralError (overlap, missing path, empty set, bad index) and
// NumericalIntegrityError (a set probability below -epsilon_F).
Partition validate_partition(const std::vector<std::vector<std::size_t>>& blocks,
                             const PathEnsemble& ensemble, const SolverConfig& config);

// True when `a` ranks ahead of `b`: more sets, then smaller largest
// residual, then lexicographically smaller set contents.
bool ranks_before(const Partition& a, const Partition& b);

// Bell number B(n) as a decimal string (exact).
std::string bell_number(unsigned n);

// Every set partition of the ensemble, validated; returns the valid ones
// (in config.mode) sorted by ranks_before. Throws BudgetError above
// config.max_paths_exhaustive, naming B(n).
std::vector<Partition> enumerate_all_parsings(const PathEnsemble& ensemble,
                                              const SolverConfig& config);

struct SolverTrace {
    Strategy strategy = Strategy::phase_binning;
    std::uint64_t moves_tried = 0;
    std::uint64_t moves_accepted = 0;
    std::uint64_t candidates_examined = 0;
    unsigned chains = 0;
    std::uint64_t selected_seed = 0;
    bool fell_back = false;
};

struct ParsingResult {
    Partition partition;
    SolverTrace trace;
    bool finer_than_trivial = false;
    // The trivial partition was returned and every path shares one phase.
    bool maximal_coherence = false;
};

// Always returns a valid partition; falls back to the single-set partition.
ParsingResult find_parsing(const PathEnsemble& ensemble, const SolverConfig& config);

}  // namespace pathparse
