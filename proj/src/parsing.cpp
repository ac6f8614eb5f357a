#include "pathparse/parsing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"
#include "pathparse/propagator.hpp"

namespace pathparse {

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::positive: return "positive";
        case Classification::null_set: return "null";
        case Classification::invalid: return "invalid";
    }
    return "invalid";
}

std::string_view to_string(ValidityMode m) {
    return m == ValidityMode::strict ? "strict" : "relaxed";
}

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::exhaustive: return "exhaustive";
        case Strategy::phase_binning: return "phase_binning";
        case Strategy::annealing: return "annealing";
    }
    return "phase_binning";
}

std::optional<ValidityMode> parse_validity_mode(std::string_view text) {
    if (text == "strict") return ValidityMode::strict;
    if (text == "relaxed") return ValidityMode::relaxed;
    return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "exhaustive") return Strategy::exhaustive;
    if (text == "phase_binning") return Strategy::phase_binning;
    if (text == "annealing") return Strategy::annealing;
    return std::nullopt;
}

double Partition::max_abs_residual() const noexcept {
    double worst = 0.0;
    for (const PathSet& s : sets) worst = std::max(worst, std::abs(s.residual));
    return worst;
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(sets.size());
    for (const PathSet& s : sets) out.push_back(s.members);
    return out;
}

Tolerances resolve_tolerances(const SolverConfig& config, std::size_t n) {
    const double nn = static_cast<double>(std::max<std::size_t>(n, 1));
    return {config.epsilon_X.value_or(1e-9 * nn), config.epsilon_F.value_or(1e-9 * nn * nn)};
}

void validate_solver_config(const SolverConfig& config) {
    for (const auto& tol : {config.epsilon_X, config.epsilon_F}) {
        if (tol && !(*tol > 0.0)) {
            throw ValidationError("nonpositive_tolerance", "solver tolerances must be positive");
        }
    }
    const AnnealingConfig& a = config.annealing;
    if (!(a.initial_temperature > 0.0) || !(a.cooling_rate > 0.0 && a.cooling_rate <= 1.0) ||
        a.chains == 0) {
        throw ValidationError("bad_annealing_schedule",
                              "annealing needs temperature > 0, cooling rate in (0, 1], chains >= 1");
    }
}

PathSet make_path_set(std::vector<std::size_t> members, const PathEnsemble& ensemble) {
    std::sort(members.begin(), members.end());
    const auto cs = ensemble.cos_phases();
    const auto sn = ensemble.sin_phases();
    PhasorSum acc;
    for (std::size_t m : members) {
        if (m >= cs.size()) {
            throw StructuralError("index_out_of_range",
                                  "path index " + std::to_string(m) + " is not in the ensemble");
        }
        acc.add(cs[m], sn[m]);
    }
    PathSet set;
    set.members = std::move(members);
    set.set_cos = acc.real();
    set.set_sin = acc.imag();
    set.probability = set_probability(set);
    set.residual = cross_interference(set, ensemble);
    return set;
}

double cross_interference(const PathSet& set, const PathEnsemble& ensemble) {
    const EnsemblePhaseSums& total = ensemble.phase_sums();
    return set.set_cos * (total.C - set.set_cos) + set.set_sin * (total.D - set.set_sin);
}

double set_probability(const PathSet& set) {
    return set.set_cos * set.set_cos + set.set_sin * set.set_sin;
}

double set_probability_pair_form(const PathSet& set, const PathEnsemble& ensemble) {
    if (set.members.size() > kDirectPairSumLimit) {
        throw ValidationError("pair_form_too_large",
                              "pair-form probability is limited to " +
                                  std::to_string(kDirectPairSumLimit) + " members");
    }
    const auto phases = ensemble.phases();
    CompensatedSum acc;
    for (std::size_t a : set.members) {
        for (std::size_t b : set.members) acc.add(std::cos(phases[a] - phases[b]));
    }
    return acc.value();
}

Partition validate_partition(const std::vector<std::vector<std::size_t>>& blocks,
                             const PathEnsemble& ensemble, const SolverConfig& config) {
    const std::size_t n = ensemble.size();
    const Tolerances tol = resolve_tolerances(config, n);

    std::vector<char> seen(n, 0);
    for (const auto& block : blocks) {
        if (block.empty()) throw StructuralError("empty_set", "a partition set is empty");
        for (std::size_t m : block) {
            if (m >= n) {
                throw StructuralError("index_out_of_range",
                                      "path index " + std::to_string(m) + " is not in the ensemble");
            }
            if (seen[m]) {
                throw StructuralError("overlap",
                                      "path " + std::to_string(m) + " appears in more than one set");
            }
            seen[m] = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw StructuralError("not_a_cover", "path " + std::to_string(i) + " is in no set");
        }
    }

    Partition part;
    part.mode = config.mode;
    part.epsilon_X = tol.epsilon_X;
    part.epsilon_F = tol.epsilon_F;
    part.sets.reserve(blocks.size());
    for (const auto& block : blocks) part.sets.push_back(make_path_set(block, ensemble));
    std::sort(part.sets.begin(), part.sets.end(), [](const PathSet& a, const PathSet& b) {
        return a.members.front() < b.members.front();
    });

    part.total_probability = n == 0 ? 0.0 : ensemble.total_probability();
    CompensatedSum set_total;
    bool residuals_ok = true;
    for (PathSet& s : part.sets) {
        if (!std::isfinite(s.probability) || s.probability < -tol.epsilon_F) {
            throw NumericalIntegrityError("negative_set_probability",
                                          "set probability " + std::to_string(s.probability) +
                                              " is below -epsilon_F");
        }
        set_total.add(s.probability);
        const bool residual_ok = std::abs(s.residual) <= tol.epsilon_X;
        residuals_ok = residuals_ok && residual_ok;
        if (config.mode == ValidityMode::strict && !residual_ok) {
            s.classification = Classification::invalid;
        } else {
            s.classification = s.probability > tol.epsilon_F ? Classification::positive
                                                             : Classification::null_set;
        }
    }
    part.global_residual = part.total_probability - set_total.value();
    const double conservation = std::max(1e-8 * part.total_probability, tol.epsilon_X);
    part.strict_valid = residuals_ok && std::abs(part.global_residual) <= conservation;
    part.relaxed_valid = std::abs(part.global_residual) <= tol.epsilon_X;
    return part;
}

bool ranks_before(const Partition& a, const Partition& b) {
    if (a.sets.size() != b.sets.size()) return a.sets.size() > b.sets.size();
    const double ra = a.max_abs_residual();
    const double rb = b.max_abs_residual();
    if (ra != rb) return ra < rb;
    return std::lexicographical_compare(
        a.sets.begin(), a.sets.end(), b.sets.begin(), b.sets.end(),
        [](const PathSet& x, const PathSet& y) { return x.members < y.members; });
}

std::string bell_number(unsigned n) {
    using u128 = unsigned __int128;
    constexpr u128 kMax = ~u128{0};
    // Bell triangle: each row starts with the previous row's last entry.
    std::vector<u128> row{1};
    for (unsigned i = 1; i <= n; ++i) {
        std::vector<u128> next{row.back()};
        for (u128 v : row) {
            if (v > kMax - next.back()) return "more than 3.4e38";
            next.push_back(next.back() + v);
        }
        row = std::move(next);
    }
    u128 value = row.front();
    std::string digits;
    do {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    } while (value != 0);
    return {digits.rbegin(), digits.rend()};
}

std::vector<Partition> enumerate_all_parsings(const PathEnsemble& ensemble,
                                              const SolverConfig& config) {
    const std::size_t n = ensemble.size();
    if (n > config.max_paths_exhaustive) {
        throw BudgetError("exhaustive_over_budget",
                          "exhaustive parsing refused: n = " + std::to_string(n) +
                              " paths exceeds max_paths_exhaustive = " +
                              std::to_string(config.max_paths_exhaustive) + "; it would visit B(" +
                              std::to_string(n) + ") = " + bell_number(static_cast<unsigned>(n)) +
                              " partitions");
    }
    std::vector<Partition> valid;
    if (n == 0) {
        Partition empty = validate_partition({}, ensemble, config);
        valid.push_back(std::move(empty));
        return valid;
    }

    // Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i-1]).
    std::vector<std::size_t> label(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);
    std::vector<std::vector<std::size_t>> blocks;
    while (true) {
        const std::size_t k = prefix_max[n - 1] + 1;
        blocks.assign(k, {});
        for (std::size_t i = 0; i < n; ++i) blocks[label[i]].push_back(i);
        Partition p = validate_partition(blocks, ensemble, config);
        if (p.valid()) valid.push_back(std::move(p));

        std::size_t i = n - 1;
        while (i > 0 && label[i] > prefix_max[i - 1]) --i;
        if (i == 0) break;
        ++label[i];
        prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            label[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
    std::stable_sort(valid.begin(), valid.end(), ranks_before);
    return valid;
}

}  // namespace pathparse
