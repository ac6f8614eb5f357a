#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pathparse/lattice.hpp"

namespace pathparse {

struct PhysicsConfig {
    double hbar = 1.0;
    double mass = 1.0;
};

void validate_physics(const PhysicsConfig& physics);

// C = sum cos(S/hbar), D = sum sin(S/hbar) over the whole ensemble.
struct EnsemblePhaseSums {
    double C = 0.0;
    double D = 0.0;
};

struct Path {
    std::vector<int> sites;
    std::optional<double> action;
};

// The complete path set between the two events. Immutable: evaluation
// returns a new ensemble with actions, phases and phase sums filled in.
class PathEnsemble {
public:
    // Hand-built ensemble from a list of actions; has no lattice and is
    // already evaluated under `physics`.
    static PathEnsemble from_actions(std::span<const double> actions,
                                     const PhysicsConfig& physics = {});

    const std::optional<SpacetimeLattice>& lattice() const noexcept { return lattice_; }
    std::span<const Path> paths() const noexcept { return paths_; }
    std::size_t size() const noexcept { return paths_.size(); }
    bool empty() const noexcept { return paths_.empty(); }
    bool evaluated() const noexcept { return evaluated_; }

    // The accessors below throw ValidationError("not_evaluated") before evaluation.
    const PhysicsConfig& physics() const;
    const EnsemblePhaseSums& phase_sums() const;
    std::span<const double> phases() const;  // S / hbar
    std::span<const double> cos_phases() const;
    std::span<const double> sin_phases() const;
    double total_probability() const;  // C^2 + D^2

private:
    friend PathEnsemble enumerate_paths(const SpacetimeLattice&, std::uint64_t);
    friend class EnsembleBuilder;
    PathEnsemble() = default;
    void require_evaluated() const;

    std::optional<SpacetimeLattice> lattice_;
    std::vector<Path> paths_;
    bool evaluated_ = false;
    PhysicsConfig physics_;
    EnsemblePhaseSums sums_;
    std::vector<double> phases_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

// Internal construction hook used by the action engine.
class EnsembleBuilder {
public:
    static PathEnsemble evaluated(const PathEnsemble& source, std::vector<double> actions,
                                  const PhysicsConfig& physics);
};

// Every unblocked path from start to end, ordered lexicographically by
// interior sites. Throws BudgetError if the path count exceeds budget.
PathEnsemble enumerate_paths(const SpacetimeLattice& lattice,
                             std::uint64_t budget = kDefaultPathBudget);

}  // namespace pathparse
