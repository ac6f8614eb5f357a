#include "pathparse/ensemble.hpp"

#include <cmath>
#include <string>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"

namespace pathparse {

void validate_physics(const PhysicsConfig& physics) {
    if (!(physics.hbar > 0.0) || !std::isfinite(physics.hbar)) {
        throw ValidationError("nonpositive_hbar", "hbar must be finite and positive");
    }
    if (!(physics.mass > 0.0) || !std::isfinite(physics.mass)) {
        throw ValidationError("nonpositive_mass", "mass must be finite and positive");
    }
}

void PathEnsemble::require_evaluated() const {
    if (!evaluated_) {
        throw ValidationError("not_evaluated", "path actions have not been evaluated");
    }
}

const PhysicsConfig& PathEnsemble::physics() const {
    require_evaluated();
    return physics_;
}
const EnsemblePhaseSums& PathEnsemble::phase_sums() const {
    require_evaluated();
    return sums_;
}
std::span<const double> PathEnsemble::phases() const {
    require_evaluated();
    return phases_;
}
std::span<const double> PathEnsemble::cos_phases() const {
    require_evaluated();
    return cos_;
}
std::span<const double> PathEnsemble::sin_phases() const {
    require_evaluated();
    return sin_;
}
double PathEnsemble::total_probability() const {
    require_evaluated();
    return sums_.C * sums_.C + sums_.D * sums_.D;
}

PathEnsemble EnsembleBuilder::evaluated(const PathEnsemble& source, std::vector<double> actions,
                                        const PhysicsConfig& physics) {
    validate_physics(physics);
    PathEnsemble out;
    out.lattice_ = source.lattice_;
    out.paths_ = source.paths_;
    if (out.paths_.empty() && !out.lattice_) out.paths_.resize(actions.size());
    out.physics_ = physics;
    out.phases_.resize(actions.size());
    out.cos_.resize(actions.size());
    out.sin_.resize(actions.size());
    PhasorSum total;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!std::isfinite(actions[i])) {
            throw NumericalIntegrityError("non_finite_action",
                                          "action of path " + std::to_string(i) + " is not finite");
        }
        out.paths_[i].action = actions[i];
        const double phase = actions[i] / physics.hbar;
        out.phases_[i] = phase;
        out.cos_[i] = std::cos(phase);
        out.sin_[i] = std::sin(phase);
        total.add(out.cos_[i], out.sin_[i]);
    }
    out.sums_ = {total.real(), total.imag()};
    out.evaluated_ = true;
    return out;
}

PathEnsemble PathEnsemble::from_actions(std::span<const double> actions,
                                        const PhysicsConfig& physics) {
    return EnsembleBuilder::evaluated(PathEnsemble{},
                                      std::vector<double>(actions.begin(), actions.end()), physics);
}

PathEnsemble enumerate_paths(const SpacetimeLattice& lattice, std::uint64_t budget) {
    const std::uint64_t expected = path_count(lattice, budget);
    const int T = lattice.num_slices();

    PathEnsemble ens;
    ens.lattice_ = lattice;
    ens.paths_.reserve(static_cast<std::size_t>(expected));
    if (expected == 0) return ens;

    // Allowed sites per interior slice; the odometer runs over these in
    // ascending order with slice 1 most significant.
    std::vector<std::vector<int>> allowed(static_cast<std::size_t>(std::max(0, T - 2)));
    for (int k = 1; k < T - 1; ++k) {
        for (int x = 0; x < lattice.num_sites(); ++x) {
            if (!lattice.is_blocked(k, x)) allowed[static_cast<std::size_t>(k - 1)].push_back(x);
        }
    }
    std::vector<std::size_t> digit(allowed.size(), 0);
    while (true) {
        Path p;
        p.sites.resize(static_cast<std::size_t>(T));
        p.sites.front() = lattice.start_site();
        p.sites.back() = lattice.end_site();
        for (std::size_t k = 0; k < allowed.size(); ++k) p.sites[k + 1] = allowed[k][digit[k]];
        ens.paths_.push_back(std::move(p));

        std::size_t k = allowed.size();
        while (k > 0) {
            --k;
            if (++digit[k] < allowed[k].size()) break;
            digit[k] = 0;
            if (k == 0) return ens;
        }
        if (allowed.empty()) return ens;
    }
}

}  // namespace pathparse
