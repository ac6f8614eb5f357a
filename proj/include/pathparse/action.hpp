#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "pathparse/ensemble.hpp"
#include "pathparse/lattice.hpp"

namespace pathparse {

struct FreeAction {};

// V(x) = m * omega^2 * (x - x_c)^2 / 2, centred on the middle of the grid.
struct HarmonicAction {
    double omega = 0.0;
};

// Potential per (slice, site), row-major with num_sites columns.
struct PotentialGrid {
    std::vector<double> values;
};

// Refractive index per (slice, site), row-major; the phase of a step is
// k0 * mean index * step length in (x, c t) with c = 1.
struct OpticalIndex {
    std::vector<double> values;
    double k0 = 1.0;
};

using ActionFunctional = std::variant<FreeAction, HarmonicAction, PotentialGrid, OpticalIndex>;

std::string_view functional_kind(const ActionFunctional& functional);

// Throws ValidationError when a grid does not cover the lattice, omega < 0,
// an index is below 1 or k0 is not positive.
void validate_functional(const ActionFunctional& functional, const SpacetimeLattice& lattice);

// Action of the single step (slice, from) -> (slice + 1, to): forward-difference
// kinetic term minus the endpoint-averaged potential, times dt. Shared by the
// path sum and the transfer-matrix propagator.
double step_action(const ActionFunctional& functional, const PhysicsConfig& physics,
                   const SpacetimeLattice& lattice, int slice, int from, int to);

double compute_action(const Path& path, const ActionFunctional& functional,
                      const PhysicsConfig& physics, const SpacetimeLattice& lattice);

// Fills every path's action and the phase sums. Per-path work is split over
// `threads`; the reduction runs in path order so results do not depend on
// the thread count. Throws ValidationError("already_evaluated") on re-use.
PathEnsemble evaluate_ensemble(const PathEnsemble& ensemble, const ActionFunctional& functional,
                               const PhysicsConfig& physics, unsigned threads = 1);

// Adds `values` (row-major potential) on top of a free, harmonic or grid
// functional, returning a potential grid.
PotentialGrid with_potential_patch(const ActionFunctional& functional,
                                   const SpacetimeLattice& lattice, const PhysicsConfig& physics,
                                   const std::vector<std::pair<SiteRef, double>>& patches);

}  // namespace pathparse
