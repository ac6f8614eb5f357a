#include "pathparse/action.hpp"

#include <cmath>
#include <string>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"

namespace pathparse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double harmonic_potential(const HarmonicAction& h, const PhysicsConfig& physics,
                          const SpacetimeLattice& lattice, int site) {
    const double centre = 0.5 * (lattice.num_sites() - 1) * lattice.dx();
    const double x = lattice.position(site) - centre;
    return 0.5 * physics.mass * h.omega * h.omega * x * x;
}

void require_grid(const std::vector<double>& values, const SpacetimeLattice& lattice,
                  const char* what) {
    if (values.size() != lattice.grid_size()) {
        throw ValidationError("grid_size_mismatch",
                              std::string(what) + " grid has " + std::to_string(values.size()) +
                                  " values, lattice has " + std::to_string(lattice.grid_size()) +
                                  " sites");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ValidationError("non_finite_grid", std::string(what) + " grid has a non-finite value");
        }
    }
}

}  // namespace

std::string_view functional_kind(const ActionFunctional& functional) {
    return std::visit(overloaded{
                          [](const FreeAction&) { return std::string_view("free"); },
                          [](const HarmonicAction&) { return std::string_view("harmonic"); },
                          [](const PotentialGrid&) { return std::string_view("potential_grid"); },
                          [](const OpticalIndex&) { return std::string_view("optical_index"); },
                      },
                      functional);
}

void validate_functional(const ActionFunctional& functional, const SpacetimeLattice& lattice) {
    std::visit(overloaded{
                   [](const FreeAction&) {},
                   [](const HarmonicAction& h) {
                       if (!(h.omega >= 0.0) || !std::isfinite(h.omega)) {
                           throw ValidationError("negative_omega", "harmonic omega must be >= 0");
                       }
                   },
                   [&](const PotentialGrid& g) { require_grid(g.values, lattice, "potential"); },
                   [&](const OpticalIndex& o) {
                       require_grid(o.values, lattice, "optical index");
                       for (double n : o.values) {
                           if (n < 1.0) {
                               throw ValidationError("index_below_one",
                                                     "optical index values must be >= 1");
                           }
                       }
                       if (!(o.k0 > 0.0) || !std::isfinite(o.k0)) {
                           throw ValidationError("nonpositive_k0", "k0 must be positive");
                       }
                   },
               },
               functional);
}

double step_action(const ActionFunctional& functional, const PhysicsConfig& physics,
                   const SpacetimeLattice& lattice, int slice, int from, int to) {
    const double dt = lattice.dt();
    const double dx_step = (to - from) * lattice.dx();
    const double velocity = dx_step / dt;
    const double kinetic = 0.5 * physics.mass * velocity * velocity * dt;

    return std::visit(
        overloaded{
            [&](const FreeAction&) { return kinetic; },
            [&](const HarmonicAction& h) {
                const double v = 0.5 * (harmonic_potential(h, physics, lattice, from) +
                                        harmonic_potential(h, physics, lattice, to));
                return kinetic - v * dt;
            },
            [&](const PotentialGrid& g) {
                const double v = 0.5 * (g.values[lattice.flat_index(slice, from)] +
                                        g.values[lattice.flat_index(slice + 1, to)]);
                return kinetic - v * dt;
            },
            [&](const OpticalIndex& o) {
                const double n = 0.5 * (o.values[lattice.flat_index(slice, from)] +
                                        o.values[lattice.flat_index(slice + 1, to)]);
                const double length = std::hypot(dx_step, dt);
                return physics.hbar * o.k0 * n * length;
            },
        },
        functional);
}

double compute_action(const Path& path, const ActionFunctional& functional,
                      const PhysicsConfig& physics, const SpacetimeLattice& lattice) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < path.sites.size(); ++k) {
        s += step_action(functional, physics, lattice, static_cast<int>(k), path.sites[k],
                         path.sites[k + 1]);
    }
    return s;
}

PathEnsemble evaluate_ensemble(const PathEnsemble& ensemble, const ActionFunctional& functional,
                               const PhysicsConfig& physics, unsigned threads) {
    if (ensemble.evaluated()) {
        throw ValidationError("already_evaluated", "ensemble actions are already evaluated");
    }
    if (!ensemble.lattice()) {
        throw ValidationError("no_lattice", "ensemble has no lattice to evaluate actions on");
    }
    validate_physics(physics);
    const SpacetimeLattice& lattice = *ensemble.lattice();
    validate_functional(functional, lattice);

    const auto paths = ensemble.paths();
    std::vector<double> actions(paths.size());
    parallel_chunks(paths.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            actions[i] = compute_action(paths[i], functional, physics, lattice);
        }
    });
    return EnsembleBuilder::evaluated(ensemble, std::move(actions), physics);
}

PotentialGrid with_potential_patch(const ActionFunctional& functional,
                                   const SpacetimeLattice& lattice, const PhysicsConfig& physics,
                                   const std::vector<std::pair<SiteRef, double>>& patches) {
    PotentialGrid grid;
    grid.values.assign(lattice.grid_size(), 0.0);
    std::visit(overloaded{
                   [](const FreeAction&) {},
                   [&](const HarmonicAction& h) {
                       for (int k = 0; k < lattice.num_slices(); ++k) {
                           for (int x = 0; x < lattice.num_sites(); ++x) {
                               grid.values[lattice.flat_index(k, x)] =
                                   harmonic_potential(h, physics, lattice, x);
                           }
                       }
                   },
                   [&](const PotentialGrid& g) {
                       require_grid(g.values, lattice, "potential");
                       grid.values = g.values;
                   },
                   [](const OpticalIndex&) {
                       throw ValidationError("patch_on_optical",
                                             "potential patches need a massive-particle functional");
                   },
               },
               functional);
    for (const auto& [site, value] : patches) {
        if (site.slice < 0 || site.slice >= lattice.num_slices() || site.site < 0 ||
            site.site >= lattice.num_sites()) {
            throw ValidationError("patch_out_of_range", "potential patch outside the lattice");
        }
        grid.values[lattice.flat_index(site.slice, site.site)] += value;
    }
    return grid;
}

}  // namespace pathparse
