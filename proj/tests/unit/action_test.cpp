#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "checks.hpp"
#include "oracles.hpp"
#include "pathparse/action.hpp"
#include "pathparse/error.hpp"

using namespace pathparse;

namespace {

SpacetimeLattice make(int slices, int sites, int start, int end, double dt = 1.0, double dx = 1.0) {
    LatticeParams p;
    p.num_slices = slices;
    p.num_sites = sites;
    p.start_site = start;
    p.end_site = end;
    p.dt = dt;
    p.dx = dx;
    return build_lattice(p);
}

std::vector<double> actions_of(const PathEnsemble& e) {
    std::vector<double> out;
    for (const auto& p : e.paths()) out.push_back(*p.action);
    return out;
}

}  // namespace

TEST_CASE("free action of the three paths on a 3x3 grid") {
    const auto lattice = make(3, 3, 1, 1);
    const auto e = evaluate_ensemble(enumerate_paths(lattice), FreeAction{}, {});
    REQUIRE(e.size() == 3);
    // Paths through site 0, 1, 2: each detour costs two half-unit steps.
    CHECK(actions_of(e) == std::vector<double>{1.0, 0.0, 1.0});
}

TEST_CASE("kinetic term scales with mass, dx and dt") {
    const auto lattice = make(2, 4, 0, 3, 0.5, 2.0);
    PhysicsConfig phys{1.0, 3.0};
    // 0.5 * m * (6 / 0.5)^2 * 0.5
    CHECK(step_action(FreeAction{}, phys, lattice, 0, 0, 3) == doctest::Approx(108.0).epsilon(1e-15));
}

TEST_CASE("harmonic potential is centred on the grid") {
    const auto lattice = make(2, 5, 0, 4);
    const HarmonicAction h{2.0};
    // Staying at the centre costs nothing; one site off costs m w^2 x^2 / 2.
    CHECK(step_action(h, {}, lattice, 0, 2, 2) == 0.0);
    CHECK(step_action(h, {}, lattice, 0, 1, 1) == doctest::Approx(-2.0));
    CHECK(step_action(h, {}, lattice, 0, 3, 3) == step_action(h, {}, lattice, 0, 1, 1));
}

TEST_CASE("potential grid uses the endpoint average") {
    const auto lattice = make(2, 2, 0, 1);
    PotentialGrid g{{1.0, 2.0, 3.0, 5.0}};
    CHECK(step_action(g, {}, lattice, 0, 0, 1) == doctest::Approx(0.5 - 3.0));
}

TEST_CASE("optical index phase is k0 * n * length") {
    const auto lattice = make(2, 2, 0, 1, 1.0, 1.0);
    OpticalIndex o{{1.0, 1.0, 2.0, 2.0}, 3.0};
    PhysicsConfig phys{2.0, 1.0};
    CHECK(step_action(o, phys, lattice, 0, 0, 1) == doctest::Approx(2.0 * 3.0 * 1.5 * std::sqrt(2.0)));
}

TEST_CASE("functional validation") {
    const auto lattice = make(3, 2, 0, 0);
    const auto paths = enumerate_paths(lattice);
    CHECK_THROWS_CODE(evaluate_ensemble(paths, HarmonicAction{-1.0}, {}), ValidationError, "negative_omega");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, PotentialGrid{{1.0}}, {}), ValidationError,
                      "grid_size_mismatch");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, PotentialGrid{std::vector<double>(6, NAN)}, {}),
                      ValidationError, "non_finite_grid");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, OpticalIndex{std::vector<double>(6, 0.5), 1.0}, {}),
                      ValidationError, "index_below_one");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, OpticalIndex{std::vector<double>(6, 1.0), 0.0}, {}),
                      ValidationError, "nonpositive_k0");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, FreeAction{}, PhysicsConfig{0.0, 1.0}), ValidationError,
                      "nonpositive_hbar");
    CHECK_THROWS_CODE(evaluate_ensemble(paths, FreeAction{}, PhysicsConfig{1.0, -1.0}), ValidationError,
                      "nonpositive_mass");
    const auto done = evaluate_ensemble(paths, FreeAction{}, {});
    CHECK_THROWS_CODE(evaluate_ensemble(done, FreeAction{}, {}), ValidationError, "already_evaluated");
    CHECK_THROWS_CODE(enumerate_paths(lattice).phases(), ValidationError, "not_evaluated");
}

TEST_CASE("non-finite action is a numerical integrity failure") {
    const std::vector<double> bad{0.0, INFINITY};
    CHECK_THROWS_CODE(PathEnsemble::from_actions(bad), NumericalIntegrityError, "non_finite_action");
}

TEST_CASE("time reversal leaves the free and harmonic actions unchanged") {
    for (const ActionFunctional& f : {ActionFunctional{FreeAction{}}, ActionFunctional{HarmonicAction{0.7}}}) {
        const auto fwd_l = make(5, 4, 0, 3);
        const auto rev_l = make(5, 4, 3, 0);
        const auto fwd = evaluate_ensemble(enumerate_paths(fwd_l), f, {});
        const auto rev = evaluate_ensemble(enumerate_paths(rev_l), f, {});
        std::vector<double> a = actions_of(fwd), b;
        // Reverse each forward path and look up its action on the reversed lattice.
        for (const auto& p : fwd.paths()) {
            std::vector<int> r(p.sites.rbegin(), p.sites.rend());
            Path rp{r, std::nullopt};
            b.push_back(compute_action(rp, f, {}, rev_l));
        }
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
        CHECK(fwd.total_probability() == doctest::Approx(rev.total_probability()).epsilon(1e-12));
    }
}

TEST_CASE("a constant potential shift changes only the global phase") {
    const auto lattice = make(4, 5, 1, 3);
    PotentialGrid zero{std::vector<double>(lattice.grid_size(), 0.0)};
    PotentialGrid shifted{std::vector<double>(lattice.grid_size(), 0.37)};
    const auto a = evaluate_ensemble(enumerate_paths(lattice), zero, {});
    const auto b = evaluate_ensemble(enumerate_paths(lattice), shifted, {});
    const auto sa = actions_of(a), sb = actions_of(b);
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sb[i] - sa[i] == doctest::Approx(-0.37 * 3));
    CHECK(a.total_probability() == doctest::Approx(b.total_probability()).epsilon(1e-12));
}

TEST_CASE("mirror symmetry of the harmonic action") {
    const auto lattice = make(4, 5, 0, 1);
    const auto mirror = make(4, 5, 4, 3);
    const HarmonicAction h{0.9};
    const auto a = evaluate_ensemble(enumerate_paths(lattice), h, {});
    const auto b = evaluate_ensemble(enumerate_paths(mirror), h, {});
    CHECK(a.total_probability() == doctest::Approx(b.total_probability()).epsilon(1e-12));
}

TEST_CASE("potential patches add to the existing grid") {
    const auto lattice = make(3, 2, 0, 0);
    const auto g = with_potential_patch(FreeAction{}, lattice, {}, {{SiteRef{1, 1}, 2.5}});
    REQUIRE(g.values.size() == lattice.grid_size());
    CHECK(g.values[lattice.flat_index(1, 1)] == 2.5);
    CHECK(std::count(g.values.begin(), g.values.end(), 0.0) == 5);
    CHECK_THROWS_CODE(with_potential_patch(OpticalIndex{std::vector<double>(6, 1.0), 1.0}, lattice, {}, {}),
                      ValidationError, "patch_on_optical");
}

TEST_CASE("evaluation is independent of the thread count") {
    const auto lattice = make(6, 6, 0, 5);
    const auto a = evaluate_ensemble(enumerate_paths(lattice), HarmonicAction{0.3}, {}, 1);
    const auto b = evaluate_ensemble(enumerate_paths(lattice), HarmonicAction{0.3}, {}, 4);
    CHECK(a.phase_sums().C == b.phase_sums().C);
    CHECK(a.phase_sums().D == b.phase_sums().D);
}
