#include <doctest.h>

#include <cmath>

#include "checks.hpp"
#include "oracles.hpp"
#include "pathparse/error.hpp"
#include "pathparse/scenario.hpp"

using namespace pathparse;

namespace {

ScenarioConfig double_slit(int slices, int sites, int barrier, std::vector<int> slits, int end) {
    ScenarioConfig c;
    c.kind = ScenarioKind::double_slit;
    c.lattice.num_slices = slices;
    c.lattice.num_sites = sites;
    c.lattice.start_site = end;
    c.lattice.end_site = end;
    c.barrier_slice = barrier;
    c.slit_sites = std::move(slits);
    return c;
}

}  // namespace

TEST_CASE("kink counting") {
    CHECK(kink_count(Path{{0, 0, 0, 0}, {}}) == 0);
    CHECK(kink_count(Path{{0, 1, 2, 3}, {}}) == 0);
    CHECK(kink_count(Path{{0, 1, 1, 1}, {}}) == 1);
    CHECK(kink_count(Path{{0, 2, 0, 2}, {}}) == 2);
    CHECK(kink_family(5) == "many-kink");
}

TEST_CASE("symmetric double slit doubles the amplitude on axis") {
    auto c = double_slit(3, 5, 1, {1, 3}, 2);
    const auto r = run_double_slit(c);
    REQUIRE(r.double_slit);
    CHECK(r.double_slit->constructive_ratio == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.parsing.partition.strict_valid);
}

TEST_CASE("pi offset cancels the on-axis joint") {
    auto c = double_slit(3, 5, 1, {1, 3}, 2);
    c.slit_phase_offsets = {0.0, oracle::kPi};
    const auto r = run_double_slit(c);
    CHECK(std::abs(r.double_slit->joint_both) <= 1e-10);
    CHECK(r.double_slit->joint_single > 0.5);
}

TEST_CASE("fringe is symmetric and normalized") {
    auto c = double_slit(4, 7, 1, {2, 4}, 3);
    const auto r = run_double_slit(c);
    const auto& fringe = r.double_slit->fringe;
    REQUIRE(fringe.size() == 7);
    double total = 0.0;
    for (const auto& f : fringe) total += f.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    for (int s = 0; s < 3; ++s) CHECK(fringe[s].probability == doctest::Approx(fringe[6 - s].probability).epsilon(1e-10));
}

TEST_CASE("near measurement after a two-path barrier is slit-pure") {
    auto c = double_slit(3, 5, 1, {1, 3}, 2);
    const auto r = run_double_slit(c);
    const auto& purity = r.double_slit->purity;
    CHECK(purity.evaluated);
    CHECK(purity.near_all_slit_pure);
    CHECK(purity.far_valid_partitions >= 1);
}

TEST_CASE("slit validation") {
    auto c = double_slit(3, 5, 1, {1}, 2);
    CHECK_THROWS_CODE(run_double_slit(c), ValidationError, "slit_count");
    c = double_slit(3, 5, 2, {1, 3}, 2);
    CHECK_THROWS_CODE(run_double_slit(c), ValidationError, "barrier_slice");
    c = double_slit(3, 5, 1, {1, 9}, 2);
    CHECK_THROWS_CODE(run_double_slit(c), ValidationError, "slit_out_of_range");
    c = double_slit(3, 5, 1, {1, 1}, 2);
    CHECK_THROWS_CODE(run_double_slit(c), ValidationError, "duplicate_slit");
}

TEST_CASE("triple slit Sorkin parameter vanishes") {
    ScenarioConfig c;
    c.kind = ScenarioKind::triple_slit;
    c.lattice.num_slices = 4;
    c.lattice.num_sites = 7;
    c.lattice.start_site = 3;
    c.lattice.end_site = 3;
    c.barrier_slice = 1;
    c.slit_sites = {1, 3, 5};
    c.functional = HarmonicAction{0.4};
    const auto r = run_triple_slit(c);
    REQUIRE(r.triple_slit);
    CHECK(r.triple_slit->rows.size() == 7);
    CHECK(r.triple_slit->max_abs_parameter <= 1e-9);
    // Second-order terms themselves are not zero.
    const auto& I = r.triple_slit->rows[3].intensities;
    CHECK(std::abs(I[3] - I[0] - I[1]) > 1e-6);
}

TEST_CASE("free exchange groups by kink signature") {
    ScenarioConfig c;
    c.lattice.num_slices = 3;
    c.lattice.num_sites = 5;
    c.lattice.start_site = 2;
    c.lattice.end_site = 2;
    const auto r = run_free_exchange(c);
    REQUIRE(r.geometric_groups.size() == 2);
    CHECK(r.geometric_groups[0].label == "0-kink");
    CHECK(r.geometric_groups[0].set.members.size() == 1);
    CHECK(r.geometric_groups[1].label == "1-kink");
    CHECK(r.geometric_groups[1].set.members.size() == 4);
    REQUIRE(r.geometric_partition);
    CHECK(r.parsing.partition.strict_valid);
    c.functional = HarmonicAction{1.0};
    CHECK_THROWS_CODE(run_free_exchange(c), ValidationError, "functional_kind");
}

TEST_CASE("focusing lens equalizes every optical path") {
    ScenarioConfig c;
    c.kind = ScenarioKind::focusing_index;
    c.lattice.num_slices = 3;
    c.lattice.num_sites = 7;
    c.lattice.start_site = 3;
    c.lattice.end_site = 3;
    c.focusing.boundary_index = 1.5;
    const auto r = run_focusing_index(c);
    REQUIRE(r.parsing_sets.size() == 1);
    CHECK(std::abs(r.parsing_sets[0].field->coherence - 1.0) <= 1e-12);
    CHECK(std::abs(r.parsing_sets[0].anomaly) <= 1e-12);
    CHECK(r.parsing.maximal_coherence);
    c.lattice.num_slices = 4;
    CHECK_THROWS_CODE(run_focusing_index(c), ValidationError, "lens_needs_three_slices");
}
