#include <doctest.h>

#include <cmath>

#include "checks.hpp"
#include "oracles.hpp"
#include "pathparse/error.hpp"
#include "pathparse/field.hpp"

using namespace pathparse;

namespace {

PathEnsemble free_ensemble(int slices, int sites, int start, int end) {
    LatticeParams p;
    p.num_slices = slices;
    p.num_sites = sites;
    p.start_site = start;
    p.end_site = end;
    return evaluate_ensemble(enumerate_paths(build_lattice(p)), FreeAction{}, {});
}

std::vector<std::size_t> all_of(const PathEnsemble& e) {
    std::vector<std::size_t> out(e.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

}  // namespace

TEST_CASE("singleton set: phase follows the path exactly") {
    const auto e = free_ensemble(6, 5, 0, 4);
    for (std::size_t i = 0; i < e.size(); i += 37) {
        const auto set = make_path_set({i}, e);
        const auto f = reconstruct_field(set, e);
        const auto fronts = phase_front_check(f, set, e);
        CHECK(fronts.max_deviation == 0.0);
        CHECK(fronts.locus_max_deviation == 0.0);
        // cos^2 + sin^2 may round one ulp away from 1.
        CHECK(f.coherence == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(f.anomaly) <= 1e-15);
        for (int k = 0; k < f.num_slices; ++k) {
            const int site = e.paths()[i].sites[static_cast<std::size_t>(k)];
            CHECK(f.amplitude[f.index(k, site)] == 1.0);
        }
    }
}

TEST_CASE("amplitude squares sum to one on every slice") {
    const auto e = free_ensemble(5, 4, 1, 2);
    const auto set = make_path_set(all_of(e), e);
    const auto f = reconstruct_field(set, e);
    for (int k = 0; k < f.num_slices; ++k) {
        double total = 0.0;
        for (int x = 0; x < f.num_sites; ++x) total += f.amplitude[f.index(k, x)] * f.amplitude[f.index(k, x)];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(std::isnan(f.phase(0, 0)));
    CHECK(f.phase(0, 1) == 0.0);
}

TEST_CASE("three-slice exchange: slope discontinuity sits on the middle slice only") {
    const auto e = free_ensemble(3, 5, 2, 2);
    const auto set = make_path_set(all_of(e), e);
    const auto f = reconstruct_field(set, e);
    const auto fronts = phase_front_check(f, set, e);
    CHECK(fronts.locus_slices == std::vector<int>{1});
    CHECK(fronts.max_slope_jump > 0.0);
    // Site 2 is the straight path; no kink there.
    for (const auto& s : fronts.sites) CHECK(s.discontinuity == (s.site != 2));
}

TEST_CASE("straight path has no locus") {
    const auto e = free_ensemble(5, 3, 1, 1);
    std::size_t straight = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e.paths()[i].sites == std::vector<int>{1, 1, 1, 1, 1}) straight = i;
    }
    const auto set = make_path_set({straight}, e);
    const auto fronts = phase_front_check(reconstruct_field(set, e), set, e);
    CHECK(fronts.locus_slices.empty());
    CHECK(fronts.max_slope_jump == 0.0);
}

TEST_CASE("coherence and anomaly of hand sets") {
    const auto e = oracle::ensemble_of({0.0, oracle::kPi, 0.0, 0.0});
    CHECK(coherence_measure(make_path_set({0, 1}, e)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(anomaly_measure(make_path_set({0, 1}, e)) == doctest::Approx(1.0));
    CHECK(coherence_measure(make_path_set({0, 2, 3}, e)) == 1.0);
    CHECK(anomaly_measure(make_path_set({0, 2, 3}, e)) == 0.0);
}

TEST_CASE("field reconstruction needs a lattice and members") {
    const auto e = oracle::ensemble_of({0.0, 1.0});
    CHECK_THROWS_CODE(reconstruct_field(make_path_set({0}, e), e), ValidationError, "no_lattice");
    const auto l = free_ensemble(3, 2, 0, 0);
    CHECK_THROWS_CODE(reconstruct_field(PathSet{}, l), ValidationError, "empty_set");
}
