#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pathparse/parsing.hpp"

using namespace pathparse;
using oracle::kPi;

namespace {

bool contains(const std::vector<Partition>& list, const Partition& p) {
    return std::any_of(list.begin(), list.end(), [&](const Partition& q) { return q.blocks() == p.blocks(); });
}

}  // namespace

TEST_CASE("find_parsing on the worked case returns the two-set parsing") {
    const auto e = oracle::ensemble_of({0.0, 0.0, kPi / 2});
    for (Strategy s : {Strategy::exhaustive, Strategy::phase_binning, Strategy::annealing}) {
        SolverConfig c;
        c.strategy = s;
        const auto r = find_parsing(e, c);
        CAPTURE(to_string(s));
        CHECK(r.partition.strict_valid);
        CHECK(r.finer_than_trivial);
        CHECK(r.partition.blocks() == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});
    }
}

TEST_CASE("equal actions are flagged maximally coherent") {
    const std::vector<double> phases(6, 0.8);
    for (Strategy s : {Strategy::exhaustive, Strategy::phase_binning, Strategy::annealing}) {
        SolverConfig c;
        c.strategy = s;
        const auto r = find_parsing(oracle::ensemble_of(phases), c);
        CHECK(r.partition.sets.size() == 1);
        CHECK(r.maximal_coherence);
        CHECK(r.partition.sets[0].probability == doctest::Approx(36.0));
    }
}

TEST_CASE("empty ensemble parses to no sets") {
    const auto r = find_parsing(oracle::ensemble_of({}), {});
    CHECK(r.partition.sets.empty());
    CHECK(r.partition.strict_valid);
}

TEST_CASE("solver output is contained in the oracle list") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 2 + trial % 7;
        const auto e = oracle::ensemble_of(oracle::quantized_phases(rng, n, 4 + trial % 3));
        const auto valid = enumerate_all_parsings(e, {});
        for (Strategy s : {Strategy::phase_binning, Strategy::annealing}) {
            SolverConfig c;
            c.strategy = s;
            c.seed = static_cast<std::uint64_t>(trial);
            const auto r = find_parsing(e, c);
            CAPTURE(trial);
            CHECK(r.partition.strict_valid);
            CHECK(contains(valid, r.partition));
        }
    }
}

TEST_CASE("identical seeds reproduce identical partitions") {
    std::mt19937_64 rng(13);
    const auto e = oracle::ensemble_of(oracle::quantized_phases(rng, 60, 6));
    SolverConfig c;
    c.strategy = Strategy::annealing;
    c.seed = 42;
    c.annealing.move_budget = 3000;
    const auto a = find_parsing(e, c);
    c.threads = 4;
    const auto b = find_parsing(e, c);
    CHECK(a.partition.blocks() == b.partition.blocks());
    CHECK(a.trace.selected_seed == b.trace.selected_seed);
    CHECK(a.trace.moves_accepted == b.trace.moves_accepted);
}

TEST_CASE("phase binning finds antipodal pairs in large ensembles") {
    std::mt19937_64 rng(14);
    const auto e = oracle::ensemble_of(oracle::quantized_phases(rng, 200, 8));
    const auto r = find_parsing(e, {});
    CHECK(r.partition.strict_valid);
    CHECK(r.finer_than_trivial);
    CHECK(r.partition.sets.size() > 20);
}

TEST_CASE("continuous random phases fall back to the trivial parsing") {
    std::mt19937_64 rng(15);
    const auto e = oracle::ensemble_of(oracle::uniform_phases(rng, 40));
    const auto r = find_parsing(e, {});
    CHECK(r.partition.strict_valid);
    CHECK(r.partition.sets.size() == 1);
    CHECK_FALSE(r.finer_than_trivial);
}

TEST_CASE("relaxed mode returns a relaxed-valid partition") {
    std::mt19937_64 rng(16);
    const auto e = oracle::ensemble_of(oracle::quantized_phases(rng, 12, 4));
    SolverConfig c;
    c.mode = ValidityMode::relaxed;
    c.strategy = Strategy::annealing;
    const auto r = find_parsing(e, c);
    CHECK(r.partition.relaxed_valid);
}
