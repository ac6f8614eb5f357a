#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathparse/action.hpp"
#include "pathparse/field.hpp"
#include "pathparse/parsing.hpp"
#include "pathparse/propagator.hpp"

namespace pathparse {

enum class ScenarioKind { free_exchange, double_slit, triple_slit, focusing_index };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

// Optical-index lens on the middle slice of a 3-slice lattice, chosen so
// every path has the same optical phase. `values` is used instead when
// auto_lens is false.
struct FocusingProfile {
    bool auto_lens = true;
    double k0 = 1.0;
    double boundary_index = 1.0;
    std::vector<double> values;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::free_exchange;
    LatticeParams lattice;
    ActionFunctional functional = FreeAction{};
    PhysicsConfig physics;
    SolverConfig solver;
    // Slit scenarios: every site on barrier_slice except the open slits is blocked.
    int barrier_slice = -1;
    std::vector<int> slit_sites;
    std::vector<int> closed_slits;           // indices into slit_sites
    std::vector<double> slit_phase_offsets;  // radians per slit, via potential patches
    std::optional<int> target_site;          // defaults to the lattice end site
    FocusingProfile focusing;
    std::uint64_t path_budget = kDefaultPathBudget;
    unsigned threads = 1;
};

struct GroupReport {
    std::string label;
    PathSet set;
    std::optional<FieldHistory> field;
    std::optional<PhaseFrontReport> fronts;
    double anomaly = 0.0;
};

struct SlitPurityReport {
    bool evaluated = false;
    std::string note;
    std::size_t near_ensembles = 0;
    std::size_t near_fine_partitions = 0;
    bool near_all_slit_pure = true;
    std::size_t far_valid_partitions = 0;
    std::size_t far_fine_partitions = 0;
    bool far_slit_pure_fine_exists = false;
    double far_slit_family_residual = 0.0;  // largest |residual| of the one-set-per-slit split
    bool far_slit_family_valid = false;
};

struct DoubleSlitMetrics {
    int target_site = 0;
    double joint_both = 0.0;
    double joint_single = 0.0;  // second slit closed
    double constructive_ratio = 0.0;
    std::vector<ConditionalEntry> fringe;
    SlitPurityReport purity;
};

struct SorkinRow {
    int site = 0;
    double position = 0.0;
    // I1, I2, I3, I12, I13, I23, I123
    std::array<double, 7> intensities{};
    double parameter = 0.0;
};

struct TripleSlitMetrics {
    std::vector<SorkinRow> rows;
    double max_abs_parameter = 0.0;
};

struct ScenarioReport {
    ScenarioKind kind = ScenarioKind::free_exchange;
    int target_site = 0;
    ProbabilityReport probability;
    ParsingResult parsing;
    std::vector<GroupReport> parsing_sets;
    std::optional<Partition> geometric_partition;
    std::vector<GroupReport> geometric_groups;
    std::optional<DoubleSlitMetrics> double_slit;
    std::optional<TripleSlitMetrics> triple_slit;
    std::vector<std::string> notes;
};

inline constexpr std::array<std::string_view, 7> kSorkinLabels = {"I1",  "I2",  "I3",  "I12",
                                                                  "I13", "I23", "I123"};

// Number of interior slices where a path changes velocity.
int kink_count(const Path& path);
// "0-kink", "1-kink", "2-kink" or "many-kink".
std::string kink_family(int kinks);

// Index grid of the auto lens (throws ValidationError unless T = 3).
OpticalIndex focusing_lens(const SpacetimeLattice& lattice, const FocusingProfile& profile);

// Lattice with the barrier row applied; `open` lists slit indices left open.
SpacetimeLattice slit_lattice(const ScenarioConfig& config, const std::vector<int>& open);

ScenarioReport run_free_exchange(const ScenarioConfig& config);
ScenarioReport run_focusing_index(const ScenarioConfig& config);
ScenarioReport run_double_slit(const ScenarioConfig& config);
ScenarioReport run_triple_slit(const ScenarioConfig& config);
ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace pathparse
