#pragma once

#include <cstddef>
#include <vector>

#include "pathparse/ensemble.hpp"
#include "pathparse/parsing.hpp"

namespace pathparse {

// Spacetime field history read off one path set: amplitude from path
// density, phase gradient from the mean path velocity (de Broglie).
struct FieldHistory {
    int num_slices = 0;
    int num_sites = 0;
    double dx = 1.0;
    std::vector<std::size_t> source_members;
    std::vector<std::size_t> counts;      // member paths through each (slice, site)
    std::vector<double> amplitude;        // sqrt(count / n); sums to 1 squared per slice
    std::vector<double> unwrapped_phase;  // NaN where unoccupied; 0 at the start event
    std::vector<double> gradient_in;      // (m/hbar) * mean arriving velocity, NaN if none
    std::vector<double> gradient_out;     // (m/hbar) * mean leaving velocity, NaN if none
    double probability = 0.0;
    double coherence = 0.0;  // F / n^2
    double anomaly = 0.0;    // 1 - coherence

    std::size_t index(int slice, int site) const noexcept {
        return static_cast<std::size_t>(slice) * num_sites + site;
    }
    bool occupied(int slice, int site) const noexcept { return counts[index(slice, site)] > 0; }
    // Phase reduced to [0, 2*pi); NaN where unoccupied.
    double phase(int slice, int site) const;
};

// Throws ValidationError for an empty set or an ensemble without a lattice.
FieldHistory reconstruct_field(const PathSet& set, const PathEnsemble& ensemble);

// 1 - F / n^2. Throws NumericalIntegrityError if F / n^2 leaves [0, 1]
// by more than rounding.
double anomaly_measure(const PathSet& set);
double coherence_measure(const PathSet& set);

struct SiteDeviation {
    int slice = 0;
    int site = 0;
    double deviation = 0.0;   // worst |phase - (upstream phase + gradient * step)|
    double slope_jump = 0.0;  // |gradient_out - gradient_in| * dx
    bool discontinuity = false;
};

struct PhaseFrontReport {
    double max_deviation = 0.0;        // occupied interior sites off the anomaly locus
    double locus_max_deviation = 0.0;  // sites on slices in locus_slices
    double max_slope_jump = 0.0;
    std::vector<int> locus_slices;  // slices holding a phase-slope discontinuity
    std::vector<SiteDeviation> sites;
};

// Checks, at every occupied interior site, that the phase steps agree with
// the velocity-derived gradient, and locates phase-slope discontinuities.
PhaseFrontReport phase_front_check(const FieldHistory& field, const PathSet& set,
                                   const PathEnsemble& ensemble);

}  // namespace pathparse
