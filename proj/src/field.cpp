#include "pathparse/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"

namespace pathparse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSlopeTolerance = 1e-12;

}  // namespace

double FieldHistory::phase(int slice, int site) const {
    const double p = unwrapped_phase[index(slice, site)];
    return std::isnan(p) ? p : wrap_phase(p);
}

double coherence_measure(const PathSet& set) {
    const double n = static_cast<double>(set.members.size());
    if (n == 0.0) throw ValidationError("empty_set", "coherence of an empty set is undefined");
    const double c = set_probability(set) / (n * n);
    if (!(c >= -1e-12 && c <= 1.0 + 1e-12)) {
        throw NumericalIntegrityError("coherence_out_of_range",
                                      "F / n^2 = " + std::to_string(c) + " is outside [0, 1]");
    }
    return std::clamp(c, 0.0, 1.0);
}

double anomaly_measure(const PathSet& set) { return 1.0 - coherence_measure(set); }

FieldHistory reconstruct_field(const PathSet& set, const PathEnsemble& ensemble) {
    if (set.members.empty()) throw ValidationError("empty_set", "cannot reconstruct an empty set");
    if (!ensemble.lattice()) {
        throw ValidationError("no_lattice", "field reconstruction needs a lattice ensemble");
    }
    const SpacetimeLattice& lat = *ensemble.lattice();
    const PhysicsConfig& physics = ensemble.physics();
    const auto paths = ensemble.paths();
    const int T = lat.num_slices();
    const int M = lat.num_sites();
    const double n = static_cast<double>(set.members.size());
    const double k_per_velocity = physics.mass / physics.hbar;

    FieldHistory f;
    f.num_slices = T;
    f.num_sites = M;
    f.dx = lat.dx();
    f.source_members = set.members;
    f.counts.assign(lat.grid_size(), 0);
    f.amplitude.assign(lat.grid_size(), 0.0);
    f.unwrapped_phase.assign(lat.grid_size(), kNaN);
    f.gradient_in.assign(lat.grid_size(), kNaN);
    f.gradient_out.assign(lat.grid_size(), kNaN);
    f.probability = set.probability;
    f.coherence = coherence_measure(set);
    f.anomaly = 1.0 - f.coherence;

    // Integer displacement sums keep the velocity means exact.
    std::vector<long long> disp_in(lat.grid_size(), 0), disp_out(lat.grid_size(), 0);
    for (std::size_t m : set.members) {
        const auto& sites = paths[m].sites;
        for (int k = 0; k < T; ++k) {
            ++f.counts[f.index(k, sites[k])];
            if (k + 1 < T) {
                const long long d = sites[k + 1] - sites[k];
                disp_out[f.index(k, sites[k])] += d;
                disp_in[f.index(k + 1, sites[k + 1])] += d;
            }
        }
    }
    const double speed_unit = lat.dx() / lat.dt();
    for (int k = 0; k < T; ++k) {
        for (int x = 0; x < M; ++x) {
            const std::size_t i = f.index(k, x);
            if (f.counts[i] == 0) continue;
            const double c = static_cast<double>(f.counts[i]);
            f.amplitude[i] = std::sqrt(c / n);
            if (k > 0) f.gradient_in[i] = k_per_velocity * (disp_in[i] / c) * speed_unit;
            if (k + 1 < T) f.gradient_out[i] = k_per_velocity * (disp_out[i] / c) * speed_unit;
        }
    }

    // Phase: 0 at the start event, then slice by slice each site takes the
    // mean over arriving member paths of upstream phase + gradient * step.
    f.unwrapped_phase[f.index(0, lat.start_site())] = 0.0;
    for (int k = 0; k + 1 < T; ++k) {
        std::vector<CompensatedSum> acc(static_cast<std::size_t>(M));
        for (std::size_t m : set.members) {
            const auto& sites = paths[m].sites;
            const int from = sites[k], to = sites[k + 1];
            const double step = (to - from) * lat.dx();
            acc[static_cast<std::size_t>(to)].add(f.unwrapped_phase[f.index(k, from)] +
                                                  f.gradient_in[f.index(k + 1, to)] * step);
        }
        for (int y = 0; y < M; ++y) {
            const std::size_t i = f.index(k + 1, y);
            if (f.counts[i] > 0) f.unwrapped_phase[i] = acc[static_cast<std::size_t>(y)].value() / f.counts[i];
        }
    }
    return f;
}

PhaseFrontReport phase_front_check(const FieldHistory& field, const PathSet& set,
                                   const PathEnsemble& ensemble) {
    const auto paths = ensemble.paths();
    const int T = field.num_slices;
    PhaseFrontReport report;

    std::vector<double> worst(field.counts.size(), 0.0);
    for (std::size_t m : set.members) {
        const auto& sites = paths[m].sites;
        for (int k = 1; k + 1 < T; ++k) {
            const std::size_t here = field.index(k, sites[k]);
            const std::size_t up = field.index(k - 1, sites[k - 1]);
            const double step = (sites[k] - sites[k - 1]) * field.dx;
            const double expected = field.unwrapped_phase[up] + field.gradient_in[here] * step;
            worst[here] = std::max(worst[here], std::abs(field.unwrapped_phase[here] - expected));
        }
    }

    std::vector<char> on_locus(static_cast<std::size_t>(std::max(T, 0)), 0);
    for (int k = 1; k + 1 < T; ++k) {
        for (int x = 0; x < field.num_sites; ++x) {
            const std::size_t i = field.index(k, x);
            if (field.counts[i] == 0) continue;
            const double g_in = field.gradient_in[i], g_out = field.gradient_out[i];
            const double jump = std::abs(g_out - g_in) * field.dx;
            const double scale = std::max({1.0, std::abs(g_in), std::abs(g_out)}) * field.dx;
            const bool kinked = jump > kSlopeTolerance * scale;
            if (kinked) on_locus[static_cast<std::size_t>(k)] = 1;
            report.max_slope_jump = std::max(report.max_slope_jump, jump);
            report.sites.push_back({k, x, worst[i], jump, kinked});
        }
    }
    for (int k = 0; k < T; ++k) {
        if (on_locus[static_cast<std::size_t>(k)]) report.locus_slices.push_back(k);
    }
    for (const SiteDeviation& s : report.sites) {
        if (on_locus[static_cast<std::size_t>(s.slice)]) {
            report.locus_max_deviation = std::max(report.locus_max_deviation, s.deviation);
        } else {
            report.max_deviation = std::max(report.max_deviation, s.deviation);
        }
    }
    return report;
}

}  // namespace pathparse
