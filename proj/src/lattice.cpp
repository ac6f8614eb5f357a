#include "pathparse/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pathparse/error.hpp"

namespace pathparse {

namespace {

std::string site_name(const SiteRef& s) {
    return "(" + std::to_string(s.slice) + ", " + std::to_string(s.site) + ")";
}

}  // namespace

SpacetimeLattice build_lattice(const LatticeParams& p) {
    if (p.num_slices < 2) {
        throw ValidationError("too_few_slices",
                              "lattice needs at least 2 time slices, got " +
                                  std::to_string(p.num_slices));
    }
    if (p.num_sites < 1) {
        throw ValidationError("no_sites", "lattice needs at least 1 spatial site, got " +
                                              std::to_string(p.num_sites));
    }
    if (!(p.dt > 0.0) || !(p.dx > 0.0) || !std::isfinite(p.dt) || !std::isfinite(p.dx)) {
        throw ValidationError("nonpositive_step", "dt and dx must be finite and positive");
    }
    for (int endpoint : {p.start_site, p.end_site}) {
        if (endpoint < 0 || endpoint >= p.num_sites) {
            throw ValidationError("endpoint_out_of_range",
                                  "endpoint site " + std::to_string(endpoint) +
                                      " outside [0, " + std::to_string(p.num_sites) + ")");
        }
    }

    SpacetimeLattice lat;
    lat.num_slices_ = p.num_slices;
    lat.num_sites_ = p.num_sites;
    lat.dt_ = p.dt;
    lat.dx_ = p.dx;
    lat.start_site_ = p.start_site;
    lat.end_site_ = p.end_site;
    lat.mask_.assign(static_cast<std::size_t>(p.num_slices) * p.num_sites, 0);

    for (const SiteRef& b : p.blocked) {
        if (b.slice < 0 || b.slice >= p.num_slices || b.site < 0 || b.site >= p.num_sites) {
            throw ValidationError("blocked_out_of_range",
                                  "blocked site " + site_name(b) + " is outside the lattice");
        }
        const bool is_start = b.slice == 0 && b.site == p.start_site;
        const bool is_end = b.slice == p.num_slices - 1 && b.site == p.end_site;
        if (is_start || is_end) {
            throw ValidationError("endpoint_blocked",
                                  "measurement event " + site_name(b) + " is blocked");
        }
        lat.mask_[lat.flat_index(b.slice, b.site)] = 1;
    }
    lat.blocked_ = p.blocked;
    std::sort(lat.blocked_.begin(), lat.blocked_.end());
    lat.blocked_.erase(std::unique(lat.blocked_.begin(), lat.blocked_.end()), lat.blocked_.end());
    return lat;
}

LatticeParams SpacetimeLattice::params() const {
    return LatticeParams{num_slices_, num_sites_, dt_,        dx_,
                         start_site_, end_site_,  blocked_};
}

SpacetimeLattice SpacetimeLattice::with_end_site(int end_site) const {
    LatticeParams p = params();
    p.end_site = end_site;
    return build_lattice(p);
}

SpacetimeLattice SpacetimeLattice::with_blocked(std::span<const SiteRef> extra) const {
    LatticeParams p = params();
    p.blocked.insert(p.blocked.end(), extra.begin(), extra.end());
    return build_lattice(p);
}

std::uint64_t path_count(const SpacetimeLattice& lattice, std::uint64_t budget) {
    const int T = lattice.num_slices();
    const int M = lattice.num_sites();
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

    auto over_budget = [&](const std::string& what) {
        return BudgetError("path_budget_exceeded",
                           "path count " + what + " exceeds the budget of " +
                               std::to_string(budget) + " paths");
    };

    // ways[x]: number of unblocked partial paths from the start event to (k, x).
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(M), 0);
    ways[static_cast<std::size_t>(lattice.start_site())] = 1;
    for (int k = 1; k < T - 1; ++k) {
        std::uint64_t total = 0;
        for (std::uint64_t w : ways) {
            if (w > kMax - total) throw over_budget("overflows 64 bits and");
            total += w;
        }
        for (int x = 0; x < M; ++x) {
            ways[static_cast<std::size_t>(x)] = lattice.is_blocked(k, x) ? 0 : total;
        }
    }
    std::uint64_t count = 0;
    if (T == 2) {
        count = 1;
    } else {
        for (std::uint64_t w : ways) {
            if (w > kMax - count) throw over_budget("overflows 64 bits and");
            count += w;
        }
    }
    if (count > budget) throw over_budget(std::to_string(count));
    return count;
}

}  // namespace pathparse
