#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pathparse {

struct SiteRef {
    int slice = 0;
    int site = 0;
    auto operator<=>(const SiteRef&) const = default;
};

// Raw, unvalidated lattice parameters as read from a config document.
struct LatticeParams {
    int num_slices = 2;
    int num_sites = 1;
    double dt = 1.0;
    double dx = 1.0;
    int start_site = 0;
    int end_site = 0;
    std::vector<SiteRef> blocked;
};

// Time-sliced 1-D stage between two fixed measurement events.
// Only build_lattice() produces instances, so every instance is valid.
class SpacetimeLattice {
public:
    int num_slices() const noexcept { return num_slices_; }
    int num_sites() const noexcept { return num_sites_; }
    double dt() const noexcept { return dt_; }
    double dx() const noexcept { return dx_; }
    int start_site() const noexcept { return start_site_; }
    int end_site() const noexcept { return end_site_; }
    int last_slice() const noexcept { return num_slices_ - 1; }

    double position(int site) const noexcept { return site * dx_; }
    bool is_blocked(int slice, int site) const noexcept {
        return mask_[static_cast<std::size_t>(slice) * num_sites_ + site] != 0;
    }
    // Sorted, duplicate-free.
    std::span<const SiteRef> blocked_sites() const noexcept { return blocked_; }
    std::size_t flat_index(int slice, int site) const noexcept {
        return static_cast<std::size_t>(slice) * num_sites_ + site;
    }
    std::size_t grid_size() const noexcept { return mask_.size(); }

    LatticeParams params() const;
    SpacetimeLattice with_end_site(int end_site) const;
    SpacetimeLattice with_blocked(std::span<const SiteRef> extra) const;

private:
    friend SpacetimeLattice build_lattice(const LatticeParams& params);
    SpacetimeLattice() = default;

    int num_slices_ = 2;
    int num_sites_ = 1;
    double dt_ = 1.0;
    double dx_ = 1.0;
    int start_site_ = 0;
    int end_site_ = 0;
    std::vector<SiteRef> blocked_;
    std::vector<std::uint8_t> mask_;
};

// Throws ValidationError with codes: too_few_slices, no_sites,
// nonpositive_step, endpoint_out_of_range, blocked_out_of_range,
// endpoint_blocked.
SpacetimeLattice build_lattice(const LatticeParams& params);

inline constexpr std::uint64_t kDefaultPathBudget = 5'000'000;

// Number of unblocked endpoint-constrained paths, by slice-to-slice
// reachability counting. Throws BudgetError when the count exceeds budget.
std::uint64_t path_count(const SpacetimeLattice& lattice,
                         std::uint64_t budget = kDefaultPathBudget);

}  // namespace pathparse
