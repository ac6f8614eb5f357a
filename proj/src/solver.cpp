#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <random>
#include <unordered_map>

#include "pathparse/error.hpp"
#include "pathparse/numeric.hpp"
#include "pathparse/parsing.hpp"

namespace pathparse {

namespace {

using Blocks = std::vector<std::vector<std::size_t>>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Distribution-free draws so chains are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

private:
    std::mt19937_64 engine_;
};

Partition trivial_partition(const PathEnsemble& ensemble, const SolverConfig& config) {
    Blocks blocks;
    if (!ensemble.empty()) {
        blocks.emplace_back(ensemble.size());
        for (std::size_t i = 0; i < ensemble.size(); ++i) blocks[0][i] = i;
    }
    return validate_partition(blocks, ensemble, config);
}

// ---------------------------------------------------------------------------
// Phase binning: pull out disjoint zero-sum subsets (antipodal pairs, then
// triples, then pairs of pairs), try to split the remainder into two sets
// with orthogonal phasor sums, then repair by merging until valid.

class PhaseBinner {
public:
    // Pair scans over larger pools cost quadratic time and memory.
    static constexpr std::size_t kTriplePool = 2000;
    static constexpr std::size_t kQuadPool = 500;

    PhaseBinner(const PathEnsemble& ensemble, const SolverConfig& config)
        : ens_(ensemble),
          config_(config),
          n_(ensemble.size()),
          cos_(ensemble.cos_phases()),
          sin_(ensemble.sin_phases()),
          used_(n_, 0) {
        const Tolerances tol = resolve_tolerances(config, n_);
        eps_x_ = tol.epsilon_X;
        const EnsemblePhaseSums& z = ensemble.phase_sums();
        const double scale = std::max(1.0, std::hypot(z.C, z.D));
        zero_tol_ = std::min(std::sqrt(tol.epsilon_F), tol.epsilon_X / (4.0 * scale));

        bins_count_ = std::max<std::size_t>(8, 2 * static_cast<std::size_t>(
                                                       std::ceil(std::sqrt(static_cast<double>(n_)))));
        bins_.resize(bins_count_);
        const auto phases = ensemble.phases();
        for (std::size_t i = 0; i < n_; ++i) bins_[bin_of(wrap_phase(phases[i]))].push_back(i);
    }

    Partition run(SolverTrace& trace) {
        extract_pairs();
        extract_triples();
        extract_quads();

        std::vector<std::size_t> remainder;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!used_[i]) remainder.push_back(i);
        }
        Blocks blocks = null_sets_;
        const std::optional<std::vector<std::size_t>> split = orthogonal_split(remainder);
        if (split) {
            std::vector<std::size_t> rest;
            std::set_difference(remainder.begin(), remainder.end(), split->begin(), split->end(),
                                std::back_inserter(rest));
            blocks.push_back(*split);
            blocks.push_back(rest);
        } else if (!remainder.empty()) {
            blocks.push_back(remainder);
        }
        trace.candidates_examined = candidates_;
        return repair(std::move(blocks), split.has_value());
    }

private:
    std::size_t bin_of(double theta) const {
        auto b = static_cast<std::size_t>(theta / kTwoPi * static_cast<double>(bins_count_));
        return std::min(b, bins_count_ - 1);
    }

    bool near_zero(double re, double im) const { return std::hypot(re, im) <= zero_tol_; }

    // Unused paths in the bin containing `theta` and its two neighbours, ascending.
    std::vector<std::size_t> around(double theta) const {
        const std::size_t b = bin_of(wrap_phase(theta));
        std::vector<std::size_t> out;
        for (std::size_t d : {bins_count_ - 1, std::size_t{0}, std::size_t{1}}) {
            for (std::size_t i : bins_[(b + d) % bins_count_]) {
                if (!used_[i]) out.push_back(i);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double angle(std::size_t i) const { return std::atan2(sin_[i], cos_[i]); }

    void take(std::vector<std::size_t> members) {
        for (std::size_t m : members) used_[m] = 1;
        std::sort(members.begin(), members.end());
        null_sets_.push_back(std::move(members));
    }

    void extract_pairs() {
        for (std::size_t i = 0; i < n_; ++i) {
            if (used_[i]) continue;
            for (std::size_t j : around(angle(i) + std::numbers::pi)) {
                ++candidates_;
                if (j == i) continue;
                if (near_zero(cos_[i] + cos_[j], sin_[i] + sin_[j])) {
                    take({i, j});
                    break;
                }
            }
        }
    }

    // The first `cap` unused paths, ascending.
    std::vector<std::size_t> unused_pool(std::size_t cap) const {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < n_ && pool.size() < cap; ++i) {
            if (!used_[i]) pool.push_back(i);
        }
        return pool;
    }

    void extract_triples() {
        const std::vector<std::size_t> pool = unused_pool(kTriplePool);
        for (std::size_t a = 0; a < pool.size(); ++a) {
            const std::size_t i = pool[a];
            for (std::size_t b = a + 1; b < pool.size() && !used_[i]; ++b) {
                const std::size_t j = pool[b];
                if (used_[j]) continue;
                const double re = -(cos_[i] + cos_[j]);
                const double im = -(sin_[i] + sin_[j]);
                if (std::abs(std::hypot(re, im) - 1.0) > 1e-6) continue;
                for (std::size_t k : around(std::atan2(im, re))) {
                    ++candidates_;
                    if (k == i || k == j) continue;
                    if (near_zero(cos_[i] + cos_[j] + cos_[k], sin_[i] + sin_[j] + sin_[k])) {
                        take({i, j, k});
                        break;
                    }
                }
            }
        }
    }

    void extract_quads() {
        const std::vector<std::size_t> pool = unused_pool(kQuadPool);
        if (pool.size() < 4) return;
        // Grid hash of pair sums; a pair (k, l) with sum close to -(u_i + u_j)
        // closes a zero-sum quadruple.
        const double cell = std::max(4.0 * zero_tol_, 1e-9);
        auto key = [cell](double re, double im) {
            const auto a = static_cast<std::int64_t>(std::floor(re / cell));
            const auto b = static_cast<std::int64_t>(std::floor(im / cell));
            return static_cast<std::uint64_t>(a) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(b);
        };
        auto cell_of = [cell](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
        std::unordered_map<std::uint64_t, std::vector<std::pair<std::size_t, std::size_t>>> table;
        for (std::size_t a = 0; a < pool.size(); ++a) {
            for (std::size_t b = a + 1; b < pool.size(); ++b) {
                const std::size_t i = pool[a], j = pool[b];
                table[key(cos_[i] + cos_[j], sin_[i] + sin_[j])].emplace_back(i, j);
            }
        }
        for (std::size_t a = 0; a < pool.size(); ++a) {
            for (std::size_t b = a + 1; b < pool.size(); ++b) {
                const std::size_t i = pool[a], j = pool[b];
                if (used_[i] || used_[j]) continue;
                const double re = -(cos_[i] + cos_[j]);
                const double im = -(sin_[i] + sin_[j]);
                bool found = false;
                for (std::int64_t dr = -1; dr <= 1 && !found; ++dr) {
                    for (std::int64_t di = -1; di <= 1 && !found; ++di) {
                        const double cr = (static_cast<double>(cell_of(re) + dr) + 0.5) * cell;
                        const double ci = (static_cast<double>(cell_of(im) + di) + 0.5) * cell;
                        auto it = table.find(key(cr, ci));
                        if (it == table.end()) continue;
                        for (auto [k, l] : it->second) {
                            ++candidates_;
                            if (used_[k] || used_[l] || k == i || k == j || l == i || l == j) continue;
                            if (near_zero(cos_[i] + cos_[j] + cos_[k] + cos_[l],
                                          sin_[i] + sin_[j] + sin_[k] + sin_[l])) {
                                take({i, j, k, l});
                                found = true;
                                break;
                            }
                        }
                    }
                }
            }
        }
    }

    // Exhaustive search (small remainders only) for a proper subset whose
    // phasor sum is orthogonal to that of its complement.
    std::optional<std::vector<std::size_t>> orthogonal_split(const std::vector<std::size_t>& rest) {
        constexpr std::size_t kMaxExhaustive = 20;
        const std::size_t r = rest.size();
        if (r < 2 || r > kMaxExhaustive) return std::nullopt;
        PhasorSum total;
        for (std::size_t m : rest) total.add(cos_[m], sin_[m]);
        const double zr = total.real(), zi = total.imag();

        std::optional<std::vector<std::size_t>> best;
        double best_value = eps_x_ / 4.0;
        const std::uint64_t subsets = std::uint64_t{1} << (r - 1);
        // rest[0] always belongs to the chosen subset; mask picks the others.
        for (std::uint64_t mask = 0; mask + 1 < subsets; ++mask) {
            ++candidates_;
            PhasorSum part;
            part.add(cos_[rest[0]], sin_[rest[0]]);
            for (std::size_t b = 1; b < r; ++b) {
                if (mask >> (b - 1) & 1U) part.add(cos_[rest[b]], sin_[rest[b]]);
            }
            const double pr = part.real(), pi = part.imag();
            const double value = std::abs(pr * (zr - pr) + pi * (zi - pi));
            if (value <= best_value) {
                std::vector<std::size_t> chosen{rest[0]};
                for (std::size_t b = 1; b < r; ++b) {
                    if (mask >> (b - 1) & 1U) chosen.push_back(rest[b]);
                }
                if (!best || value < best_value) {
                    best = std::move(chosen);
                    best_value = value;
                }
            }
        }
        return best;
    }

    Partition repair(Blocks blocks, bool has_split) {
        Partition p = validate_partition(blocks, ens_, config_);
        if (p.valid()) return p;
        if (has_split) {
            // Undo the remainder split (its two sets are the last two blocks).
            auto tail = blocks.back();
            blocks.pop_back();
            blocks.back().insert(blocks.back().end(), tail.begin(), tail.end());
            p = validate_partition(blocks, ens_, config_);
            if (p.valid()) return p;
        }
        // Fold null sets back into the remainder one at a time.
        while (blocks.size() > 1) {
            auto first = blocks.front();
            blocks.erase(blocks.begin());
            blocks.back().insert(blocks.back().end(), first.begin(), first.end());
            p = validate_partition(blocks, ens_, config_);
            if (p.valid()) return p;
        }
        return p;
    }

    const PathEnsemble& ens_;
    const SolverConfig& config_;
    std::size_t n_;
    std::span<const double> cos_;
    std::span<const double> sin_;
    std::vector<char> used_;
    double eps_x_ = 0.0;
    double zero_tol_ = 0.0;
    std::size_t bins_count_ = 8;
    std::vector<std::vector<std::size_t>> bins_;
    Blocks null_sets_;
    std::uint64_t candidates_ = 0;
};

// ---------------------------------------------------------------------------
// Annealing over partitions. Energy is the squared (normalized) residual
// plus a penalty for coarse partitions; moves relocate a path, merge two
// sets, or split one. The chain keeps the best valid partition it visits.

struct ChainResult {
    Partition best;
    std::uint64_t tried = 0;
    std::uint64_t accepted = 0;
    std::exception_ptr error;
};

class AnnealingChain {
public:
    AnnealingChain(const PathEnsemble& ensemble, const SolverConfig& config, const Partition& start,
                   std::uint64_t seed)
        : ens_(ensemble),
          config_(config),
          n_(ensemble.size()),
          cos_(ensemble.cos_phases()),
          sin_(ensemble.sin_phases()),
          rng_(seed),
          label_(n_),
          slot_(n_) {
        const EnsemblePhaseSums& z = ensemble.phase_sums();
        C_ = z.C;
        D_ = z.D;
        norm_ = std::max(1.0, ensemble.total_probability());
        eps_x_ = resolve_tolerances(config, n_).epsilon_X;
        for (const PathSet& s : start.sets) {
            const std::size_t id = sets_.size();
            sets_.push_back({});
            for (std::size_t m : s.members) insert(m, id);
        }
        resync();
        best_ = start;
    }

    ChainResult run() {
        const AnnealingConfig& a = config_.annealing;
        double temperature = a.initial_temperature;
        for (std::uint64_t move = 0; move < a.move_budget; ++move, temperature *= a.cooling_rate) {
            ++tried_;
            const double r = rng_.uniform();
            bool accepted = false;
            if (r < 0.7) {
                accepted = try_relocate(temperature);
            } else if (r < 0.85) {
                accepted = try_merge(temperature);
            } else {
                accepted = try_split(temperature);
            }
            if (accepted) {
                ++accepted_;
                if (accepted_ % 512 == 0) resync();
                consider_current();
            }
        }
        return {best_, tried_, accepted_, nullptr};
    }

private:
    struct Group {
        std::vector<std::size_t> members;
        double c = 0.0;
        double s = 0.0;
    };

    double residual(double c, double s) const { return c * (C_ - c) + s * (D_ - s); }

    double set_energy(double c, double s) const {
        const double r = residual(c, s) / norm_;
        return r * r;
    }

    // Strict mode scores each set's residual; relaxed mode only the total.
    double energy_terms(double c, double s) const {
        return config_.mode == ValidityMode::strict ? set_energy(c, s) : residual(c, s) / norm_;
    }

    double coarseness(std::size_t k) const {
        return kCoarsePenalty * static_cast<double>(n_ - k) / static_cast<double>(std::max<std::size_t>(n_, 1));
    }

    double total_energy_with(double residual_part, std::size_t k) const {
        if (config_.mode == ValidityMode::relaxed) return residual_part * residual_part + coarseness(k);
        return residual_part + coarseness(k);
    }

    double residual_part() const {
        double acc = 0.0;
        for (const Group& g : sets_) acc += energy_terms(g.c, g.s);
        return acc;
    }

    void insert(std::size_t m, std::size_t id) {
        label_[m] = id;
        slot_[m] = sets_[id].members.size();
        sets_[id].members.push_back(m);
        sets_[id].c += cos_[m];
        sets_[id].s += sin_[m];
    }

    void remove(std::size_t m) {
        Group& g = sets_[label_[m]];
        const std::size_t pos = slot_[m];
        const std::size_t last = g.members.back();
        g.members[pos] = last;
        slot_[last] = pos;
        g.members.pop_back();
        g.c -= cos_[m];
        g.s -= sin_[m];
    }

    void drop_if_empty(std::size_t id) {
        if (!sets_[id].members.empty()) return;
        const std::size_t last = sets_.size() - 1;
        if (id != last) {
            sets_[id] = std::move(sets_[last]);
            for (std::size_t m : sets_[id].members) label_[m] = id;
        }
        sets_.pop_back();
    }

    void resync() {
        for (Group& g : sets_) {
            PhasorSum acc;
            for (std::size_t m : g.members) acc.add(cos_[m], sin_[m]);
            g.c = acc.real();
            g.s = acc.imag();
        }
        current_residual_ = residual_part();
    }

    bool metropolis(double delta, double temperature) {
        if (delta <= 0.0) return true;
        return rng_.uniform() < std::exp(-delta / temperature);
    }

    // Energy change when the sets listed in `before` are replaced by `after`.
    double delta(std::initializer_list<std::pair<double, double>> before,
                 std::initializer_list<std::pair<double, double>> after, std::size_t new_k,
                 double& new_residual) const {
        double change = 0.0;
        for (auto [c, s] : before) change -= energy_terms(c, s);
        for (auto [c, s] : after) change += energy_terms(c, s);
        new_residual = current_residual_ + change;
        return total_energy_with(new_residual, new_k) -
               total_energy_with(current_residual_, sets_.size());
    }

    bool try_relocate(double temperature) {
        const std::size_t m = rng_.below(n_);
        const std::size_t from = label_[m];
        const std::size_t k = sets_.size();
        const std::size_t pick = rng_.below(k + 1);  // k means "a new set"
        if (pick == from || (pick == k && sets_[from].members.size() == 1)) return false;
        const Group& src = sets_[from];
        const double sc = src.c - cos_[m], ss = src.s - sin_[m];
        const bool src_vanishes = src.members.size() == 1;
        double new_residual = 0.0;
        double d = 0.0;
        if (pick == k) {
            d = delta({{src.c, src.s}}, {{sc, ss}, {cos_[m], sin_[m]}}, k + 1, new_residual);
        } else {
            const Group& dst = sets_[pick];
            const std::size_t new_k = src_vanishes ? k - 1 : k;
            if (src_vanishes) {
                d = delta({{src.c, src.s}, {dst.c, dst.s}}, {{dst.c + cos_[m], dst.s + sin_[m]}},
                          new_k, new_residual);
            } else {
                d = delta({{src.c, src.s}, {dst.c, dst.s}},
                          {{sc, ss}, {dst.c + cos_[m], dst.s + sin_[m]}}, new_k, new_residual);
            }
        }
        if (!metropolis(d, temperature)) return false;
        remove(m);
        if (pick == k) {
            sets_.push_back({});
            insert(m, k);
        } else {
            insert(m, pick);
        }
        drop_if_empty(from);
        current_residual_ = new_residual;
        return true;
    }

    bool try_merge(double temperature) {
        const std::size_t k = sets_.size();
        if (k < 2) return false;
        const std::size_t a = rng_.below(k);
        std::size_t b = rng_.below(k - 1);
        if (b >= a) ++b;
        const Group& ga = sets_[a];
        const Group& gb = sets_[b];
        double new_residual = 0.0;
        const double d =
            delta({{ga.c, ga.s}, {gb.c, gb.s}}, {{ga.c + gb.c, ga.s + gb.s}}, k - 1, new_residual);
        if (!metropolis(d, temperature)) return false;
        const std::vector<std::size_t> moving = sets_[b].members;
        for (std::size_t m : moving) {
            remove(m);
            insert(m, a);
        }
        drop_if_empty(b);
        current_residual_ = new_residual;
        return true;
    }

    bool try_split(double temperature) {
        const std::size_t k = sets_.size();
        const std::size_t id = rng_.below(k);
        const Group& g = sets_[id];
        if (g.members.size() < 2) return false;
        std::vector<std::size_t> moving;
        // The first member stays so the split is proper; one other always moves.
        const std::size_t forced = 1 + rng_.below(g.members.size() - 1);
        for (std::size_t p = 1; p < g.members.size(); ++p) {
            if (p == forced || rng_.uniform() < 0.5) moving.push_back(g.members[p]);
        }
        if (moving.size() == g.members.size()) return false;
        double mc = 0.0, ms = 0.0;
        for (std::size_t m : moving) {
            mc += cos_[m];
            ms += sin_[m];
        }
        double new_residual = 0.0;
        const double d =
            delta({{g.c, g.s}}, {{g.c - mc, g.s - ms}, {mc, ms}}, k + 1, new_residual);
        if (!metropolis(d, temperature)) return false;
        sets_.push_back({});
        for (std::size_t m : moving) {
            remove(m);
            insert(m, k);
        }
        current_residual_ = new_residual;
        return true;
    }

    void consider_current() {
        if (sets_.size() < best_.sets.size()) return;
        // Cheap screen on running sums before the exact validation.
        const double screen = 4.0 * eps_x_ + 1e-9;
        if (config_.mode == ValidityMode::strict) {
            for (const Group& g : sets_) {
                if (std::abs(residual(g.c, g.s)) > screen) return;
            }
        } else {
            double total = 0.0;
            for (const Group& g : sets_) total += residual(g.c, g.s);
            if (std::abs(total) > screen) return;
        }
        Blocks blocks;
        blocks.reserve(sets_.size());
        for (const Group& g : sets_) blocks.push_back(g.members);
        Partition candidate = validate_partition(blocks, ens_, config_);
        if (candidate.valid() && ranks_before(candidate, best_)) best_ = std::move(candidate);
    }

    static constexpr double kCoarsePenalty = 0.1;

    const PathEnsemble& ens_;
    const SolverConfig& config_;
    std::size_t n_;
    std::span<const double> cos_;
    std::span<const double> sin_;
    Rng rng_;
    std::vector<std::size_t> label_;
    std::vector<std::size_t> slot_;
    std::vector<Group> sets_;
    double C_ = 0.0, D_ = 0.0, norm_ = 1.0, eps_x_ = 0.0;
    double current_residual_ = 0.0;
    Partition best_;
    std::uint64_t tried_ = 0, accepted_ = 0;
};

std::uint64_t chain_seed(std::uint64_t seed, unsigned chain) {
    return splitmix64(seed ^ (0xA24BAED4963EE407ULL * (chain + 1)));
}

}  // namespace

ParsingResult find_parsing(const PathEnsemble& ensemble, const SolverConfig& config) {
    validate_solver_config(config);
    ParsingResult result;
    result.trace.strategy = config.strategy;
    result.trace.selected_seed = config.seed;

    if (ensemble.empty()) {
        result.partition = validate_partition({}, ensemble, config);
        return result;
    }

    switch (config.strategy) {
        case Strategy::exhaustive: {
            std::vector<Partition> valid = enumerate_all_parsings(ensemble, config);
            if (ensemble.size() <= 25) {
                result.trace.candidates_examined =
                    std::stoull(bell_number(static_cast<unsigned>(ensemble.size())));
            }
            if (!valid.empty()) result.partition = std::move(valid.front());
            break;
        }
        case Strategy::phase_binning: {
            PhaseBinner binner(ensemble, config);
            result.partition = binner.run(result.trace);
            break;
        }
        case Strategy::annealing: {
            PhaseBinner binner(ensemble, config);
            const Partition start = binner.run(result.trace);
            const unsigned chains = config.annealing.chains;
            std::vector<ChainResult> outcomes(chains);
            parallel_chunks(chains, config.threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t c = begin; c < end; ++c) {
                    try {
                        AnnealingChain chain(ensemble, config, start,
                                             chain_seed(config.seed, static_cast<unsigned>(c)));
                        outcomes[c] = chain.run();
                    } catch (...) {
                        outcomes[c].error = std::current_exception();
                    }
                }
            });
            std::size_t winner = 0;
            for (std::size_t c = 0; c < chains; ++c) {
                if (outcomes[c].error) std::rethrow_exception(outcomes[c].error);
                result.trace.moves_tried += outcomes[c].tried;
                result.trace.moves_accepted += outcomes[c].accepted;
                if (c > 0 && ranks_before(outcomes[c].best, outcomes[winner].best)) winner = c;
            }
            result.trace.chains = chains;
            result.trace.selected_seed = chain_seed(config.seed, static_cast<unsigned>(winner));
            result.partition = std::move(outcomes[winner].best);
            break;
        }
    }

    if (result.partition.sets.empty() || !result.partition.valid()) {
        result.partition = trivial_partition(ensemble, config);
        result.trace.fell_back = true;
    }
    result.finer_than_trivial = result.partition.sets.size() >= 2;
    if (!result.finer_than_trivial) {
        const double n = static_cast<double>(ensemble.size());
        result.maximal_coherence =
            std::abs(result.partition.total_probability - n * n) <= 1e-9 * n * n;
    }
    return result;
}

}  // namespace pathparse
