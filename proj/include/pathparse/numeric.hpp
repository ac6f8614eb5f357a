#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace pathparse {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Neumaier's variant of Kahan summation. Order-dependent but deterministic.
class CompensatedSum {
public:
    CompensatedSum& add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    CompensatedSum& operator+=(double x) noexcept { return add(x); }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Compensated accumulation of unit phasors exp(i*phase).
class PhasorSum {
public:
    void add(double cos_part, double sin_part) noexcept {
        re_.add(cos_part);
        im_.add(sin_part);
    }
    void add_phase(double phase) noexcept { add(std::cos(phase), std::sin(phase)); }
    double real() const noexcept { return re_.value(); }
    double imag() const noexcept { return im_.value(); }
    std::complex<double> value() const noexcept { return {real(), imag()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

inline double compensated_total(std::span<const double> values) noexcept {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

// Reduce an angle to [0, 2*pi).
inline double wrap_phase(double phase) noexcept {
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// Runs body(begin, end) over contiguous chunks of [0, count). Chunk boundaries
// depend on the thread count, so callers keep per-index results and reduce
// them afterwards in index order.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(threads == 0 ? 1 : threads, count));
    if (workers <= 1) {
        body(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

}  // namespace pathparse
