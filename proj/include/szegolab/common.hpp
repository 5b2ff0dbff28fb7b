#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace szegolab {

// Signals |P_n| exceeding the overflow cap during a three-term recurrence;
// carries the index at which growth was detected.
class recurrence_overflow : public std::runtime_error {
public:
    recurrence_overflow(long index, double magnitude)
        : std::runtime_error("orthonormal polynomial magnitude " + std::to_string(magnitude) +
                             " exceeds overflow cap at index " + std::to_string(index)),
          index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

// Compensated (Kahan) accumulator.  Deterministic for a fixed order of addends,
// which is what the byte-identical-output contract needs.
class KahanSum {
public:
    void add(double x) noexcept {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// splitmix64: counter-based generator used for the seeded error terms.
// Referentially transparent (value depends on key only), so coefficient
// evaluation stays pure and safe to call concurrently.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic value in [-1, 1] for (seed, index, channel).
inline double unit_noise(std::uint64_t seed, long index, int channel) noexcept {
    std::uint64_t key = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) * 2u +
                                                     static_cast<std::uint64_t>(channel)));
    // 53 uniform bits -> [0,1) -> [-1,1)
    double u = static_cast<double>(key >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

// Runs fn(i) for i in [0, count) on a small worker pool.  Thread count comes
// from the SZEGO_LAB_THREADS environment variable when set (minimum 1),
// otherwise hardware concurrency.  Units must be independent; results indexed
// by i stay deterministic regardless of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Number of worker threads parallel_for would use.
unsigned worker_count();

}  // namespace szegolab
