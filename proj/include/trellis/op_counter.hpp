#pragma once

#include <cstdint>

namespace trellis {

/// Tally of semiring operations performed by an instrumented run.
/// `multiplications` and `additions` cover the recursion itself; the
/// per-edge g-power table is tallied separately in `power_multiplications`.
struct OpCounter {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;
    std::uint64_t power_multiplications = 0;

    void mul(std::uint64_t n = 1) { multiplications += n; }
    void add(std::uint64_t n = 1) { additions += n; }
    void power_mul(std::uint64_t n = 1) { power_multiplications += n; }

    std::uint64_t recursion_total() const { return multiplications + additions; }

    OpCounter& operator+=(const OpCounter& other)
    {
        multiplications += other.multiplications;
        additions += other.additions;
        power_multiplications += other.power_multiplications;
        return *this;
    }
};

/// Counter that compiles away.
struct NoCount {
    void mul(std::uint64_t = 1) {}
    void add(std::uint64_t = 1) {}
    void power_mul(std::uint64_t = 1) {}
    NoCount& operator+=(const NoCount&) { return *this; }
};

} // namespace trellis
