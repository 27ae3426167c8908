#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "trellis/binomial.hpp"

namespace trellis {

/**
 * A commutative semiring (S, add, mul, zero, one) with an annihilating zero.
 *
 * Instances are stateless tag types exposing static operations on
 * `value_type`. `from_real` maps a nonnegative real-domain weight (as stored
 * in trellis files) into the carrier; every instance maps 1.0 to `one()` and
 * 0.0 to `zero()`.
 */
template <class S>
concept Semiring = requires(typename S::value_type a, typename S::value_type b, double x) {
    typename S::value_type;
    { S::name } -> std::convertible_to<std::string_view>;
    { S::zero() } -> std::same_as<typename S::value_type>;
    { S::one() } -> std::same_as<typename S::value_type>;
    { S::add(a, b) } -> std::same_as<typename S::value_type>;
    { S::mul(a, b) } -> std::same_as<typename S::value_type>;
    { S::from_real(x) } -> std::same_as<typename S::value_type>;
};

/// Semirings whose carrier maps back to ordinary reals; numerator ratios
/// (normalized moments) are defined for these.
template <class S>
concept RealValuedSemiring = Semiring<S> && requires(typename S::value_type a, typename S::value_type b) {
    { S::to_real(a) } -> std::same_as<double>;
    { S::ratio(a, b) } -> std::same_as<double>;
};

/// Ordinary real arithmetic (+, x, 0, 1).
struct RealSemiring {
    using value_type = double;
    static constexpr std::string_view name = "real";
    static constexpr bool floating = true;

    static constexpr double zero() { return 0.0; }
    static constexpr double one() { return 1.0; }
    static constexpr double add(double a, double b) { return a + b; }
    static constexpr double mul(double a, double b) { return a * b; }
    static constexpr double scale(std::uint64_t n, double a) { return static_cast<double>(n) * a; }
    static constexpr double from_real(double x) { return x; }
    static constexpr double to_real(double a) { return a; }
    static constexpr double ratio(double a, double b) { return a / b; }
};

/// Reals carried as natural logarithms: add is log-sum-exp, mul is +.
struct LogRealSemiring {
    using value_type = double;
    static constexpr std::string_view name = "logreal";
    static constexpr bool floating = true;

    static constexpr double zero() { return -std::numeric_limits<double>::infinity(); }
    static constexpr double one() { return 0.0; }
    static double add(double a, double b)
    {
        if (a == zero()) return b;
        if (b == zero()) return a;
        const double hi = std::max(a, b);
        return hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
    static constexpr double mul(double a, double b)
    {
        if (a == zero() || b == zero()) return zero();
        return a + b;
    }
    static double scale(std::uint64_t n, double a)
    {
        if (n == 0 || a == zero()) return zero();
        return a + std::log(static_cast<double>(n));
    }
    static double from_real(double x) { return x == 0.0 ? zero() : std::log(x); }
    static double to_real(double a) { return std::exp(a); }
    static double ratio(double a, double b) { return a == zero() ? 0.0 : std::exp(a - b); }
};

/// (min, +) over the extended reals; with -log weights this is Viterbi.
struct TropicalSemiring {
    using value_type = double;
    static constexpr std::string_view name = "tropical";
    static constexpr bool floating = true;

    static constexpr double zero() { return std::numeric_limits<double>::infinity(); }
    static constexpr double one() { return 0.0; }
    static constexpr double add(double a, double b) { return std::min(a, b); }
    static constexpr double mul(double a, double b)
    {
        if (a == zero() || b == zero()) return zero();
        return a + b;
    }
    static constexpr double scale(std::uint64_t n, double a) { return n == 0 ? zero() : a; }
    static double from_real(double x) { return x == 0.0 ? zero() : -std::log(x); }
};

/// (max, x) over the nonnegative reals.
struct MaxProductSemiring {
    using value_type = double;
    static constexpr std::string_view name = "maxprod";
    static constexpr bool floating = true;

    static constexpr double zero() { return 0.0; }
    static constexpr double one() { return 1.0; }
    static constexpr double add(double a, double b) { return std::max(a, b); }
    static constexpr double mul(double a, double b) { return a * b; }
    static constexpr double scale(std::uint64_t n, double a) { return n == 0 ? zero() : a; }
    static constexpr double from_real(double x) { return x; }
};

/// (or, and, false, true).
struct BooleanSemiring {
    using value_type = bool;
    static constexpr std::string_view name = "boolean";
    static constexpr bool floating = false;

    static constexpr bool zero() { return false; }
    static constexpr bool one() { return true; }
    static constexpr bool add(bool a, bool b) { return a || b; }
    static constexpr bool mul(bool a, bool b) { return a && b; }
    static constexpr bool scale(std::uint64_t n, bool a) { return n != 0 && a; }
    static constexpr bool from_real(double x) { return x > 0.0; }
};

/// n-fold sum a + a + ... + a; zero for n = 0. Uses the instance's closed
/// form when it has one, otherwise double-and-add.
template <Semiring S>
typename S::value_type nat_scale(std::uint64_t n, typename S::value_type a)
{
    if constexpr (requires { S::scale(n, a); }) {
        return S::scale(n, a);
    } else {
        auto result = S::zero();
        auto addend = a;
        while (n != 0) {
            if (n & 1U) result = S::add(result, addend);
            addend = S::add(addend, addend);
            n >>= 1U;
        }
        return result;
    }
}

/// n-fold sum by plain repetition; reference for nat_scale.
template <Semiring S>
typename S::value_type repeated_sum(std::uint64_t n, typename S::value_type a)
{
    auto result = S::zero();
    for (std::uint64_t k = 0; k < n; ++k) result = S::add(result, a);
    return result;
}

/// m-fold product a * a * ... * a; one for m = 0.
template <Semiring S>
typename S::value_type power(typename S::value_type a, unsigned m)
{
    auto result = S::one();
    for (unsigned k = 0; k < m; ++k) result = S::mul(result, a);
    return result;
}

/// Right-hand side of the semiring binomial theorem:
/// sum over l of C(m,l) (a^l * b^(m-l)). Equals power(add(a, b), m).
template <Semiring S>
typename S::value_type semiring_binomial(typename S::value_type a, typename S::value_type b, unsigned m)
{
    const auto& binom = BinomialTable::instance();
    auto sum = S::zero();
    for (unsigned l = 0; l <= m; ++l)
        sum = S::add(sum, nat_scale<S>(binom(m, l), S::mul(power<S>(a, l), power<S>(b, m - l))));
    return sum;
}

/// Runtime identifier of a provided semiring instance.
enum class SemiringId { real, logreal, tropical, maxprod, boolean };

std::optional<SemiringId> parse_semiring(std::string_view id);
std::string_view to_string(SemiringId id);

/// Calls `fn(S{})` with the semiring type selected by `id`.
template <class Fn>
decltype(auto) dispatch_semiring(SemiringId id, Fn&& fn)
{
    switch (id) {
    case SemiringId::logreal: return fn(LogRealSemiring{});
    case SemiringId::tropical: return fn(TropicalSemiring{});
    case SemiringId::maxprod: return fn(MaxProductSemiring{});
    case SemiringId::boolean: return fn(BooleanSemiring{});
    case SemiringId::real: break;
    }
    return fn(RealSemiring{});
}

} // namespace trellis
