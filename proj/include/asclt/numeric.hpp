#ifndef ASCLT_NUMERIC_HPP
#define ASCLT_NUMERIC_HPP

// Small numerical kernels shared by the rest of the library: compensated
// summation and cos/sin of rational multiples of 2*pi.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <tuple>
#include <utility>

namespace asclt
{

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
/// when a term is larger in magnitude than the running sum.
class CompensatedSum
{
  public:
    constexpr CompensatedSum() = default;

    constexpr void add(double term) noexcept
    {
        double const t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term))
            carry_ += (sum_ - t) + term;
        else
            carry_ += (term - t) + sum_;
        sum_ = t;
    }

    constexpr CompensatedSum& operator+=(double term) noexcept
    {
        add(term);
        return *this;
    }

    [[nodiscard]] constexpr double value() const noexcept { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

[[nodiscard]] inline double compensated_dot(std::span<double const> a, std::span<double const> b) noexcept
{
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc.add(a[i] * b[i]);
    return acc.value();
}

/// cos(2*pi*t/n) and sin(2*pi*t/n) for integers 0 <= t < n.
///
/// The angle is folded by exact integer arithmetic so that the libm call
/// always sees an argument in [0, pi/4]. This makes the usual symmetries
/// (t <-> n-t, quarter turns) hold bit-for-bit.
[[nodiscard]] inline std::pair<double, double> cos_sin_turn(std::uint64_t t, std::uint64_t n) noexcept
{
    t %= n;
    double sin_sign = 1.0;
    if (2 * t > n)
    {
        t = n - t;
        sin_sign = -1.0;
    }
    // Now 0 <= t <= n/2, angle in [0, pi].
    constexpr double pi = std::numbers::pi;
    double const dn = static_cast<double>(n);
    double c = 0.0;
    double s = 0.0;
    constexpr double half_sqrt2 = std::numbers::sqrt2 / 2.0;
    if (8 * t == n || 8 * t == 3 * n)
    {
        c = 8 * t == n ? half_sqrt2 : -half_sqrt2;
        s = half_sqrt2;
    }
    else if (8 * t <= n)
    {
        double const a = 2.0 * pi * static_cast<double>(t) / dn;
        c = std::cos(a);
        s = std::sin(a);
    }
    else if (8 * t < 3 * n)
    {
        // angle = pi/2 - b with b = pi*(n - 4t)/(2n), |b| <= pi/4
        auto const q = static_cast<double>(static_cast<std::int64_t>(n) - 4 * static_cast<std::int64_t>(t));
        double const b = pi * q / (2.0 * dn);
        c = std::sin(b);
        s = std::cos(b);
    }
    else
    {
        // angle = pi - b with b = pi*(n - 2t)/n, 0 <= b <= pi/4
        double const b = pi * static_cast<double>(n - 2 * t) / dn;
        c = -std::cos(b);
        s = std::sin(b);
    }
    return {c, sin_sign * s};
}

[[nodiscard]] constexpr std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) noexcept
{
    while (b != 0)
    {
        std::uint64_t const t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Multiplicative inverse of a modulo n; requires gcd(a, n) == 1.
[[nodiscard]] constexpr std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t n) noexcept
{
    std::int64_t t = 0, new_t = 1;
    auto r = static_cast<std::int64_t>(n);
    auto new_r = static_cast<std::int64_t>(a % n);
    while (new_r != 0)
    {
        std::int64_t const q = r / new_r;
        std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
        std::tie(r, new_r) = std::pair{new_r, r - q * new_r};
    }
    if (t < 0)
        t += static_cast<std::int64_t>(n);
    return static_cast<std::uint64_t>(t);
}

} // namespace asclt

#endif
