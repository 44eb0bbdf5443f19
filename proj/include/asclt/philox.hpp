#ifndef ASCLT_PHILOX_HPP
#define ASCLT_PHILOX_HPP

// Counter-based random numbers (Philox4x32-10, Salmon et al., SC'11).
// A draw is a pure function of (key, counter), so any element of a stream can
// be regenerated independently of every other element.

#include <array>
#include <cstdint>

namespace asclt
{

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

[[nodiscard]] constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    constexpr std::uint64_t m0 = 0xD2511F53u;
    constexpr std::uint64_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round)
    {
        std::uint64_t const p0 = m0 * ctr[0];
        std::uint64_t const p1 = m1 * ctr[2];
        auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto const lo0 = static_cast<std::uint32_t>(p0);
        auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto const lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// 128 random bits addressed by (seed, tag, stream, index).
///
/// `tag` separates independent sub-streams that share a seed (different
/// distribution families, auxiliary draws, ...).
struct RandomBlock
{
    std::uint64_t hi;
    std::uint64_t lo;
};

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr RandomBlock random_block(std::uint64_t seed, std::uint64_t tag, std::uint64_t stream,
                                                 std::uint64_t index) noexcept
{
    std::uint64_t const k = seed ^ mix64(tag);
    PhiloxKey const key{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    PhiloxCounter const ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    auto const out = philox4x32_10(ctr, key);
    return {(std::uint64_t{out[0]} << 32) | out[1], (std::uint64_t{out[2]} << 32) | out[3]};
}

/// Uniform on (0, 1]: never returns zero, so log() is always finite.
[[nodiscard]] constexpr double to_unit_open_closed(std::uint64_t bits) noexcept
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on [0, 1).
[[nodiscard]] constexpr double to_unit(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace asclt

#endif
