#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (counter, key), so any partition of the sample index space
// across workers reproduces the same stream.

#include <array>
#include <cmath>
#include <cstdint>

namespace lmra {

struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static constexpr Counter generate(Counter c, Key k) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += W0;
                k[1] += W1;
            }
            const std::uint64_t p0 = std::uint64_t(M0) * c[0];
            const std::uint64_t p1 = std::uint64_t(M1) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        }
        return c;
    }
};

/// Uniform double in (0, 1) from two 32-bit words; never returns 0 or 1.
constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 12;
    return (double(bits) + 0.5) * 0x1.0p-52;
}

/// Two uniforms for sample `index` of stream `stream`, draw `draw`.
/// The 64-bit seed is the key.
inline std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t index,
                                          std::uint32_t stream, std::uint32_t draw) {
    const Philox4x32::Counter c{std::uint32_t(index), std::uint32_t(index >> 32), stream, draw};
    const Philox4x32::Key k{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto r = Philox4x32::generate(c, k);
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

} // namespace lmra
