#pragma once

#include <array>
#include <cstdint>

namespace qhedge {

/// Counter-based generator (Philox4x32-10). Every draw is a pure function of
/// (seed, counter), so sample i never depends on how work is split across threads.
class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    std::array<std::uint32_t, 4> operator()(Counter ctr) const;

    /// Two uniforms in the open interval (0, 1) built from the 128-bit block at `ctr`.
    std::array<double, 2> uniforms(Counter ctr) const;

private:
    std::array<std::uint32_t, 2> key_;
};

/// Stream tags keep the different consumers of one seed independent.
enum class Stream : std::uint32_t {
    TerminalSample = 0x51a7e001u,
    PathIncrement = 0x9a7b0002u,
};

/// Standard normal draw number `index` of `stream` (inverse-CDF of the counter stream).
double standard_normal(const Philox& gen, Stream stream, std::uint64_t index, std::uint32_t lane = 0);

}  // namespace qhedge
