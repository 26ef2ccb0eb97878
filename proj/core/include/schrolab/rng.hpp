#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace schrolab {

// Philox4x32-10 (Salmon et al. 2011). Stateless: output is a pure function of
// (key, counter), so every draw can be addressed by (realization, step, mode).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

enum class StreamPurpose : std::uint32_t {
    FieldInit = 1,
    FieldStep = 2,
    LimitPhase = 3,
    LimitField = 4,
    Fbm = 5,
    OracleMc = 6,
    Generic = 7,
};

// A stream is a key plus a 64-bit "row" counter; each call to block(row, col)
// returns four uint32 words. Rows are usually time steps, cols mode indices.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t master_seed, std::uint64_t realization, StreamPurpose purpose);

    std::array<std::uint32_t, 4> block(std::uint64_t row, std::uint64_t col) const noexcept;

    // Two independent standard normals from one block.
    std::array<double, 2> normal_pair(std::uint64_t row, std::uint64_t col) const noexcept;
    // Complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal(std::uint64_t row, std::uint64_t col) const noexcept;
    // Two uniforms in (0,1) from one block.
    std::array<double, 2> uniform_pair(std::uint64_t row, std::uint64_t col) const noexcept;

    std::uint64_t key64() const noexcept { return key_; }

private:
    std::uint64_t key_ = 0;
    std::uint32_t purpose_ = 0;
};

// Convenience sequential generator on top of a stream (for Monte Carlo loops).
class SequentialRng {
public:
    explicit SequentialRng(RngStream stream, std::uint64_t row = 0) : stream_(stream), row_(row) {}

    double uniform() noexcept;  // (0,1)
    double normal() noexcept;

private:
    RngStream stream_;
    std::uint64_t row_;
    std::uint64_t col_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
    std::uint32_t next_word() noexcept;
};

}  // namespace schrolab
