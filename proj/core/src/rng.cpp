#include "schrolab/rng.hpp"

#include <cmath>
#include <numbers>

namespace schrolab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in the open interval (0,1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter c, Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t realization, StreamPurpose purpose)
    : key_(splitmix64(splitmix64(master_seed) ^ splitmix64(realization + 0x632BE59BD9B4E019ull))),
      purpose_(static_cast<std::uint32_t>(purpose)) {}

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t row, std::uint64_t col) const noexcept {
    // col gets 32 bits plus the purpose tag in the top word; rows get 64 bits.
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32),
                                     static_cast<std::uint32_t>(col),
                                     static_cast<std::uint32_t>(col >> 32) ^ (purpose_ << 24)};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    return Philox4x32::generate(ctr, key);
}

std::array<double, 2> RngStream::uniform_pair(std::uint64_t row, std::uint64_t col) const noexcept {
    const auto b = block(row, col);
    return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

std::array<double, 2> RngStream::normal_pair(std::uint64_t row, std::uint64_t col) const noexcept {
    const auto u = uniform_pair(row, col);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double th = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(th), r * std::sin(th)};
}

std::complex<double> RngStream::complex_normal(std::uint64_t row, std::uint64_t col) const noexcept {
    const auto g = normal_pair(row, col);
    return {g[0] * std::numbers::sqrt2 / 2.0, g[1] * std::numbers::sqrt2 / 2.0};
}

std::uint32_t SequentialRng::next_word() noexcept {
    if (used_ == 4) {
        buf_ = stream_.block(row_, col_++);
        used_ = 0;
    }
    return buf_[used_++];
}

double SequentialRng::uniform() noexcept {
    const std::uint32_t hi = next_word();
    const std::uint32_t lo = next_word();
    return to_open_unit(hi, lo);
}

double SequentialRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

}  // namespace schrolab
