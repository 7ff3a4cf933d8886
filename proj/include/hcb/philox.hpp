#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hcb {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
// 128-bit counter is split into a 64-bit block index and a 64-bit stream id,
// so (seed, stream) pairs give independent, reproducible sequences.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (used_ == 2) refill();
        return buf_[used_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t blocks_used() const noexcept { return block_; }

    static Block encrypt(Block ctr, Key key) noexcept {
        ctr = round(ctr, key);
        for (int r = 1; r < 10; ++r) {
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
            ctr = round(ctr, key);
        }
        return ctr;
    }

private:
    static Block round(const Block& x, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * x[0];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * x[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }

    void refill() noexcept {
        const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const Block out = encrypt(ctr, key_);
        buf_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buf_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++block_;
        used_ = 0;
    }

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int used_ = 2;
};

}  // namespace hcb
