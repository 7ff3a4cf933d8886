#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <stdexcept>

#include "hcb/philox.hpp"
#include "hcb/word.hpp"

namespace hcb {

template <class S>
concept LetterSource = requires(S& s) {
    { s.next() } -> std::same_as<Letter>;
};

// I.i.d. letters. At p = 1/2 every weight is a multiple of 1/8, so each letter
// costs three random bits.
class LetterStream {
public:
    LetterStream(const WeightTable& w, std::uint64_t seed, std::uint64_t stream)
        : eng_(seed, stream), dyadic_(w.dyadic()) {
        const double q = (1.0 - w.p()) / 4.0;
        cut_ = {0.25, 0.5, 0.5 + q, 0.5 + 2.0 * q};
    }

    Letter next() noexcept {
        ++drawn_;
        if (dyadic_) {
            if (nbits_ < 3) {
                bits_ = eng_();
                nbits_ = 63;
            }
            const auto b = static_cast<unsigned>(bits_ & 7u);
            bits_ >>= 3;
            nbits_ -= 3;
            return kDyadic[b];
        }
        const double u = eng_.uniform();
        if (u < cut_[0]) return Letter::h;
        if (u < cut_[1]) return Letter::c;
        if (u < cut_[2]) return Letter::H;
        if (u < cut_[3]) return Letter::C;
        return Letter::F;
    }

    std::uint64_t drawn() const noexcept { return drawn_; }
    Philox4x32& engine() noexcept { return eng_; }

private:
    static constexpr std::array<Letter, 8> kDyadic{Letter::h, Letter::h, Letter::c, Letter::c,
                                                   Letter::H, Letter::C, Letter::F, Letter::F};
    Philox4x32 eng_;
    bool dyadic_;
    std::array<double, 4> cut_{};
    std::uint64_t bits_ = 0;
    int nbits_ = 0;
    std::uint64_t drawn_ = 0;
};

// Reads a finite word from its right end towards its left end.
class ReverseWordSource {
public:
    explicit ReverseWordSource(const Word& w) : w_(&w), pos_(w.size()) {}
    Letter next() {
        if (pos_ == 0) throw std::out_of_range("word exhausted");
        return (*w_)[--pos_];
    }
    std::size_t remaining() const noexcept { return pos_; }

private:
    const Word* w_;
    std::size_t pos_;
};

// Reads a finite word left to right.
class ForwardWordSource {
public:
    explicit ForwardWordSource(const Word& w) : w_(&w) {}
    Letter next() {
        if (pos_ == w_->size()) throw std::out_of_range("word exhausted");
        return (*w_)[pos_++];
    }
    std::size_t consumed() const noexcept { return pos_; }

private:
    const Word* w_;
    std::size_t pos_ = 0;
};

// Stream ids used by one replica: its forward window and the past to its left.
inline constexpr std::uint64_t forward_stream(std::uint64_t replica) noexcept { return 2 * replica; }
inline constexpr std::uint64_t backward_stream(std::uint64_t replica) noexcept { return 2 * replica + 1; }

Word sample_word(std::size_t n, const WeightTable& w, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace hcb
