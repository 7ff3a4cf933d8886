#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hcb {

enum class Letter : std::uint8_t { h = 0, c = 1, H = 2, C = 3, F = 4 };

inline constexpr bool is_burger(Letter x) noexcept { return x == Letter::h || x == Letter::c; }
inline constexpr bool is_order(Letter x) noexcept { return !is_burger(x); }

char to_char(Letter x) noexcept;
Letter letter_from_char(char ch);  // throws std::invalid_argument

// Mirror image under h<->c, H<->C.
inline constexpr Letter swap_type(Letter x) noexcept {
    switch (x) {
        case Letter::h: return Letter::c;
        case Letter::c: return Letter::h;
        case Letter::H: return Letter::C;
        case Letter::C: return Letter::H;
        default: return x;
    }
}

class WeightTable {
public:
    explicit WeightTable(double p = 0.5);  // throws std::invalid_argument unless 0 <= p <= 1
    double p() const noexcept { return p_; }
    double weight(Letter x) const noexcept;
    bool dyadic() const noexcept { return p_ == 0.5; }

private:
    double p_;
};

struct Word {
    std::vector<Letter> letters;
    std::int64_t origin = 1;  // index of letters[0] in the bi-infinite sequence

    Word() = default;
    explicit Word(std::vector<Letter> l, std::int64_t o = 1) : letters(std::move(l)), origin(o) {}
    static Word parse(std::string_view s);  // whitespace ignored

    std::size_t size() const noexcept { return letters.size(); }
    bool empty() const noexcept { return letters.empty(); }
    Letter operator[](std::size_t i) const noexcept { return letters[i]; }
    std::string str() const;
    bool operator==(const Word& o) const { return letters == o.letters; }
};

// Canonical form: unmatched orders (in word order) followed by unmatched burgers.
struct ReducedWord {
    std::vector<Letter> orders;
    std::vector<Letter> burgers;

    bool empty() const noexcept { return orders.empty() && burgers.empty(); }
    std::size_t size() const noexcept { return orders.size() + burgers.size(); }
    Word word() const;
    std::string str() const { return word().str(); }
    auto operator<=>(const ReducedWord&) const = default;
};

ReducedWord reduce(std::span<const Letter> w);
inline ReducedWord reduce(const Word& w) { return reduce(std::span<const Letter>(w.letters)); }

enum class MatchKind : std::uint8_t { none, h, c, unknown };

// offset[i] = partner - i, zero when unmatched. kind[i] is set for F letters:
// the burger type an F consumed, or unknown when it is unmatched in the word.
struct MatchTable {
    std::vector<std::int64_t> offset;
    std::vector<MatchKind> kind;

    std::size_t size() const noexcept { return offset.size(); }
    bool matched(std::size_t i) const noexcept { return offset[i] != 0; }
    std::optional<std::size_t> partner(std::size_t i) const noexcept {
        if (offset[i] == 0) return std::nullopt;
        return static_cast<std::size_t>(static_cast<std::int64_t>(i) + offset[i]);
    }
    std::size_t unmatched_count() const noexcept;
};

MatchTable match_positions(std::span<const Letter> w);
inline MatchTable match_positions(const Word& w) { return match_positions(std::span<const Letter>(w.letters)); }

}  // namespace hcb
