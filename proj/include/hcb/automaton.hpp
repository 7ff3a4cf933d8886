#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hcb/word.hpp"

namespace hcb {

// Orders still waiting for a burger, seen while reading a word right to left.
// Segments of H/C counts are separated by pending F's; the top segment holds
// the leftmost orders. A burger takes the leftmost pending order it can serve:
// an order of its own type in the top segment, else the F below the top.
class LeftwardMatcher {
public:
    enum class Outcome : std::uint8_t { order, separator, floor, pushed };

    LeftwardMatcher() { reset(); }

    void reset() {
        below_.clear();
        top_ = {0, 0};
    }

    Outcome feed(Letter x) {
        switch (x) {
            case Letter::H: ++top_[0]; return Outcome::pushed;
            case Letter::C: ++top_[1]; return Outcome::pushed;
            case Letter::F:
                below_.push_back(top_);
                top_ = {0, 0};
                return Outcome::pushed;
            default: break;
        }
        const int t = x == Letter::h ? 0 : 1;
        if (top_[t] > 0) {
            --top_[t];
            return Outcome::order;
        }
        if (below_.empty()) return Outcome::floor;
        const auto& b = below_.back();
        top_[0] += b[0];
        top_[1] += b[1];
        below_.pop_back();
        return Outcome::separator;
    }

    std::size_t separators() const noexcept { return below_.size(); }
    std::int64_t top_h() const noexcept { return top_[0]; }
    std::int64_t top_c() const noexcept { return top_[1]; }

private:
    // Segments strictly below the top one, i.e. to the right of it in the word.
    std::vector<std::array<std::int64_t, 2>> below_;
    std::array<std::int64_t, 2> top_{};
};

}  // namespace hcb
