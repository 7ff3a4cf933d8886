#include "hcb/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hcb/bijection.hpp"

namespace hcb {

namespace {

constexpr std::array<Letter, 5> kLetters{Letter::h, Letter::c, Letter::H, Letter::C, Letter::F};

// Weight of a letter at p = 1/2 in units of 1/8.
constexpr std::uint64_t eighths(Letter x) { return x == Letter::H || x == Letter::C ? 1 : 2; }

Letter burger_for(Letter order) { return order == Letter::H ? Letter::h : Letter::c; }

void check_cap(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap) throw std::invalid_argument(std::string(what) + ": length " + std::to_string(n) + " exceeds " +
                                             std::to_string(cap));
}

// Appends x to a reduced word.
void push_reduced(ReducedWord& r, Letter x) {
    if (is_burger(x)) {
        r.burgers.push_back(x);
        return;
    }
    if (x == Letter::F) {
        if (r.burgers.empty()) r.orders.push_back(x);
        else r.burgers.pop_back();
        return;
    }
    const Letter b = burger_for(x);
    const auto it = std::find(r.burgers.rbegin(), r.burgers.rend(), b);
    if (it == r.burgers.rend()) r.orders.push_back(x);
    else r.burgers.erase(std::next(it).base());
}

struct Mass {
    double weight = 0.0;
    std::uint64_t numerator = 0;
    std::uint64_t words = 0;
};

}  // namespace

double word_weight(const Word& w, const WeightTable& t) {
    double p = 1.0;
    for (Letter x : w.letters) p *= t.weight(x);
    return p;
}

std::uint64_t word_weight_numerator(const Word& w) {
    std::uint64_t k = 1;
    for (Letter x : w.letters) k *= eighths(x);
    return k;
}

WeightedEnumeration enumerate_words(std::size_t n, const std::function<bool(const Word&)>& predicate,
                                    std::string description, const WeightTable& t) {
    check_cap(n, 16, "enumerate_words");
    WeightedEnumeration out{std::move(description), n, 0, 0.0, 0, t.dyadic()};
    Word w;
    w.letters.assign(n, Letter::h);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) w.letters[i] = kLetters[idx[i]];
        if (predicate(w)) {
            ++out.matching_words;
            out.weight += word_weight(w, t);
            if (out.exact) out.numerator += word_weight_numerator(w);
        }
        std::size_t k = 0;
        while (k < n && ++idx[k] == 5) idx[k++] = 0;
        if (k == n) break;
    }
    return out;
}

WeightedEnumeration enumerate_reduced(std::size_t n, const std::function<bool(const ReducedWord&)>& predicate,
                                      std::string description, const WeightTable& t) {
    check_cap(n, 16, "enumerate_reduced");
    std::map<ReducedWord, Mass> layer{{ReducedWord{}, Mass{1.0, 1, 1}}};
    for (std::size_t i = 0; i < n; ++i) {
        std::map<ReducedWord, Mass> next;
        for (const auto& [r, m] : layer) {
            for (Letter x : kLetters) {
                ReducedWord s = r;
                push_reduced(s, x);
                Mass& to = next[std::move(s)];
                to.weight += m.weight * t.weight(x);
                to.numerator += m.numerator * eighths(x);
                to.words += m.words;
            }
        }
        layer = std::move(next);
    }
    WeightedEnumeration out{std::move(description), n, 0, 0.0, 0, t.dyadic()};
    for (const auto& [r, m] : layer) {
        if (!predicate(r)) continue;
        out.matching_words += m.words;
        out.weight += m.weight;
        if (out.exact) out.numerator += m.numerator;
    }
    return out;
}

double StepPmf::excursion_mass(Letter closing) const {
    double s = 0.0;
    for (const auto& a : atoms)
        if (a.excursion && a.letter == closing) s += a.prob;
    return s;
}

double StepPmf::mean_xi() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob * static_cast<double>(a.xi);
    return s;
}

StepPmf excursion_pmf(std::size_t max_len, const WeightTable& t) {
    check_cap(max_len, 16, "excursion_pmf");
    StepPmf pmf;
    pmf.max_len = max_len;
    for (Letter x : {Letter::h, Letter::c, Letter::H, Letter::C})
        pmf.atoms.push_back({false, x, is_burger(x) ? -1 : 1, 1, t.weight(x), eighths(x)});
    // An F-excursion read left to right is a burger b, a middle block whose
    // reduction consists of xi orders of the other type only, and the F.
    for (Letter b : {Letter::h, Letter::c}) {
        const Letter other = b == Letter::h ? Letter::C : Letter::H;
        // state: (unmatched orders of type `other`, pending burgers as a string)
        std::map<std::pair<std::int64_t, std::string>, Mass> layer{{{0, ""}, Mass{1.0, 1, 1}}};
        const double w_end = t.weight(b) * t.weight(Letter::F);
        const std::uint64_t k_end = eighths(b) * eighths(Letter::F);
        for (std::size_t m = 0; m + 2 <= max_len; ++m) {
            std::map<std::int64_t, Mass> done;
            for (const auto& [s, mass] : layer)
                if (s.second.empty()) done[s.first] = mass;
            for (const auto& [xi, mass] : done)
                pmf.atoms.push_back({true, b, xi, m + 2, mass.weight * w_end, mass.numerator * k_end});
            if (m + 3 > max_len) break;
            const std::size_t remaining = max_len - 2 - (m + 1);
            std::map<std::pair<std::int64_t, std::string>, Mass> next;
            for (const auto& [s, mass] : layer) {
                for (Letter x : kLetters) {
                    auto [xi, stack] = s;
                    if (is_burger(x)) {
                        stack.push_back(x == Letter::h ? 'h' : 'c');
                    } else if (x == Letter::F) {
                        if (stack.empty()) continue;
                        stack.pop_back();
                    } else {
                        const char want = x == Letter::H ? 'h' : 'c';
                        const auto pos = stack.rfind(want);
                        if (pos != std::string::npos) stack.erase(pos, 1);
                        else if (x == other) ++xi;
                        else continue;
                    }
                    if (stack.size() > remaining) continue;
                    Mass& to = next[{xi, std::move(stack)}];
                    to.weight += mass.weight * t.weight(x);
                    to.numerator += mass.numerator * eighths(x);
                    to.words += mass.words;
                }
            }
            layer = std::move(next);
        }
    }
    for (const auto& a : pmf.atoms) pmf.enumerated += a.prob;
    pmf.residual = std::max(0.0, 1.0 - pmf.enumerated);
    if (!t.dyadic())
        for (auto& a : pmf.atoms) a.numerator = 0;
    return pmf;
}

TauPmf exact_tau_pmf(std::size_t max_len, std::size_t max_m, const WeightTable& t) {
    const StepPmf steps = excursion_pmf(max_len, t);
    // Law of the h coordinate's increments along h-side steps: h, H, and
    // excursions closed by c. Each side carries mass 1/2.
    std::map<std::int64_t, double> q;
    for (const auto& a : steps.atoms) {
        const bool h_side = a.excursion ? a.letter == Letter::c : (a.letter == Letter::h || a.letter == Letter::H);
        if (h_side) q[a.xi] += 2.0 * a.prob;
    }
    const double rho = std::max(0.0, 1.0 - [&] {
        double s = 0.0;
        for (const auto& [k, v] : q) s += v;
        return s;
    }());
    const double down = q.at(-1);
    TauPmf out;
    out.lower.assign(max_m + 1, 0.0);
    out.upper.assign(max_m + 1, 0.0);
    std::vector<double> dist{1.0};  // position of the walk, killed on hitting -1
    for (std::size_t m = 1; m <= max_m; ++m) {
        out.lower[m] = dist[0] * down;
        out.upper[m] = out.lower[m] + (1.0 - std::pow(1.0 - rho, static_cast<double>(m - 1))) * down;
        std::vector<double> next(dist.size() + static_cast<std::size_t>(q.rbegin()->first) + 1, 0.0);
        for (std::size_t pos = 0; pos < dist.size(); ++pos) {
            if (dist[pos] == 0.0) continue;
            for (const auto& [k, v] : q) {
                const std::int64_t to = static_cast<std::int64_t>(pos) + k;
                if (to >= 0) next[static_cast<std::size_t>(to)] += dist[pos] * v;
            }
        }
        while (next.size() > 1 && next.back() == 0.0) next.pop_back();
        dist = std::move(next);
    }
    return out;
}

void for_each_closed_word(std::size_t n, const std::function<void(const Word&)>& fn) {
    Word w;
    w.letters.reserve(n);
    std::vector<Letter> stack;
    std::function<void()> rec = [&] {
        if (w.size() == n) {
            fn(w);
            return;
        }
        const std::size_t remaining = n - w.size();
        for (Letter x : kLetters) {
            if (is_burger(x)) {
                if (stack.size() + 1 > remaining - 1) continue;
                stack.push_back(x);
                w.letters.push_back(x);
                rec();
                w.letters.pop_back();
                stack.pop_back();
                continue;
            }
            if (stack.empty()) continue;
            std::size_t at = stack.size() - 1;
            if (x != Letter::F) {
                const auto it = std::find(stack.rbegin(), stack.rend(), burger_for(x));
                if (it == stack.rend()) continue;
                at = static_cast<std::size_t>(stack.rend() - it) - 1;
            }
            const Letter b = stack[at];
            stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(at));
            w.letters.push_back(x);
            rec();
            w.letters.pop_back();
            stack.insert(stack.begin() + static_cast<std::ptrdiff_t>(at), b);
        }
    };
    if (n % 2 == 0 && n > 0) rec();
}

void verify_word(const Word& w) {
    const auto fail = [&](const std::string& what) { throw std::logic_error("bijection check failed on " + w.str() + ": " + what); };
    LoopTriangulation t;
    try {
        t = word_to_triangulation(w);
        t.validate();
    } catch (const std::exception& e) {
        fail(e.what());
    }
    const auto f = static_cast<std::size_t>(std::count(w.letters.begin(), w.letters.end(), Letter::F));
    if (t.size() != w.size()) fail("triangle count");
    if (t.loop_count() != f + 1) fail("loop count " + std::to_string(t.loop_count()));
    if (t.euler_characteristic() != 2) fail("Euler characteristic of the triangulation");
    Word back;
    try {
        back = triangulation_to_word(t);
    } catch (const std::exception& e) {
        fail(e.what());
    }
    if (back != w) fail("round trip gave " + back.str());
    const DecoratedMap m = extract_fk_map(t);
    if (m.edges.size() != t.quadrangles()) fail("edge count");
    if (m.euler_characteristic() != 2) fail("Euler characteristic of the map");
    if (t.loop_count() != m.open_clusters + m.dual_clusters - 1) fail("loops != k(p) + k(p dual) - 1");
}

BijectionReport verify_bijection(std::size_t k) {
    check_cap(k, 5, "verify_bijection");
    BijectionReport r;
    r.k = k;
    for_each_closed_word(2 * k, [&](const Word& w) {
        verify_word(w);
        ++r.words;
        const auto f = static_cast<std::size_t>(std::count(w.letters.begin(), w.letters.end(), Letter::F));
        ++r.by_loops[f + 1];
        r.with_F += f > 0;
    });
    verify_word(Word::parse("hcHhhcHcHCFhhhHCHF"));
    return r;
}

std::string BijectionReport::text() const {
    std::ostringstream os;
    os << "k " << k << "\nwords " << words << "\nwords_with_F " << with_F << '\n';
    for (const auto& [loops, n] : by_loops) os << "loops " << loops << ' ' << n << '\n';
    return os.str();
}

}  // namespace hcb
