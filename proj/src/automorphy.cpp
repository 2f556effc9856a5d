#include "zorich/automorphy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zorich/errors.hpp"

namespace zorichlab {

namespace {

constexpr double kThreeHalfPi = 3.0 * kHalfPi;

struct Wrapped {
    double value;
    std::int64_t periods;
};

// v = value + periods * period with value in [lo, lo + period).
Wrapped wrap(double v, double lo, double period) noexcept {
    const double hi = lo + period;
    if (v >= lo && v < hi) return {v, 0};
    auto k = static_cast<std::int64_t>(std::floor((v - lo) / period));
    double value = v - static_cast<double>(k) * period;
    if (value < lo) {
        --k;
        value = v - static_cast<double>(k) * period;
    } else if (value >= hi) {
        ++k;
        value = v - static_cast<double>(k) * period;
    }
    return {std::clamp(value, lo, std::nextafter(hi, lo)), k};
}

}  // namespace

Point3 apply(const GroupElement& g, const Point3& x) noexcept {
    double a = x.x1;
    double b = x.x2;
    if (g.flip) {
        a = kPi - a;
        b = kPi - b;
    }
    return {a + kTwoPi * static_cast<double>(g.m), b + kTwoPi * static_cast<double>(g.n), x.x3};
}

GroupElement compose(const GroupElement& g, const GroupElement& h) noexcept {
    const std::int64_t s = g.flip ? -1 : 1;
    return {g.m + s * h.m, g.n + s * h.n, g.flip != h.flip};
}

GroupElement inverse(const GroupElement& g) noexcept {
    if (g.flip) return g;
    return {-g.m, -g.n, false};
}

GroupElement to_element(Generator s) noexcept {
    switch (s) {
        case Generator::g1: return GroupElement::translation(1, 0);
        case Generator::g1_inv: return GroupElement::translation(-1, 0);
        case Generator::g2: return GroupElement::translation(0, 1);
        case Generator::g2_inv: return GroupElement::translation(0, -1);
        case Generator::g3: return GroupElement::reflection();
    }
    return GroupElement::identity();
}

GroupElement from_word(const GeneratorWord& word) noexcept {
    GroupElement g = GroupElement::identity();
    for (Generator s : word) g = compose(g, to_element(s));
    return g;
}

GeneratorWord parse_word(std::string_view text) {
    GeneratorWord word;
    std::istringstream is{std::string(text)};
    std::string token;
    while (is >> token) {
        if (token == "g1") word.push_back(Generator::g1);
        else if (token == "g1^-1") word.push_back(Generator::g1_inv);
        else if (token == "g2") word.push_back(Generator::g2);
        else if (token == "g2^-1") word.push_back(Generator::g2_inv);
        else if (token == "g3" || token == "g3^-1") word.push_back(Generator::g3);
        else throw DomainError("unknown generator symbol '" + token + "'");
    }
    return word;
}

std::string to_string(const GeneratorWord& word) {
    std::string out;
    for (Generator s : word) {
        if (!out.empty()) out += ' ';
        switch (s) {
            case Generator::g1: out += "g1"; break;
            case Generator::g1_inv: out += "g1^-1"; break;
            case Generator::g2: out += "g2"; break;
            case Generator::g2_inv: out += "g2^-1"; break;
            case Generator::g3: out += "g3"; break;
        }
    }
    return out;
}

std::string to_string(const GroupElement& g) {
    std::ostringstream os;
    os << "(m=" << g.m << ", n=" << g.n << ", flip=" << (g.flip ? 1 : 0) << ")";
    return os.str();
}

bool in_fundamental_domain(const Point3& x) noexcept {
    if (!(x.x1 >= -kHalfPi && x.x1 < kThreeHalfPi)) return false;
    if (std::fabs(x.x2) < kHalfPi) return true;
    return std::fabs(x.x2) == kHalfPi && x.x1 <= kHalfPi;
}

Reduction reduce_to_fundamental_domain(const Point3& x) noexcept {
    // `to_rep` maps the input onto the representative.
    GroupElement to_rep = GroupElement::identity();
    double y1 = x.x1;
    double y2 = x.x2;

    const Wrapped w2 = wrap(y2, -kHalfPi, kTwoPi);
    y2 = w2.value;
    to_rep = compose(GroupElement::translation(0, -w2.periods), to_rep);

    if (y2 > kHalfPi) {
        y1 = kPi - y1;
        y2 = std::clamp(kPi - y2, -kHalfPi, kHalfPi);
        to_rep = compose(GroupElement::reflection(), to_rep);
    }

    const Wrapped w1 = wrap(y1, -kHalfPi, kTwoPi);
    y1 = w1.value;
    to_rep = compose(GroupElement::translation(-w1.periods, 0), to_rep);

    // The edges x2 = +-pi/2 are fixed by a reflection acting as x1 -> pi - x1.
    if (std::fabs(y2) == kHalfPi && y1 > kHalfPi) {
        y1 = kPi - y1;
        if (y2 > 0.0) {
            to_rep = compose(GroupElement::reflection(), to_rep);
        } else {
            to_rep = compose(GroupElement{0, -1, true}, to_rep);
        }
    }

    return {{y1, y2, x.x3}, inverse(to_rep)};
}

std::optional<GroupElement> find_g(const Point3& x, const Point3& y, double tolerance) {
    if (!(std::fabs(x.x3 - y.x3) <= tolerance)) return std::nullopt;
    std::optional<GroupElement> best;
    double best_d = 0.0;
    for (bool flip : {false, true}) {
        const double s1 = flip ? kPi - x.x1 : x.x1;
        const double s2 = flip ? kPi - x.x2 : x.x2;
        const GroupElement g{std::llround((y.x1 - s1) / kTwoPi), std::llround((y.x2 - s2) / kTwoPi), flip};
        const double d = distance(apply(g, x), y);
        if (!best || d < best_d) {
            best = g;
            best_d = d;
        }
    }
    if (best_d <= tolerance) return best;
    return std::nullopt;
}

}  // namespace zorichlab
