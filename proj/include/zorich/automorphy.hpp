#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zorich/geometry.hpp"

namespace zorichlab {

// Element of the isometry group G generated by
//   g1: x + (2 pi, 0, 0),  g2: x + (0, 2 pi, 0),  g3: (pi - x1, pi - x2, x3).
// Every element has the canonical form x -> (s(x1, x2) + 2 pi (m, n), x3) with s the
// identity (flip = false) or the point reflection (x1, x2) -> (pi - x1, pi - x2).
struct GroupElement {
    std::int64_t m = 0;
    std::int64_t n = 0;
    bool flip = false;

    static constexpr GroupElement identity() { return {}; }
    static constexpr GroupElement translation(std::int64_t m, std::int64_t n) { return {m, n, false}; }
    static constexpr GroupElement reflection() { return {0, 0, true}; }

    friend constexpr bool operator==(const GroupElement&, const GroupElement&) = default;
};

enum class Generator { g1, g1_inv, g2, g2_inv, g3 };

using GeneratorWord = std::vector<Generator>;

Point3 apply(const GroupElement& g, const Point3& x) noexcept;

// compose(g, h) acts as g after h.
GroupElement compose(const GroupElement& g, const GroupElement& h) noexcept;
GroupElement inverse(const GroupElement& g) noexcept;

GroupElement to_element(Generator s) noexcept;

// The product w[0] w[1] ... w[k-1]; the last symbol acts first.
GroupElement from_word(const GeneratorWord& word) noexcept;

// Parses whitespace separated symbols: g1, g1^-1, g2, g2^-1, g3.
// Throws DomainError on an unknown symbol.
GeneratorWord parse_word(std::string_view text);
std::string to_string(const GeneratorWord& word);
std::string to_string(const GroupElement& g);

// Fundamental domain used by reduce_to_fundamental_domain:
//   [-pi/2, 3pi/2) x (-pi/2, pi/2) x R
//   together with the edge pieces [-pi/2, pi/2] x {-pi/2, pi/2} x R.
bool in_fundamental_domain(const Point3& x) noexcept;

struct Reduction {
    Point3 point;          // representative in the fundamental domain
    GroupElement element;  // apply(element, point) == input
};

Reduction reduce_to_fundamental_domain(const Point3& x) noexcept;

// Element g with apply(g, x) == y within `tolerance`, if one exists.
std::optional<GroupElement> find_g(const Point3& x, const Point3& y, double tolerance = 1e-9);

}  // namespace zorichlab
