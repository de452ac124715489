#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace opw::seg {

// Finite segment: a monoid (H, join, zero) in which `one` is absorbing.
struct FiniteSegment {
    std::vector<std::string> names;
    int zero = 0;
    int one = 0;
    std::vector<std::vector<int>> join;

    int size() const { return static_cast<int>(names.size()); }
    int operator()(int a, int b) const { return join[a][b]; }
    friend bool operator==(const FiniteSegment&, const FiniteSegment&) = default;
};

// Index map H -> K.
using SegmentMap = std::vector<int>;

struct Violation {
    std::string axiom;
    std::vector<int> elements;
    std::string describe() const;
};

std::vector<Violation> segment_check(const FiniteSegment& h);
std::vector<Violation> map_check(const FiniteSegment& h, const FiniteSegment& k, const SegmentMap& f);

// {0,...,m} under max.
FiniteSegment chain_segment(int m);

// Monotone maps [k] -> [1] under pointwise max. Element l is the map whose
// last l values are 1, so 0 is the constant map 0 and k+1 the constant map 1.
FiniteSegment delta1_level(int k);
// Precomposition with a monotone phi: [l] -> [k], as a map level k -> level l.
SegmentMap delta1_operator(int k, const std::vector<int>& phi);
// Induced by the coface [k-1] -> [k] missing j, and by the codegeneracy
// [k+1] -> [k] repeating j.
SegmentMap delta1_face(int k, int j);
SegmentMap delta1_degeneracy(int k, int j);

// H with an extra absorbing element appended.
FiniteSegment diamond(const FiniteSegment& h);
// (id, 1): diamond(H) -> H.
SegmentMap diamond_collapse(const FiniteSegment& h);
// diamond(f): diamond(H) -> diamond(K).
SegmentMap diamond_map(const FiniteSegment& k, const SegmentMap& f);
// The unique map to the one-element segment.
SegmentMap to_terminal(const FiniteSegment& h);

nlohmann::json to_json(const FiniteSegment& h);
FiniteSegment segment_from_json(const nlohmann::json& j);

}  // namespace opw::seg
