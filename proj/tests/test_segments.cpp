#include <set>

#include "doctest.h"
#include "opw/segments.hpp"

using namespace opw::seg;

namespace {

// Every segment on {0, x_1, ..., x_{n-2}, 1} with 0 neutral and 1 absorbing:
// all fillings of the free part of the table that pass the axiom check.
std::vector<FiniteSegment> all_segments(int n) {
    std::vector<FiniteSegment> out;
    if (n == 1) {
        out.push_back(chain_segment(0));
        return out;
    }
    const int free = n - 2;
    const int cells = free * free;
    long total = 1;
    for (int i = 0; i < cells; ++i) total *= n;
    for (long code = 0; code < total; ++code) {
        FiniteSegment h = chain_segment(n - 1);
        long c = code;
        for (int a = 1; a <= free; ++a)
            for (int b = 1; b <= free; ++b) {
                h.join[a][b] = static_cast<int>(c % n);
                c /= n;
            }
        if (segment_check(h).empty()) out.push_back(h);
    }
    return out;
}

std::vector<SegmentMap> all_maps(const FiniteSegment& h, const FiniteSegment& k) {
    std::vector<SegmentMap> out;
    SegmentMap f(h.size(), 0);
    for (;;) {
        if (map_check(h, k, f).empty()) out.push_back(f);
        int i = 0;
        while (i < h.size() && ++f[i] == k.size()) f[i++] = 0;
        if (i == h.size()) break;
    }
    return out;
}

SegmentMap after(const SegmentMap& g, const SegmentMap& f) {
    SegmentMap r(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) r[x] = g[f[x]];
    return r;
}

bool same_structure(const FiniteSegment& a, const FiniteSegment& b) {
    return a.zero == b.zero && a.one == b.one && a.join == b.join;
}

}  // namespace

TEST_CASE("chain segments") {
    CHECK(chain_segment(0).size() == 1);
    CHECK(segment_check(chain_segment(0)).empty());
    const auto ii = chain_segment(1);
    CHECK(ii.size() == 2);
    CHECK(ii(0, 1) == 1);
    CHECK(ii(1, 1) == 1);
    CHECK(ii(0, 0) == 0);
    for (int m = 0; m <= 4; ++m) CHECK(segment_check(chain_segment(m)).empty());
}

TEST_CASE("segment_check names violations") {
    auto h = chain_segment(2);
    h.join[0][1] = 2;
    auto report = segment_check(h);
    REQUIRE_FALSE(report.empty());
    CHECK(report[0].axiom == "left-unit");
    CHECK(report[0].elements == std::vector<int>{1});
    auto g = chain_segment(2);
    g.join[2][1] = 1;
    bool found = false;
    for (const auto& v : segment_check(g)) found = found || (v.axiom == "left-absorbing" && v.elements[0] == 1);
    CHECK(found);
    FiniteSegment bad = chain_segment(1);
    bad.join[0].pop_back();
    CHECK_FALSE(segment_check(bad).empty());
}

TEST_CASE("small segment census") {
    // One 3-element segment per value of x v x; 4-element ones include the
    // non-commutative right-zero band a v b = b.
    CHECK(all_segments(3).size() == 3);
    auto four = all_segments(4);
    bool band = false;
    for (const auto& h : four) band = band || (h(1, 2) == 2 && h(2, 1) == 1 && h(1, 1) == 1 && h(2, 2) == 2);
    CHECK(band);
}

TEST_CASE("delta1 levels") {
    CHECK(same_structure(delta1_level(0), chain_segment(1)));
    CHECK(delta1_level(0).names == std::vector<std::string>{"0", "1"});
    const auto l1 = delta1_level(1);
    CHECK(l1.size() == 3);
    CHECK(l1.names == std::vector<std::string>{"00", "01", "11"});
    // The faces are exactly the surjective segment maps to level 0.
    std::set<SegmentMap> surjective;
    for (const auto& f : all_maps(l1, delta1_level(0)))
        if (std::set<int>(f.begin(), f.end()).size() == 2) surjective.insert(f);
    CHECK(surjective == std::set<SegmentMap>{delta1_face(1, 0), delta1_face(1, 1)});
    CHECK(delta1_face(1, 0) != delta1_face(1, 1));
    const auto s0 = delta1_degeneracy(0, 0);
    CHECK(map_check(delta1_level(0), l1, s0).empty());
    CHECK(std::set<int>(s0.begin(), s0.end()).size() == 2);
    for (int k = 0; k <= 4; ++k) {
        CHECK(segment_check(delta1_level(k)).empty());
        for (int j = 0; j <= k; ++j) {
            CHECK(map_check(delta1_level(k), delta1_level(k + 1), delta1_degeneracy(k, j)).empty());
            if (k >= 1) CHECK(map_check(delta1_level(k), delta1_level(k - 1), delta1_face(k, j)).empty());
        }
    }
}

TEST_CASE("delta1 operators satisfy the simplicial identities") {
    auto d = [](int k, int j) { return delta1_face(k, j); };
    auto s = [](int k, int j) { return delta1_degeneracy(k, j); };
    for (int k = 0; k <= 4; ++k) {
        const SegmentMap id = chain_segment(k + 1).join[0];
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j) {
                if (k >= 2 && i < j) CHECK(after(d(k - 1, i), d(k, j)) == after(d(k - 1, j - 1), d(k, i)));
                if (i <= j) CHECK(after(s(k + 1, i), s(k, j)) == after(s(k + 1, j + 1), s(k, i)));
            }
        for (int j = 0; j <= k; ++j)
            for (int i = 0; i <= k + 1; ++i) {
                const SegmentMap lhs = after(d(k + 1, i), s(k, j));
                if (i < j)
                    CHECK(lhs == after(s(k - 1, j - 1), d(k, i)));
                else if (i == j || i == j + 1)
                    CHECK(lhs == id);
                else
                    CHECK(lhs == after(s(k - 1, j), d(k, i - 1)));
            }
    }
}

TEST_CASE("diamond") {
    const auto i = chain_segment(0);
    CHECK(same_structure(diamond(i), chain_segment(1)));
    const auto dii = diamond(chain_segment(1));
    CHECK(dii.size() == 3);
    CHECK(segment_check(dii).empty());
    CHECK(map_check(dii, chain_segment(1), diamond_collapse(chain_segment(1))).empty());
    // Functoriality and compatibility with the collapse maps.
    std::vector<FiniteSegment> corpus;
    for (int n = 1; n <= 4; ++n)
        for (const auto& h : all_segments(n)) corpus.push_back(h);
    for (const auto& h : corpus) {
        CHECK(segment_check(diamond(h)).empty());
        CHECK(map_check(diamond(h), h, diamond_collapse(h)).empty());
        for (const auto& k : corpus) {
            if (h.size() > 3 && k.size() > 3) continue;
            for (const auto& f : all_maps(h, k)) {
                const auto df = diamond_map(k, f);
                CHECK(map_check(diamond(h), diamond(k), df).empty());
                CHECK(after(diamond_collapse(k), df) == after(f, diamond_collapse(h)));
            }
        }
    }
}

TEST_CASE("segment json round trip") {
    const auto h = diamond(chain_segment(2));
    CHECK(segment_from_json(to_json(h)) == h);
    CHECK_THROWS(segment_from_json(nlohmann::json::parse(R"({"elements": ["0"]})")));
}
