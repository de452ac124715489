#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "opw/errors.hpp"
#include "opw/set_operads.hpp"

using namespace opw;
using namespace opw::setop;
using trees::LabeledTree;
using trees::RawTree;

namespace {

// Planar trees with n leaves and valences >= 2, each internal edge weighted
// by x; counted by splitting at the root.
long planar_weighted(int n, long x) {
    std::map<int, long> memo;
    std::function<long(int)> f = [&](int leaves) -> long {
        if (auto it = memo.find(leaves); it != memo.end()) return it->second;
        // Sequences of >= 2 subtrees; a subtree with m >= 2 leaves sits on an edge.
        std::function<long(int, int)> seq = [&](int rest, int parts) -> long {
            if (rest == 0) return parts >= 2 ? 1 : 0;
            long s = 0;
            for (int a = 1; a <= rest - (parts == 0); ++a) s += (a == 1 ? 1 : x * f(a)) * seq(rest - a, parts + 1);
            return s;
        };
        return memo[leaves] = seq(leaves, 0);
    };
    return n == 1 ? 1 : f(n);
}

// Non-planar trees with leaves labeled by the bits of `set`, valences >= 2,
// internal edges weighted by x; counted over set partitions at the root.
long leaf_labeled_weighted(unsigned set, long x) {
    std::map<unsigned, long> memo;
    std::function<long(unsigned)> f = [&](unsigned s) -> long {
        if (auto it = memo.find(s); it != memo.end()) return it->second;
        // Partitions of s into >= 2 blocks; the block holding the lowest bit comes first.
        std::function<long(unsigned, int)> parts = [&](unsigned rest, int count) -> long {
            if (rest == 0) return count >= 2 ? 1 : 0;
            const unsigned low = rest & (~rest + 1);
            long total = 0;
            for (unsigned sub = rest; sub; sub = (sub - 1) & rest) {
                if (!(sub & low) || (count == 0 && sub == s)) continue;
                const long g = __builtin_popcount(sub) == 1 ? 1 : x * f(sub);
                total += g * parts(rest & ~sub, count + 1);
            }
            return total;
        };
        return memo[s] = parts(s, 0);
    };
    return __builtin_popcount(set) == 1 ? 1 : f(set);
}

long fact(int n) { return n <= 1 ? 1 : n * fact(n - 1); }

nlohmann::json z2_table() {
    // Z/2 = {e, g} as an operad concentrated in arity 1.
    return nlohmann::json::parse(R"({
        "name": "z2",
        "arities": {"1": ["e", "g"]},
        "unit": "e",
        "compose": {"e o1 e": "e", "e o1 g": "g", "g o1 e": "g", "g o1 g": "e"}
    })");
}

LabeledTree random_raw(std::mt19937& rng, const SetOperad& p, int zero_marks, int n_marks, int vertices) {
    // Random tree built from corollas of arity 1..3 by repeated grafting.
    std::uniform_int_distribution<int> arity(1, 3);
    auto corolla = [&] {
        const int k = arity(rng);
        std::uniform_int_distribution<int> lab(0, p.size(k) - 1);
        return LabeledTree::corolla(k, lab(rng));
    };
    LabeledTree x = corolla();
    std::uniform_int_distribution<int> mark(0, n_marks - 1);
    for (int v = 1; v < vertices; ++v) {
        std::uniform_int_distribution<int> leaf(0, x.arity() - 1);
        const int m = (zero_marks > 0 && rng() % 3 == 0) ? 0 : mark(rng);
        x = trees::graft(x, leaf(rng), corolla(), m).tree;
    }
    std::vector<int> leaves(x.arity());
    std::iota(leaves.begin(), leaves.end(), 0);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    x.leaves = leaves;
    return x;
}

// Every normal form reachable by applying redexes in any order.
void all_normal_forms(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& x,
                      std::set<std::vector<std::int64_t>>& out) {
    const auto rs = redexes(p, h, x);
    if (rs.empty()) {
        out.insert(trees::canonicalize(x, label_action(p)).tree.encoding());
        return;
    }
    for (const auto& r : rs) all_normal_forms(p, h, rewrite(p, h, x, r), out);
}

}  // namespace

TEST_CASE("built-in operads satisfy the axioms") {
    CHECK(validate_operad(*make_ass(), 4).empty());
    CHECK(validate_operad(*make_com(), 4).empty());
    CHECK(validate_operad(*make_trivial(), 4).empty());
    CHECK(validate_operad(*operad_from_json(z2_table()), 3).empty());
    CHECK(make_ass()->size(3) == 6);
    CHECK(make_ass()->size(0) == 0);
    CHECK(make_com()->size(5) == 1);
    CHECK_THROWS_AS(builtin_operad("lie"), InputError);
}

TEST_CASE("ass composition substitutes words") {
    auto ass = make_ass();
    auto idx = [](const Perm& w) { return static_cast<int>(perm_rank(w)); };
    // x2 x1 o_1 x1 x2 = x3 x1 x2 (inputs 1,2 of the inner word become 1,2, old 2 becomes 3).
    CHECK(ass->compose(2, idx({1, 0}), 0, 2, idx({0, 1})) == idx({2, 0, 1}));
    CHECK(ass->element_name(3, idx({2, 0, 1})) == "m312");
    // (w.s)[p] = s^{-1}(w[p])
    CHECK(ass->act(3, idx({0, 1, 2}), {1, 2, 0}) == idx({2, 0, 1}));
}

TEST_CASE("corrupted tables are reported") {
    auto j = z2_table();
    j["compose"]["e o1 g"] = "e";
    auto bad = validate_operad(*operad_from_json(j), 3);
    CHECK(!bad.empty());
    j = z2_table();
    j["compose"].erase("g o1 e");
    bad = validate_operad(*operad_from_json(j), 3);
    REQUIRE(!bad.empty());
    CHECK(bad[0].find("missing composition") != std::string::npos);
    j = z2_table();
    j["unit"] = "h";
    CHECK_THROWS_AS(operad_from_json(j), InputError);
    CHECK_THROWS_AS(operad_from_json(nlohmann::json::parse(R"({"arities": 3})")), InputError);
}

TEST_CASE("evaluate agrees with equivariance") {
    auto ass = make_ass();
    for (int a = 0; a < 2; ++a)
        for (const auto& s : all_perms(2)) {
            LabeledTree x = LabeledTree::corolla(2, a);
            x.leaves = inverse(s);
            CHECK(evaluate(*ass, x) == ass->act(2, a, s));
        }
    CHECK(evaluate(*ass, LabeledTree::unit()) == ass->unit());
}

TEST_CASE("free operad counts") {
    auto ass = make_ass();
    auto com = make_com();
    for (int n = 1; n <= 4; ++n) {
        CHECK(FreeOperad(ass, n).size(n) == fact(n) * planar_weighted(n, 1));
        CHECK(FreeOperad(com, n).size(n) == leaf_labeled_weighted((1u << n) - 1, 1));
    }
    FreeOperad f(ass, 3);
    CHECK(f.size(2) == 2);
    CHECK(f.size(3) == 18);
    CHECK(validate_operad(f, 3).empty());
    CHECK(validate_operad(FreeOperad(com, 4), 4).empty());
    // Counit is a map of operads.
    for (int a = 0; a < f.size(2); ++a)
        for (int b = 0; b < f.size(2); ++b)
            for (int i = 0; i < 2; ++i)
                CHECK(f.counit(3, f.compose(2, a, i, 2, b)) == ass->compose(2, f.counit(2, a), i, 2, f.counit(2, b)));
}

TEST_CASE("free operad on a collection without binary elements") {
    auto k = std::make_shared<TableCollection>("nu", std::vector<std::vector<std::string>>{{}, {"1"}, {}, {"nu"}}, 0);
    FreeOperad f(k, 5);
    CHECK(f.size(2) == 0);
    CHECK(f.size(3) == 1);
    CHECK(f.size(4) == 0);
    CHECK(f.size(5) == 10);
}

TEST_CASE("infinite enumerations need a cap") {
    auto k = std::make_shared<TableCollection>("u", std::vector<std::vector<std::string>>{{}, {"1", "u"}, {"m"}}, 0);
    CHECK_FALSE(finitely_enumerable(*k));
    CHECK_THROWS_AS(FreeOperad(k, 2), Refusal);
    FreeOperad capped(k, 2, 2);
    CHECK(capped.truncated());
    // Arity 1 with at most two vertices: u, u(u).
    CHECK(capped.size(1) == 3);
    CHECK(enumerate_trees(*k, {1}, 2, 3) == enumerate_trees_serial(*k, {1}, 2, 3));
}

TEST_CASE("parallel and serial enumeration agree") {
    auto ass = make_ass();
    for (int n = 0; n <= 4; ++n)
        CHECK(enumerate_trees(*ass, {1, 2}, n, -1) == enumerate_trees_serial(*ass, {1, 2}, n, -1));
}

TEST_CASE("normalization examples") {
    auto ass = make_ass();
    const auto h = seg::chain_segment(2);
    const int m12 = static_cast<int>(perm_rank({0, 1}));
    const int unit = ass->unit();
    // A zero edge contracts into the composite.
    LabeledTree x = trees::graft(LabeledTree::corolla(2, m12), 0, LabeledTree::corolla(2, m12), 0).tree;
    LabeledTree nx = normalize(*ass, h, x);
    CHECK(nx.vertex_count() == 1);
    CHECK(evaluate(*ass, nx) == evaluate(*ass, x));
    // A unit vertex between two edges joins their lengths.
    LabeledTree y = trees::graft(LabeledTree::corolla(2, m12), 0, LabeledTree::corolla(1, unit), 1).tree;
    y = trees::graft(y, 0, LabeledTree::corolla(2, m12), 2).tree;
    LabeledTree ny = normalize(*ass, h, y);
    REQUIRE(ny.vertex_count() == 2);
    CHECK(ny.marks[1] == 2);
    // A unit vertex on a leaf is dropped with its edge.
    LabeledTree z = trees::graft(LabeledTree::corolla(2, m12), 1, LabeledTree::corolla(1, unit), 1).tree;
    CHECK(normalize(*ass, h, z) == LabeledTree::corolla(2, m12));
    // A unit root is dropped as well.
    LabeledTree r = trees::graft(LabeledTree::corolla(1, unit), 0, LabeledTree::corolla(2, m12), 2).tree;
    CHECK(normalize(*ass, h, r) == LabeledTree::corolla(2, m12));
    CHECK(normalize(*ass, h, LabeledTree::corolla(1, unit)) == LabeledTree::unit());
}

TEST_CASE("normal forms do not depend on the rewriting order") {
    std::mt19937 rng(7);
    auto ass = make_ass();
    auto com = make_com();
    const auto h = seg::chain_segment(2);
    for (int trial = 0; trial < 150; ++trial) {
        const SetOperad& p = trial % 2 ? *ass : *com;
        const LabeledTree x = random_raw(rng, p, 1, 3, 2 + trial % 4);
        std::set<std::vector<std::int64_t>> forms;
        all_normal_forms(p, h, x, forms);
        CHECK(forms.size() == 1);
        CHECK(forms.count(normalize(p, h, x).encoding()) == 1);
        CHECK(evaluate(p, normalize(p, h, x)) == evaluate(p, x));
    }
}

TEST_CASE("W over small segments") {
    auto ass = make_ass();
    auto com = make_com();
    // The one-point segment gives back P.
    WOperad w0(ass, seg::chain_segment(0), 4);
    for (int n = 0; n <= 4; ++n) CHECK(w0.size(n) == ass->size(n));
    for (int m = 1; m <= 3; ++m) {
        WOperad wa(ass, seg::chain_segment(m), 4);
        WOperad wc(com, seg::chain_segment(m), 4);
        for (int n = 1; n <= 4; ++n) {
            CHECK(wa.size(n) == fact(n) * planar_weighted(n, m));
            CHECK(wc.size(n) == leaf_labeled_weighted((1u << n) - 1, m));
        }
    }
    CHECK(WOperad(ass, seg::chain_segment(2), 2).size(2) == 2);
    CHECK(WOperad(ass, seg::chain_segment(2), 3).size(3) == 30);
}

TEST_CASE("W is an operad with an augmentation and an edge filtration") {
    auto ass = make_ass();
    for (const auto& h : {seg::chain_segment(2), seg::diamond(seg::chain_segment(1))}) {
        WOperad w(ass, h, 4);
        CHECK(validate_operad(w, 3).empty());
        for (int a = 1; a <= 3; ++a)
            for (int b = 0; a + b - 1 <= 4; ++b)
                for (int x = 0; x < w.size(a); ++x)
                    for (int y = 0; y < w.size(b); ++y)
                        for (int i = 0; i < a; ++i) {
                            const int c = w.compose(a, x, i, b, y);
                            CHECK(w.augmentation(a + b - 1, c) ==
                                  ass->compose(a, w.augmentation(a, x), i, b, w.augmentation(b, y)));
                            if (a > 1 && b != 1)
                                CHECK(w.filtration(a + b - 1, c) == w.filtration(a, x) + w.filtration(b, y) + 1);
                        }
    }
    // Induced maps commute with composition.
    const auto h = seg::chain_segment(2), k = seg::chain_segment(1);
    const seg::SegmentMap f{0, 1, 1};
    WOperad wh(ass, h, 3), wk(ass, k, 3);
    for (int x = 0; x < wh.size(2); ++x)
        for (int y = 0; y < wh.size(2); ++y) {
            const auto lhs = w_segment_map(*ass, k, f, wh.table(3)[wh.compose(2, x, 1, 2, y)]);
            const int fx = wk.table(2).find(w_segment_map(*ass, k, f, wh.table(2)[x]));
            const int fy = wk.table(2).find(w_segment_map(*ass, k, f, wh.table(2)[y]));
            CHECK(wk.table(3).find(lhs) == wk.compose(2, fx, 1, 2, fy));
        }
}

TEST_CASE("W on the two-point segment is the free operad") {
    for (const auto& p : {make_ass(), make_com()}) {
        const auto c = compare_free(p, 4);
        CHECK(c.status == "iso");
        CHECK_FALSE(c.truncated);
    }
    // Extra unary elements make both sides infinite; a cap gives a truncated check.
    const auto z = compare_free(operad_from_json(z2_table()), 2, 3);
    CHECK(z.truncated);
    CHECK(z.status != "fail");
    for (const auto& why : z.failures) MESSAGE(why);
    const auto c = compare_free(make_ass(), 3);
    CHECK(c.counts.at("W(3)") == 18);
}

TEST_CASE("W on a diamond segment is free on W") {
    for (const auto& p : {make_ass(), make_com()})
        for (int m = 0; m <= 2; ++m) {
            const auto c = w_diamond_compare(p, seg::chain_segment(m), 3, -1);
            CHECK(c.status == "iso");
            for (const auto& why : c.failures) MESSAGE(why);
        }
}

TEST_CASE("Godement levels") {
    auto ass = make_ass();
    Godement g(ass, 2, 3);
    for (int k = 0; k <= 2; ++k) CHECK(g.level(k).size(3) == 6 * planar_weighted(3, k + 1));
    CHECK(g.level(0).size(3) == 18);
    CHECK(g.level(1).size(3) == 30);
    CHECK(g.level(2).size(3) == 42);
    // d_0 s_0 = d_1 s_0 = id
    for (int a = 0; a < g.level(0).size(3); ++a) {
        CHECK(g.face(1, 0, 3, g.degeneracy(0, 0, 3, a)) == a);
        CHECK(g.face(1, 1, 3, g.degeneracy(0, 0, 3, a)) == a);
    }
    CHECK_THROWS_AS(Godement(make_trivial(), 1, 1).degeneracy(1, 0, 1, 0), Refusal);
    CHECK_THROWS_AS(Godement(operad_from_json(z2_table()), 1, 1), Refusal);
}

TEST_CASE("Godement resolution matches W over the levels of delta^1") {
    for (const auto& p : {make_ass(), make_com()})
        for (int k = 0; k <= 1; ++k) {
            const auto c = compare_godement_w(p, k, 3);
            CHECK(c.status == "iso");
            for (const auto& why : c.failures) MESSAGE(why);
        }
}

TEST_CASE("element names and json") {
    auto ass = make_ass();
    WOperad w(ass, seg::chain_segment(1), 3);
    std::set<std::string> names;
    for (int a = 0; a < w.size(3); ++a) names.insert(w.element_name(3, a));
    CHECK(names.size() == 18);
    const auto j = element_json(w, w.table(3)[w.size(3) - 1]);
    CHECK(j.at("labels").size() == 2);
    CHECK(j.at("lengths").size() == 1);
}
