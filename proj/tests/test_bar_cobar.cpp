#include "doctest.h"
#include "opw/bar_cobar.hpp"
#include "opw/errors.hpp"

using namespace opw;
using namespace opw::barcobar;
using chainop::ChainOperadPtr;

namespace {

nlohmann::json dual_numbers(int max, bool symmetric) {
    nlohmann::json j;
    j["name"] = symmetric ? "com_dual" : "as_dual";
    j["symmetric"] = symmetric;
    for (int n = 2; n <= max; ++n) {
        const std::string c = "c" + std::to_string(n), e = "e" + std::to_string(n);
        j["arities"][std::to_string(n)] = {{"basis", {c, e}}, {"degrees", {0, 1}}, {"d", {{e, {{c, "1"}}}}}};
    }
    for (int n = 2; n <= max; ++n)
        for (int m = 2; n + m - 1 <= max; ++m)
            for (int i = 1; i <= n; ++i) {
                const std::string k = std::to_string(n + m - 1), o = " o" + std::to_string(i) + " ";
                const std::string cn = "c" + std::to_string(n), en = "e" + std::to_string(n);
                const std::string cm = "c" + std::to_string(m), em = "e" + std::to_string(m);
                j["compose"][cn + o + cm] = {{"c" + k, "1"}};
                j["compose"][cn + o + em] = {{"e" + k, "1"}};
                j["compose"][en + o + cm] = {{"e" + k, "1"}};
            }
    return j;
}

ChainOperadPtr unary_operad() {
    return chainop::chain_operad_from_json(nlohmann::json::parse(R"({
        "name": "unary",
        "arities": {"1": {"basis": ["u"]}, "2": {"basis": ["m"]}},
        "compose": {"u o1 u": {"u": "1"}, "u o1 m": {"m": "1"}, "m o1 u": {"m": "1"}, "m o2 u": {"m": "1"}}
    })"));
}

std::vector<ChainOperadPtr> corpus() {
    return {chainop::make_as_ns(), chainop::make_ass_sym(), chainop::make_com_chain(),
            chainop::chain_operad_from_json(dual_numbers(4, false)),
            chainop::chain_operad_from_json(dual_numbers(4, true))};
}

bool d_squared_zero(const TreeComplex& c) { return chain::verify_d_squared(*c.complex()).empty(); }

}  // namespace

TEST_CASE("bar of as_ns") {
    const auto b = bar(chainop::make_as_ns(), 3);
    CHECK(b->arity(2).size() == 1);
    CHECK(b->arity(2).degree_of(0) == 1);
    CHECK(b->arity(2).complex()->d(1).is_zero());
    const TreeComplex& b3 = b->arity(3);
    CHECK(b3.min_degree() == 1);
    CHECK(b3.ranks() == std::vector<int>{1, 2});
    const auto h = chain::homology(*b3.complex());
    CHECK(h.rank(2) == 1);
    CHECK(h.groups.size() == 1);
    CHECK(b->arity(1).size() == 0);
}

TEST_CASE("bar and cobar square to zero") {
    for (const auto& p : corpus()) {
        CAPTURE(p->name());
        const auto b = bar(p, 4);
        for (int n = 2; n <= 4; ++n) {
            CAPTURE(n);
            CHECK(d_squared_zero(b->arity(n)));
            CHECK(d_squared_zero(*cobar(b, n)));
        }
    }
}

TEST_CASE("cobar-bar has the ranks of W") {
    for (const auto& p : corpus()) {
        CAPTURE(p->name());
        const auto b = bar(p, 4);
        for (int n = 2; n <= 4; ++n) {
            const auto c = cobar(b, n);
            const auto w = chainop::w_pseudo(p, n);
            CHECK(c->ranks() == w->ranks());
            CHECK(c->min_degree() == w->min_degree());
        }
    }
    const auto c2 = cobar(bar(chainop::make_as_ns(), 2), 2);
    CHECK(c2->ranks() == std::vector<int>{1});
    CHECK(c2->min_degree() == 0);
}

TEST_CASE("cobar of the trivial cooperad") {
    const auto empty = chainop::chain_operad_from_json(nlohmann::json::parse(R"({"arities": {"3": {"basis": []}}})"));
    const auto b = bar(empty, 3);
    for (int n = 1; n <= 3; ++n) CHECK(cobar(b, n)->size() == 0);
}

TEST_CASE("the bar counit is a twisting cochain") {
    for (const auto& p : corpus()) {
        CAPTURE(p->name());
        const auto report = check_twisting(bar_counit_cochain(bar(p, 4)));
        CHECK(report.ok());
        for (const auto& s : report.describe(*p)) MESSAGE(s);
    }
    CHECK(check_twisting(zero_cochain(bar(chainop::make_as_ns(), 4))).ok());
    // Both sides vanish for the zero cochain, with or without a differential on P.
    CHECK(check_twisting(zero_cochain(bar(chainop::chain_operad_from_json(dual_numbers(3, false)), 3))).ok());
}

TEST_CASE("a perturbed counit is caught") {
    const auto b = bar(chainop::make_as_ns(), 4);
    auto t = bar_counit_cochain(b);
    const auto base = t.value;
    t.value = [base](int n, int g) {
        Vec v = base(n, g);
        if (n == 3)
            for (auto& [_, c] : v) c *= 2;
        return v;
    };
    const auto report = check_twisting(t);
    REQUIRE(!report.ok());
    CHECK(report.mismatches.front().arity == 3);
    const auto lines = report.describe(*b->operad());
    CHECK(lines.front().find("arity 3") != std::string::npos);
    CHECK(lines.front().find("degree") != std::string::npos);
}

TEST_CASE("cobar-bar counit") {
    for (const auto& p : corpus()) {
        CAPTURE(p->name());
        const auto b = bar(p, 4);
        for (int n = 2; n <= 4; ++n) {
            CAPTURE(n);
            const auto c = cobar(b, n);
            const auto f = cobar_bar_counit(b, c);
            CHECK(chain::verify_chain_map(f).empty());
            CHECK(chain::homology(*c->complex()).to_json() == chain::homology(*f.target).to_json());
        }
    }
    const auto b = bar(chainop::make_as_ns(), 4);
    const auto f2 = cobar_bar_counit(b, cobar(b, 2));
    CHECK(f2.component(0).at(0, 0) == 1);
    for (int n = 2; n <= 4; ++n) {
        const auto h = chain::homology(*cobar(b, n)->complex());
        CHECK(h.rank(0) == 1);
        CHECK(h.groups.size() == 1);
    }
    const auto bs = bar(chainop::make_ass_sym(), 3);
    CHECK(chain::homology(*cobar(bs, 3)->complex()).rank(0) == 6);
}

TEST_CASE("the counit is an operad map") {
    for (const auto& p : {chainop::make_as_ns(), chainop::make_ass_sym(),
                          chainop::chain_operad_from_json(dual_numbers(4, true))}) {
        CAPTURE(p->name());
        const auto b = bar(p, 4);
        std::map<int, std::shared_ptr<TreeComplex>> c;
        std::map<int, chain::ChainMap> f;
        for (int n = 2; n <= 4; ++n) {
            c[n] = cobar(b, n);
            f[n] = cobar_bar_counit(b, c[n]);
        }
        // Values in P(n) keyed by basis element.
        auto value = [&](int n, int g) {
            std::map<std::pair<int, int>, int> element;
            std::map<int, int> count;
            for (int a = 0; a < p->size(n); ++a) element[{p->degree(n, a), count[p->degree(n, a)]++}] = a;
            Vec out;
            const int deg = c[n]->degree_of(g);
            const auto m = f[n].component(deg);
            if (m.cols() == 0) return out;
            for (const auto& [r, v] : m.column(c[n]->position_of(g))) chainop::accumulate(out, element[{deg, r}], v);
            return out;
        };
        for (int x = 0; x < c[2]->size(); ++x)
            for (int y = 0; y < c[3]->size(); ++y)
                for (int i = 0; i < 2; ++i) {
                    const Vec xy = chainop::tree_compose(*c[2], x, i, *c[3], y, *c[4]);
                    Vec lhs;
                    for (const auto& [g, k] : xy)
                        for (const auto& [a, v] : value(4, g)) chainop::accumulate(lhs, a, k * v);
                    Vec rhs;
                    for (const auto& [a, ca] : value(2, x))
                        for (const auto& [b2, cb] : value(3, y))
                            for (const auto& [e, ce] : p->compose(2, a, i, 3, b2))
                                chainop::accumulate(rhs, e, ca * cb * ce);
                    CHECK(lhs == rhs);
                }
    }
}

TEST_CASE("W and cobar-bar are isomorphic") {
    for (const auto& p : corpus()) {
        for (int n = 2; n <= 4; ++n) {
            CAPTURE(p->name());
            CAPTURE(n);
            const auto run = compare_w_barcobar(p, n);
            CHECK(run.result.status == "iso");
            CHECK(run.result.augmentations_agree);
            CHECK(run.result.witness.empty());
            if (run.result.rescalings_found >= 0)
                CHECK(run.result.rescalings_found == run.result.rescalings_expected);
        }
    }
    const auto r3 = compare_w_barcobar(chainop::make_as_ns(), 3);
    CHECK(r3.result.w_ranks == std::vector<int>{3, 2});
    CHECK(r3.result.cobar_ranks == std::vector<int>{3, 2});
    CHECK(r3.result.rescalings_found == r3.result.rescalings_expected);
    const auto j = r3.result.to_json(*r3.w, *r3.cobar);
    CHECK(j["rescaling"].size() == 5);
    CHECK(j["bijection"].size() == 5);
    const auto r4 = compare_w_barcobar(chainop::make_as_ns(), 4);
    CHECK(r4.result.cobar_ranks == std::vector<int>{11, 15, 5});
    const auto r2 = compare_w_barcobar(chainop::make_as_ns(), 2);
    CHECK(r2.result.rescaling == std::vector<int>{1});
}

TEST_CASE("caps on both sides") {
    const auto p = unary_operad();
    CHECK_THROWS_AS(bar(p, 2), Refusal);
    for (int k = 0; k <= 2; ++k) {
        CAPTURE(k);
        const auto run = compare_w_barcobar(p, 2, k);
        CHECK(run.result.truncated);
        CHECK(run.result.status == "iso");
        CHECK(d_squared_zero(*run.cobar));
        CHECK(d_squared_zero(run.bar->arity(2)));
    }
    const auto w = chainop::w_pseudo(p, 2, 1);
    const auto b = bar(p, 2, 3);
    CHECK_THROWS_AS(compare_w_barcobar(w, b, cobar(b, 2, 3)), Refusal);
    CHECK_THROWS_AS(cobar(b, 2, 4), Refusal);
    CHECK_THROWS_AS(cobar(b, 2), Refusal);
    CHECK_THROWS_AS(cobar(b, 3, 2), Refusal);
}

TEST_CASE("parallel and serial cobar agree") {
    const auto p = chainop::make_ass_sym();
    const auto b1 = bar(p, 4, -1, true), b2 = bar(p, 4, -1, false);
    CHECK(chain::complex_to_json(*b1->arity(4).complex()) == chain::complex_to_json(*b2->arity(4).complex()));
    CHECK(chain::complex_to_json(*cobar(b1, 4, -1, true)->complex()) ==
          chain::complex_to_json(*cobar(b2, 4, -1, false)->complex()));
}
