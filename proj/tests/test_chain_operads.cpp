#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "opw/chain_operads.hpp"
#include "opw/errors.hpp"

using namespace opw;
using namespace opw::chainop;
using chain::SparseMatrix;

namespace {

using Poly = std::vector<long>;

Poly add(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

// Planar trees with n leaves and valences >= 2; each internal edge is either
// of length one or a gamma edge (weight 1 + t).
Poly planar_poly(int n) {
    std::map<int, Poly> memo;
    const Poly edge{1, 1};
    std::function<Poly(int)> f = [&](int leaves) -> Poly {
        if (auto it = memo.find(leaves); it != memo.end()) return it->second;
        std::function<Poly(int, int)> seq = [&](int rest, int parts) -> Poly {
            if (rest == 0) return parts >= 2 ? Poly{1} : Poly{};
            Poly s;
            for (int a = 1; a <= rest - (parts == 0); ++a)
                s = add(s, mul(a == 1 ? Poly{1} : mul(edge, f(a)), seq(rest - a, parts + 1)));
            return s;
        };
        return memo[leaves] = seq(leaves, 0);
    };
    return trim(f(n));
}

// The same over non-planar trees with labeled leaves.
Poly leaf_labeled_poly(unsigned set) {
    std::map<unsigned, Poly> memo;
    const Poly edge{1, 1};
    std::function<Poly(unsigned)> f = [&](unsigned s) -> Poly {
        if (auto it = memo.find(s); it != memo.end()) return it->second;
        std::function<Poly(unsigned, int)> parts = [&](unsigned rest, int count) -> Poly {
            if (rest == 0) return count >= 2 ? Poly{1} : Poly{};
            const unsigned low = rest & (~rest + 1);
            Poly total;
            for (unsigned sub = rest; sub; sub = (sub - 1) & rest) {
                if (!(sub & low) || (count == 0 && sub == s)) continue;
                const Poly g = __builtin_popcount(sub) == 1 ? Poly{1} : mul(edge, f(sub));
                total = add(total, mul(g, parts(rest & ~sub, count + 1)));
            }
            return total;
        };
        return memo[s] = parts(s, 0);
    };
    return trim(f(set));
}

std::vector<int> as_ints(const Poly& p, long scale = 1) {
    std::vector<int> r;
    for (long c : p) r.push_back(static_cast<int>(c * scale));
    return r;
}

long fact(int n) { return n <= 1 ? 1 : n * fact(n - 1); }

// P(n) = span{c_n, e_n} for 2 <= n <= max with d e = c, composition by
// multiplication in the dual numbers (e e = 0).
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

// d of a basis element, on global indices.
Vec d_of(const TreeComplex& w, int g) {
    Vec out;
    const int deg = w.degree_of(g);
    const SparseMatrix m = w.complex()->d(deg);
    if (m.cols() == 0) return out;
    for (const auto& [r, c] : m.column(w.position_of(g))) out[w.global(deg - 1, r)] = c;
    return out;
}

Vec add_vec(Vec a, const Vec& b, const Scalar& s = 1) {
    for (const auto& [k, c] : b) {
        a[k] += s * c;
        if (a[k] == 0) a.erase(k);
    }
    return a;
}

Vec compose_vec(const TreeComplex& wx, const Vec& x, int i, const TreeComplex& wy, const Vec& y,
                const TreeComplex& t) {
    Vec out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y) out = add_vec(out, tree_compose(wx, a, i, wy, b, t), ca * cb);
    return out;
}

bool all_d_squared_zero(const TreeComplex& w) { return chain::verify_d_squared(*w.complex()).empty(); }

}  // namespace

TEST_CASE("built-in and table chain operads satisfy the axioms") {
    CHECK(validate_chain_operad(*make_as_ns(), 5).empty());
    CHECK(validate_chain_operad(*make_ass_sym(), 4).empty());
    CHECK(validate_chain_operad(*make_com_chain(), 4).empty());
    CHECK(validate_chain_operad(*chain_operad_from_json(dual_numbers(4, false)), 4).empty());
    CHECK(validate_chain_operad(*chain_operad_from_json(dual_numbers(4, true)), 4).empty());
    CHECK(builtin_chain_operad("ass_sym")->size(3) == 6);
    CHECK_THROWS_AS(builtin_chain_operad("lie"), InputError);
}

TEST_CASE("corrupted chain operads are reported") {
    auto j = dual_numbers(3, false);
    // Degrees do not add up.
    j["compose"]["e2 o1 e2"] = {{"c3", "1"}};
    CHECK_THROWS_AS(chain_operad_from_json(j), InputError);

    auto k = dual_numbers(3, false);
    k["compose"]["c2 o1 e2"] = {{"e3", "2"}};
    const auto v = validate_chain_operad(*chain_operad_from_json(k), 3);
    CHECK(!v.empty());

    auto l = dual_numbers(3, false);
    l["arities"]["2"]["d"]["e2"] = {{"c2", "1"}, {"e2", "1"}};
    CHECK_THROWS_AS(chain_operad_from_json(l), InputError);

    CHECK_THROWS_AS(chain_operad_from_json(nlohmann::json::parse(R"({"arities": {"2": {}}})")), InputError);
    auto s = dual_numbers(2, true);
    s["actions"]["e2"] = {{"2 1", "-c2"}};
    CHECK_THROWS_AS(chain_operad_from_json(s), InputError);
}

TEST_CASE("operad complexes") {
    const auto p = chain_operad_from_json(dual_numbers(3, false));
    const auto c = operad_complex(*p, 3, false);
    CHECK(c.rank(0) == 1);
    CHECK(c.rank(1) == 1);
    CHECK(chain::homology(c).groups.empty());
    const auto r = operad_complex(*make_as_ns(), 1, true);
    CHECK(r.rank(0) == 1);
    CHECK(operad_complex(*make_ass_sym(), 3, false).rank(0) == 6);
}

TEST_CASE("W ranks agree with tree counts") {
    CHECK(w_pseudo(make_as_ns(), 3)->ranks() == std::vector<int>{3, 2});
    CHECK(w_pseudo(make_as_ns(), 4)->ranks() == std::vector<int>{11, 15, 5});
    for (int n = 2; n <= 6; ++n) CHECK(w_pseudo(make_as_ns(), n)->ranks() == as_ints(planar_poly(n)));
    for (int n = 2; n <= 4; ++n) {
        CHECK(w_pseudo(make_ass_sym(), n)->ranks() == as_ints(planar_poly(n), fact(n)));
        CHECK(w_pseudo(make_com_chain(), n)->ranks() == as_ints(leaf_labeled_poly((1u << n) - 1)));
    }
    // Odd labels shift the count: the dual numbers double each vertex.
    const auto dual = chain_operad_from_json(dual_numbers(4, false));
    CHECK(w_pseudo(dual, 3)->ranks() == std::vector<int>{3, 7, 6, 2});
}

TEST_CASE("d squares to zero") {
    for (int n = 2; n <= 5; ++n) CHECK(all_d_squared_zero(*w_pseudo(make_as_ns(), n)));
    for (int n = 2; n <= 4; ++n) {
        CHECK(all_d_squared_zero(*w_pseudo(make_ass_sym(), n)));
        CHECK(all_d_squared_zero(*w_pseudo(make_com_chain(), n)));
        CHECK(all_d_squared_zero(*w_pseudo(chain_operad_from_json(dual_numbers(4, false)), n)));
        CHECK(all_d_squared_zero(*w_pseudo(chain_operad_from_json(dual_numbers(4, true)), n)));
    }
}

TEST_CASE("W resolves P") {
    for (int n = 2; n <= 5; ++n) {
        const auto h = chain::homology(*w_pseudo(make_as_ns(), n)->complex());
        CHECK(h.rank(0) == 1);
        CHECK(h.groups.size() == 1);
        CHECK(h.groups.at(0).torsion.empty());
    }
    for (int n = 2; n <= 4; ++n) {
        const auto h = chain::homology(*w_pseudo(make_ass_sym(), n)->complex());
        CHECK(h.rank(0) == fact(n));
        CHECK(h.groups.size() == 1);
        CHECK(chain::homology(*w_pseudo(make_com_chain(), n)->complex()).rank(0) == 1);
        // P is acyclic here, hence so is W.
        const auto dual = chain_operad_from_json(dual_numbers(4, true));
        CHECK(chain::homology(*w_pseudo(dual, n)->complex()).groups.empty());
    }
    const auto q = chain::homology(chain::ChainComplex(*w_pseudo(make_ass_sym(), 3)->complex()));
    CHECK(q.rank(0) == 6);
}

TEST_CASE("augmentation and embedding") {
    for (auto p : {make_as_ns(), make_ass_sym(), make_com_chain(), chain_operad_from_json(dual_numbers(4, false)),
                   chain_operad_from_json(dual_numbers(4, true))}) {
        for (int n = 2; n <= 4; ++n) {
            CAPTURE(p->name());
            CAPTURE(n);
            const auto w = w_pseudo(p, n);
            const auto f = free_pseudo(p, n);
            const auto gamma = w_augmentation(p, w);
            const auto delta = delta_embedding(f, w);
            CHECK(chain::verify_chain_map(gamma).empty());
            CHECK(chain::verify_chain_map(delta).empty());
            CHECK(chain::verify_d_squared(*f->complex()).empty());
            const auto counit = free_counit(p, f);
            CHECK(chain::verify_chain_map(counit).empty());
            for (int deg : f->complex()->degrees())
                CHECK(gamma.component(deg) * delta.component(deg) == counit.component(deg));
            // gamma is a quasi-isomorphism: homology ranks match and H(gamma) is onto.
            const auto hw = chain::homology(*w->complex());
            const auto hp = chain::homology(*gamma.target);
            CHECK(hw.to_json() == hp.to_json());
        }
    }
}

TEST_CASE("W in arities 0 and 1") {
    CHECK(w_reduced(make_as_ns(), 0).rank(0) == 1);
    CHECK(w_reduced(make_as_ns(), 1).rank(0) == 1);
    CHECK(w_reduced(make_as_ns(), 2).rank(0) == 1);
    CHECK(w_reduced(make_as_ns(), 2).degrees() == std::vector<int>{0});
    CHECK(w_pseudo(make_as_ns(), 1)->size() == 0);
}

TEST_CASE("unary elements need a cap") {
    // u idempotent in arity 1, m in arity 2 absorbing u.
    const auto p = chain_operad_from_json(nlohmann::json::parse(R"({
        "name": "unary",
        "arities": {"1": {"basis": ["u"]}, "2": {"basis": ["m"]}},
        "compose": {"u o1 u": {"u": "1"}, "u o1 m": {"m": "1"}, "m o1 u": {"m": "1"}, "m o2 u": {"m": "1"}}
    })"));
    CHECK(validate_chain_operad(*p, 2).empty());
    CHECK_THROWS_AS(w_pseudo(p, 1), Refusal);
    const auto w3 = w_pseudo(p, 1, 3);
    CHECK(w3->truncated());
    CHECK(w3->ranks() == as_ints(Poly{4, 6, 4, 1}, 1));  // chains of k vertices, k-1 edges
    CHECK(all_d_squared_zero(*w3));
    // Lower caps give subcomplexes: the matrices are restrictions.
    const auto w2 = w_pseudo(p, 1, 2);
    for (int deg = 0; deg <= 2; ++deg) {
        const SparseMatrix big = w3->complex()->d(deg), small = w2->complex()->d(deg);
        for (int c = 0; c < small.cols(); ++c) {
            const int g = w2->global(deg, c);
            const int h = w3->find(w2->element(g));
            REQUIRE(h >= 0);
            for (const auto& [r, v] : small.column(c)) {
                const int hr = w3->find(w2->element(w2->global(deg - 1, r)));
                CHECK(big.at(w3->position_of(hr), w3->position_of(h)) == v);
            }
            CHECK(big.column(w3->position_of(h)).size() == small.column(c).size());
        }
    }
    CHECK(!w_pseudo(make_as_ns(), 4, 2)->truncated());
    CHECK(w_pseudo(make_as_ns(), 4, 1)->truncated());
    CHECK(w_pseudo(make_as_ns(), 4, 1)->ranks() == std::vector<int>{6, 5});
}

TEST_CASE("parallel and serial assembly agree") {
    for (auto p : {make_ass_sym(), chain_operad_from_json(dual_numbers(4, true))}) {
        const auto a = w_pseudo(p, 4, -1, true);
        const auto b = w_pseudo(p, 4, -1, false);
        CHECK(chain::complex_to_json(*a->complex()) == chain::complex_to_json(*b->complex()));
    }
}

TEST_CASE("composition in W") {
    for (auto p : {make_as_ns(), make_ass_sym(), chain_operad_from_json(dual_numbers(5, false)),
                   chain_operad_from_json(dual_numbers(5, true))}) {
        CAPTURE(p->name());
        std::map<int, std::shared_ptr<TreeComplex>> w;
        for (int n = 2; n <= 4; ++n) w[n] = w_pseudo(p, n);
        std::map<int, chain::ChainMap> gamma;
        for (int n = 2; n <= 4; ++n) gamma[n] = w_augmentation(p, w[n]);
        auto gamma_vec = [&](int n, const Vec& x) {
            // Values in P(n), keyed by basis element.
            std::map<std::pair<int, int>, int> element;
            std::map<int, int> count;
            for (int a = 0; a < p->size(n); ++a) element[{p->degree(n, a), count[p->degree(n, a)]++}] = a;
            Vec out;
            for (const auto& [g, c] : x) {
                const int deg = w[n]->degree_of(g);
                const SparseMatrix m = gamma[n].component(deg);
                if (m.cols() == 0) continue;
                for (const auto& [r, v] : m.column(w[n]->position_of(g))) out = add_vec(out, {{element[{deg, r}], v}}, c);
            }
            return out;
        };
        for (int n = 2; n <= 3; ++n)
            for (int m = 2; n + m - 1 <= 4; ++m)
                for (int x = 0; x < w[n]->size(); ++x)
                    for (int y = 0; y < w[m]->size(); ++y)
                        for (int i = 0; i < n; ++i) {
                            const auto& T = *w[n + m - 1];
                            const Vec xy = tree_compose(*w[n], x, i, *w[m], y, T);
                            REQUIRE(xy.size() == 1);
                            const int g = xy.begin()->first;
                            CHECK(T.element(g).edge_count() ==
                                  w[n]->element(x).edge_count() + w[m]->element(y).edge_count() + 1);
                            CHECK(T.degree_of(g) == w[n]->degree_of(x) + w[m]->degree_of(y));
                            // Leibniz rule.
                            const Vec dxy = [&] {
                                Vec r;
                                for (const auto& [h, c] : xy) r = add_vec(r, d_of(T, h), c);
                                return r;
                            }();
                            const Vec rhs = add_vec(compose_vec(*w[n], d_of(*w[n], x), i, *w[m], {{y, 1}}, T),
                                                    compose_vec(*w[n], {{x, 1}}, i, *w[m], d_of(*w[m], y), T),
                                                    w[n]->degree_of(x) % 2 == 0 ? 1 : -1);
                            CHECK(dxy == rhs);
                            // The augmentation is multiplicative.
                            const Vec gx = gamma_vec(n, {{x, 1}}), gy = gamma_vec(m, {{y, 1}});
                            const Vec gxy = gamma_vec(n + m - 1, xy);
                            Vec prod;
                            for (const auto& [a, ca] : gx)
                                for (const auto& [b, cb] : gy) prod = add_vec(prod, p->compose(n, a, i, m, b), ca * cb);
                            CHECK(gxy == prod);
                        }
        // Associativity with the Koszul sign, on a sample of triples.
        std::mt19937 rng(7);
        for (int trial = 0; trial < 300; ++trial) {
            const int x = rng() % w[2]->size(), y = rng() % w[2]->size(), z = rng() % w[2]->size();
            const int dy = w[2]->degree_of(y), dz = w[2]->degree_of(z);
            // (x o1 y) o3 z = (-1)^{|y||z|} (x o2 z) o1 y
            const Vec l = compose_vec(*w[3], tree_compose(*w[2], x, 0, *w[2], y, *w[3]), 2, *w[2], {{z, 1}}, *w[4]);
            const Vec r = compose_vec(*w[3], tree_compose(*w[2], x, 1, *w[2], z, *w[3]), 0, *w[2], {{y, 1}}, *w[4]);
            CHECK(l == add_vec({}, r, (dy * dz) % 2 == 0 ? 1 : -1));
            // (x o1 y) o2 z = x o1 (y o2 z)
            const Vec l2 = compose_vec(*w[3], tree_compose(*w[2], x, 0, *w[2], y, *w[3]), 1, *w[2], {{z, 1}}, *w[4]);
            const Vec r2 = compose_vec(*w[2], {{x, 1}}, 0, *w[3], tree_compose(*w[2], y, 1, *w[2], z, *w[3]), *w[4]);
            CHECK(l2 == r2);
        }
    }
}

TEST_CASE("canonical forms keep the value") {
    // Random numbered trees over ass_sym and the symmetric dual numbers: the
    // composite does not depend on the representative.
    std::mt19937 rng(11);
    for (auto p : {make_ass_sym(), chain_operad_from_json(dual_numbers(6, true))}) {
        const auto space = free_space(p);
        for (int trial = 0; trial < 200; ++trial) {
            std::uniform_int_distribution<int> ar(2, 3);
            auto corolla = [&] {
                const int k = ar(rng);
                return LabeledTree::corolla(k, static_cast<int>(rng() % p->size(k)));
            };
            LabeledTree x = corolla();
            const int vertices = 1 + static_cast<int>(rng() % 3);
            for (int v = 1; v < vertices && x.arity() < 5; ++v)
                x = trees::graft(x, static_cast<int>(rng() % x.arity()), corolla(), kLengthOne).tree;
            std::vector<int> leaves(x.arity());
            std::iota(leaves.begin(), leaves.end(), 0);
            std::shuffle(leaves.begin(), leaves.end(), rng);
            x.leaves = leaves;
            // A random planar reordering of the word.
            auto word = space->word(x);
            std::shuffle(word.begin(), word.end(), rng);
            const auto s = space->normalize(x, word);
            const Vec a = evaluate(*p, x, word);
            const Vec b = evaluate(*p, s.tree, space->word(s.tree));
            CHECK(a == add_vec({}, b, s.sign));
        }
    }
}

TEST_CASE("W element export") {
    const auto w = w_pseudo(make_as_ns(), 3);
    const auto j = w_element_json(*w, w->global(1, 0));
    CHECK(j["degree"] == 1);
    CHECK(j["gamma_edges"].size() == 1);
    CHECK(j["labels"].size() == 2);
    CHECK(j["leaf_coset"] == nlohmann::json::array({1, 2, 3}));
}

TEST_CASE("chain interval") {
    const auto i = chain_interval();
    CHECK(chain::homology(i.complex()).rank(0) == 1);
    CHECK(i.join(1, 2) == 2);
    CHECK(i.join(0, 2) == 0);
    CHECK(i.join(2, 2) == -1);
    CHECK(i.counit(2) == 0);
}
