#include "opw/bar_cobar.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "opw/errors.hpp"

namespace opw::barcobar {

using chain::Ring;
using chain::Scalar;
using chainop::accumulate;
using chainop::RawTerm;
using chainop::TreeSpace;
using trees::LabeledTree;
using trees::RawTree;

namespace {

int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

// d of a basis element on global indices.
Vec d_column(const TreeComplex& c, int g) {
    Vec out;
    const int deg = c.degree_of(g);
    const chain::SparseMatrix m = c.complex()->d(deg);
    if (m.cols() == 0) return out;
    for (const auto& [r, v] : m.column(c.position_of(g))) out[c.global(deg - 1, r)] = v;
    return out;
}

std::string tree_name(const chainop::GradedLabels& labels, const LabeledTree& x, bool bracket) {
    return trees::to_string(
        x,
        [&](int v) {
            const std::string s = labels.element_name(x.shape.valence(v), x.labels[v]);
            return bracket ? "[" + s + "]" : s;
        },
        [](int) { return std::string(); });
}

std::vector<RawTerm> bar_column(const chainop::PseudoChainOperad& p, const TreeSpace& space, const LabeledTree& x) {
    std::vector<RawTerm> out;
    const auto w = space.word(x);  // preorder, suspended degrees
    long before = 0;
    std::vector<long> prefix;
    for (std::size_t k = 0; k < w.size(); ++k) {
        prefix.push_back(before);
        const int v = w[k].key, val = x.shape.valence(v);
        // d(s a) = -s(d a)
        for (const auto& [b, c] : p.differential(val, x.labels[v])) {
            RawTerm t{x, w, -c * parity_sign(before)};
            t.tree.labels[v] = b;
            t.word[k].degree = p.degree(val, b) + 1;
            out.push_back(std::move(t));
        }
        before += w[k].degree;
    }
    // s a o s b -> (-1)^{|a|+1} s(a o b) on each edge, after the factors in front.
    for (int c = 1; c < x.vertex_count(); ++c) {
        const int pv = x.shape.parent(c);
        const int sign = parity_sign(prefix[pv]) * parity_sign(p.degree(x.shape.valence(pv), x.labels[pv]) + 1);
        for (auto& t : chainop::contraction_terms(p, x, w, c, 1)) {
            t.coef *= sign;
            out.push_back(std::move(t));
        }
    }
    return out;
}

// Bar elements as tree labels for the cobar construction.
class BarLabels : public chainop::GradedLabels {
  public:
    explicit BarLabels(const BarCooperad& b) : b_(b) {}
    std::string name() const override { return "bar(" + b_.operad()->name() + ")"; }
    bool symmetric() const override { return b_.operad()->symmetric(); }
    int max_arity() const override { return b_.max_arity(); }
    int size(int n) const override { return n >= 1 && n <= b_.max_arity() ? b_.arity(n).size() : 0; }
    std::string element_name(int n, int a) const override { return b_.arity(n).name(a); }
    int degree(int n, int a) const override { return b_.arity(n).degree_of(a); }
    trees::Twist act(int n, int a, const Perm& s) const override {
        const TreeComplex& c = b_.arity(n);
        const LabeledTree& x = c.element(a);
        const auto r = c.space().normalize(trees::act_on_leaves(x, s), c.space().word(x));
        const int g = c.find(r.tree);
        if (g < 0) throw std::logic_error("bar action left the basis");
        return {g, r.sign};
    }
    int weight(int n, int a) const override { return b_.arity(n).element(a).vertex_count(); }

  private:
    const BarCooperad& b_;
};

// The cut of a bar tree c at the edge above vertex w.
struct Split {
    LabeledTree lower, upper;
    std::vector<Factor> lower_word, upper_word;
    int kappa;                      // moving the upper block to the end
    int cut;                        // leaf of `lower` carrying `upper`
    std::vector<int> lower_source;  // leaf of lower -> leaf of c (-1 at the cut)
    std::vector<int> upper_source;  // leaf of upper -> leaf of c
};

Split split(const TreeSpace& space, const LabeledTree& c, int w) {
    const trees::PlanarTree& t = c.shape;
    const int k = c.arity(), first = t.first_leaf(w), m = t.subtree_arity(w);
    const int lo_v = w, hi_v = w + t.subtree_size(w);
    auto in_block = [&](int v) { return v >= lo_v && v < hi_v; };
    std::vector<int> upper_nums;
    for (int q = first; q < first + m; ++q) upper_nums.push_back(c.leaves[q]);
    std::sort(upper_nums.begin(), upper_nums.end());
    std::vector<bool> in_upper(k, false);
    for (int j : upper_nums) in_upper[j] = true;
    const int jstar = upper_nums[0];
    std::vector<int> lower_nums;
    for (int j = 0; j < k; ++j)
        if (!in_upper[j] || j == jstar) lower_nums.push_back(j);
    std::vector<int> rank_upper(k, -1), rank_lower(k, -1);
    for (int r = 0; r < static_cast<int>(upper_nums.size()); ++r) rank_upper[upper_nums[r]] = r;
    for (int r = 0; r < static_cast<int>(lower_nums.size()); ++r) rank_lower[lower_nums[r]] = r;

    Split s;
    const RawTree raw = trees::to_raw(c);
    RawTree up = raw, lo = raw;
    for (int v = 0; v < t.vertex_count(); ++v) {
        auto& ins = in_block(v) ? up.inputs[v] : lo.inputs[v];
        const auto& rank = in_block(v) ? rank_upper : rank_lower;
        for (int& i : ins)
            if (i < 0) i = ~rank[~i];
    }
    up.root = w;
    lo.root = 0;
    lo.inputs[t.parent(w)][t.input_position(w)] = ~rank_lower[jstar];
    const trees::Built bu = trees::build(up), bl = trees::build(lo);
    s.lower = bl.tree;
    s.upper = bu.tree;
    const auto word = space.word(c);
    std::vector<Factor> reordered;
    for (const Factor& f : word)
        if (!in_block(f.key)) {
            reordered.push_back(f);
            s.lower_word.push_back({bl.map[f.key], f.degree});
        }
    for (const Factor& f : word)
        if (in_block(f.key)) {
            reordered.push_back(f);
            s.upper_word.push_back({bu.map[f.key], f.degree});
        }
    s.kappa = koszul_sign(word, reordered);
    s.cut = rank_lower[jstar];
    s.lower_source.assign(lower_nums.size(), -1);
    for (int r = 0; r < static_cast<int>(lower_nums.size()); ++r)
        if (r != s.cut) s.lower_source[r] = lower_nums[r];
    s.upper_source = upper_nums;
    return s;
}

}  // namespace

BarCooperad::BarCooperad(ChainOperadPtr p, int max_arity, int vertex_cap, bool parallel)
    : p_(std::move(p)), max_arity_(max_arity), cap_(vertex_cap) {
    if (p_->size(0) != 0) throw Refusal("the bar construction is only built for operads with zero arity 0 part");
    if (max_arity_ > p_->max_arity())
        throw Refusal("arity " + std::to_string(max_arity_) + " is beyond the tables of " + p_->name());
    space_ = std::make_shared<TreeSpace>(p_, 1, std::vector<int>{chainop::kLengthOne}, std::vector<int>{0, 0, 0}, -1);
    complexes_.resize(max_arity_ + 1);
    const bool truncated = vertex_cap >= 0 && (!space_->finite() || vertex_cap < max_arity_ - 1);
    for (int n = 1; n <= max_arity_; ++n) {
        const ChainOperadPtr p = p_;
        complexes_[n] = std::make_shared<TreeComplex>(
            space_, p_->ring(), n, space_->enumerate(n, vertex_cap), truncated,
            [p](const LabeledTree& x) { return tree_name(*p, x, false); }, vertex_cap);
        const TreeSpace* sp = space_.get();
        complexes_[n]->assemble([p, sp](const LabeledTree& x) { return bar_column(*p, *sp, x); }, parallel);
    }
}

bool BarCooperad::truncated() const { return max_arity_ >= 1 && complexes_[1]->truncated(); }

const TreeComplex& BarCooperad::arity(int n) const {
    if (n < 1 || n > max_arity_)
        throw Refusal("bar arity " + std::to_string(n) + " is outside 1.." + std::to_string(max_arity_));
    return *complexes_[n];
}

BarPtr bar(ChainOperadPtr p, int max_arity, int vertex_cap, bool parallel) {
    return std::make_shared<BarCooperad>(std::move(p), max_arity, vertex_cap, parallel);
}

std::shared_ptr<TreeComplex> cobar(BarPtr b, int n, int cap, bool parallel) {
    if (n > b->max_arity())
        throw Refusal("cobar arity " + std::to_string(n) + " needs the bar up to that arity (built up to " +
                      std::to_string(b->max_arity()) + ")");
    if (b->vertex_cap() >= 0 && (cap < 0 || cap > b->vertex_cap()))
        throw Refusal("cap mismatch: the cobar vertex cap may not exceed the bar vertex cap " +
                      std::to_string(b->vertex_cap()));
    // The labels keep the bar alive.
    auto holder = std::make_shared<std::pair<BarPtr, std::unique_ptr<BarLabels>>>(b, std::make_unique<BarLabels>(*b));
    const std::shared_ptr<const chainop::GradedLabels> labels(holder, holder->second.get());
    auto space = std::make_shared<TreeSpace>(labels, -1, std::vector<int>{chainop::kLengthOne},
                                             std::vector<int>{0, 0, 0}, -1);
    const bool truncated = b->truncated() || (cap >= 0 && (!space->finite() || cap < n - 1));
    const chainop::GradedLabels* lp = labels.get();
    auto c = std::make_shared<TreeComplex>(
        space, b->operad()->ring(), n, space->enumerate(n, cap), truncated,
        [lp](const LabeledTree& x) { return tree_name(*lp, x, true); }, cap);
    const BarCooperad* bp = b.get();
    const TreeSpace* sp = space.get();
    auto column = [bp, sp](const LabeledTree& x) {
        std::vector<RawTerm> out;
        const auto w = sp->word(x);
        long before = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const int u = w[k].key, val = x.shape.valence(u);
            const TreeComplex& B = bp->arity(val);
            // d(s^-1 c) = -s^-1(d c)
            for (const auto& [g2, coef] : d_column(B, x.labels[u])) {
                RawTerm t{x, w, -coef * parity_sign(before)};
                t.tree.labels[u] = g2;
                t.word[k].degree = B.degree_of(g2) - 1;
                out.push_back(std::move(t));
            }
            const LabeledTree& cu = B.element(x.labels[u]);
            for (int wv = 1; wv < cu.vertex_count(); ++wv) {
                const Split s = split(B.space(), cu, wv);
                const TreeComplex& B1 = bp->arity(s.lower.arity());
                const TreeComplex& B2 = bp->arity(s.upper.arity());
                const auto n1 = B1.space().normalize(s.lower, s.lower_word);
                const auto n2 = B2.space().normalize(s.upper, s.upper_word);
                if (n1.sign == 0 || n2.sign == 0) continue;
                const int g1 = B1.find(n1.tree), g2 = B2.find(n2.tree);
                if (g1 < 0 || g2 < 0) throw std::logic_error("cobar: split outside the bar basis");
                const int d1 = B1.degree_of(g1), d2 = B2.degree_of(g2);
                RawTree raw = trees::to_raw(x);
                const int fresh = x.vertex_count();
                const std::vector<int> old = raw.inputs[u];
                std::vector<int> lower(s.lower_source.size()), upper(s.upper_source.size());
                for (std::size_t r = 0; r < lower.size(); ++r)
                    lower[r] = static_cast<int>(r) == s.cut ? fresh : old[s.lower_source[r]];
                for (std::size_t r = 0; r < upper.size(); ++r) upper[r] = old[s.upper_source[r]];
                raw.inputs[u] = lower;
                raw.labels[u] = g1;
                raw.inputs.push_back(upper);
                raw.labels.push_back(g2);
                raw.marks.push_back(chainop::kLengthOne);
                const trees::Built built = trees::build(raw);
                RawTerm t{built.tree, {}, parity_sign(before) * s.kappa * parity_sign(d1) * n1.sign * n2.sign};
                for (const Factor& f : w) {
                    if (f.key == u) {
                        t.word.push_back({built.map[u], d1 - 1});
                        t.word.push_back({built.map[fresh], d2 - 1});
                    } else {
                        t.word.push_back({built.map[f.key], f.degree});
                    }
                }
                out.push_back(std::move(t));
            }
            before += w[k].degree;
        }
        return out;
    };
    c->assemble(column, parallel);
    return c;
}

TwistingCochain bar_counit_cochain(BarPtr b) {
    const BarCooperad* bp = b.get();
    return {b, [bp](int n, int g) -> Vec {
                const LabeledTree& x = bp->arity(n).element(g);
                if (x.vertex_count() != 1) return {};
                const auto& p = *bp->operad();
                return chainop::evaluate(p, x, {{0, p.degree(n, x.labels[0])}});
            }};
}

TwistingCochain zero_cochain(BarPtr b) {
    return {b, [](int, int) { return Vec{}; }};
}

std::vector<std::string> TwistingReport::describe(const chainop::PseudoChainOperad& p) const {
    std::vector<std::string> out;
    auto show = [&](int n, const Vec& v) {
        std::string s;
        for (const auto& [a, c] : v)
            s += (s.empty() ? "" : " + ") + chain::scalar_to_string(c) + "*" + p.element_name(n, a);
        return s.empty() ? std::string("0") : s;
    };
    for (const auto& m : mismatches)
        out.push_back("arity " + std::to_string(m.arity) + ", degree " + std::to_string(m.degree) + ": on " +
                      m.element + " D tau = " + show(m.arity, m.d_tau) + " but tau u tau = " + show(m.arity, m.cup));
    return out;
}

TwistingReport check_twisting(const TwistingCochain& t) {
    TwistingReport report;
    const BarCooperad& b = *t.bar;
    const auto& p = *b.operad();
    const Ring ring = p.ring();
    auto reduce = [&](const Vec& v) {
        Vec out;
        for (const auto& [k, c] : v) accumulate(out, k, ring.reduce(c));
        return out;
    };
    // tau on a planar corolla with identity leaves.
    auto tau_corolla = [&](int k, int label) {
        const TreeComplex& B = b.arity(k);
        const LabeledTree x = LabeledTree::corolla(k, label);
        const auto r = B.space().normalize(x, {{0, p.degree(k, label) + 1}});
        const int g = B.find(r.tree);
        if (g < 0) throw std::logic_error("check_twisting: corolla outside the bar basis");
        Vec v;
        for (const auto& [a, c] : t.value(k, g)) accumulate(v, a, c * r.sign);
        return v;
    };
    for (int n = 1; n <= b.max_arity(); ++n) {
        const TreeComplex& B = b.arity(n);
        std::set<int> reported;
        for (int g = 0; g < B.size(); ++g) {
            Vec dtau;
            for (const auto& [a, c] : t.value(n, g))
                for (const auto& [a2, c2] : p.differential(n, a)) accumulate(dtau, a2, c * c2);
            for (const auto& [h, c] : d_column(B, g))
                for (const auto& [a, c2] : t.value(n, h)) accumulate(dtau, a, c * c2);
            Vec cup;
            const LabeledTree& x = B.element(g);
            if (x.vertex_count() == 2) {
                const int k = x.shape.valence(0), m = x.shape.valence(1), slot = x.shape.input_position(1);
                const Vec tx = tau_corolla(k, x.labels[0]), ty = tau_corolla(m, x.labels[1]);
                const int sign = parity_sign(p.degree(k, x.labels[0]) + 1);
                Vec planar;
                for (const auto& [a, ca] : tx)
                    for (const auto& [c, cc] : ty)
                        for (const auto& [e, ce] : p.compose(k, a, slot, m, c)) accumulate(planar, e, ca * cc * ce);
                for (const auto& [e, ce] : planar) {
                    const auto tw = p.symmetric() ? p.act(n, e, inverse(x.leaves)) : trees::Twist{e, 1};
                    accumulate(cup, tw.label, ce * tw.sign * sign);
                }
            }
            dtau = reduce(dtau);
            cup = reduce(cup);
            const int deg = B.degree_of(g);
            if (dtau != cup && reported.insert(deg).second)
                report.mismatches.push_back({n, deg, B.name(g), dtau, cup});
        }
    }
    return report;
}

namespace {

// Positions in P(n) of basis elements, per degree.
std::map<int, int> positions(const chainop::PseudoChainOperad& p, int n) {
    std::map<int, int> count, pos;
    for (int a = 0; a < p.size(n); ++a) pos[a] = count[p.degree(n, a)]++;
    return pos;
}

}  // namespace

chain::ChainMap cobar_bar_counit(BarPtr b, const std::shared_ptr<TreeComplex>& c) {
    const auto& p = *b->operad();
    const int n = c->arity();
    chain::ChainMap f;
    f.source = c->complex();
    f.target = std::make_shared<chain::ChainComplex>(chainop::operad_complex(p, n, false));
    for (int deg : f.source->degrees()) f.f[deg] = chain::SparseMatrix(f.target->rank(deg), f.source->rank(deg));
    const auto pos = positions(p, n);
    for (int g = 0; g < c->size(); ++g) {
        LabeledTree z = c->element(g);
        int sign = 1;
        bool corollas = true;
        for (int v = 0; v < z.vertex_count() && corollas; ++v) {
            const int k = z.shape.valence(v);
            const LabeledTree& cv = b->arity(k).element(z.labels[v]);
            corollas = cv.vertex_count() == 1;
            if (!corollas) break;
            const auto tw = p.symmetric() ? p.act(k, cv.labels[0], inverse(cv.leaves)) : trees::Twist{cv.labels[0], 1};
            z.labels[v] = tw.label;
            sign *= tw.sign;
        }
        if (!corollas) continue;
        std::vector<Factor> word;
        for (const Factor& fct : c->space().word(c->element(g))) word.push_back({fct.key, fct.degree});
        for (const auto& [a, v] : chainop::evaluate(p, z, word))
            f.f[c->degree_of(g)].add(pos.at(a), c->position_of(g), v * sign);
    }
    for (auto& [deg, m] : f.f) m = m.reduced(p.ring());
    return f;
}

nlohmann::json BarCobarComparison::to_json(const TreeComplex& w, const TreeComplex& c) const {
    nlohmann::json j;
    j["status"] = status;
    j["truncated"] = truncated;
    j["ranks"] = {{"w", w_ranks}, {"cobar_bar", cobar_ranks}};
    nlohmann::json bij = nlohmann::json::array();
    nlohmann::json resc = nlohmann::json::object();
    for (std::size_t g = 0; g < bijection.size(); ++g) {
        if (bijection[g] < 0) continue;
        bij.push_back({{"w", w.name(static_cast<int>(g))}, {"cobar_bar", c.name(bijection[g])}});
        if (g < rescaling.size()) resc[w.name(static_cast<int>(g))] = rescaling[g];
    }
    j["bijection"] = bij;
    j["rescaling"] = resc;
    j["components"] = components;
    j["augmentations_agree"] = augmentations_agree;
    j["uniqueness"] = {{"rescalings_found", rescalings_found}, {"expected", rescalings_expected},
                       {"checked", rescalings_found >= 0}};
    if (!witness.empty()) j["witness"] = witness;
    return j;
}

BarCobarComparison compare_w_barcobar(const std::shared_ptr<TreeComplex>& w, BarPtr b,
                                      const std::shared_ptr<TreeComplex>& cob) {
    if (w->arity() != cob->arity()) throw InputError("compare: the two sides have different arities");
    if (w->cap() != cob->cap())
        throw Refusal("cap mismatch: a W edge cap k corresponds to a cobar-bar vertex cap k + 1 (got W vertex cap " +
                      std::to_string(w->cap()) + ", cobar cap " + std::to_string(cob->cap()) + ")");
    const auto p = b->operad();
    BarCobarComparison res;
    res.truncated = w->truncated() || cob->truncated();
    res.w_ranks = w->ranks();
    res.cobar_ranks = cob->ranks();
    const int N = w->size();
    res.bijection.assign(N, -1);
    auto fail = [&](std::string why) {
        res.status = "fail";
        res.witness = std::move(why);
        return res;
    };

    // (T, E_gamma) -> outer tree of the gamma components, each read as a bar tree.
    const TreeSpace& cspace = cob->space();
    for (int g = 0; g < N; ++g) {
        const LabeledTree& x = w->element(g);
        const int nv = x.vertex_count();
        const RawTree raw = trees::to_raw(x);
        RawTree outer;
        outer.root = 0;
        outer.inputs.assign(nv, {});
        outer.labels.assign(nv, 0);
        outer.marks.assign(nv, chainop::kLengthOne);
        bool ok = true;
        for (int r = 0; r < nv && ok; ++r) {
            if (r > 0 && x.marks[r] == chainop::kGamma) continue;
            RawTree inner;
            inner.root = r;
            inner.inputs.assign(nv, {});
            inner.labels = x.labels;
            inner.marks.assign(nv, chainop::kLengthOne);
            int q = 0;
            auto visit = [&](auto&& self, int v) -> void {
                for (int i : raw.inputs[v]) {
                    if (i >= 0 && x.marks[i] == chainop::kGamma) {
                        inner.inputs[v].push_back(i);
                        self(self, i);
                    } else {
                        inner.inputs[v].push_back(~q++);
                        outer.inputs[r].push_back(i);
                    }
                }
            };
            visit(visit, r);
            const trees::Built bi = trees::build(inner);
            const TreeComplex& B = b->arity(q);
            const auto canon = B.space().normalize(bi.tree, B.space().word(bi.tree));
            const int idx = B.find(canon.tree);
            if (idx < 0) ok = false;
            outer.labels[r] = idx;
        }
        if (!ok) return fail("no bar element for a component of " + w->name(g));
        const trees::Built bo = trees::build(outer);
        const auto canon = cspace.normalize(bo.tree, cspace.word(bo.tree));
        const int h = cob->find(canon.tree);
        if (h < 0) return fail("no cobar-bar element for " + w->name(g));
        if (cob->degree_of(h) != w->degree_of(g)) return fail("degree changes on " + w->name(g));
        res.bijection[g] = h;
    }
    std::vector<int> inverse_map(cob->size(), -1);
    for (int g = 0; g < N; ++g) {
        if (inverse_map[res.bijection[g]] >= 0) return fail("two W elements map to " + cob->name(res.bijection[g]));
        inverse_map[res.bijection[g]] = g;
    }
    if (N != cob->size()) return fail("the cobar-bar side has more basis elements");

    // Relations s_h = rel * s_g from d(g) on both sides.
    struct Edge {
        int g, h, rel;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, int>>> adj(N);
    for (int g = 0; g < N; ++g) {
        const Vec dw = d_column(*w, g);
        Vec dc;
        for (const auto& [t, v] : d_column(*cob, res.bijection[g])) dc[inverse_map[t]] = v;
        std::set<int> keys;
        for (const auto& [h, _] : dw) keys.insert(h);
        for (const auto& [h, _] : dc) keys.insert(h);
        for (int h : keys) {
            const Scalar a = dw.count(h) ? dw.at(h) : Scalar(0);
            const Scalar c = dc.count(h) ? dc.at(h) : Scalar(0);
            // s_h a = s_g c
            if (a == c || a == -c) {
                const int rel = a == c ? 1 : -1;
                edges.push_back({g, h, rel});
                adj[g].push_back({h, rel});
                adj[h].push_back({g, rel});
            } else {
                return fail("entry of d(" + w->name(g) + ") at " + w->name(h) + ": " + chain::scalar_to_string(a) +
                            " on the W side against " + chain::scalar_to_string(c) + " on the cobar-bar side");
            }
        }
    }
    std::vector<int> s(N, 0), comp(N, -1);
    for (int g = 0; g < N; ++g) {
        if (s[g] != 0) continue;
        s[g] = 1;
        comp[g] = res.components;
        std::deque<int> queue{g};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& [v, rel] : adj[u])
                if (s[v] == 0) {
                    s[v] = s[u] * rel;
                    comp[v] = res.components;
                    queue.push_back(v);
                }
        }
        ++res.components;
    }
    for (const Edge& e : edges)
        if (s[e.h] != s[e.g] * e.rel)
            return fail("no consistent rescaling: d(" + w->name(e.g) + ") at " + w->name(e.h) +
                        " contradicts the signs fixed along a spanning tree");

    // Augmentations fix the sign of every component that reaches P.
    const auto gamma = chainop::w_augmentation(p, w);
    const auto f = cobar_bar_counit(b, cob);
    auto column = [](const chain::ChainMap& m, const TreeComplex& c, int g) {
        const chain::SparseMatrix a = m.component(c.degree_of(g));
        return a.cols() == 0 ? std::map<int, Scalar>{} : a.column(c.position_of(g));
    };
    std::vector<int> flip(res.components, 0);
    res.augmentations_agree = true;
    for (int g = 0; g < N; ++g) {
        auto lhs = column(gamma, *w, g);
        auto rhs = column(f, *cob, res.bijection[g]);
        if (lhs.empty() && rhs.empty()) continue;
        if (flip[comp[g]] == 0) {
            std::map<int, Scalar> neg;
            for (const auto& [k, v] : rhs) neg[k] = -v * s[g];
            std::map<int, Scalar> pos;
            for (const auto& [k, v] : rhs) pos[k] = v * s[g];
            flip[comp[g]] = lhs == pos ? 1 : (lhs == neg ? -1 : 2);
        }
        std::map<int, Scalar> scaled;
        const int sign = flip[comp[g]] == 2 ? 1 : flip[comp[g]];
        for (const auto& [k, v] : rhs) scaled[k] = v * s[g] * sign;
        if (flip[comp[g]] == 2 || lhs != scaled) {
            res.augmentations_agree = false;
            if (res.witness.empty()) res.witness = "augmentations differ on " + w->name(g);
        }
    }
    for (int g = 0; g < N; ++g)
        if (flip[comp[g]] == -1) s[g] = -s[g];
    res.rescaling = s;

    res.rescalings_expected = 1L << std::min(res.components, 62);
    if (N <= 20) {
        long count = 0;
        for (long mask = 0; mask < (1L << N); ++mask) {
            bool good = true;
            for (const Edge& e : edges) {
                const int sg = (mask >> e.g) & 1 ? -1 : 1, sh = (mask >> e.h) & 1 ? -1 : 1;
                if (sh != sg * e.rel) {
                    good = false;
                    break;
                }
            }
            count += good;
        }
        res.rescalings_found = count;
    }
    res.status = res.augmentations_agree ? "iso" : "fail";
    return res;
}

ComparisonRun compare_w_barcobar(ChainOperadPtr p, int n, int edge_cap) {
    ComparisonRun run;
    const int cap = edge_cap < 0 ? -1 : edge_cap + 1;
    run.w = chainop::w_pseudo(p, n, edge_cap);
    run.bar = bar(p, n, cap);
    run.cobar = cobar(run.bar, n, cap);
    run.result = compare_w_barcobar(run.w, run.bar, run.cobar);
    return run;
}

}  // namespace opw::barcobar
