#include "opw/trees.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace opw::trees {

PlanarTree::PlanarTree(std::vector<std::vector<int>> in) : in_(std::move(in)) { finish(); }

void PlanarTree::finish() {
    const int n = vertex_count();
    parent_.assign(n, -1);
    pos_.assign(n, -1);
    first_leaf_.assign(n, 0);
    sub_arity_.assign(n, 0);
    sub_size_.assign(n, 1);
    leaves_.clear();
    if (n == 0) {
        arity_ = 1;
        return;
    }
    int expected = 1;
    // Preorder numbering means children are discovered in increasing order.
    auto visit = [&](auto&& self, int v) -> void {
        first_leaf_[v] = static_cast<int>(leaves_.size());
        for (int s = 0; s < valence(v); ++s) {
            const int c = in_[v][s];
            if (c == kLeaf) {
                leaves_.push_back({v, s});
                continue;
            }
            if (c != expected) throw std::logic_error("PlanarTree: inputs are not in preorder");
            ++expected;
            parent_[c] = v;
            pos_[c] = s;
            self(self, c);
            sub_size_[v] += sub_size_[c];
        }
        sub_arity_[v] = static_cast<int>(leaves_.size()) - first_leaf_[v];
    };
    visit(visit, 0);
    if (expected != n) throw std::logic_error("PlanarTree: unreachable vertices");
    arity_ = static_cast<int>(leaves_.size());
}

PlanarTree PlanarTree::corolla(int k) {
    if (k < 0) throw std::invalid_argument("corolla: negative valence");
    return PlanarTree({std::vector<int>(k, kLeaf)});
}

PlanarTree PlanarTree::vertex(const std::vector<PlanarTree>& children) {
    std::vector<std::vector<int>> in(1);
    for (const auto& c : children) {
        if (c.is_unit()) {
            in[0].push_back(kLeaf);
            continue;
        }
        const int offset = static_cast<int>(in.size());
        in[0].push_back(offset);
        for (const auto& row : c.in_) {
            std::vector<int> shifted = row;
            for (int& x : shifted)
                if (x != kLeaf) x += offset;
            in.push_back(std::move(shifted));
        }
    }
    return PlanarTree(std::move(in));
}

PlanarTree::Renumbered PlanarTree::from_inputs(int root, const std::vector<std::vector<int>>& inputs) {
    Renumbered r;
    r.map.assign(inputs.size(), -1);
    if (root == kLeaf) return r;
    std::vector<int> order;
    auto visit = [&](auto&& self, int v) -> void {
        if (r.map[v] != -1) throw std::logic_error("from_inputs: not a tree");
        r.map[v] = static_cast<int>(order.size());
        order.push_back(v);
        for (int c : inputs[v])
            if (c != kLeaf) self(self, c);
    };
    visit(visit, root);
    std::vector<std::vector<int>> in(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        in[i] = inputs[order[i]];
        for (int& c : in[i])
            if (c != kLeaf) c = r.map[c];
    }
    r.tree = PlanarTree(std::move(in));
    return r;
}

PlanarTree PlanarTree::subtree(int v) const {
    std::vector<std::vector<int>> in(in_.begin() + v, in_.begin() + v + sub_size_[v]);
    for (auto& row : in)
        for (int& c : row)
            if (c != kLeaf) c -= v;
    return PlanarTree(std::move(in));
}

std::vector<PlanarTree> PlanarTree::children() const {
    std::vector<PlanarTree> out;
    if (is_unit()) return out;
    for (int c : in_[0]) out.push_back(c == kLeaf ? PlanarTree() : subtree(c));
    return out;
}

void PlanarTree::encode(int v, std::vector<int>& out) const {
    out.push_back(valence(v) + 1);
    for (int c : in_[v]) {
        if (c == kLeaf)
            out.push_back(0);
        else
            encode(c, out);
    }
}

std::vector<int> PlanarTree::encoding() const {
    if (is_unit()) return {0};
    return subtree_encoding(0);
}

std::vector<int> PlanarTree::subtree_encoding(int v) const {
    std::vector<int> out;
    encode(v, out);
    return out;
}

std::string PlanarTree::notation() const {
    if (is_unit()) return "|";
    std::string s;
    auto visit = [&](auto&& self, int v) -> void {
        s += '(';
        for (int i = 0; i < valence(v); ++i) {
            if (i) s += ' ';
            if (in_[v][i] == kLeaf)
                s += '|';
            else
                self(self, in_[v][i]);
        }
        s += ')';
    };
    visit(visit, 0);
    return s;
}

PlanarTree parse_tree(std::string_view text) {
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto parse = [&](auto&& self) -> PlanarTree {
        skip();
        if (i >= text.size()) throw ParseError("unexpected end of tree", i);
        if (text[i] == '|') {
            ++i;
            return PlanarTree();
        }
        if (text[i] != '(') throw ParseError(std::string("unexpected character '") + text[i] + "'", i);
        ++i;
        std::vector<PlanarTree> kids;
        for (;;) {
            skip();
            if (i >= text.size()) throw ParseError("unclosed '('", i);
            if (text[i] == ')') {
                ++i;
                break;
            }
            kids.push_back(self(self));
            if (i < text.size() && text[i] != ')' && !std::isspace(static_cast<unsigned char>(text[i])))
                throw ParseError("expected whitespace or ')'", i);
        }
        return PlanarTree::vertex(kids);
    };
    PlanarTree t = parse(parse);
    skip();
    if (i != text.size()) throw ParseError("trailing input", i);
    return t;
}

namespace {

// Canonical encodings of all subtrees, bottom-up.
std::vector<std::vector<int>> canonical_encodings(const PlanarTree& t) {
    std::vector<std::vector<int>> enc(t.vertex_count());
    for (int v = t.vertex_count() - 1; v >= 0; --v) {
        std::vector<std::vector<int>> kids;
        for (int c : t.inputs(v)) kids.push_back(c == kLeaf ? std::vector<int>{0} : enc[c]);
        std::sort(kids.begin(), kids.end());
        enc[v].push_back(t.valence(v) + 1);
        for (auto& k : kids) enc[v].insert(enc[v].end(), k.begin(), k.end());
    }
    return enc;
}

PlanarTree decode(const std::vector<int>& enc) {
    std::size_t i = 0;
    auto rec = [&](auto&& self) -> PlanarTree {
        const int tok = enc[i++];
        if (tok == 0) return PlanarTree();
        std::vector<PlanarTree> kids;
        for (int j = 0; j < tok - 1; ++j) kids.push_back(self(self));
        return PlanarTree::vertex(kids);
    };
    return rec(rec);
}

const std::vector<int> kLeafCode{0};

struct IsoSearch {
    const PlanarTree& a;
    const PlanarTree& b;
    std::vector<std::vector<int>> ea, eb;

    IsoSearch(const PlanarTree& x, const PlanarTree& y)
        : a(x), b(y), ea(canonical_encodings(x)), eb(canonical_encodings(y)) {}

    const std::vector<int>& code_a(int c) const { return c == kLeaf ? kLeafCode : ea[c]; }
    const std::vector<int>& code_b(int c) const { return c == kLeaf ? kLeafCode : eb[c]; }

    // All class-preserving bijections from inputs of va to inputs of vb.
    std::vector<Perm> slot_matchings(int va, int vb) const {
        std::vector<Perm> out;
        const int k = a.valence(va);
        Perm cur(k, -1);
        std::vector<char> used(k, 0);
        auto rec = [&](auto&& self, int j) -> void {
            if (j == k) {
                out.push_back(cur);
                return;
            }
            for (int s = 0; s < k; ++s) {
                if (used[s] || code_a(a.inputs(va)[j]) != code_b(b.inputs(vb)[s])) continue;
                used[s] = 1;
                cur[j] = s;
                self(self, j + 1);
                used[s] = 0;
            }
        };
        rec(rec, 0);
        return out;
    }

    // Partial maps on the subtree at va, written into full-size arrays.
    void all(int va, int vb, TreeAutomorphism base, std::vector<TreeAutomorphism>& out) const {
        base.vertex_map[va] = vb;
        for (const Perm& m : slot_matchings(va, vb)) {
            std::vector<TreeAutomorphism> partial{base};
            for (int j = 0; j < a.valence(va); ++j) {
                const int ca = a.inputs(va)[j];
                const int cb = b.inputs(vb)[m[j]];
                if (ca == kLeaf) {
                    const int la = a.first_leaf(va) + leaf_offset(a, va, j);
                    const int lb = b.first_leaf(vb) + leaf_offset(b, vb, m[j]);
                    for (auto& p : partial) p.leaf_map[la] = lb;
                    continue;
                }
                std::vector<TreeAutomorphism> next;
                for (auto& p : partial) all(ca, cb, p, next);
                partial = std::move(next);
            }
            out.insert(out.end(), partial.begin(), partial.end());
        }
    }

    void first(int va, int vb, TreeAutomorphism& iso) const {
        iso.vertex_map[va] = vb;
        const Perm m = first_matching(va, vb);
        for (int j = 0; j < a.valence(va); ++j) {
            const int ca = a.inputs(va)[j];
            const int cb = b.inputs(vb)[m[j]];
            if (ca == kLeaf)
                iso.leaf_map[a.first_leaf(va) + leaf_offset(a, va, j)] = b.first_leaf(vb) + leaf_offset(b, vb, m[j]);
            else
                first(ca, cb, iso);
        }
    }

    Perm first_matching(int va, int vb) const {
        const int k = a.valence(va);
        Perm m(k, -1);
        std::vector<char> used(k, 0);
        for (int j = 0; j < k; ++j)
            for (int s = 0; s < k; ++s)
                if (!used[s] && code_a(a.inputs(va)[j]) == code_b(b.inputs(vb)[s])) {
                    used[s] = 1;
                    m[j] = s;
                    break;
                }
        return m;
    }

    // Leaves of v's subtree that precede input slot s.
    static int leaf_offset(const PlanarTree& t, int v, int s) {
        int off = 0;
        for (int j = 0; j < s; ++j) {
            const int c = t.inputs(v)[j];
            off += c == kLeaf ? 1 : t.subtree_arity(c);
        }
        return off;
    }
};

TreeAutomorphism blank(const PlanarTree& t) {
    TreeAutomorphism x;
    x.vertex_map.assign(t.vertex_count(), -1);
    x.leaf_map.assign(t.arity(), -1);
    return x;
}

}  // namespace

PlanarTree canonical(const PlanarTree& t) {
    if (t.is_unit()) return t;
    return decode(canonical_encodings(t)[0]);
}

bool isomorphic(const PlanarTree& a, const PlanarTree& b) {
    return canonical(a).encoding() == canonical(b).encoding();
}

Grafted graft(const PlanarTree& t, int i, const PlanarTree& s) {
    if (i < 1 || i > t.arity()) throw std::out_of_range("graft: input position out of range");
    Grafted g;
    if (t.is_unit()) {
        g.tree = s;
        g.inner_map = identity_perm(s.vertex_count());
        return g;
    }
    if (s.is_unit()) {
        g.tree = t;
        g.outer_map = identity_perm(t.vertex_count());
        return g;
    }
    const int vt = t.vertex_count();
    std::vector<std::vector<int>> in = t.all_inputs();
    for (const auto& row : s.all_inputs()) {
        std::vector<int> shifted = row;
        for (int& c : shifted)
            if (c != kLeaf) c += vt;
        in.push_back(std::move(shifted));
    }
    const auto slot = t.leaf_slots()[i - 1];
    in[slot.vertex][slot.slot] = vt;
    auto r = PlanarTree::from_inputs(0, in);
    g.tree = std::move(r.tree);
    g.outer_map.assign(r.map.begin(), r.map.begin() + vt);
    g.inner_map.assign(r.map.begin() + vt, r.map.end());
    g.new_edge = PlanarTree::edge_of(g.inner_map[0]);
    return g;
}

Quotient contract_edges(const PlanarTree& t, const std::vector<int>& edges) {
    const int n = t.vertex_count();
    std::vector<char> cut(n, 0);
    for (int e : edges) {
        if (e < 0 || e >= t.edge_count()) throw std::out_of_range("contract_edges: not an internal edge");
        cut[PlanarTree::edge_child(e)] = 1;
    }
    std::vector<int> rep(n);
    for (int v = 0; v < n; ++v) rep[v] = cut[v] ? rep[t.parent(v)] : v;
    std::vector<std::vector<int>> in(n);
    auto expand = [&](auto&& self, int v, std::vector<int>& out) -> void {
        for (int c : t.inputs(v)) {
            if (c != kLeaf && cut[c])
                self(self, c, out);
            else
                out.push_back(c);
        }
    };
    for (int v = 0; v < n; ++v)
        if (!cut[v]) expand(expand, v, in[v]);
    auto r = PlanarTree::from_inputs(n ? 0 : kLeaf, in);
    Quotient q;
    q.tree = std::move(r.tree);
    q.vertex_map.resize(n);
    for (int v = 0; v < n; ++v) q.vertex_map[v] = r.map[rep[v]];
    for (int e = 0; e < t.edge_count(); ++e) {
        const int c = PlanarTree::edge_child(e);
        q.edge_map.push_back(cut[c] ? -1 : PlanarTree::edge_of(r.map[c]));
    }
    return q;
}

Quotient remove_unary(const PlanarTree& t, const std::vector<int>& vertices) {
    const int n = t.vertex_count();
    std::vector<char> gone(n, 0);
    for (int v : vertices) {
        if (v < 0 || v >= n) throw std::out_of_range("remove_unary: no such vertex");
        if (t.valence(v) != 1) throw std::invalid_argument("remove_unary: vertex is not unary");
        gone[v] = 1;
    }
    auto resolve = [&](auto&& self, int c) -> int {
        if (c == kLeaf || !gone[c]) return c;
        return self(self, t.inputs(c)[0]);
    };
    std::vector<std::vector<int>> in(n);
    for (int v = 0; v < n; ++v) {
        if (gone[v]) continue;
        for (int c : t.inputs(v)) in[v].push_back(resolve(resolve, c));
    }
    const int root = n ? resolve(resolve, 0) : kLeaf;
    auto r = PlanarTree::from_inputs(root, in);
    Quotient q;
    q.tree = std::move(r.tree);
    q.vertex_map = r.map;
    for (int e = 0; e < t.edge_count(); ++e) {
        const int c = r.map[PlanarTree::edge_child(e)];
        q.edge_map.push_back(c > 0 ? PlanarTree::edge_of(c) : -1);
    }
    return q;
}

std::vector<PlanarTree> enumerate_planar(int n, int max_edges, int min_valence) {
    if (n < 0 || min_valence < 0) throw std::invalid_argument("enumerate_planar: negative parameter");
    if (max_edges < 0) {
        if (min_valence < 2) throw std::invalid_argument("enumerate_planar: unbounded enumeration with valence < 2 is infinite");
        max_edges = std::max(n - 2, 0);
    }
    // trees[a][e]: trees of arity a with exactly e edges (vertex trees only).
    std::map<std::pair<int, int>, std::vector<PlanarTree>> memo;
    auto exact = [&](auto&& self, int a, int e) -> const std::vector<PlanarTree>& {
        auto key = std::make_pair(a, e);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::vector<PlanarTree> out;
        // Children: each is a leaf (arity 1, cost 0) or a vertex tree with
        // arity b and e' edges (cost e'+1).
        std::vector<PlanarTree> kids;
        auto fill = [&](auto&& rec, int arity_left, int edges_left) -> void {
            if (arity_left == 0 && edges_left == 0 && static_cast<int>(kids.size()) >= min_valence)
                out.push_back(PlanarTree::vertex(kids));
            if (arity_left >= 1) {
                kids.push_back(PlanarTree());
                rec(rec, arity_left - 1, edges_left);
                kids.pop_back();
            }
            for (int cost = 1; cost <= edges_left; ++cost)
                for (int b = 0; b <= arity_left; ++b)
                    for (const auto& sub : self(self, b, cost - 1)) {
                        kids.push_back(sub);
                        rec(rec, arity_left - b, edges_left - cost);
                        kids.pop_back();
                    }
        };
        fill(fill, a, e);
        return memo[key] = std::move(out);
    };
    std::vector<PlanarTree> all;
    if (n == 1) all.push_back(PlanarTree());
    for (int e = 0; e <= max_edges; ++e) {
        auto batch = exact(exact, n, e);
        std::sort(batch.begin(), batch.end());
        all.insert(all.end(), batch.begin(), batch.end());
    }
    return all;
}

std::vector<TreeAutomorphism> isomorphisms(const PlanarTree& a, const PlanarTree& b) {
    if (a.is_unit() || b.is_unit()) {
        if (a.is_unit() && b.is_unit()) return {TreeAutomorphism{{}, {0}}};
        return {};
    }
    if (!isomorphic(a, b)) return {};
    IsoSearch s(a, b);
    std::vector<TreeAutomorphism> out;
    s.all(0, 0, blank(a), out);
    return out;
}

std::vector<TreeAutomorphism> automorphisms(const PlanarTree& t) { return isomorphisms(t, t); }

AutGroup aut_group(const PlanarTree& t) {
    AutGroup g;
    if (t.is_unit()) return g;
    IsoSearch s(t, t);
    for (int v = 0; v < t.vertex_count(); ++v) {
        std::map<std::vector<int>, std::vector<int>> blocks;
        for (int j = 0; j < t.valence(v); ++j) blocks[s.code_a(t.inputs(v)[j])].push_back(j);
        for (const auto& [code, slots] : blocks) {
            g.order *= factorial(static_cast<int>(slots.size()));
            for (std::size_t k = 0; k + 1 < slots.size(); ++k) {
                const int s1 = slots[k], s2 = slots[k + 1];
                AutGenerator gen;
                gen.vertex = v;
                gen.block = identity_perm(t.valence(v));
                std::swap(gen.block[s1], gen.block[s2]);
                gen.action.vertex_map = identity_perm(t.vertex_count());
                gen.action.leaf_map = identity_perm(t.arity());
                const int c1 = t.inputs(v)[s1], c2 = t.inputs(v)[s2];
                if (c1 == kLeaf) {
                    const int l1 = t.first_leaf(v) + IsoSearch::leaf_offset(t, v, s1);
                    const int l2 = t.first_leaf(v) + IsoSearch::leaf_offset(t, v, s2);
                    std::swap(gen.action.leaf_map[l1], gen.action.leaf_map[l2]);
                } else {
                    TreeAutomorphism fwd = blank(t), back = blank(t);
                    s.first(c1, c2, fwd);
                    s.first(c2, c1, back);
                    for (int x = 0; x < t.vertex_count(); ++x) {
                        if (fwd.vertex_map[x] >= 0) gen.action.vertex_map[x] = fwd.vertex_map[x];
                        if (back.vertex_map[x] >= 0) gen.action.vertex_map[x] = back.vertex_map[x];
                    }
                    for (int l = 0; l < t.arity(); ++l) {
                        if (fwd.leaf_map[l] >= 0) gen.action.leaf_map[l] = fwd.leaf_map[l];
                        if (back.leaf_map[l] >= 0) gen.action.leaf_map[l] = back.leaf_map[l];
                    }
                }
                g.generators.push_back(std::move(gen));
            }
        }
    }
    return g;
}

std::vector<TreeClass> iso_classes(int n, int max_edges, int min_valence) {
    std::map<std::pair<int, std::vector<int>>, TreeClass> classes;
    for (const auto& t : enumerate_planar(n, max_edges, min_valence)) {
        PlanarTree c = canonical(t);
        auto& cls = classes[{c.edge_count(), c.encoding()}];
        if (cls.planar_count == 0) {
            auto aut = aut_group(c);
            cls.representative = c;
            cls.aut_order = aut.order;
            cls.aut_generators = std::move(aut.generators);
        }
        ++cls.planar_count;
    }
    std::vector<TreeClass> out;
    for (auto& [key, cls] : classes) out.push_back(std::move(cls));
    return out;
}

}  // namespace opw::trees
