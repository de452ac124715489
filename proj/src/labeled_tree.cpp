#include "opw/labeled_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace opw::trees {

LabeledTree LabeledTree::unit() {
    LabeledTree x;
    x.leaves = {0};
    return x;
}

LabeledTree LabeledTree::corolla(int k, int label) {
    LabeledTree x;
    x.shape = PlanarTree::corolla(k);
    x.labels = {label};
    x.marks = {0};
    x.leaves = identity_perm(k);
    return x;
}

std::vector<std::int64_t> LabeledTree::encoding() const {
    std::vector<std::int64_t> out;
    if (shape.is_unit()) return {0, leaves[0]};
    int leaf = 0;
    auto rec = [&](auto&& self, int v) -> void {
        out.push_back(shape.valence(v) + 1);
        out.push_back(labels[v]);
        for (int c : shape.inputs(v)) {
            if (c == kLeaf) {
                out.push_back(0);
                out.push_back(leaves[leaf++]);
            } else {
                out.push_back(1);
                out.push_back(marks[c]);
                self(self, c);
            }
        }
    };
    out.push_back(1);
    rec(rec, 0);
    return out;
}

Built build(const RawTree& raw) {
    Built b;
    const int n = static_cast<int>(raw.inputs.size());
    b.map.assign(n, -1);
    if (raw.root < 0) {
        b.tree = LabeledTree::unit();
        b.tree.leaves = {~raw.root};
        return b;
    }
    std::vector<int> order;
    std::vector<int> leaves;
    auto visit = [&](auto&& self, int v) -> void {
        if (b.map[v] != -1) throw std::logic_error("build: not a tree");
        b.map[v] = static_cast<int>(order.size());
        order.push_back(v);
        for (int c : raw.inputs[v]) {
            if (c < 0)
                leaves.push_back(~c);
            else
                self(self, c);
        }
    };
    visit(visit, raw.root);
    std::vector<std::vector<int>> in(order.size());
    b.tree.labels.resize(order.size());
    b.tree.marks.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int v = order[i];
        for (int c : raw.inputs[v]) in[i].push_back(c < 0 ? kLeaf : b.map[c]);
        b.tree.labels[i] = raw.labels[v];
        b.tree.marks[i] = i == 0 ? 0 : raw.marks[v];
    }
    b.tree.shape = PlanarTree::from_inputs(0, in).tree;
    b.tree.leaves = std::move(leaves);
    return b;
}

RawTree to_raw(const LabeledTree& x) {
    RawTree r;
    if (x.shape.is_unit()) {
        r.root = ~x.leaves[0];
        return r;
    }
    r.root = 0;
    r.inputs = x.shape.all_inputs();
    int leaf = 0;
    // Leaves are numbered in planar order, which is the order of a preorder walk.
    auto walk = [&](auto&& self, int v) -> void {
        for (int& c : r.inputs[v]) {
            if (c == kLeaf)
                c = ~x.leaves[leaf++];
            else
                self(self, c);
        }
    };
    walk(walk, 0);
    r.labels = x.labels;
    r.marks = x.marks;
    return r;
}

Canonical canonicalize(const LabeledTree& x, const LabelAction& act) {
    Canonical res;
    if (x.shape.is_unit()) {
        res.tree = x;
        return res;
    }
    const PlanarTree& t = x.shape;
    const int n = t.vertex_count();
    RawTree raw = to_raw(x);
    std::vector<std::vector<std::int64_t>> enc(n);
    for (int v = n - 1; v >= 0; --v) {
        const auto& ins = raw.inputs[v];
        const int k = static_cast<int>(ins.size());
        std::vector<std::vector<std::int64_t>> child(k);
        for (int j = 0; j < k; ++j) {
            if (ins[j] < 0) {
                child[j] = {0, ~ins[j]};
            } else {
                child[j] = {1, x.marks[ins[j]]};
                child[j].insert(child[j].end(), enc[ins[j]].begin(), enc[ins[j]].end());
            }
        }
        Perm best;
        std::vector<std::int64_t> best_key;
        int best_label = x.labels[v], best_sign = 1;
        if (!act) {
            best = identity_perm(k);
            std::stable_sort(best.begin(), best.end(), [&](int a, int b) { return child[a] < child[b]; });
            best_key.push_back(x.labels[v]);
        } else {
            for (const Perm& tau : all_perms(k)) {
                const Twist tw = act(k, x.labels[v], tau);
                std::vector<std::int64_t> key{tw.label};
                for (int j = 0; j < k; ++j) key.insert(key.end(), child[tau[j]].begin(), child[tau[j]].end());
                if (best.empty() || key < best_key) {
                    best = tau;
                    best_key = std::move(key);
                    best_label = tw.label;
                    best_sign = tw.sign;
                } else if (key == best_key && tw.sign != best_sign) {
                    res.sign_conflict = true;
                }
            }
            best_key.resize(1);
        }
        std::vector<int> reordered(k);
        for (int j = 0; j < k; ++j) reordered[j] = ins[best[j]];
        raw.inputs[v] = std::move(reordered);
        raw.labels[v] = best_label;
        res.sign *= best_sign;
        enc[v] = {k + 1, best_key[0]};
        for (int j = 0; j < k; ++j) enc[v].insert(enc[v].end(), child[best[j]].begin(), child[best[j]].end());
    }
    Built b = build(raw);
    res.tree = std::move(b.tree);
    res.vertex_map = std::move(b.map);
    return res;
}

GraftResult graft(const LabeledTree& x, int i, const LabeledTree& y, int new_mark) {
    const int n = x.arity(), m = y.arity();
    if (i < 0 || i >= n) throw std::out_of_range("graft: no leaf with that number");
    RawTree rx = to_raw(x), ry = to_raw(y);
    const int vx = x.vertex_count();
    auto shift_y = [&](int c) { return c < 0 ? ~(~c + i) : c + vx; };
    auto shift_x = [&](int c) {
        if (c >= 0) return c;
        const int j = ~c;
        return j < i ? c : ~(j + m - 1);
    };
    RawTree r;
    r.inputs = rx.inputs;
    r.labels = rx.labels;
    r.marks = rx.marks;
    const int y_root = shift_y(ry.root);
    for (auto& row : r.inputs)
        for (int& c : row) c = c == ~i ? y_root : shift_x(c);
    for (std::size_t v = 0; v < ry.inputs.size(); ++v) {
        std::vector<int> row;
        for (int c : ry.inputs[v]) row.push_back(shift_y(c));
        r.inputs.push_back(std::move(row));
        r.labels.push_back(ry.labels[v]);
        r.marks.push_back(v == 0 ? new_mark : ry.marks[v]);
    }
    r.root = rx.root == ~i ? y_root : shift_x(rx.root);
    Built b = build(r);
    GraftResult g;
    g.tree = std::move(b.tree);
    g.outer_map.assign(b.map.begin(), b.map.begin() + vx);
    g.inner_map.assign(b.map.begin() + vx, b.map.end());
    return g;
}

LabeledTree act_on_leaves(const LabeledTree& x, const Perm& s) {
    LabeledTree y = x;
    const Perm inv = inverse(s);
    for (int& l : y.leaves) l = inv[l];
    return y;
}

std::string to_string(const LabeledTree& x, const std::function<std::string(int vertex)>& label_name,
                      const std::function<std::string(int vertex)>& mark_name) {
    if (x.shape.is_unit()) return std::to_string(x.leaves[0] + 1);
    std::string s;
    int leaf = 0;
    auto rec = [&](auto&& self, int v) -> void {
        s += label_name(v);
        s += '(';
        const auto& ins = x.shape.inputs(v);
        for (std::size_t j = 0; j < ins.size(); ++j) {
            if (j) s += ' ';
            if (ins[j] == kLeaf) {
                s += std::to_string(x.leaves[leaf++] + 1);
            } else {
                const std::string mk = mark_name(ins[j]);
                if (!mk.empty()) s += '{' + mk + '}';
                self(self, ins[j]);
            }
        }
        s += ')';
    };
    rec(rec, 0);
    return s;
}

Substituted substitute(const LabeledTree& outer, const std::vector<LabeledTree>& inner) {
    const int n = outer.vertex_count();
    if (static_cast<int>(inner.size()) != n) throw std::invalid_argument("substitute: one inner tree per vertex");
    if (n == 0) return {outer, {}};
    RawTree ro = to_raw(outer);
    std::vector<int> offset(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        if (inner[v].arity() != outer.shape.valence(v))
            throw std::invalid_argument("substitute: inner arity differs from vertex valence");
        offset[v + 1] = offset[v] + inner[v].vertex_count();
    }
    // Raw id standing for outer input content c (a vertex or ~leaf).
    auto resolve = [&](auto&& self, int c) -> int {
        if (c < 0) return c;
        if (inner[c].shape.is_unit()) return self(self, ro.inputs[c][0]);
        return offset[c];
    };
    RawTree r;
    r.inputs.resize(offset[n]);
    r.labels.resize(offset[n]);
    r.marks.resize(offset[n]);
    std::vector<std::pair<int, int>> origin_raw(offset[n]);
    for (int v = 0; v < n; ++v) {
        if (inner[v].shape.is_unit()) continue;
        RawTree ri = to_raw(inner[v]);
        for (int w = 0; w < inner[v].vertex_count(); ++w) {
            const int id = offset[v] + w;
            for (int c : ri.inputs[w])
                r.inputs[id].push_back(c < 0 ? resolve(resolve, ro.inputs[v][~c]) : offset[v] + c);
            r.labels[id] = ri.labels[w];
            r.marks[id] = w == 0 ? outer.marks[v] : ri.marks[w];
            origin_raw[id] = {v, w};
        }
    }
    r.root = resolve(resolve, 0);
    Built b = build(r);
    Substituted out;
    out.tree = std::move(b.tree);
    out.origin.resize(out.tree.vertex_count());
    for (int id = 0; id < offset[n]; ++id)
        if (b.map[id] >= 0) out.origin[b.map[id]] = origin_raw[id];
    return out;
}

}  // namespace opw::trees
