#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opw/perm.hpp"
#include "opw/trees.hpp"

namespace opw::trees {

// A planar tree whose vertices carry labels, whose internal edges carry marks
// and whose leaves carry numbers 0..n-1. The mark of a non-root vertex
// decorates the edge below it; marks[0] is unused.
//
// Read symmetrically, a tree with leaf numbering L stands for its planar
// composite acted on by L^{-1}; the Sigma_n action x.s replaces L by s^{-1}L.
struct LabeledTree {
    PlanarTree shape;
    std::vector<int> labels;
    std::vector<int> marks;
    std::vector<int> leaves;

    static LabeledTree unit();
    static LabeledTree corolla(int k, int label);

    int arity() const { return shape.arity(); }
    int vertex_count() const { return shape.vertex_count(); }
    int edge_count() const { return shape.edge_count(); }

    // Prefix-free encoding of shape and all decorations.
    std::vector<std::int64_t> encoding() const;

    friend bool operator==(const LabeledTree& a, const LabeledTree& b) {
        return a.shape == b.shape && a.labels == b.labels && a.marks == b.marks && a.leaves == b.leaves;
    }
    friend bool operator!=(const LabeledTree& a, const LabeledTree& b) { return !(a == b); }
    friend bool operator<(const LabeledTree& a, const LabeledTree& b) { return a.encoding() < b.encoding(); }
};

// Loose form for building trees: vertices have arbitrary ids, an input is a
// child id (>= 0) or ~j for the leaf numbered j. A unit tree has root ~j.
struct RawTree {
    int root = ~0;
    std::vector<std::vector<int>> inputs;
    std::vector<int> labels;
    std::vector<int> marks;
};

struct Built {
    LabeledTree tree;
    std::vector<int> map;  // raw id -> vertex, -1 if unreachable
};

Built build(const RawTree& raw);
RawTree to_raw(const LabeledTree& x);

// Label of x.tau at a vertex whose inputs are reordered so that new input j is
// old input tau[j], together with the sign this costs (+1 at set level).
struct Twist {
    int label;
    int sign;
};
using LabelAction = std::function<Twist(int valence, int label, const Perm& tau)>;

struct Canonical {
    LabeledTree tree;
    std::vector<int> vertex_map;  // old vertex -> canonical vertex
    int sign = 1;
    // Two reorderings reach the minimum with opposite signs (the element is
    // its own negative).
    bool sign_conflict = false;
};

// Encoding-minimal representative under reordering the inputs of every vertex
// (with labels twisted by `act`; an empty action leaves labels alone).
Canonical canonicalize(const LabeledTree& x, const LabelAction& act);

struct GraftResult {
    LabeledTree tree;
    std::vector<int> outer_map;  // vertex of x -> vertex of result
    std::vector<int> inner_map;  // vertex of y -> vertex of result
};
// x o_i y: graft y onto the leaf of x numbered i (0-based); the new edge gets
// `new_mark`. Leaf numbers follow the usual substitution of variables.
GraftResult graft(const LabeledTree& x, int i, const LabeledTree& y, int new_mark);

struct Substituted {
    LabeledTree tree;
    // For each vertex of the result: the outer vertex and the inner vertex it came from.
    std::vector<std::pair<int, int>> origin;
};
// Replaces each vertex v of `outer` by the tree inner[v]: input j of v (in
// planar order) feeds the leaf of inner[v] numbered j, and the root of
// inner[v] takes over the mark of v. A unit inner tree removes v.
Substituted substitute(const LabeledTree& outer, const std::vector<LabeledTree>& inner);

// x.s for s in Sigma_n.
LabeledTree act_on_leaves(const LabeledTree& x, const Perm& s);

// Text form: a vertex prints as label(inputs), a leaf as its 1-based number,
// and a child edge with a non-empty mark name as {mark}child.
std::string to_string(const LabeledTree& x, const std::function<std::string(int vertex)>& label_name,
                      const std::function<std::string(int vertex)>& mark_name);

}  // namespace opw::trees
