#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opw/perm.hpp"

namespace opw::trees {

inline constexpr int kLeaf = -1;

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

// Rooted planar tree stored flat in preorder: vertex 0 is the root and every
// vertex has an ordered list of inputs, each either kLeaf or a child vertex.
// The unit tree has no vertices and arity 1.
//
// Internal edges are indexed by their upper vertex: edge e joins vertex e+1 to
// its parent. Since vertices are numbered in preorder this is the depth-first
// discovery order of edges.
class PlanarTree {
  public:
    PlanarTree() { finish(); }

    static PlanarTree unit() { return PlanarTree(); }
    static PlanarTree corolla(int k);
    // t_k(T_1, ..., T_k)
    static PlanarTree vertex(const std::vector<PlanarTree>& children);

    struct Renumbered;
    // Builds a tree from inputs indexed by arbitrary ids; unreachable ids are
    // dropped. root == kLeaf gives the unit tree.
    static Renumbered from_inputs(int root, const std::vector<std::vector<int>>& inputs);

    bool is_unit() const { return in_.empty(); }
    int arity() const { return arity_; }
    int vertex_count() const { return static_cast<int>(in_.size()); }
    int edge_count() const { return vertex_count() > 0 ? vertex_count() - 1 : 0; }
    int valence(int v) const { return static_cast<int>(in_[v].size()); }
    const std::vector<int>& inputs(int v) const { return in_[v]; }
    const std::vector<std::vector<int>>& all_inputs() const { return in_; }
    int parent(int v) const { return parent_[v]; }
    int input_position(int v) const { return pos_[v]; }
    static int edge_child(int e) { return e + 1; }
    static int edge_of(int v) { return v - 1; }

    // For each planar leaf position: the owning vertex and input slot.
    struct LeafSlot {
        int vertex;
        int slot;
    };
    const std::vector<LeafSlot>& leaf_slots() const { return leaves_; }
    // Planar index of the first leaf in the subtree at v and the subtree arity.
    int first_leaf(int v) const { return first_leaf_[v]; }
    int subtree_arity(int v) const { return sub_arity_[v]; }
    // Number of vertices in the subtree at v (a contiguous preorder block).
    int subtree_size(int v) const { return sub_size_[v]; }

    PlanarTree subtree(int v) const;
    std::vector<PlanarTree> children() const;

    // Prefix-free integer encoding: leaf -> 0, vertex with k inputs -> k+1
    // followed by the encodings of its inputs.
    std::vector<int> encoding() const;
    std::vector<int> subtree_encoding(int v) const;
    std::string notation() const;

    friend bool operator==(const PlanarTree& a, const PlanarTree& b) { return a.in_ == b.in_; }
    friend bool operator!=(const PlanarTree& a, const PlanarTree& b) { return !(a == b); }
    friend bool operator<(const PlanarTree& a, const PlanarTree& b) { return a.encoding() < b.encoding(); }

  private:
    explicit PlanarTree(std::vector<std::vector<int>> in);
    void finish();
    void encode(int v, std::vector<int>& out) const;

    std::vector<std::vector<int>> in_;
    std::vector<int> parent_, pos_, first_leaf_, sub_arity_, sub_size_;
    std::vector<LeafSlot> leaves_;
    int arity_ = 1;
};

struct PlanarTree::Renumbered {
    PlanarTree tree;
    std::vector<int> map;  // old id -> new vertex, or -1
};

PlanarTree parse_tree(std::string_view text);

// Minimal planar representative of the non-planar isomorphism class.
PlanarTree canonical(const PlanarTree& t);
bool isomorphic(const PlanarTree& a, const PlanarTree& b);

struct Grafted {
    PlanarTree tree;
    std::vector<int> outer_map;  // vertex of T -> vertex of result
    std::vector<int> inner_map;  // vertex of S -> vertex of result
    int new_edge = -1;           // edge created by the grafting, if both trees have vertices
};
// Graft S onto input i (1-based, planar) of T.
Grafted graft(const PlanarTree& t, int i, const PlanarTree& s);

struct Quotient {
    PlanarTree tree;
    std::vector<int> vertex_map;  // vertex of T -> vertex of quotient (-1 if deleted)
    std::vector<int> edge_map;    // edge of T -> edge of quotient (-1 if contracted or joined)
};
Quotient contract_edges(const PlanarTree& t, const std::vector<int>& edges);
Quotient remove_unary(const PlanarTree& t, const std::vector<int>& vertices);

// max_edges < 0 means unbounded; this is refused (std::invalid_argument) when
// the resulting set would be infinite, i.e. min_valence < 2.
std::vector<PlanarTree> enumerate_planar(int n, int max_edges, int min_valence);

struct TreeAutomorphism {
    std::vector<int> vertex_map;  // vertex -> vertex
    Perm leaf_map;                // planar leaf -> planar leaf
};

// Swapping two adjacent members of a block of isomorphic inputs at `vertex`;
// `block` is the induced permutation of that vertex's input slots and `action`
// the full induced automorphism. Inner automorphisms are the generators
// located at deeper vertices.
struct AutGenerator {
    int vertex;
    Perm block;
    TreeAutomorphism action;
};

struct AutGroup {
    std::int64_t order = 1;
    std::vector<AutGenerator> generators;
};

AutGroup aut_group(const PlanarTree& t);
// Every isomorphism a -> b (as non-planar trees), enumerated recursively.
std::vector<TreeAutomorphism> isomorphisms(const PlanarTree& a, const PlanarTree& b);
std::vector<TreeAutomorphism> automorphisms(const PlanarTree& t);

struct TreeClass {
    PlanarTree representative;
    std::int64_t aut_order = 1;
    std::vector<AutGenerator> aut_generators;
    int planar_count = 0;  // planar trees in the class
};
std::vector<TreeClass> iso_classes(int n, int max_edges, int min_valence);

}  // namespace opw::trees
