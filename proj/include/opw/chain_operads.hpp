#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "opw/chain.hpp"
#include "opw/labeled_tree.hpp"
#include "opw/perm.hpp"

namespace opw::chainop {

using chain::Ring;
using chain::Scalar;
using trees::LabeledTree;

// Sparse linear combination of basis indices.
using Vec = std::map<int, Scalar>;

// Graded bases per arity with a signed right action of the symmetric groups
// (each permutation sends a basis element to plus or minus a basis element).
class GradedLabels {
  public:
    virtual ~GradedLabels() = default;
    virtual std::string name() const = 0;
    virtual bool symmetric() const = 0;
    virtual int max_arity() const = 0;
    virtual int size(int n) const = 0;
    virtual std::string element_name(int n, int a) const = 0;
    virtual int degree(int n, int a) const = 0;
    virtual trees::Twist act(int /*n*/, int a, const Perm& /*s*/) const { return {a, 1}; }
    // Vertex count an element stands for when used as a tree label.
    virtual int weight(int /*n*/, int /*a*/) const { return 1; }
};

// A pseudo-operad of chain complexes: no unit, P(0) = 0, given on bases.
class PseudoChainOperad : public GradedLabels {
  public:
    virtual Ring ring() const = 0;
    virtual Vec differential(int /*n*/, int /*a*/) const { return {}; }
    // a o_i b, 0 <= i < n.
    virtual Vec compose(int n, int a, int i, int m, int b) const = 0;
};

using ChainOperadPtr = std::shared_ptr<const PseudoChainOperad>;

// Non-symmetric associative: one generator of degree 0 in each arity >= 2.
ChainOperadPtr make_as_ns(Ring ring = Ring::integers(), int max_arity = 8);
// Symmetric associative: the regular representation of Sigma_n in each arity >= 2.
ChainOperadPtr make_ass_sym(Ring ring = Ring::integers(), int max_arity = 8);
// Commutative: one generator with trivial action in each arity >= 2.
ChainOperadPtr make_com_chain(Ring ring = Ring::integers(), int max_arity = 8);
ChainOperadPtr builtin_chain_operad(const std::string& name, Ring ring = Ring::integers());
// See README for the layout; the axioms are checked up to the largest arity given.
ChainOperadPtr chain_operad_from_json(const nlohmann::json& j);

std::vector<std::string> validate_chain_operad(const PseudoChainOperad& p, int arity_bound);

// P(n) as a complex: the pseudo part, plus the unit summand in arity 1 when
// `reduced` (and R in arity 0).
chain::ChainComplex operad_complex(const PseudoChainOperad& p, int n, bool reduced);

// Trees labeled by a GradedLabels with marked internal edges, read as tensor
// words. The word of a tree lists the edges whose mark has odd degree (in
// edge order) followed by the vertex labels; labels are listed component by
// component when `component_mark` >= 0 (components are joined by edges with
// that mark, ordered by the preorder index of their roots) and in preorder
// otherwise. Keys: vertex v -> v, edge above v -> ~v.
class TreeSpace {
  public:
    TreeSpace(std::shared_ptr<const GradedLabels> labels, int label_shift, std::vector<int> marks,
              std::vector<int> mark_degree, int component_mark);

    const GradedLabels& labels() const { return *labels_; }
    const std::vector<int>& marks() const { return marks_; }
    int label_degree(const LabeledTree& x, int v) const;
    int degree(const LabeledTree& x) const;
    std::vector<Factor> word(const LabeledTree& x) const;

    struct Signed {
        LabeledTree tree;
        int sign;  // 0 if the element is its own negative
    };
    // Canonical representative of y, whose factors stand in the order `raw`.
    Signed normalize(const LabeledTree& y, const std::vector<Factor>& raw) const;
    // Canonical trees of arity n, the unit tree excluded, with at most `max_vertex_weight` total label
    // weight (-1: no bound, refused if infinite).
    std::vector<LabeledTree> enumerate(int n, int max_vertex_weight) const;
    bool finite() const;
    trees::LabelAction action() const;

  private:
    std::shared_ptr<const GradedLabels> labels_;
    int shift_;
    std::vector<int> marks_;
    std::vector<int> mark_degree_;
    int component_mark_;
};

// A term of a differential before normalization.
struct RawTerm {
    LabeledTree tree;
    std::vector<Factor> word;
    Scalar coef;
};

// Basis of tree elements in one arity, ordered by degree, with its complex.
class TreeComplex {
  public:
    using Column = std::function<std::vector<RawTerm>(const LabeledTree&)>;
    TreeComplex(std::shared_ptr<const TreeSpace> space, Ring ring, int arity, std::vector<LabeledTree> elements,
                bool truncated, const std::function<std::string(const LabeledTree&)>& name, int cap = -1);
    // Fills the differential from raw terms; columns are computed in parallel
    // unless `parallel` is false.
    void assemble(const Column& column, bool parallel = true);

    const TreeSpace& space() const { return *space_; }
    std::shared_ptr<const TreeSpace> space_ptr() const { return space_; }
    int arity() const { return arity_; }
    bool truncated() const { return truncated_; }
    // Weight cap the basis was enumerated with (-1: none).
    int cap() const { return cap_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const LabeledTree& element(int g) const { return elements_[g]; }
    int degree_of(int g) const { return degree_[g]; }
    int position_of(int g) const { return position_[g]; }
    int global(int degree, int position) const { return by_degree_.at(degree)[position]; }
    int find(const LabeledTree& canonical) const;
    std::string name(int g) const { return names_[g]; }
    // Normalizes raw terms and collects them on this basis.
    Vec collect(const std::vector<RawTerm>& terms) const;
    chain::ComplexPtr complex() const { return complex_; }
    std::vector<int> ranks() const;  // ranks in degrees min..max
    int min_degree() const;

  private:
    std::shared_ptr<const TreeSpace> space_;
    Ring ring_;
    int arity_;
    bool truncated_;
    int cap_;
    std::vector<LabeledTree> elements_;
    std::vector<int> degree_, position_;
    std::vector<std::string> names_;
    std::map<int, std::vector<int>> by_degree_;
    std::map<std::vector<std::int64_t>, int> index_;
    chain::ComplexPtr complex_;
};

// Edge marks of the chain interval N(Delta^1) as used in trees.
inline constexpr int kLengthOne = 1;  // gamma_1
inline constexpr int kGamma = 2;      // gamma, degree 1

// The chain interval N(Delta^1) with its join and counit.
struct ChainInterval {
    std::vector<std::string> names{"g0", "g1", "g"};
    std::vector<int> degrees{0, 0, 1};
    chain::ChainComplex complex() const;
    // Join of basis elements, -1 for zero.
    int join(int a, int b) const;
    int counit(int a) const { return a == 2 ? 0 : 1; }
};
ChainInterval chain_interval();

// Composite of the labels of a tree with no marks of odd degree, read with
// the word `word` and acted on by the inverse leaf numbering.
Vec evaluate(const PseudoChainOperad& p, const LabeledTree& x, const std::vector<Factor>& word);

std::shared_ptr<const TreeSpace> w_space(ChainOperadPtr p);
std::shared_ptr<const TreeSpace> free_space(ChainOperadPtr p);

// W^ps(N(Delta^1), P)(n) spanned by trees with at most `edge_cap` internal
// edges (-1: all, refused if infinite).
std::shared_ptr<TreeComplex> w_pseudo(ChainOperadPtr p, int n, int edge_cap = -1, bool parallel = true);
// The free pseudo-operad complex on P (trees with length-one edges only).
std::shared_ptr<TreeComplex> free_pseudo(ChainOperadPtr p, int n, int edge_cap = -1, bool parallel = true);
// R (+) W^ps in arities 0 and 1, W^ps otherwise.
chain::ChainComplex w_reduced(ChainOperadPtr p, int n, int edge_cap = -1);

// gamma: W^ps(n) -> P(n).
chain::ChainMap w_augmentation(ChainOperadPtr p, const std::shared_ptr<TreeComplex>& w);
// delta: free(n) -> W^ps(n).
chain::ChainMap delta_embedding(const std::shared_ptr<TreeComplex>& free, const std::shared_ptr<TreeComplex>& w);
// Counit free(n) -> P(n).
chain::ChainMap free_counit(ChainOperadPtr p, const std::shared_ptr<TreeComplex>& free);
// x o_i y by grafting (in W^ps and in cobar constructions), on basis indices
// of the factors; the new edge gets the mark kLengthOne.
Vec tree_compose(const TreeComplex& wx, int x, int i, const TreeComplex& wy, int y, const TreeComplex& target);

void accumulate(Vec& v, int key, const Scalar& c);

// Terms of contracting the edge above vertex c of x and composing the two
// labels in p: the child factor is moved next to its parent in `word` (which
// holds no factor for that edge) and the merged label gets degree + `shift`.
std::vector<RawTerm> contraction_terms(const PseudoChainOperad& p, const LabeledTree& x,
                                       const std::vector<Factor>& word, int c, int shift);

nlohmann::json w_element_json(const TreeComplex& w, int g);

}  // namespace opw::chainop
