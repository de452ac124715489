#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "opw/labeled_tree.hpp"
#include "opw/perm.hpp"
#include "opw/segments.hpp"

namespace opw::setop {

using trees::LabeledTree;

// Finite sets K(n) with right Sigma_n actions and a base point in K(1).
// Elements are indices 0..size(n)-1.
class PointedCollection {
  public:
    virtual ~PointedCollection() = default;
    virtual std::string name() const = 0;
    virtual bool symmetric() const { return true; }
    // Largest arity the tables cover.
    virtual int max_arity() const = 0;
    virtual int size(int n) const = 0;
    virtual std::string element_name(int n, int a) const = 0;
    virtual int base() const = 0;
    virtual int act(int n, int a, const Perm& s) const = 0;
    // Number of vertices an element stands for when used as a tree label.
    virtual int weight(int /*n*/, int /*a*/) const { return 1; }
};

class SetOperad : public PointedCollection {
  public:
    int base() const override { return unit(); }
    virtual int unit() const = 0;
    // a o_i b with a in P(n), b in P(m), 0 <= i < n.
    virtual int compose(int n, int a, int i, int m, int b) const = 0;
};

using OperadPtr = std::shared_ptr<const SetOperad>;
using CollectionPtr = std::shared_ptr<const PointedCollection>;

// Associative operad without nullary operations: Ass(n) = Sigma_n for n >= 1,
// an element being a word in the inputs.
OperadPtr make_ass(int max_arity = 8);
// Commutative operad without nullary operations: one element in each n >= 1.
OperadPtr make_com(int max_arity = 8);
// Only the unit.
OperadPtr make_trivial(int max_arity = 8);
// Operad given by explicit tables (see README for the JSON layout).
OperadPtr operad_from_json(const nlohmann::json& j);
OperadPtr builtin_operad(const std::string& name);

// Collection given by explicit element lists; the action is trivial unless
// filled in through `actions`.
class TableCollection : public PointedCollection {
  public:
    TableCollection(std::string name, std::vector<std::vector<std::string>> elements, int base);
    std::string name() const override { return name_; }
    int max_arity() const override { return static_cast<int>(elements_.size()) - 1; }
    int size(int n) const override;
    std::string element_name(int n, int a) const override { return elements_[n][a]; }
    int base() const override { return base_; }
    int act(int n, int a, const Perm& s) const override;
    std::map<std::pair<int, std::vector<int>>, int> actions;  // (element of arity n, perm) -> element

  private:
    std::string name_;
    std::vector<std::vector<std::string>> elements_;
    int base_;
};

std::vector<std::string> validate_operad(const SetOperad& p, int arity_bound);

// Value of a labeled tree in an operad: planar composite of the labels, acted
// on by the inverse of the leaf numbering. Marks are ignored.
int evaluate(const SetOperad& p, const LabeledTree& x);

// Twist action used for canonical forms of trees labeled by `k`.
trees::LabelAction label_action(const PointedCollection& k);

// Deterministically ordered elements of one arity with an encoding index.
class ElementTable {
  public:
    void assign(std::vector<LabeledTree> elements);
    int size() const { return static_cast<int>(elements_.size()); }
    const LabeledTree& operator[](int i) const { return elements_[i]; }
    const std::vector<LabeledTree>& elements() const { return elements_; }
    int find(const LabeledTree& canonical) const;

  private:
    std::vector<LabeledTree> elements_;
    std::map<std::vector<std::int64_t>, int> index_;
};

// All canonical trees of arity n labeled by non-base elements of k, with edge
// marks drawn from `marks`, whose total label weight is at most `cap`
// (cap < 0: no cap, refused if the set would be infinite).
std::vector<LabeledTree> enumerate_trees(const PointedCollection& k, const std::vector<int>& marks, int n, int cap);
std::vector<LabeledTree> enumerate_trees_serial(const PointedCollection& k, const std::vector<int>& marks, int n,
                                                int cap);

// Whether unrestricted enumeration over k is finite.
bool finitely_enumerable(const PointedCollection& k);

// An operad whose elements are canonical labeled trees, tabulated up to an
// arity bound and a weight cap.
class TreeOperad : public SetOperad {
  public:
    int max_arity() const override { return max_arity_; }
    int size(int n) const override { return table(n).size(); }
    std::string element_name(int n, int a) const override;
    int unit() const override;
    int compose(int n, int a, int i, int m, int b) const override;
    int act(int n, int a, const Perm& s) const override;
    int weight(int n, int a) const override;
    bool symmetric() const override { return labels_->symmetric(); }

    const ElementTable& table(int n) const;
    const PointedCollection& labels() const { return *labels_; }
    int cap() const { return cap_; }
    bool truncated() const { return truncated_; }
    // Canonical form of a raw tree in this operad (rewriting first if needed).
    virtual LabeledTree finish(const LabeledTree& raw) const;
    virtual std::string mark_name(int mark) const = 0;
    std::string tree_name(const LabeledTree& x) const;

  protected:
    TreeOperad(CollectionPtr labels, std::vector<int> marks, int new_mark, int max_arity, int cap);
    void build_tables();

    CollectionPtr labels_;
    std::vector<int> marks_;
    int new_mark_;
    int max_arity_;
    int cap_;
    bool truncated_ = false;
    std::vector<ElementTable> tables_;
};

// The free operad F_*(K) on a pointed collection; every edge has mark 1.
class FreeOperad : public TreeOperad {
  public:
    FreeOperad(CollectionPtr k, int max_arity, int cap = -1);
    std::string name() const override;
    std::string mark_name(int) const override { return ""; }
    // Counit F_*(U Q) -> Q; requires k to be an operad.
    int counit(int n, int a) const;
};

// Normalization of raw weighted trees.
enum class Rule { ContractZero, JoinUnit, DropUnit };
struct Redex {
    Rule rule;
    int vertex;  // upper end of the edge for ContractZero, the unit vertex otherwise
};
std::vector<Redex> redexes(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& x);
LabeledTree rewrite(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& x, const Redex& r);
// Innermost-leftmost rewriting to the end, then the canonical representative.
LabeledTree normalize(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& raw);
LabeledTree normalize_raw(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& raw);

// W(H, P): normal forms with marks in H \ {0}.
class WOperad : public TreeOperad {
  public:
    WOperad(OperadPtr p, seg::FiniteSegment h, int max_arity, int cap = -1);
    std::string name() const override;
    std::string mark_name(int mark) const override { return h_.names[mark]; }
    LabeledTree finish(const LabeledTree& raw) const override;
    const SetOperad& operad() const { return *p_; }
    const seg::FiniteSegment& segment() const { return h_; }
    int augmentation(int n, int a) const;
    int filtration(int n, int a) const { return table(n)[a].edge_count(); }

  private:
    OperadPtr p_;
    seg::FiniteSegment h_;
};

// Image of x under the map W(H,P) -> W(K,P) induced by f.
LabeledTree w_segment_map(const SetOperad& p, const seg::FiniteSegment& k, const seg::SegmentMap& f,
                          const LabeledTree& x);

struct Comparison {
    std::string status = "iso";  // "iso", "fail" or "inconclusive"
    bool truncated = false;
    std::map<std::string, long> counts;
    std::vector<std::pair<std::string, std::string>> bijection;
    std::vector<std::string> failures;
    void fail(const std::string& why);
    nlohmann::json to_json() const;
};

// W(I u I, P) against F_*(P).
Comparison compare_free(OperadPtr p, int n, int cap = -1);
// W(H^diamond, P) against F_*(U W(H, P)).
Comparison w_diamond_compare(OperadPtr p, const seg::FiniteSegment& h, int n, int cap);

// G_k(P) = (F_* U)^{k+1} P, levels -1..max_level, arities up to max_arity.
class Godement {
  public:
    Godement(OperadPtr p, int max_level, int max_arity);
    int max_level() const { return static_cast<int>(levels_.size()) - 1; }
    const SetOperad& level(int k) const;
    const FreeOperad& free_level(int k) const { return *levels_.at(k); }
    int face(int k, int i, int n, int a) const;
    int degeneracy(int k, int i, int n, int a) const;
    int augmentation(int k, int n, int a) const;
    // The corresponding element of W(delta1_level(k), P)(n), canonical.
    LabeledTree flatten(int k, int n, int a) const;

  private:
    LabeledTree map_labels(int k, const LabeledTree& x, const std::vector<int>& new_labels, int label_level) const;
    OperadPtr p_;
    std::vector<std::shared_ptr<FreeOperad>> levels_;
};

// G_k(P)(m) against W(delta1_level(k), P)(m) for m <= n.
Comparison compare_godement_w(OperadPtr p, int k, int n);

nlohmann::json element_json(const TreeOperad& op, const LabeledTree& x);

}  // namespace opw::setop
