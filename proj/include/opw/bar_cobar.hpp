#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "opw/chain_operads.hpp"

namespace opw::barcobar {

using chainop::ChainOperadPtr;
using chainop::TreeComplex;
using chainop::Vec;

// The bar cooperad of P in arities 1..max_arity: trees labeled by the
// suspended basis of P (degree + 1 per vertex), with the internal
// differential and edge contraction. Cocomposition is tree splitting.
class BarCooperad {
  public:
    BarCooperad(ChainOperadPtr p, int max_arity, int vertex_cap, bool parallel);
    ChainOperadPtr operad() const { return p_; }
    int max_arity() const { return max_arity_; }
    int vertex_cap() const { return cap_; }
    bool truncated() const;
    // Bar complex in arity n, 1 <= n <= max_arity.
    const TreeComplex& arity(int n) const;
    std::shared_ptr<const chainop::TreeSpace> space() const { return space_; }

  private:
    ChainOperadPtr p_;
    int max_arity_;
    int cap_;
    std::shared_ptr<const chainop::TreeSpace> space_;
    std::vector<std::shared_ptr<TreeComplex>> complexes_;
};

using BarPtr = std::shared_ptr<const BarCooperad>;

// Refused when P has unary or nullary elements and no cap is given.
BarPtr bar(ChainOperadPtr p, int max_arity, int vertex_cap = -1, bool parallel = true);

// Cobar construction of the bar cooperad in arity n: trees labeled by the
// desuspended bar basis, total number of inner vertices at most `cap`.
// The cap may not exceed the bar's vertex cap.
std::shared_ptr<TreeComplex> cobar(BarPtr b, int n, int cap = -1, bool parallel = true);

// A degree -1 map from the bar construction to P, on bar basis elements.
struct TwistingCochain {
    BarPtr bar;
    std::function<Vec(int n, int g)> value;
};

// s x -> x on corollas, 0 on larger trees.
TwistingCochain bar_counit_cochain(BarPtr b);
TwistingCochain zero_cochain(BarPtr b);

struct TwistingReport {
    // One entry per arity and bar degree where D tau and tau u tau differ.
    struct Mismatch {
        int arity;
        int degree;
        std::string element;
        Vec d_tau;
        Vec cup;
    };
    std::vector<Mismatch> mismatches;
    bool ok() const { return mismatches.empty(); }
    std::vector<std::string> describe(const chainop::PseudoChainOperad& p) const;
};

// Compares D tau = d tau + tau d with the cup square of tau arity by arity.
TwistingReport check_twisting(const TwistingCochain& t);

// The counit cobar(bar(P))(n) -> P(n) induced by the bar counit.
chain::ChainMap cobar_bar_counit(BarPtr b, const std::shared_ptr<TreeComplex>& cobar);

struct BarCobarComparison {
    std::string status;  // "iso" or "fail"
    std::string witness;
    bool truncated = false;
    // W basis index -> cobar basis index.
    std::vector<int> bijection;
    std::vector<int> rescaling;
    int components = 0;
    bool augmentations_agree = false;
    // Number of rescalings making the differentials agree, counted
    // exhaustively for small bases (-1 otherwise), and the expected 2^components.
    long rescalings_found = -1;
    long rescalings_expected = 0;
    std::vector<int> w_ranks, cobar_ranks;
    nlohmann::json to_json(const TreeComplex& w, const TreeComplex& c) const;
};

// Caps: a W edge cap k matches a total inner vertex cap k + 1 on the
// cobar-bar side (and a bar vertex cap of at least k + 1).
BarCobarComparison compare_w_barcobar(const std::shared_ptr<TreeComplex>& w, BarPtr b,
                                      const std::shared_ptr<TreeComplex>& cobar);
struct ComparisonRun {
    std::shared_ptr<TreeComplex> w, cobar;
    BarPtr bar;
    BarCobarComparison result;
};
ComparisonRun compare_w_barcobar(ChainOperadPtr p, int n, int edge_cap = -1);

}  // namespace opw::barcobar
