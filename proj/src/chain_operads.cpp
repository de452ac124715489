#include "opw/chain_operads.hpp"

#include <omp.h>

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "opw/errors.hpp"
#include "opw/set_operads.hpp"

namespace opw::chainop {

void accumulate(Vec& v, int key, const Scalar& c) {
    if (c == 0) return;
    auto [it, fresh] = v.emplace(key, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) v.erase(it);
    }
}

using trees::kLeaf;
using trees::PlanarTree;
using trees::RawTree;

namespace {

int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

void add_to(Vec& v, int key, const Scalar& c) { accumulate(v, key, c); }

// R{P(n)} for n >= 2 of a set operad.
class Linearized : public PseudoChainOperad {
  public:
    Linearized(setop::OperadPtr set, bool symmetric, std::string name, Ring ring)
        : set_(std::move(set)), symmetric_(symmetric), name_(std::move(name)), ring_(ring) {}
    std::string name() const override { return name_; }
    bool symmetric() const override { return symmetric_; }
    int max_arity() const override { return set_->max_arity(); }
    int size(int n) const override { return n >= 2 ? set_->size(n) : 0; }
    std::string element_name(int n, int a) const override {
        return symmetric_ ? set_->element_name(n, a) : "mu" + std::to_string(n);
    }
    int degree(int, int) const override { return 0; }
    trees::Twist act(int n, int a, const Perm& s) const override {
        return {symmetric_ ? set_->act(n, a, s) : a, 1};
    }
    Ring ring() const override { return ring_; }
    Vec compose(int n, int a, int i, int m, int b) const override { return {{set_->compose(n, a, i, m, b), 1}}; }

  private:
    setop::OperadPtr set_;
    bool symmetric_;
    std::string name_;
    Ring ring_;
};

class TableChainOperad : public PseudoChainOperad {
  public:
    explicit TableChainOperad(const nlohmann::json& j);
    std::string name() const override { return name_; }
    bool symmetric() const override { return symmetric_; }
    int max_arity() const override { return max_arity_; }
    int size(int n) const override {
        return n >= 0 && n <= max_arity_ ? static_cast<int>(arity_[n].names.size()) : 0;
    }
    std::string element_name(int n, int a) const override { return arity_[n].names[a]; }
    int degree(int n, int a) const override { return arity_[n].degrees[a]; }
    trees::Twist act(int n, int a, const Perm& s) const override {
        if (!symmetric_) return {a, 1};
        return arity_[n].action[a][perm_rank(s)];
    }
    Ring ring() const override { return ring_; }
    Vec differential(int n, int a) const override { return arity_[n].d[a]; }
    Vec compose(int n, int a, int i, int m, int b) const override {
        auto it = compose_.find({n, a, i, m, b});
        return it == compose_.end() ? Vec{} : it->second;
    }

  private:
    struct Arity {
        std::vector<std::string> names;
        std::vector<int> degrees;
        std::vector<Vec> d;
        std::vector<std::vector<trees::Twist>> action;  // [element][rank of perm]
    };
    std::pair<int, int> lookup(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw InputError("unknown element '" + name + "'");
        return it->second;
    }
    Vec linear(const nlohmann::json& j, int arity, const std::string& where) const;

    std::string name_;
    bool symmetric_ = false;
    Ring ring_ = Ring::integers();
    int max_arity_ = 0;
    std::vector<Arity> arity_;
    std::map<std::string, std::pair<int, int>> by_name_;
    std::map<std::tuple<int, int, int, int, int>, Vec> compose_;
};

Vec TableChainOperad::linear(const nlohmann::json& j, int arity, const std::string& where) const {
    if (!j.is_object()) throw InputError(where + ": expected an object of coefficients");
    Vec v;
    for (auto& [name, c] : j.items()) {
        const auto [n, a] = lookup(name);
        if (n != arity) throw InputError(where + ": '" + name + "' has the wrong arity");
        if (!c.is_string() && !c.is_number_integer()) throw InputError(where + ": coefficient must be a string");
        const Scalar value = ring_.reduce(c.is_string() ? chain::scalar_from_string(c.get<std::string>())
                                                        : Scalar(c.get<long long>()));
        add_to(v, a, value);
    }
    return v;
}

TableChainOperad::TableChainOperad(const nlohmann::json& j) {
    try {
        name_ = j.value("name", std::string("table"));
        symmetric_ = j.value("symmetric", false);
        ring_ = Ring::parse(j.value("ring", std::string("Z")));
        const auto& ar = j.at("arities");
        for (auto& [key, _] : ar.items()) max_arity_ = std::max(max_arity_, std::stoi(key));
        arity_.resize(max_arity_ + 1);
        for (auto& [key, body] : ar.items()) {
            const int n = std::stoi(key);
            if (n < 0) throw InputError("negative arity " + key);
            Arity& A = arity_[n];
            A.names = body.at("basis").get<std::vector<std::string>>();
            A.degrees = body.contains("degrees") ? body.at("degrees").get<std::vector<int>>()
                                                 : std::vector<int>(A.names.size(), 0);
            if (A.degrees.size() != A.names.size())
                throw InputError("arity " + key + ": degrees and basis differ in length");
            for (int a = 0; a < static_cast<int>(A.names.size()); ++a)
                if (!by_name_.emplace(A.names[a], std::pair{n, a}).second)
                    throw InputError("element name '" + A.names[a] + "' is used twice");
        }
        for (int n = 0; n <= max_arity_; ++n) arity_[n].d.assign(arity_[n].names.size(), {});
        for (int n = 0; n <= max_arity_; ++n) {
            if (!ar.contains(std::to_string(n))) continue;
            const auto& body = ar.at(std::to_string(n));
            if (!body.contains("d")) continue;
            for (auto& [name, image] : body.at("d").items()) {
                const auto [m, a] = lookup(name);
                if (m != n) throw InputError("d of '" + name + "' listed under arity " + std::to_string(n));
                Vec v = linear(image, n, "d " + name);
                for (const auto& [b, c] : v)
                    if (arity_[n].degrees[b] != arity_[n].degrees[a] - 1)
                        throw InputError("d " + name + " contains '" + arity_[n].names[b] + "' of the wrong degree");
                arity_[n].d[a] = std::move(v);
            }
        }
        if (j.contains("compose")) {
            for (auto& [key, image] : j.at("compose").items()) {
                std::istringstream in(key);
                std::string x, op, y;
                if (!(in >> x >> op >> y) || op.size() < 2 || op[0] != 'o')
                    throw InputError("composition key '" + key + "' is not of the form 'a o<i> b'");
                const int i = std::stoi(op.substr(1)) - 1;
                const auto [n, a] = lookup(x);
                const auto [m, b] = lookup(y);
                if (i < 0 || i >= n) throw InputError("composition key '" + key + "': slot out of range");
                const int target = n + m - 1;
                if (target > max_arity_) throw InputError("composition key '" + key + "': arity beyond the table");
                Vec v = linear(image, target, "compose " + key);
                for (const auto& [c, _] : v)
                    if (arity_[target].degrees[c] != arity_[n].degrees[a] + arity_[m].degrees[b])
                        throw InputError("compose " + key + " is not additive in degree");
                compose_[{n, a, i, m, b}] = std::move(v);
            }
        }
        if (symmetric_) {
            // Generators as listed; elements without an entry are fixed.
            std::map<std::pair<int, int>, std::vector<std::pair<Perm, trees::Twist>>> gens;
            if (j.contains("actions")) {
                for (auto& [name, table] : j.at("actions").items()) {
                    const auto [n, a] = lookup(name);
                    for (auto& [perm, image] : table.items()) {
                        std::istringstream in(perm);
                        Perm s;
                        for (int x; in >> x;) s.push_back(x - 1);
                        if (static_cast<int>(s.size()) != n || !is_perm(s))
                            throw InputError("action of '" + name + "': '" + perm + "' is not a permutation");
                        std::string target = image.get<std::string>();
                        int sign = 1;
                        if (!target.empty() && target[0] == '-') {
                            sign = -1;
                            target = target.substr(1);
                        }
                        const auto [m, b] = lookup(target);
                        if (m != n) throw InputError("action of '" + name + "' leaves the arity");
                        if (arity_[n].degrees[b] != arity_[n].degrees[a])
                            throw InputError("action of '" + name + "' changes the degree");
                        gens[{n, a}].push_back({s, {b, sign}});
                    }
                }
            }
            for (int n = 0; n <= max_arity_; ++n) {
                const int size_n = static_cast<int>(arity_[n].names.size());
                const auto perms = all_perms(n);
                arity_[n].action.assign(size_n, std::vector<trees::Twist>(perms.size(), {-1, 0}));
                auto gen_of = [&](int a) -> std::vector<std::pair<Perm, trees::Twist>> {
                    auto it = gens.find({n, a});
                    if (it != gens.end()) return it->second;
                    std::vector<std::pair<Perm, trees::Twist>> fixed;
                    for (const auto& s : perms) fixed.push_back({s, {a, 1}});
                    return fixed;
                };
                for (int a = 0; a < size_n; ++a) {
                    auto& row = arity_[n].action[a];
                    row[perm_rank(identity_perm(n))] = {a, 1};
                    std::deque<Perm> queue{identity_perm(n)};
                    while (!queue.empty()) {
                        const Perm s = queue.front();
                        queue.pop_front();
                        const trees::Twist here = row[perm_rank(s)];
                        for (const auto& [t, img] : gen_of(here.label)) {
                            const Perm st = opw::compose(s, t);
                            const trees::Twist next{img.label, here.sign * img.sign};
                            auto& slot = row[perm_rank(st)];
                            if (slot.sign == 0) {
                                slot = next;
                                queue.push_back(st);
                            } else if (slot.label != next.label || slot.sign != next.sign) {
                                throw InputError("the action on '" + arity_[n].names[a] + "' is inconsistent at " +
                                                 perm_to_string(st));
                            }
                        }
                    }
                    for (std::size_t r = 0; r < row.size(); ++r)
                        if (row[r].sign == 0)
                            throw InputError("the listed actions do not determine '" + arity_[n].names[a] + "' . " +
                                             perm_to_string(perms[r]));
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed chain operad: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw InputError("malformed chain operad: arity keys must be integers");
    }
}

Vec compose_linear(const PseudoChainOperad& p, int n, const Vec& x, int i, int m, const Vec& y) {
    Vec out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y)
            for (const auto& [c, cc] : p.compose(n, a, i, m, b)) add_to(out, c, ca * cb * cc);
    return out;
}

Vec d_linear(const PseudoChainOperad& p, int n, const Vec& x) {
    Vec out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : p.differential(n, a)) add_to(out, b, ca * cb);
    return out;
}

Vec reduce(const Ring& ring, const Vec& v) {
    Vec out;
    for (const auto& [k, c] : v) add_to(out, k, ring.reduce(c));
    return out;
}

Vec scaled(const Vec& v, const Scalar& s) {
    Vec out;
    for (const auto& [k, c] : v) add_to(out, k, c * s);
    return out;
}

Vec sum(const Vec& a, const Vec& b) {
    Vec out = a;
    for (const auto& [k, c] : b) add_to(out, k, c);
    return out;
}

// Contracts the edge above c into its parent; the parent keeps its label.
struct Contraction {
    LabeledTree tree;
    std::vector<int> map;
    int parent;
    int slot;
};

Contraction contract(const LabeledTree& x, int c) {
    RawTree raw = trees::to_raw(x);
    const int p = x.shape.parent(c), s = x.shape.input_position(c);
    std::vector<int> merged(raw.inputs[p].begin(), raw.inputs[p].begin() + s);
    merged.insert(merged.end(), raw.inputs[c].begin(), raw.inputs[c].end());
    merged.insert(merged.end(), raw.inputs[p].begin() + s + 1, raw.inputs[p].end());
    raw.inputs[p] = std::move(merged);
    trees::Built b = trees::build(raw);
    return {std::move(b.tree), std::move(b.map), p, s};
}

int find_factor(const std::vector<Factor>& w, int key) {
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k].key == key) return static_cast<int>(k);
    throw std::logic_error("factor missing from word");
}

// Moves the factor `c` to just after the factor `p`.
std::vector<Factor> move_after(const std::vector<Factor>& w, int p, int c) {
    std::vector<Factor> out;
    const Factor fc = w[find_factor(w, c)];
    for (const Factor& f : w) {
        if (f.key == c) continue;
        out.push_back(f);
        if (f.key == p) out.push_back(fc);
    }
    return out;
}

std::vector<Factor> remap(const std::vector<Factor>& w, const std::vector<int>& map) {
    std::vector<Factor> out;
    for (const Factor& f : w) {
        const int v = f.key >= 0 ? f.key : ~f.key;
        if (map[v] < 0) throw std::logic_error("remap: factor of a removed vertex");
        out.push_back({f.key >= 0 ? map[v] : ~map[v], f.degree});
    }
    return out;
}

// GradedLabels seen as a pointed collection for enumeration: a phantom base
// element is appended in arity 1 so that only genuine labels are used.
class EnumerationView : public setop::PointedCollection {
  public:
    explicit EnumerationView(const GradedLabels& g) : g_(g) {}
    std::string name() const override { return g_.name(); }
    bool symmetric() const override { return g_.symmetric(); }
    int max_arity() const override { return g_.max_arity(); }
    int size(int n) const override { return g_.size(n) + (n == 1 ? 1 : 0); }
    std::string element_name(int n, int a) const override {
        return n == 1 && a == g_.size(1) ? "1" : g_.element_name(n, a);
    }
    int base() const override { return g_.size(1); }
    int act(int n, int a, const Perm& s) const override {
        return n == 1 && a == g_.size(1) ? a : g_.act(n, a, s).label;
    }
    int weight(int n, int a) const override { return g_.weight(n, a); }

  private:
    const GradedLabels& g_;
};

}  // namespace

ChainOperadPtr make_as_ns(Ring ring, int max_arity) {
    return std::make_shared<Linearized>(setop::make_com(max_arity), false, "as_ns", ring);
}

ChainOperadPtr make_ass_sym(Ring ring, int max_arity) {
    return std::make_shared<Linearized>(setop::make_ass(max_arity), true, "ass_sym", ring);
}

ChainOperadPtr make_com_chain(Ring ring, int max_arity) {
    return std::make_shared<Linearized>(setop::make_com(max_arity), true, "com", ring);
}

ChainOperadPtr builtin_chain_operad(const std::string& name, Ring ring) {
    if (name == "as_ns") return make_as_ns(ring);
    if (name == "ass_sym" || name == "ass") return make_ass_sym(ring);
    if (name == "com") return make_com_chain(ring);
    throw InputError("unknown chain operad '" + name + "' (built-ins: as_ns, ass_sym, com)");
}

ChainOperadPtr chain_operad_from_json(const nlohmann::json& j) { return std::make_shared<TableChainOperad>(j); }

std::vector<std::string> validate_chain_operad(const PseudoChainOperad& p, int bound) {
    std::vector<std::string> out;
    const Ring ring = p.ring();
    bound = std::min(bound, p.max_arity());
    auto nm = [&](int n, int a) { return p.element_name(n, a); };
    auto cmp = [&](int n, int a, int i, int m, int b) { return nm(n, a) + " o" + std::to_string(i + 1) + " " + nm(m, b); };
    if (p.size(0) != 0) out.push_back("the arity 0 part is not zero");
    for (int n = 1; n <= bound; ++n)
        for (int a = 0; a < p.size(n); ++a) {
            for (const auto& [b, _] : p.differential(n, a))
                if (p.degree(n, b) != p.degree(n, a) - 1) out.push_back("d " + nm(n, a) + " has the wrong degree");
            if (!reduce(ring, d_linear(p, n, p.differential(n, a))).empty()) out.push_back("d^2 " + nm(n, a) + " != 0");
        }
    if (p.symmetric()) {
        for (int n = 1; n <= bound; ++n) {
            const auto perms = all_perms(n);
            for (int a = 0; a < p.size(n); ++a) {
                const auto id = p.act(n, a, identity_perm(n));
                if (id.label != a || id.sign != 1) out.push_back("identity acts non-trivially on " + nm(n, a));
                for (const auto& s : perms) {
                    const auto as = p.act(n, a, s);
                    if (p.degree(n, as.label) != p.degree(n, a))
                        out.push_back("action changes the degree of " + nm(n, a));
                    for (const auto& t : perms) {
                        const auto lhs = p.act(n, as.label, t);
                        const auto rhs = p.act(n, a, opw::compose(s, t));
                        if (lhs.label != rhs.label || lhs.sign * as.sign != rhs.sign)
                            out.push_back("not a right action on " + nm(n, a) + " at " + perm_to_string(s) + ", " +
                                          perm_to_string(t));
                    }
                    Vec dsa = scaled(p.differential(n, as.label), as.sign);
                    Vec sda;
                    for (const auto& [b, c] : p.differential(n, a)) {
                        const auto tw = p.act(n, b, s);
                        add_to(sda, tw.label, c * tw.sign);
                    }
                    if (reduce(ring, dsa) != reduce(ring, sda))
                        out.push_back("d is not equivariant on " + nm(n, a) + " at " + perm_to_string(s));
                }
            }
        }
    }
    for (int n = 1; n <= bound; ++n)
        for (int m = 1; n + m - 1 <= bound; ++m)
            for (int a = 0; a < p.size(n); ++a)
                for (int b = 0; b < p.size(m); ++b)
                    for (int i = 0; i < n; ++i) {
                        const int t = n + m - 1;
                        const Vec xy = p.compose(n, a, i, m, b);
                        for (const auto& [c, _] : xy)
                            if (c < 0 || c >= p.size(t) || p.degree(t, c) != p.degree(n, a) + p.degree(m, b))
                                out.push_back(cmp(n, a, i, m, b) + " has the wrong degree");
                        const Vec lhs = d_linear(p, t, xy);
                        const Vec rhs =
                            sum(compose_linear(p, n, p.differential(n, a), i, m, Vec{{b, 1}}),
                                scaled(compose_linear(p, n, Vec{{a, 1}}, i, m, p.differential(m, b)),
                                       parity_sign(p.degree(n, a))));
                        if (reduce(ring, lhs) != reduce(ring, rhs))
                            out.push_back("d is not a derivation on " + cmp(n, a, i, m, b));
                        for (int k = 1; n + m + k - 2 <= bound; ++k)
                            for (int c = 0; c < p.size(k); ++c) {
                                const Vec z{{c, 1}};
                                for (int j = 0; j < m; ++j) {
                                    const Vec l = compose_linear(p, t, xy, i + j, k, z);
                                    const Vec r = compose_linear(p, n, Vec{{a, 1}}, i, m + k - 1,
                                                                 p.compose(m, b, j, k, c));
                                    if (reduce(ring, l) != reduce(ring, r))
                                        out.push_back("sequential associativity fails for " + cmp(n, a, i, m, b) +
                                                      " o" + std::to_string(i + j + 1) + " " + nm(k, c));
                                }
                                for (int j = i + 1; j < n; ++j) {
                                    const Vec l = compose_linear(p, t, xy, j + m - 1, k, z);
                                    const Vec xz = p.compose(n, a, j, k, c);
                                    const Vec r = scaled(compose_linear(p, n + k - 1, xz, i, m, Vec{{b, 1}}),
                                                         parity_sign(long(p.degree(m, b)) * p.degree(k, c)));
                                    if (reduce(ring, l) != reduce(ring, r))
                                        out.push_back("parallel associativity fails for " + cmp(n, a, i, m, b) +
                                                      " and slot " + std::to_string(j + 1) + " with " + nm(k, c));
                                }
                            }
                        if (!p.symmetric()) continue;
                        // (a.L1^{-1}) o_i (b.L2^{-1}) against the composite of the numbered tree.
                        for (const auto& l1 : all_perms(n))
                            for (const auto& l2 : all_perms(m)) {
                                LabeledTree x = LabeledTree::corolla(n, a), y = LabeledTree::corolla(m, b);
                                x.leaves = l1;
                                y.leaves = l2;
                                const auto g = trees::graft(x, i, y, 1);
                                const std::vector<Factor> word{{g.outer_map[0], p.degree(n, a)},
                                                               {g.inner_map[0], p.degree(m, b)}};
                                const auto ta = p.act(n, a, inverse(l1));
                                const auto tb = p.act(m, b, inverse(l2));
                                const Vec lhs = scaled(p.compose(n, ta.label, i, m, tb.label), ta.sign * tb.sign);
                                if (reduce(ring, lhs) != reduce(ring, evaluate(p, g.tree, word)))
                                    out.push_back("equivariance fails for " + cmp(n, a, i, m, b) + " with " +
                                                  perm_to_string(l1) + " and " + perm_to_string(l2));
                            }
                    }
    return out;
}

chain::ChainComplex operad_complex(const PseudoChainOperad& p, int n, bool reduced) {
    chain::GradedModule basis;
    std::map<int, std::vector<int>> by_degree;
    const bool unit = reduced && (n == 0 || n == 1);
    if (unit) basis.basis[0].push_back(n == 1 ? "1" : "r");
    for (int a = 0; a < p.size(n); ++a) {
        by_degree[p.degree(n, a)].push_back(a);
        basis.basis[p.degree(n, a)].push_back(p.element_name(n, a));
    }
    auto position = [&](int a) {
        const auto& v = by_degree[p.degree(n, a)];
        const int pos = static_cast<int>(std::find(v.begin(), v.end(), a) - v.begin());
        return pos + (unit && p.degree(n, a) == 0 ? 1 : 0);
    };
    std::map<int, chain::SparseMatrix> d;
    for (const auto& [deg, elems] : by_degree) {
        chain::SparseMatrix m(basis.rank(deg - 1), basis.rank(deg));
        for (int a : elems)
            for (const auto& [b, c] : p.differential(n, a)) m.add(position(b), position(a), p.ring().reduce(c));
        d[deg] = m.reduced(p.ring());
    }
    return chain::ChainComplex(p.ring(), basis, d);
}

TreeSpace::TreeSpace(std::shared_ptr<const GradedLabels> labels, int label_shift, std::vector<int> marks,
                     std::vector<int> mark_degree, int component_mark)
    : labels_(std::move(labels)),
      shift_(label_shift),
      marks_(std::move(marks)),
      mark_degree_(std::move(mark_degree)),
      component_mark_(component_mark) {}

int TreeSpace::label_degree(const LabeledTree& x, int v) const {
    return labels_->degree(x.shape.valence(v), x.labels[v]) + shift_;
}

int TreeSpace::degree(const LabeledTree& x) const {
    int d = 0;
    for (int v = 0; v < x.vertex_count(); ++v) {
        d += label_degree(x, v);
        if (v > 0) d += mark_degree_[x.marks[v]];
    }
    return d;
}

std::vector<Factor> TreeSpace::word(const LabeledTree& x) const {
    std::vector<Factor> w;
    const int nv = x.vertex_count();
    for (int v = 1; v < nv; ++v)
        if (mark_degree_[x.marks[v]] % 2 != 0) w.push_back({~v, mark_degree_[x.marks[v]]});
    if (component_mark_ < 0) {
        for (int v = 0; v < nv; ++v) w.push_back({v, label_degree(x, v)});
        return w;
    }
    // Preorder within a component, components by the preorder of their roots.
    auto root_of = [&](int v) {
        while (v > 0 && x.marks[v] == component_mark_) v = x.shape.parent(v);
        return v;
    };
    std::map<int, std::vector<int>> comps;
    for (int v = 0; v < nv; ++v) comps[root_of(v)].push_back(v);
    for (const auto& [_, vs] : comps)
        for (int v : vs) w.push_back({v, label_degree(x, v)});
    return w;
}

trees::LabelAction TreeSpace::action() const {
    if (!labels_->symmetric()) return {};
    const GradedLabels* g = labels_.get();
    return [g](int valence, int label, const Perm& tau) { return g->act(valence, label, tau); };
}

TreeSpace::Signed TreeSpace::normalize(const LabeledTree& y, const std::vector<Factor>& raw) const {
    const auto wy = word(y);
    int sign = koszul_sign(raw, wy);
    if (!labels_->symmetric()) return {y, sign};
    const trees::Canonical c = trees::canonicalize(y, action());
    if (c.sign_conflict) return {c.tree, 0};
    sign *= c.sign * koszul_sign(remap(wy, c.vertex_map), word(c.tree));
    return {c.tree, sign};
}

bool TreeSpace::finite() const { return setop::finitely_enumerable(EnumerationView(*labels_)); }

std::vector<LabeledTree> TreeSpace::enumerate(int n, int cap) const {
    if (labels_->size(0) != 0) throw Refusal(labels_->name() + " has non-zero arity 0 part; trees over it are refused");
    auto all = setop::enumerate_trees(EnumerationView(*labels_), marks_, n, cap);
    all.erase(std::remove_if(all.begin(), all.end(), [](const LabeledTree& x) { return x.vertex_count() == 0; }),
              all.end());
    return all;
}

TreeComplex::TreeComplex(std::shared_ptr<const TreeSpace> space, Ring ring, int arity,
                         std::vector<LabeledTree> elements, bool truncated,
                         const std::function<std::string(const LabeledTree&)>& name, int cap)
    : space_(std::move(space)), ring_(ring), arity_(arity), truncated_(truncated), cap_(cap) {
    std::vector<std::pair<int, int>> order;
    for (int k = 0; k < static_cast<int>(elements.size()); ++k) order.push_back({space_->degree(elements[k]), k});
    std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a.first < b.first; });
    for (const auto& [deg, k] : order) {
        const int g = static_cast<int>(elements_.size());
        position_.push_back(static_cast<int>(by_degree_[deg].size()));
        by_degree_[deg].push_back(g);
        degree_.push_back(deg);
        index_.emplace(elements[k].encoding(), g);
        names_.push_back(name(elements[k]));
        elements_.push_back(std::move(elements[k]));
    }
    chain::GradedModule basis;
    for (int g = 0; g < size(); ++g) basis.basis[degree_[g]].push_back(names_[g]);
    complex_ = std::make_shared<chain::ChainComplex>(ring_, basis, std::map<int, chain::SparseMatrix>{}, false);
}

int TreeComplex::find(const LabeledTree& canonical) const {
    auto it = index_.find(canonical.encoding());
    return it == index_.end() ? -1 : it->second;
}

Vec TreeComplex::collect(const std::vector<RawTerm>& terms) const {
    Vec out;
    for (const auto& t : terms) {
        const auto s = space_->normalize(t.tree, t.word);
        if (s.sign == 0) continue;
        const int g = find(s.tree);
        if (g < 0) throw std::logic_error("term outside the basis");
        add_to(out, g, t.coef * s.sign);
    }
    return reduce(ring_, out);
}

void TreeComplex::assemble(const Column& column, bool parallel) {
    std::vector<Vec> cols(size());
    const int n = size();
    if (parallel) {
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
        for (int g = 0; g < n; ++g) {
            try {
                cols[g] = collect(column(elements_[g]));
            } catch (...) {
#pragma omp critical
                error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (int g = 0; g < n; ++g) cols[g] = collect(column(elements_[g]));
    }
    std::map<int, chain::SparseMatrix> d;
    for (const auto& [deg, gs] : by_degree_) {
        auto below = by_degree_.find(deg - 1);
        const int rows = below == by_degree_.end() ? 0 : static_cast<int>(below->second.size());
        chain::SparseMatrix m(rows, static_cast<int>(gs.size()));
        for (int g : gs)
            for (const auto& [h, c] : cols[g]) {
                if (degree_[h] != deg - 1) throw std::logic_error("differential term of the wrong degree");
                m.set(position_[h], position_[g], c);
            }
        d[deg] = m;
    }
    complex_ = std::make_shared<chain::ChainComplex>(ring_, complex_->module(), d, false);
}

std::vector<int> TreeComplex::ranks() const {
    std::vector<int> out;
    if (by_degree_.empty()) return out;
    for (int deg = by_degree_.begin()->first; deg <= by_degree_.rbegin()->first; ++deg)
        out.push_back(complex_->rank(deg));
    return out;
}

int TreeComplex::min_degree() const { return by_degree_.empty() ? 0 : by_degree_.begin()->first; }

chain::ChainComplex ChainInterval::complex() const {
    chain::GradedModule basis;
    basis.basis[0] = {"g0", "g1"};
    basis.basis[1] = {"g"};
    chain::SparseMatrix d1(2, 1);
    d1.set(0, 0, -1);
    d1.set(1, 0, 1);
    return chain::ChainComplex(Ring::integers(), basis, {{1, d1}});
}

int ChainInterval::join(int a, int b) const {
    if (a == 1) return b;  // g1 is the unit
    if (b == 1) return a;
    if (a == 0 || b == 0) return 0;
    return -1;  // g v g = 0
}

ChainInterval chain_interval() { return {}; }

Vec evaluate(const PseudoChainOperad& p, const LabeledTree& x, const std::vector<Factor>& word) {
    Vec out;
    struct Term {
        LabeledTree t;
        std::vector<Factor> w;
        Scalar c;
    };
    std::vector<Term> stack{{x, word, 1}};
    while (!stack.empty()) {
        Term term = std::move(stack.back());
        stack.pop_back();
        const int nv = term.t.vertex_count();
        if (nv == 0) throw InputError("evaluate: the unit tree has no value in a pseudo-operad");
        if (nv == 1) {
            const int n = term.t.arity();
            const auto tw = p.symmetric() ? p.act(n, term.t.labels[0], inverse(term.t.leaves))
                                          : trees::Twist{term.t.labels[0], 1};
            add_to(out, tw.label, term.c * tw.sign);
            continue;
        }
        for (auto& t : contraction_terms(p, term.t, term.w, nv - 1, 0))
            stack.push_back({std::move(t.tree), std::move(t.word), term.c * t.coef});
    }
    return reduce(p.ring(), out);
}

std::vector<RawTerm> contraction_terms(const PseudoChainOperad& p, const LabeledTree& x,
                                       const std::vector<Factor>& word, int c, int shift) {
    std::vector<RawTerm> out;
    const Contraction k = contract(x, c);
    const int pv = k.parent;
    const auto moved = move_after(word, pv, c);
    const int ks = koszul_sign(word, moved);
    const int vp = x.shape.valence(pv), vc = x.shape.valence(c);
    for (const auto& [b, cb] : p.compose(vp, x.labels[pv], k.slot, vc, x.labels[c])) {
        RawTerm t{k.tree, {}, cb * ks};
        t.tree.labels[k.map[pv]] = b;
        for (const Factor& f : moved) {
            if (f.key == c) continue;
            const int v = f.key >= 0 ? f.key : ~f.key;
            const int nk = f.key >= 0 ? k.map[v] : ~k.map[v];
            t.word.push_back({nk, f.key == pv ? p.degree(vp + vc - 1, b) + shift : f.degree});
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::shared_ptr<const TreeSpace> w_space(ChainOperadPtr p) {
    return std::make_shared<TreeSpace>(p, 0, std::vector<int>{kLengthOne, kGamma}, std::vector<int>{0, 0, 1}, kGamma);
}

std::shared_ptr<const TreeSpace> free_space(ChainOperadPtr p) {
    return std::make_shared<TreeSpace>(p, 0, std::vector<int>{kLengthOne}, std::vector<int>{0, 0, 1}, kGamma);
}

namespace {

std::string w_tree_name(const PseudoChainOperad& p, const LabeledTree& x) {
    return trees::to_string(
        x, [&](int v) { return p.element_name(x.shape.valence(v), x.labels[v]); },
        [&](int v) { return x.marks[v] == kGamma ? std::string("g") : std::string(); });
}

std::vector<RawTerm> w_column(const PseudoChainOperad& p, const TreeSpace& space, const LabeledTree& x) {
    std::vector<RawTerm> out;
    const auto w = space.word(x);
    long before = 0;
    int gammas = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Factor f = w[k];
        if (f.key >= 0) {
            const int v = f.key, val = x.shape.valence(v);
            for (const auto& [b, c] : p.differential(val, x.labels[v])) {
                RawTerm t{x, w, c * parity_sign(before)};
                t.tree.labels[v] = b;
                t.word[k].degree = p.degree(val, b);
                out.push_back(std::move(t));
            }
        } else {
            const int c = ~f.key;
            const int s = parity_sign(gammas++);
            std::vector<Factor> rest;
            for (const Factor& g : w)
                if (g.key != f.key) rest.push_back(g);
            RawTerm one{x, rest, s};
            one.tree.marks[c] = kLengthOne;
            out.push_back(std::move(one));
            for (auto& t : contraction_terms(p, x, rest, c, 0)) {
                t.coef *= -s;
                out.push_back(std::move(t));
            }
        }
        before += f.degree;
    }
    return out;
}

bool w_truncated(const TreeSpace& space, int n, int edge_cap) {
    if (edge_cap < 0) return false;
    if (!space.finite()) return true;
    return edge_cap < n - 2;
}

}  // namespace

std::shared_ptr<TreeComplex> w_pseudo(ChainOperadPtr p, int n, int edge_cap, bool parallel) {
    if (p->size(0) != 0) throw Refusal("W is only built for operads with zero arity 0 part");
    auto space = w_space(p);
    const int cap = edge_cap < 0 ? -1 : edge_cap + 1;
    auto w = std::make_shared<TreeComplex>(space, p->ring(), n, space->enumerate(n, cap),
                                           w_truncated(*space, n, edge_cap),
                                           [p](const LabeledTree& x) { return w_tree_name(*p, x); }, cap);
    const TreeSpace* sp = space.get();
    w->assemble([p, sp](const LabeledTree& x) { return w_column(*p, *sp, x); }, parallel);
    return w;
}

std::shared_ptr<TreeComplex> free_pseudo(ChainOperadPtr p, int n, int edge_cap, bool parallel) {
    if (p->size(0) != 0) throw Refusal("the free operad is only built for operads with zero arity 0 part");
    auto space = free_space(p);
    const int cap = edge_cap < 0 ? -1 : edge_cap + 1;
    auto f = std::make_shared<TreeComplex>(space, p->ring(), n, space->enumerate(n, cap),
                                           w_truncated(*space, n, edge_cap),
                                           [p](const LabeledTree& x) { return w_tree_name(*p, x); }, cap);
    const TreeSpace* sp = space.get();
    // No odd marks: only the internal differential survives.
    f->assemble([p, sp](const LabeledTree& x) { return w_column(*p, *sp, x); }, parallel);
    return f;
}

chain::ChainComplex w_reduced(ChainOperadPtr p, int n, int edge_cap) {
    if (n == 0) {
        chain::GradedModule basis;
        basis.basis[0] = {"r"};
        return chain::ChainComplex(p->ring(), basis, {});
    }
    const auto w = w_pseudo(p, n, edge_cap);
    if (n != 1) return *w->complex();
    // The unit sits in degree 0 ahead of the trees and is a cycle not hit by d.
    const auto& c = *w->complex();
    chain::GradedModule basis = c.module();
    basis.basis[0].insert(basis.basis[0].begin(), "1");
    std::map<int, chain::SparseMatrix> d;
    for (const auto& [deg, _] : basis.basis) {
        const chain::SparseMatrix old = c.d(deg);
        chain::SparseMatrix m(basis.rank(deg - 1), basis.rank(deg));
        const int row_shift = deg - 1 == 0 ? 1 : 0, col_shift = deg == 0 ? 1 : 0;
        for (int j = 0; j < old.cols(); ++j)
            for (const auto& [i, v] : old.column(j)) m.set(i + row_shift, j + col_shift, v);
        d[deg] = m;
    }
    return chain::ChainComplex(p->ring(), basis, d, false);
}

chain::ChainMap w_augmentation(ChainOperadPtr p, const std::shared_ptr<TreeComplex>& w) {
    const int n = w->arity();
    chain::ChainMap f;
    f.source = w->complex();
    f.target = std::make_shared<chain::ChainComplex>(operad_complex(*p, n, false));
    std::map<int, std::vector<int>> pos;  // element -> position in its degree
    std::map<int, int> position;
    for (int a = 0; a < p->size(n); ++a) {
        const int deg = p->degree(n, a);
        position[a] = static_cast<int>(pos[deg].size());
        pos[deg].push_back(a);
    }
    for (int deg : f.source->degrees()) f.f[deg] = chain::SparseMatrix(f.target->rank(deg), f.source->rank(deg));
    for (int g = 0; g < w->size(); ++g) {
        const LabeledTree& x = w->element(g);
        bool gamma = false;
        for (int v = 1; v < x.vertex_count(); ++v) gamma = gamma || x.marks[v] == kGamma;
        if (gamma) continue;
        for (const auto& [a, c] : evaluate(*p, x, w->space().word(x)))
            f.f[w->degree_of(g)].add(position[a], w->position_of(g), c);
    }
    return f;
}

chain::ChainMap delta_embedding(const std::shared_ptr<TreeComplex>& free, const std::shared_ptr<TreeComplex>& w) {
    chain::ChainMap f;
    f.source = free->complex();
    f.target = w->complex();
    for (int deg : f.source->degrees()) f.f[deg] = chain::SparseMatrix(f.target->rank(deg), f.source->rank(deg));
    for (int g = 0; g < free->size(); ++g) {
        const int h = w->find(free->element(g));
        if (h < 0) throw std::logic_error("delta: tree missing from W");
        f.f[free->degree_of(g)].set(w->position_of(h), free->position_of(g), 1);
    }
    return f;
}

chain::ChainMap free_counit(ChainOperadPtr p, const std::shared_ptr<TreeComplex>& free) {
    return w_augmentation(std::move(p), free);
}

Vec tree_compose(const TreeComplex& wx, int x, int i, const TreeComplex& wy, int y, const TreeComplex& target) {
    const LabeledTree& a = wx.element(x);
    const LabeledTree& b = wy.element(y);
    const auto g = trees::graft(a, i, b, kLengthOne);
    const auto wa = wx.space().word(a), wb = wy.space().word(b);
    // The tensor word of a followed by that of b.
    std::vector<Factor> concat;
    for (const Factor& f : wa) {
        const int v = f.key >= 0 ? f.key : ~f.key;
        concat.push_back({f.key >= 0 ? g.outer_map[v] : ~g.outer_map[v], f.degree});
    }
    for (const Factor& f : wb) {
        const int v = f.key >= 0 ? f.key : ~f.key;
        concat.push_back({f.key >= 0 ? g.inner_map[v] : ~g.inner_map[v], f.degree});
    }
    return target.collect({{g.tree, concat, 1}});
}

nlohmann::json w_element_json(const TreeComplex& w, int g) {
    const LabeledTree& x = w.element(g);
    nlohmann::json j;
    j["tree"] = w.name(g);
    j["degree"] = w.degree_of(g);
    std::vector<int> gamma;
    for (int v = 1; v < x.vertex_count(); ++v)
        if (x.marks[v] == kGamma) gamma.push_back(v);
    j["gamma_edges"] = gamma;
    std::vector<std::string> labels;
    for (int v = 0; v < x.vertex_count(); ++v)
        labels.push_back(w.space().labels().element_name(x.shape.valence(v), x.labels[v]));
    j["labels"] = labels;
    std::vector<int> leaves;
    for (int l : x.leaves) leaves.push_back(l + 1);
    j["leaf_coset"] = leaves;
    return j;
}

}  // namespace opw::chainop
