#include "opw/set_operads.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <omp.h>

#include "opw/errors.hpp"

namespace opw::setop {

using trees::kLeaf;
using trees::PlanarTree;
using trees::RawTree;

namespace {

std::string word_name(const Perm& w) {
    std::string s = "m";
    for (int x : w) s += std::to_string(x + 1);
    return s;
}

class AssOperad : public SetOperad {
  public:
    explicit AssOperad(int max_arity) : max_(max_arity) {}
    std::string name() const override { return "ass"; }
    int max_arity() const override { return max_; }
    int size(int n) const override { return n >= 1 && n <= max_ ? static_cast<int>(factorial(n)) : 0; }
    std::string element_name(int n, int a) const override { return word_name(perm_unrank(n, a)); }
    int unit() const override { return 0; }
    int compose(int n, int a, int i, int m, int b) const override {
        const Perm w = perm_unrank(n, a), v = perm_unrank(m, b);
        Perm r;
        for (int x : w) {
            if (x < i)
                r.push_back(x);
            else if (x == i)
                for (int y : v) r.push_back(y + i);
            else
                r.push_back(x + m - 1);
        }
        return static_cast<int>(perm_rank(r));
    }
    int act(int n, int a, const Perm& s) const override {
        const Perm w = perm_unrank(n, a), inv = inverse(s);
        Perm r(w.size());
        for (std::size_t p = 0; p < w.size(); ++p) r[p] = inv[w[p]];
        return static_cast<int>(perm_rank(r));
    }

  private:
    int max_;
};

class ComOperad : public SetOperad {
  public:
    explicit ComOperad(int max_arity) : max_(max_arity) {}
    std::string name() const override { return "com"; }
    int max_arity() const override { return max_; }
    int size(int n) const override { return n >= 1 && n <= max_ ? 1 : 0; }
    std::string element_name(int n, int) const override { return "c" + std::to_string(n); }
    int unit() const override { return 0; }
    int compose(int, int, int, int, int) const override { return 0; }
    int act(int, int a, const Perm&) const override { return a; }

  private:
    int max_;
};

class TrivialOperad : public SetOperad {
  public:
    explicit TrivialOperad(int max_arity) : max_(max_arity) {}
    std::string name() const override { return "trivial"; }
    int max_arity() const override { return max_; }
    int size(int n) const override { return n == 1 ? 1 : 0; }
    std::string element_name(int, int) const override { return "1"; }
    int unit() const override { return 0; }
    int compose(int, int, int, int, int) const override { return 0; }
    int act(int, int a, const Perm&) const override { return a; }

  private:
    int max_;
};

Perm parse_perm(const std::string& s, int n) {
    std::istringstream is(s);
    Perm p;
    int x;
    while (is >> x) p.push_back(x - 1);
    if (!is.eof() || static_cast<int>(p.size()) != n || !is_perm(p))
        throw InputError("operad JSON: bad permutation '" + s + "' for arity " + std::to_string(n));
    return p;
}

class TableOperad : public SetOperad {
  public:
    explicit TableOperad(const nlohmann::json& j) {
        try {
            name_ = j.value("name", std::string("custom"));
            symmetric_ = j.value("symmetric", true);
            for (const auto& [key, list] : j.at("arities").items()) {
                const int n = std::stoi(key);
                if (n < 0 || n > 8) throw InputError("operad JSON: arity out of range: " + key);
                if (static_cast<int>(names_.size()) <= n) names_.resize(n + 1);
                names_[n] = list.get<std::vector<std::string>>();
            }
            for (int n = 0; n < static_cast<int>(names_.size()); ++n)
                for (int a = 0; a < static_cast<int>(names_[n].size()); ++a)
                    if (!where_.emplace(names_[n][a], std::make_pair(n, a)).second)
                        throw InputError("operad JSON: duplicate element name " + names_[n][a]);
            auto [un, ua] = lookup(j.at("unit").get<std::string>());
            if (un != 1) throw InputError("operad JSON: unit must have arity 1");
            unit_ = ua;
            if (j.contains("compose"))
                for (const auto& [key, value] : j.at("compose").items()) {
                    std::istringstream is(key);
                    std::string a, op, b, extra;
                    is >> a >> op >> b;
                    if (a.empty() || b.empty() || op.size() < 2 || op[0] != 'o' || (is >> extra))
                        throw InputError("operad JSON: bad composition key '" + key + "'");
                    const int i = std::stoi(op.substr(1)) - 1;
                    auto [n, x] = lookup(a);
                    auto [m, y] = lookup(b);
                    auto [r, z] = lookup(value.get<std::string>());
                    if (i < 0 || i >= n) throw InputError("operad JSON: input out of range in '" + key + "'");
                    if (r != n + m - 1) throw InputError("operad JSON: wrong arity for '" + key + "'");
                    compose_[{n, x, i, m, y}] = z;
                }
            std::map<std::pair<int, int>, std::vector<std::pair<Perm, int>>> given;
            if (j.contains("actions"))
                for (const auto& [elem, table] : j.at("actions").items()) {
                    auto [n, x] = lookup(elem);
                    for (const auto& [perm, value] : table.items()) {
                        auto [r, z] = lookup(value.get<std::string>());
                        if (r != n) throw InputError("operad JSON: action changes arity for " + elem);
                        given[{n, x}].emplace_back(parse_perm(perm, n), z);
                    }
                }
            close_actions(given);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("operad JSON: ") + e.what());
        } catch (const std::invalid_argument&) {
            throw InputError("operad JSON: bad arity or input index");
        }
    }

    std::string name() const override { return name_; }
    bool symmetric() const override { return symmetric_; }
    int max_arity() const override { return static_cast<int>(names_.size()) - 1; }
    int size(int n) const override {
        return n >= 0 && n < static_cast<int>(names_.size()) ? static_cast<int>(names_[n].size()) : 0;
    }
    std::string element_name(int n, int a) const override { return names_.at(n).at(a); }
    int unit() const override { return unit_; }
    int compose(int n, int a, int i, int m, int b) const override {
        auto it = compose_.find({n, a, i, m, b});
        if (it == compose_.end())
            throw InputError("missing composition " + element_name(n, a) + " o" + std::to_string(i + 1) + " " +
                             element_name(m, b));
        return it->second;
    }
    int act(int n, int a, const Perm& s) const override {
        if (s == identity_perm(n)) return a;
        auto it = act_.find({n, a, perm_rank(s)});
        if (it == act_.end()) throw InputError("missing action on " + element_name(n, a) + " by " + perm_to_string(s));
        return it->second;
    }

  private:
    std::pair<int, int> lookup(const std::string& name) const {
        auto it = where_.find(name);
        if (it == where_.end()) throw InputError("operad JSON: unknown element " + name);
        return it->second;
    }

    // a.(s t) = (a.s).t, starting from the listed entries.
    void close_actions(const std::map<std::pair<int, int>, std::vector<std::pair<Perm, int>>>& given) {
        for (int n = 0; n < static_cast<int>(names_.size()); ++n)
            for (int a = 0; a < static_cast<int>(names_[n].size()); ++a) {
                std::map<std::int64_t, int> known{{perm_rank(identity_perm(n)), a}};
                std::vector<std::pair<Perm, int>> todo{{identity_perm(n), a}};
                while (!todo.empty()) {
                    auto [s, b] = todo.back();
                    todo.pop_back();
                    auto it = given.find({n, b});
                    if (it == given.end()) continue;
                    for (const auto& [t, c] : it->second) {
                        const Perm st = opw::compose(s, t);
                        auto [pos, fresh] = known.emplace(perm_rank(st), c);
                        if (!fresh && pos->second != c)
                            throw InputError("operad JSON: inconsistent actions on " + names_[n][a]);
                        if (fresh) todo.emplace_back(st, c);
                    }
                }
                for (const auto& [rank, b] : known) act_[{n, a, rank}] = b;
            }
    }

    std::string name_;
    bool symmetric_ = true;
    std::vector<std::vector<std::string>> names_;
    std::map<std::string, std::pair<int, int>> where_;
    int unit_ = 0;
    std::map<std::tuple<int, int, int, int, int>, int> compose_;
    std::map<std::tuple<int, int, std::int64_t>, int> act_;
};

}  // namespace

OperadPtr make_ass(int max_arity) { return std::make_shared<AssOperad>(max_arity); }
OperadPtr make_com(int max_arity) { return std::make_shared<ComOperad>(max_arity); }
OperadPtr make_trivial(int max_arity) { return std::make_shared<TrivialOperad>(max_arity); }
OperadPtr operad_from_json(const nlohmann::json& j) { return std::make_shared<TableOperad>(j); }

OperadPtr builtin_operad(const std::string& name) {
    if (name == "ass") return make_ass();
    if (name == "com") return make_com();
    if (name == "trivial") return make_trivial();
    throw InputError("unknown built-in set operad '" + name + "' (expected ass, com or trivial)");
}

TableCollection::TableCollection(std::string name, std::vector<std::vector<std::string>> elements, int base)
    : name_(std::move(name)), elements_(std::move(elements)), base_(base) {
    if (elements_.size() < 2 || base_ < 0 || base_ >= static_cast<int>(elements_[1].size()))
        throw InputError("collection: base point must be an element of arity 1");
}

int TableCollection::size(int n) const {
    return n >= 0 && n < static_cast<int>(elements_.size()) ? static_cast<int>(elements_[n].size()) : 0;
}

int TableCollection::act(int n, int a, const Perm& s) const {
    auto it = actions.find({a, s});
    (void)n;
    return it == actions.end() ? a : it->second;
}

std::vector<std::string> validate_operad(const SetOperad& p, int arity_bound) {
    std::vector<std::string> out;
    auto guard = [&](const std::string& what, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            out.push_back(what + ": " + e.what());
        }
    };
    const int bound = std::min(arity_bound, p.max_arity());
    auto nm = [&](int n, int a) { return p.element_name(n, a); };
    auto cmp = [&](int n, int a, int i, int m, int b) {
        return nm(n, a) + " o" + std::to_string(i + 1) + " " + nm(m, b);
    };
    const int u = p.unit();
    for (int n = 0; n <= bound; ++n)
        for (int a = 0; a < p.size(n); ++a) {
            guard("unit", [&] {
                if (n >= 1 && p.compose(1, u, 0, n, a) != a) out.push_back("left unit: " + cmp(1, u, 0, n, a));
                for (int i = 0; i < n; ++i)
                    if (p.compose(n, a, i, 1, u) != a) out.push_back("right unit: " + cmp(n, a, i, 1, u));
            });
            if (!p.symmetric()) continue;
            guard("action", [&] {
                if (p.act(n, a, identity_perm(n)) != a) out.push_back("identity action: " + nm(n, a));
                const auto perms = all_perms(n);
                for (const auto& s : perms) {
                    const int as = p.act(n, a, s);
                    if (as < 0 || as >= p.size(n)) {
                        out.push_back("action out of range: " + nm(n, a));
                        continue;
                    }
                    for (const auto& t : perms)
                        if (p.act(n, as, t) != p.act(n, a, compose(s, t)))
                            out.push_back("action is not a right action: " + nm(n, a) + " by " + perm_to_string(s) +
                                          " then " + perm_to_string(t));
                }
            });
        }
    for (int n = 1; n <= bound; ++n)
        for (int m = 0; n + m - 1 <= bound; ++m)
            for (int a = 0; a < p.size(n); ++a)
                for (int b = 0; b < p.size(m); ++b)
                    for (int i = 0; i < n; ++i) {
                        guard("composition " + cmp(n, a, i, m, b), [&] {
                            const int ab = p.compose(n, a, i, m, b);
                            if (ab < 0 || ab >= p.size(n + m - 1)) {
                                out.push_back("composition out of range: " + cmp(n, a, i, m, b));
                                return;
                            }
                            for (int l = 0; n + m + l - 2 <= bound; ++l)
                                for (int c = 0; c < p.size(l); ++c) {
                                    for (int j = 0; j < m; ++j)
                                        if (p.compose(n + m - 1, ab, i + j, l, c) !=
                                            p.compose(n, a, i, m + l - 1, p.compose(m, b, j, l, c)))
                                            out.push_back("sequential associativity: (" + cmp(n, a, i, m, b) + ") o" +
                                                          std::to_string(i + j + 1) + " " + nm(l, c));
                                    for (int j = i + 1; j < n; ++j)
                                        if (p.compose(n + m - 1, ab, j + m - 1, l, c) !=
                                            p.compose(n + l - 1, p.compose(n, a, j, l, c), i, m, b))
                                            out.push_back("parallel associativity: (" + cmp(n, a, i, m, b) + ") o" +
                                                          std::to_string(j + m) + " " + nm(l, c));
                                }
                            if (!p.symmetric()) return;
                            // Equivariance against the leaf-numbered reading of grafted corollas.
                            for (const auto& s : all_perms(n)) {
                                LabeledTree x = LabeledTree::corolla(n, a);
                                x.leaves = inverse(s);
                                const auto g = trees::graft(x, i, LabeledTree::corolla(m, b), 0).tree;
                                if (p.compose(n, p.act(n, a, s), i, m, b) != evaluate(p, g))
                                    out.push_back("equivariance in the first argument: " + cmp(n, a, i, m, b) +
                                                  " with " + perm_to_string(s));
                            }
                            for (const auto& t : all_perms(m)) {
                                LabeledTree y = LabeledTree::corolla(m, b);
                                y.leaves = inverse(t);
                                const auto g = trees::graft(LabeledTree::corolla(n, a), i, y, 0).tree;
                                if (p.compose(n, a, i, m, p.act(m, b, t)) != evaluate(p, g))
                                    out.push_back("equivariance in the second argument: " + cmp(n, a, i, m, b) +
                                                  " with " + perm_to_string(t));
                            }
                        });
                    }
    return out;
}

int evaluate(const SetOperad& p, const LabeledTree& x) {
    const PlanarTree& t = x.shape;
    if (t.is_unit()) return p.unit();
    auto rec = [&](auto&& self, int v) -> int {
        int value = x.labels[v];
        int arity = t.valence(v);
        for (int s = t.valence(v) - 1; s >= 0; --s) {
            const int c = t.inputs(v)[s];
            if (c == kLeaf) continue;
            const int sub = self(self, c);
            value = p.compose(arity, value, s, t.subtree_arity(c), sub);
            arity += t.subtree_arity(c) - 1;
        }
        return value;
    };
    const int planar = rec(rec, 0);
    if (!p.symmetric()) return planar;
    return p.act(t.arity(), planar, inverse(x.leaves));
}

trees::LabelAction label_action(const PointedCollection& k) {
    if (!k.symmetric()) return {};
    return [&k](int valence, int label, const Perm& tau) { return trees::Twist{k.act(valence, label, tau), 1}; };
}

void ElementTable::assign(std::vector<LabeledTree> elements) {
    elements_ = std::move(elements);
    index_.clear();
    for (int i = 0; i < size(); ++i) index_.emplace(elements_[i].encoding(), i);
}

int ElementTable::find(const LabeledTree& canonical) const {
    auto it = index_.find(canonical.encoding());
    return it == index_.end() ? -1 : it->second;
}

bool finitely_enumerable(const PointedCollection& k) { return k.size(0) == 0 && k.size(1) <= 1; }

namespace {

struct ShapeJob {
    PlanarTree shape;
    std::vector<std::vector<int>> labels;  // candidate labels per vertex
    std::int64_t count = 0;
};

std::vector<LabeledTree> enumerate_impl(const PointedCollection& k, const std::vector<int>& marks, int n, int cap,
                                        bool parallel) {
    const bool finite = finitely_enumerable(k);
    if (cap < 0 && !finite)
        throw Refusal("the set of trees labeled by " + k.name() +
                      " is infinite in each arity (nullary or extra unary elements); give a vertex cap");
    int min_valence = 2;
    if (k.size(0) > 0)
        min_valence = 0;
    else if (k.size(1) > 1)
        min_valence = 1;
    const int max_edges = cap < 0 ? -1 : std::max(cap - 1, 0);
    std::vector<PlanarTree> shapes;
    if (k.symmetric()) {
        for (const auto& c : trees::iso_classes(n, max_edges, min_valence)) shapes.push_back(c.representative);
    } else {
        shapes = trees::enumerate_planar(n, max_edges, min_valence);
    }
    const int n_marks = static_cast<int>(marks.size());
    const std::int64_t n_leaves = k.symmetric() ? factorial(n) : 1;
    std::vector<ShapeJob> jobs;
    for (const auto& t : shapes) {
        if (cap >= 0 && t.vertex_count() > cap) continue;
        if (t.edge_count() > 0 && n_marks == 0) continue;
        ShapeJob job{t, {}, 1};
        bool ok = true;
        for (int v = 0; v < t.vertex_count() && ok; ++v) {
            const int val = t.valence(v);
            std::vector<int> options;
            for (int a = 0; a < k.size(val); ++a)
                if (!(val == 1 && a == k.base())) options.push_back(a);
            ok = !options.empty();
            job.count *= static_cast<std::int64_t>(options.size());
            job.labels.push_back(std::move(options));
        }
        if (!ok) continue;
        for (int e = 0; e < t.edge_count(); ++e) job.count *= n_marks;
        job.count *= n_leaves;
        jobs.push_back(std::move(job));
    }
    std::vector<std::int64_t> start{0};
    for (const auto& j : jobs) start.push_back(start.back() + j.count);
    const std::int64_t total = start.back();
    const auto act = label_action(k);

    auto make = [&](std::int64_t g) -> std::optional<LabeledTree> {
        const auto it = std::upper_bound(start.begin(), start.end(), g) - 1;
        const ShapeJob& job = jobs[it - start.begin()];
        std::int64_t r = g - *it;
        LabeledTree x;
        x.shape = job.shape;
        const int nv = job.shape.vertex_count();
        x.labels.resize(nv);
        x.marks.assign(nv, 0);
        int weight = 0;
        for (int v = 0; v < nv; ++v) {
            const auto& opts = job.labels[v];
            x.labels[v] = opts[r % static_cast<std::int64_t>(opts.size())];
            r /= static_cast<std::int64_t>(opts.size());
            weight += k.weight(job.shape.valence(v), x.labels[v]);
        }
        if (cap >= 0 && weight > cap) return std::nullopt;
        for (int v = 1; v < nv; ++v) {
            x.marks[v] = marks[r % n_marks];
            r /= n_marks;
        }
        x.leaves = k.symmetric() ? perm_unrank(n, r) : identity_perm(n);
        if (job.shape.is_unit()) x.leaves = {0};
        if (!k.symmetric()) return x;
        return trees::canonicalize(x, act).tree;
    };

    std::map<std::vector<std::int64_t>, LabeledTree> found;
    if (parallel) {
        std::vector<std::map<std::vector<std::int64_t>, LabeledTree>> local(omp_get_max_threads());
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t g = 0; g < total; ++g) {
            if (auto x = make(g)) {
                auto enc = x->encoding();
                local[omp_get_thread_num()].emplace(std::move(enc), std::move(*x));
            }
        }
        for (auto& m : local) found.merge(m);
    } else {
        for (std::int64_t g = 0; g < total; ++g)
            if (auto x = make(g)) found.emplace(x->encoding(), std::move(*x));
    }
    std::vector<LabeledTree> out;
    for (auto& [enc, x] : found) out.push_back(std::move(x));
    std::stable_sort(out.begin(), out.end(),
                     [](const LabeledTree& a, const LabeledTree& b) { return a.vertex_count() < b.vertex_count(); });
    return out;
}

}  // namespace

std::vector<LabeledTree> enumerate_trees(const PointedCollection& k, const std::vector<int>& marks, int n, int cap) {
    return enumerate_impl(k, marks, n, cap, true);
}

std::vector<LabeledTree> enumerate_trees_serial(const PointedCollection& k, const std::vector<int>& marks, int n,
                                                int cap) {
    return enumerate_impl(k, marks, n, cap, false);
}

TreeOperad::TreeOperad(CollectionPtr labels, std::vector<int> marks, int new_mark, int max_arity, int cap)
    : labels_(std::move(labels)), marks_(std::move(marks)), new_mark_(new_mark), max_arity_(max_arity), cap_(cap) {}

void TreeOperad::build_tables() {
    tables_.resize(max_arity_ + 1);
    const bool finite = finitely_enumerable(*labels_);
    for (int n = 0; n <= max_arity_; ++n) {
        tables_[n].assign(enumerate_trees(*labels_, marks_, n, cap_));
        if (cap_ >= 0 && !truncated_)
            truncated_ = !finite || enumerate_trees(*labels_, marks_, n, -1).size() != tables_[n].elements().size();
    }
}

const ElementTable& TreeOperad::table(int n) const {
    if (n < 0 || n > max_arity_)
        throw Refusal("arity " + std::to_string(n) + " is beyond the tabulated bound " + std::to_string(max_arity_));
    return tables_[n];
}

std::string TreeOperad::tree_name(const LabeledTree& x) const {
    return trees::to_string(
        x, [&](int v) { return labels_->element_name(x.shape.valence(v), x.labels[v]); },
        [&](int v) { return mark_name(x.marks[v]); });
}

std::string TreeOperad::element_name(int n, int a) const { return tree_name(table(n)[a]); }

int TreeOperad::unit() const { return table(1).find(LabeledTree::unit()); }

LabeledTree TreeOperad::finish(const LabeledTree& raw) const {
    if (!labels_->symmetric()) return raw;
    return trees::canonicalize(raw, label_action(*labels_)).tree;
}

int TreeOperad::compose(int n, int a, int i, int m, int b) const {
    const auto g = trees::graft(table(n)[a], i, table(m)[b], new_mark_).tree;
    const int r = table(n + m - 1).find(finish(g));
    if (r < 0) throw Refusal("composite " + element_name(n, a) + " o" + std::to_string(i + 1) + " " +
                             element_name(m, b) + " lies beyond the cap");
    return r;
}

int TreeOperad::act(int n, int a, const Perm& s) const {
    const int r = table(n).find(finish(trees::act_on_leaves(table(n)[a], s)));
    if (r < 0) throw std::logic_error("TreeOperad::act: orbit left the table");
    return r;
}

int TreeOperad::weight(int n, int a) const {
    const auto& x = table(n)[a];
    int w = 0;
    for (int v = 0; v < x.vertex_count(); ++v) w += labels_->weight(x.shape.valence(v), x.labels[v]);
    return w;
}

FreeOperad::FreeOperad(CollectionPtr k, int max_arity, int cap) : TreeOperad(std::move(k), {1}, 1, max_arity, cap) {
    build_tables();
}

std::string FreeOperad::name() const { return "F*(" + labels_->name() + ")"; }

int FreeOperad::counit(int n, int a) const {
    const auto* q = dynamic_cast<const SetOperad*>(labels_.get());
    if (!q) throw std::logic_error("FreeOperad::counit: labels do not form an operad");
    return evaluate(*q, table(n)[a]);
}

std::vector<Redex> redexes(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& x) {
    std::vector<Redex> out;
    const PlanarTree& t = x.shape;
    for (int v = 0; v < t.vertex_count(); ++v) {
        if (v > 0 && x.marks[v] == h.zero) out.push_back({Rule::ContractZero, v});
        if (t.valence(v) == 1 && x.labels[v] == p.unit()) {
            const bool external = v == 0 || t.inputs(v)[0] == kLeaf;
            out.push_back({external ? Rule::DropUnit : Rule::JoinUnit, v});
        }
    }
    return out;
}

LabeledTree rewrite(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& x, const Redex& r) {
    const PlanarTree& t = x.shape;
    RawTree raw = trees::to_raw(x);
    const int v = r.vertex;
    switch (r.rule) {
        case Rule::ContractZero: {
            const int parent = t.parent(v), slot = t.input_position(v);
            raw.labels[parent] = p.compose(t.valence(parent), x.labels[parent], slot, t.valence(v), x.labels[v]);
            auto& ins = raw.inputs[parent];
            std::vector<int> spliced(ins.begin(), ins.begin() + slot);
            spliced.insert(spliced.end(), raw.inputs[v].begin(), raw.inputs[v].end());
            spliced.insert(spliced.end(), ins.begin() + slot + 1, ins.end());
            ins = std::move(spliced);
            break;
        }
        case Rule::JoinUnit: {
            const int child = t.inputs(v)[0];
            raw.marks[child] = h(x.marks[v], x.marks[child]);
            raw.inputs[t.parent(v)][t.input_position(v)] = child;
            break;
        }
        case Rule::DropUnit: {
            if (v == 0)
                raw.root = raw.inputs[0][0];
            else
                raw.inputs[t.parent(v)][t.input_position(v)] = raw.inputs[v][0];
            break;
        }
    }
    return trees::build(raw).tree;
}

LabeledTree normalize_raw(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& raw) {
    LabeledTree x = raw;
    for (;;) {
        const auto rs = redexes(p, h, x);
        if (rs.empty()) return x;
        std::vector<int> depth(x.vertex_count(), 0);
        for (int v = 1; v < x.vertex_count(); ++v) depth[v] = depth[x.shape.parent(v)] + 1;
        const Redex* pick = &rs[0];
        for (const auto& r : rs)
            if (depth[r.vertex] > depth[pick->vertex]) pick = &r;
        x = rewrite(p, h, x, *pick);
    }
}

LabeledTree normalize(const SetOperad& p, const seg::FiniteSegment& h, const LabeledTree& raw) {
    const LabeledTree x = normalize_raw(p, h, raw);
    if (!p.symmetric()) return x;
    return trees::canonicalize(x, label_action(p)).tree;
}

namespace {

std::vector<int> nonzero_marks(const seg::FiniteSegment& h) {
    std::vector<int> m;
    for (int x = 0; x < h.size(); ++x)
        if (x != h.zero) m.push_back(x);
    return m;
}

}  // namespace

WOperad::WOperad(OperadPtr p, seg::FiniteSegment h, int max_arity, int cap)
    : TreeOperad(p, nonzero_marks(h), h.one, max_arity, cap), p_(std::move(p)), h_(std::move(h)) {
    if (!seg::segment_check(h_).empty()) throw InputError("W-construction needs a valid segment");
    build_tables();
}

std::string WOperad::name() const { return "W(" + std::to_string(h_.size()) + "," + p_->name() + ")"; }

LabeledTree WOperad::finish(const LabeledTree& raw) const { return normalize(*p_, h_, raw); }

int WOperad::augmentation(int n, int a) const { return evaluate(*p_, table(n)[a]); }

LabeledTree w_segment_map(const SetOperad& p, const seg::FiniteSegment& k, const seg::SegmentMap& f,
                          const LabeledTree& x) {
    LabeledTree y = x;
    for (int v = 1; v < y.vertex_count(); ++v) y.marks[v] = f.at(y.marks[v]);
    return normalize(p, k, y);
}

void Comparison::fail(const std::string& why) {
    status = "fail";
    if (failures.size() < 20) failures.push_back(why);
}

nlohmann::json Comparison::to_json() const {
    nlohmann::json j;
    j["status"] = status;
    j["truncated"] = truncated;
    j["counts"] = counts;
    j["bijection"] = nlohmann::json::array();
    for (const auto& [a, b] : bijection) j["bijection"].push_back({a, b});
    j["failures"] = failures;
    return j;
}

namespace {

// Marks a comparison inconclusive instead of failed when a cap cut it short.
template <class F>
void checked(Comparison& c, const std::string& what, F&& body) {
    try {
        body();
    } catch (const Refusal& e) {
        if (c.truncated) {
            if (c.status == "iso") c.status = "inconclusive";
        } else {
            c.fail(what + ": " + e.what());
        }
    }
}

}  // namespace

Comparison compare_free(OperadPtr p, int n, int cap) {
    Comparison c;
    auto w = std::make_shared<WOperad>(p, seg::chain_segment(1), n, cap);
    auto f = std::make_shared<FreeOperad>(p, n, cap);
    c.truncated = w->truncated() || f->truncated();
    const auto terminal = seg::chain_segment(0);
    for (int m = 0; m <= n; ++m) {
        const auto& tw = w->table(m);
        const auto& tf = f->table(m);
        c.counts["W(" + std::to_string(m) + ")"] = tw.size();
        c.counts["F(" + std::to_string(m) + ")"] = tf.size();
        if (tw.size() != tf.size()) c.fail("cardinality differs in arity " + std::to_string(m));
        for (int a = 0; a < tf.size(); ++a) {
            const int image = tw.find(tf[a]);
            if (image < 0) {
                c.fail("no W element for " + f->element_name(m, a));
                continue;
            }
            if (m == n) c.bijection.emplace_back(f->element_name(m, a), w->element_name(m, image));
            checked(c, "augmentation", [&] {
                if (w->augmentation(m, image) != f->counit(m, a))
                    c.fail("augmentation differs on " + f->element_name(m, a));
                const auto collapsed = w_segment_map(*p, terminal, seg::to_terminal(seg::chain_segment(1)), tw[image]);
                if (evaluate(*p, collapsed) != f->counit(m, a))
                    c.fail("codiagonal differs from the counit on " + f->element_name(m, a));
            });
        }
    }
    for (int a = 1; a <= n; ++a)
        for (int b = 0; a + b - 1 <= n; ++b)
            for (int x = 0; x < f->size(a); ++x)
                for (int y = 0; y < f->size(b); ++y)
                    for (int i = 0; i < a; ++i)
                        checked(c, "composition", [&] {
                            const int fx = f->compose(a, x, i, b, y);
                            const int wx = w->compose(a, w->table(a).find(f->table(a)[x]), i, b,
                                                      w->table(b).find(f->table(b)[y]));
                            if (w->table(a + b - 1).find(f->table(a + b - 1)[fx]) != wx)
                                c.fail("composition differs: " + f->element_name(a, x) + " o" + std::to_string(i + 1) +
                                       " " + f->element_name(b, y));
                        });
    return c;
}

Comparison w_diamond_compare(OperadPtr p, const seg::FiniteSegment& h, int n, int cap) {
    Comparison c;
    const auto hd = seg::diamond(h);
    const int star = hd.one;
    auto wh = std::make_shared<WOperad>(p, h, n, cap);
    auto wd = std::make_shared<WOperad>(p, hd, n, cap);
    auto fw = std::make_shared<FreeOperad>(wh, n, cap);
    c.truncated = wh->truncated() || wd->truncated() || fw->truncated();
    const auto collapse = seg::diamond_collapse(h);
    // Flatten: substitute each label's tree, outer edges get the new element.
    auto psi = [&](int m, int a) {
        LabeledTree x = fw->table(m)[a];
        std::vector<LabeledTree> inner;
        for (int v = 0; v < x.vertex_count(); ++v) {
            inner.push_back(wh->table(x.shape.valence(v))[x.labels[v]]);
            x.marks[v] = star;
        }
        return wd->finish(trees::substitute(x, inner).tree);
    };
    std::vector<std::vector<int>> image(n + 1);
    for (int m = 0; m <= n; ++m) {
        const auto& td = wd->table(m);
        c.counts["W(H',P)(" + std::to_string(m) + ")"] = td.size();
        c.counts["F(W(H,P))(" + std::to_string(m) + ")"] = fw->size(m);
        std::set<int> hit;
        for (int a = 0; a < fw->size(m); ++a) {
            const int d = td.find(psi(m, a));
            image[m].push_back(d);
            if (d < 0) {
                if (c.truncated) {
                    if (c.status == "iso") c.status = "inconclusive";
                } else {
                    c.fail("flattening leaves W(H',P) at " + fw->element_name(m, a));
                }
                continue;
            }
            if (!hit.insert(d).second) c.fail("flattening is not injective at " + fw->element_name(m, a));
            if (m == n) c.bijection.emplace_back(fw->element_name(m, a), wd->element_name(m, d));
            checked(c, "collapse", [&] {
                const auto collapsed = w_segment_map(*p, h, collapse, td[d]);
                if (wh->table(m).find(collapsed) != fw->counit(m, a))
                    c.fail("collapse differs from the counit on " + fw->element_name(m, a));
            });
        }
        if (static_cast<int>(hit.size()) != td.size()) {
            if (c.truncated) {
                if (c.status == "iso") c.status = "inconclusive";
            } else {
                c.fail("flattening is not surjective in arity " + std::to_string(m));
            }
        }
    }
    for (int a = 1; a <= n; ++a)
        for (int b = 0; a + b - 1 <= n; ++b)
            for (int x = 0; x < fw->size(a); ++x)
                for (int y = 0; y < fw->size(b); ++y)
                    for (int i = 0; i < a; ++i) {
                        if (image[a][x] < 0 || image[b][y] < 0) continue;
                        checked(c, "composition", [&] {
                            const int fx = fw->compose(a, x, i, b, y);
                            const int dx = wd->compose(a, image[a][x], i, b, image[b][y]);
                            if (image[a + b - 1][fx] != dx)
                                c.fail("composition differs: " + fw->element_name(a, x) + " o" +
                                       std::to_string(i + 1) + " " + fw->element_name(b, y));
                        });
                    }
    return c;
}

Godement::Godement(OperadPtr p, int max_level, int max_arity) : p_(std::move(p)) {
    if (!finitely_enumerable(*p_))
        throw Refusal("the Godement resolution is tabulated only for operads with P(0) empty and P(1) = {unit}");
    CollectionPtr below = p_;
    for (int k = 0; k <= max_level; ++k) {
        auto level = std::make_shared<FreeOperad>(below, max_arity);
        levels_.push_back(level);
        below = level;
    }
}

const SetOperad& Godement::level(int k) const {
    if (k == -1) return *p_;
    return *levels_.at(k);
}

LabeledTree Godement::map_labels(int, const LabeledTree& x, const std::vector<int>& new_labels,
                                 int label_level) const {
    const SetOperad& lab = level(label_level);
    RawTree raw = trees::to_raw(x);
    raw.labels = new_labels;
    // Unary vertices whose label became the base point are deleted.
    std::vector<char> gone(x.vertex_count(), 0);
    for (int v = 0; v < x.vertex_count(); ++v)
        gone[v] = x.shape.valence(v) == 1 && new_labels[v] == lab.base();
    auto resolve = [&](auto&& self, int c) -> int {
        if (c < 0 || !gone[c]) return c;
        return self(self, raw.inputs[c][0]);
    };
    for (int v = 0; v < x.vertex_count(); ++v)
        for (int& c : raw.inputs[v]) c = resolve(resolve, c);
    raw.root = resolve(resolve, raw.root);
    return trees::canonicalize(trees::build(raw).tree, label_action(lab)).tree;
}

int Godement::face(int k, int i, int n, int a) const {
    if (k < 0 || i < 0 || i > k) throw InputError("face index out of range");
    if (i == k) return levels_.at(k)->counit(n, a);
    const LabeledTree& x = levels_.at(k)->table(n)[a];
    std::vector<int> labels(x.vertex_count());
    for (int v = 0; v < x.vertex_count(); ++v) labels[v] = face(k - 1, i, x.shape.valence(v), x.labels[v]);
    const int r = levels_.at(k - 1)->table(n).find(map_labels(k, x, labels, k - 2));
    if (r < 0) throw std::logic_error("Godement::face: image not tabulated");
    return r;
}

int Godement::degeneracy(int k, int i, int n, int a) const {
    if (k < 0 || i < 0 || i > k) throw InputError("degeneracy index out of range");
    if (k + 1 > max_level()) throw Refusal("degeneracy needs level " + std::to_string(k + 1));
    const LabeledTree& x = levels_.at(k)->table(n)[a];
    std::vector<int> labels(x.vertex_count());
    for (int v = 0; v < x.vertex_count(); ++v) {
        const int val = x.shape.valence(v);
        if (i == k) {
            const auto wrapped = trees::canonicalize(LabeledTree::corolla(val, x.labels[v]), label_action(level(k - 1)));
            labels[v] = levels_.at(k)->table(val).find(wrapped.tree);
        } else {
            labels[v] = degeneracy(k - 1, i, val, x.labels[v]);
        }
    }
    const int r = levels_.at(k + 1)->table(n).find(map_labels(k, x, labels, k));
    if (r < 0) throw std::logic_error("Godement::degeneracy: image not tabulated");
    return r;
}

int Godement::augmentation(int k, int n, int a) const {
    for (int j = k; j >= 0; --j) a = face(j, 0, n, a);
    return a;
}

LabeledTree Godement::flatten(int k, int n, int a) const {
    if (k == -1) {
        if (n == 1 && a == p_->unit()) return LabeledTree::unit();
        return LabeledTree::corolla(n, a);
    }
    LabeledTree x = levels_.at(k)->table(n)[a];
    std::vector<LabeledTree> inner;
    for (int v = 0; v < x.vertex_count(); ++v) {
        inner.push_back(flatten(k - 1, x.shape.valence(v), x.labels[v]));
        x.marks[v] = k + 1;
    }
    return trees::canonicalize(trees::substitute(x, inner).tree, label_action(*p_)).tree;
}

Comparison compare_godement_w(OperadPtr p, int k, int n) {
    Comparison c;
    if (k < 0) throw InputError("level must be non-negative");
    Godement g(p, k + 1, n);
    std::vector<std::shared_ptr<WOperad>> w;
    for (int j = 0; j <= k + 1; ++j) w.push_back(std::make_shared<WOperad>(p, seg::delta1_level(j), n));
    // phi[j][m][a]: index in W(delta1_level(j), P)(m) of the flattened element.
    std::vector<std::vector<std::vector<int>>> phi(k + 2, std::vector<std::vector<int>>(n + 1));
    for (int j = 0; j <= k + 1; ++j)
        for (int m = 0; m <= n; ++m) {
            const auto& tw = w[j]->table(m);
            std::set<int> hit;
            for (int a = 0; a < g.level(j).size(m); ++a) {
                const int d = tw.find(g.flatten(j, m, a));
                phi[j][m].push_back(d);
                if (d < 0 || !hit.insert(d).second) c.fail("level " + std::to_string(j) + ": flattening is not injective into W at " + g.level(j).element_name(m, a));
                if (j == k && m == n && d >= 0)
                    c.bijection.emplace_back(g.level(j).element_name(m, a), w[j]->element_name(m, d));
            }
            if (static_cast<int>(hit.size()) != tw.size())
                c.fail("level " + std::to_string(j) + ": cardinalities differ in arity " + std::to_string(m));
            c.counts["G" + std::to_string(j) + "(" + std::to_string(m) + ")"] = g.level(j).size(m);
            c.counts["W" + std::to_string(j) + "(" + std::to_string(m) + ")"] = tw.size();
        }
    if (c.status != "iso") return c;

    // Simplicial operators on the W side, indexed like the Godement ones: the
    // Godement face d_i corresponds to precomposition with the coface missing k-i.
    auto w_face = [&](int j, int i, int m, int a) {
        const auto y = w_segment_map(*p, seg::delta1_level(j - 1), seg::delta1_face(j, j - i), w[j]->table(m)[a]);
        return w[j - 1]->table(m).find(y);
    };
    auto w_degeneracy = [&](int j, int i, int m, int a) {
        const auto y =
            w_segment_map(*p, seg::delta1_level(j + 1), seg::delta1_degeneracy(j, j - i), w[j]->table(m)[a]);
        return w[j + 1]->table(m).find(y);
    };
    auto tag = [](const std::string& what, int j, int i, int m, int a) {
        return what + " level " + std::to_string(j) + " index " + std::to_string(i) + " arity " + std::to_string(m) +
               " element " + std::to_string(a);
    };
    for (int m = 0; m <= n; ++m) {
        for (int j = 1; j <= k + 1; ++j)
            for (int a = 0; a < g.level(j).size(m); ++a)
                for (int i = 0; i <= j; ++i)
                    if (phi[j - 1][m][g.face(j, i, m, a)] != w_face(j, i, m, phi[j][m][a]))
                        c.fail(tag("face", j, i, m, a));
        for (int j = 0; j <= k; ++j)
            for (int a = 0; a < g.level(j).size(m); ++a)
                for (int i = 0; i <= j; ++i)
                    if (phi[j + 1][m][g.degeneracy(j, i, m, a)] != w_degeneracy(j, i, m, phi[j][m][a]))
                        c.fail(tag("degeneracy", j, i, m, a));
        for (int j = 0; j <= k + 1; ++j)
            for (int a = 0; a < g.level(j).size(m); ++a)
                if (w[j]->augmentation(m, phi[j][m][a]) != g.augmentation(j, m, a)) c.fail(tag("augmentation", j, 0, m, a));
    }
    // Composition at every tabulated level.
    for (int j = 0; j <= k + 1; ++j)
        for (int a = 1; a <= n; ++a)
            for (int b = 0; a + b - 1 <= n; ++b)
                for (int x = 0; x < g.level(j).size(a); ++x)
                    for (int y = 0; y < g.level(j).size(b); ++y)
                        for (int i = 0; i < a; ++i)
                            if (phi[j][a + b - 1][g.level(j).compose(a, x, i, b, y)] !=
                                w[j]->compose(a, phi[j][a][x], i, b, phi[j][b][y]))
                                c.fail("composition at level " + std::to_string(j) + ": " +
                                       g.level(j).element_name(a, x) + " o" + std::to_string(i + 1) + " " +
                                       g.level(j).element_name(b, y));
    // Simplicial identities on both sides, in the Godement indexing.
    using Op = std::function<int(int, int, int, int)>;
    auto identities = [&](const std::string& side, const Op& d, const Op& s, auto size) {
        for (int m = 0; m <= n; ++m) {
            for (int j = 2; j <= k + 1; ++j)
                for (int a = 0; a < size(j, m); ++a)
                    for (int i = 0; i < j; ++i)
                        for (int l = i + 1; l <= j; ++l)
                            if (d(j - 1, i, m, d(j, l, m, a)) != d(j - 1, l - 1, m, d(j, i, m, a)))
                                c.fail(side + ": d_i d_j identity at level " + std::to_string(j));
            for (int j = 0; j + 2 <= k + 1; ++j)
                for (int a = 0; a < size(j, m); ++a)
                    for (int i = 0; i <= j; ++i)
                        for (int l = i; l <= j; ++l)
                            if (s(j + 1, i, m, s(j, l, m, a)) != s(j + 1, l + 1, m, s(j, i, m, a)))
                                c.fail(side + ": s_i s_j identity at level " + std::to_string(j));
            for (int j = 0; j <= k; ++j)
                for (int a = 0; a < size(j, m); ++a)
                    for (int l = 0; l <= j; ++l) {
                        const int sa = s(j, l, m, a);
                        for (int i = 0; i <= j + 1; ++i) {
                            const int lhs = d(j + 1, i, m, sa);
                            int rhs;
                            if (i < l)
                                rhs = s(j - 1, l - 1, m, d(j, i, m, a));
                            else if (i == l || i == l + 1)
                                rhs = a;
                            else
                                rhs = s(j - 1, l, m, d(j, i - 1, m, a));
                            if (lhs != rhs) c.fail(side + ": d_i s_j identity at level " + std::to_string(j));
                        }
                    }
        }
    };
    identities(
        "Godement", [&](int j, int i, int m, int a) { return g.face(j, i, m, a); },
        [&](int j, int i, int m, int a) { return g.degeneracy(j, i, m, a); },
        [&](int j, int m) { return g.level(j).size(m); });
    identities("W", w_face, w_degeneracy, [&](int j, int m) { return w[j]->table(m).size(); });
    return c;
}

nlohmann::json element_json(const TreeOperad& op, const LabeledTree& x) {
    nlohmann::json labels = nlohmann::json::array(), lengths = nlohmann::json::array();
    for (int v = 0; v < x.vertex_count(); ++v) {
        labels.push_back(op.labels().element_name(x.shape.valence(v), x.labels[v]));
        if (v > 0) lengths.push_back(op.mark_name(x.marks[v]));
    }
    std::vector<int> leaves;
    for (int l : x.leaves) leaves.push_back(l + 1);
    return {{"tree", x.shape.notation()}, {"labels", labels}, {"lengths", lengths}, {"leaves", leaves}};
}

}  // namespace opw::setop
