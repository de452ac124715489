#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opw/bar_cobar.hpp"
#include "opw/chain.hpp"
#include "opw/chain_operads.hpp"
#include "opw/errors.hpp"
#include "opw/segments.hpp"
#include "opw/set_operads.hpp"
#include "opw/trees.hpp"

using nlohmann::json;
using namespace opw;

namespace {

constexpr int kLimit = 8;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string json_path;
    bool unsafe = false;
    int arity = 3;
    int cap = -1;
    int level = 1;
    int min_valence = 2;
    std::string operad;
    std::string segment;
    std::string ring = "Z";
    std::string tree;
    std::string kind = "chain";
    int size = 1;
    std::string check = "all";
    std::string complex;
};

struct Report {
    std::string status = "verified";
    json payload = json::object();
    json params = json::object();
    bool truncated = false;
    std::vector<std::string> table;
};

void limit(const Options& o, const std::string& flag, int value) {
    if (value > kLimit && !o.unsafe)
        throw UsageError(flag + " " + std::to_string(value) + " exceeds the limit " + std::to_string(kLimit) +
                         " (pass --unsafe to lift it)");
    if (value < -1) throw UsageError(flag + " must be non-negative");
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

setop::OperadPtr load_set_operad(const std::string& s) {
    if (!is_file(s)) return setop::builtin_operad(s);
    auto p = setop::operad_from_json(read_json(s));
    if (auto v = setop::validate_operad(*p, p->max_arity()); !v.empty()) throw InputError(s + ": " + v.front());
    return p;
}

chainop::ChainOperadPtr load_chain_operad(const std::string& s, const std::string& ring) {
    if (!is_file(s)) return chainop::builtin_chain_operad(s, chain::Ring::parse(ring));
    auto p = chainop::chain_operad_from_json(read_json(s));
    if (auto v = chainop::validate_chain_operad(*p, p->max_arity()); !v.empty())
        throw InputError(s + ": " + v.front());
    return p;
}

// chain:<m>, delta1:<k>, diamond:<m> or a JSON file (a segment or a report holding one).
seg::FiniteSegment load_segment(const std::string& s, const Options& o) {
    seg::FiniteSegment h;
    if (is_file(s)) {
        json j = read_json(s);
        if (j.contains("payload")) j = j["payload"].at("segment");
        h = seg::segment_from_json(j);
    } else {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw UsageError("segment '" + s + "' is neither a file nor kind:size");
        const std::string kind = s.substr(0, colon);
        int m = 0;
        try {
            m = std::stoi(s.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("segment '" + s + "': bad size");
        }
        limit(o, "segment size", m);
        if (m < 0) throw UsageError("segment size must be non-negative");
        if (kind == "chain")
            h = seg::chain_segment(m);
        else if (kind == "delta1")
            h = seg::delta1_level(m);
        else if (kind == "diamond")
            h = seg::diamond(seg::chain_segment(m));
        else
            throw UsageError("unknown segment kind '" + kind + "' (chain, delta1, diamond)");
    }
    if (auto v = seg::segment_check(h); !v.empty()) throw InputError("segment: " + v.front().describe());
    return h;
}

std::string status_of(const std::string& comparison) {
    if (comparison == "iso") return "verified";
    if (comparison == "inconclusive") return "inconclusive";
    return "failed";
}

json ranks_json(const chain::ChainComplex& c) {
    json j = json::object();
    for (int d : c.degrees()) j[std::to_string(d)] = c.rank(d);
    return j;
}

long euler(const chain::ChainComplex& c) {
    long e = 0;
    for (int d : c.degrees()) e += (d % 2 ? -1 : 1) * static_cast<long>(c.rank(d));
    return e;
}

std::string ranks_line(const chain::ChainComplex& c) {
    std::ostringstream s;
    for (int d : c.degrees()) s << " " << d << ":" << c.rank(d);
    return s.str();
}

std::string homology_line(const chain::HomologyReport& h) {
    std::string s = h.to_string();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return "homology: " + s;
}

void set_comparison(Report& r, const setop::Comparison& c) {
    r.status = status_of(c.status);
    r.truncated = c.truncated;
    r.payload = c.to_json();
    for (const auto& [k, v] : c.counts) r.table.push_back(k + " = " + std::to_string(v));
    for (const auto& f : c.failures) r.table.push_back("failure: " + f);
    r.table.push_back("comparison: " + c.status);
}

// ---- trees

Report trees_enum(const Options& o) {
    Report r;
    r.params = {{"arity", o.arity}, {"max_edges", o.cap}, {"min_valence", o.min_valence}};
    const auto ts = trees::enumerate_planar(o.arity, o.cap, o.min_valence);
    r.payload["count"] = ts.size();
    r.payload["trees"] = json::array();
    for (const auto& t : ts) {
        r.payload["trees"].push_back(t.notation());
        r.table.push_back(t.notation());
    }
    r.table.push_back("count: " + std::to_string(ts.size()));
    return r;
}

Report trees_classes(const Options& o) {
    Report r;
    r.params = {{"arity", o.arity}, {"max_edges", o.cap}, {"min_valence", o.min_valence}};
    const auto cs = trees::iso_classes(o.arity, o.cap, o.min_valence);
    r.payload["count"] = cs.size();
    r.payload["classes"] = json::array();
    r.table.push_back("tree | aut order | planar representatives");
    for (const auto& c : cs) {
        r.payload["classes"].push_back({{"tree", c.representative.notation()},
                                        {"aut_order", c.aut_order},
                                        {"planar_count", c.planar_count}});
        r.table.push_back(c.representative.notation() + " | " + std::to_string(c.aut_order) + " | " +
                          std::to_string(c.planar_count));
    }
    r.table.push_back("count: " + std::to_string(cs.size()));
    return r;
}

Report trees_aut(const Options& o) {
    Report r;
    r.params = {{"tree", o.tree}};
    const auto t = trees::parse_tree(o.tree);
    const auto g = trees::aut_group(t);
    r.payload["tree"] = t.notation();
    r.payload["order"] = g.order;
    r.payload["generators"] = json::array();
    r.table.push_back("order: " + std::to_string(g.order));
    for (const auto& gen : g.generators) {
        r.payload["generators"].push_back({{"vertex", gen.vertex},
                                           {"block", perm_to_string(gen.block)},
                                           {"leaves", perm_to_string(gen.action.leaf_map)}});
        r.table.push_back("vertex " + std::to_string(gen.vertex) + ": inputs (" + perm_to_string(gen.block) +
                          "), leaves (" + perm_to_string(gen.action.leaf_map) + ")");
    }
    return r;
}

// ---- segments

Report segment_make(const Options& o) {
    Report r;
    r.params = {{"kind", o.kind}, {"size", o.size}};
    limit(o, "--size", o.size);
    const auto h = load_segment(o.kind + ":" + std::to_string(o.size), o);
    r.payload["segment"] = seg::to_json(h);
    std::string names;
    for (const auto& n : h.names) names += " " + n;
    r.table.push_back("elements:" + names);
    for (int a = 0; a < h.size(); ++a) {
        std::string row = h.names[a] + " |";
        for (int b = 0; b < h.size(); ++b) row += " " + h.names[h(a, b)];
        r.table.push_back(row);
    }
    return r;
}

Report segment_check_cmd(const Options& o) {
    Report r;
    r.params = {{"segment", o.segment}};
    json j = read_json(o.segment);
    if (j.contains("payload")) j = j["payload"].at("segment");
    const auto h = seg::segment_from_json(j);
    const auto v = seg::segment_check(h);
    r.payload["size"] = h.size();
    r.payload["violations"] = json::array();
    for (const auto& x : v) {
        r.payload["violations"].push_back(x.describe());
        r.table.push_back("violation: " + x.describe());
    }
    if (!v.empty()) {
        r.status = "failed";
        r.payload["counterexample"] = {{"axiom", v.front().axiom}, {"elements", v.front().elements}};
    } else {
        r.table.push_back("segment axioms hold");
    }
    return r;
}

// ---- set-level W

Report setw_build(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"segment", o.segment}, {"arity", o.arity}, {"cap", o.cap}};
    const auto p = load_set_operad(o.operad);
    const auto h = load_segment(o.segment, o);
    setop::WOperad w(p, h, o.arity, o.cap);
    r.truncated = w.truncated();
    r.payload["sizes"] = json::object();
    for (int n = 0; n <= o.arity; ++n) {
        r.payload["sizes"][std::to_string(n)] = w.size(n);
        r.table.push_back("|W(" + std::to_string(n) + ")| = " + std::to_string(w.size(n)));
    }
    r.payload["elements"] = json::array();
    for (int a = 0; a < w.size(o.arity); ++a) r.payload["elements"].push_back(w.element_name(o.arity, a));
    return r;
}

Report setw_compare_free(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}};
    set_comparison(r, setop::compare_free(load_set_operad(o.operad), o.arity, o.cap));
    return r;
}

Report setw_diamond(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"segment", o.segment}, {"arity", o.arity}, {"cap", o.cap}};
    set_comparison(r, setop::w_diamond_compare(load_set_operad(o.operad), load_segment(o.segment, o), o.arity, o.cap));
    return r;
}

// ---- Godement

Report godement_build(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"level", o.level}, {"arity", o.arity}};
    setop::Godement g(load_set_operad(o.operad), o.level, o.arity);
    r.payload["sizes"] = json::object();
    for (int k = -1; k <= o.level; ++k) {
        json row = json::array();
        std::string line = "G_" + std::to_string(k) + ":";
        for (int n = 0; n <= o.arity; ++n) {
            row.push_back(g.level(k).size(n));
            line += " " + std::to_string(g.level(k).size(n));
        }
        r.payload["sizes"][std::to_string(k)] = row;
        r.table.push_back(line);
    }
    return r;
}

Report godement_compare(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"level", o.level}, {"arity", o.arity}};
    set_comparison(r, setop::compare_godement_w(load_set_operad(o.operad), o.level, o.arity));
    return r;
}

// ---- chain-level W

struct WBuild {
    chain::ChainComplex complex;
    bool truncated;
};

WBuild w_build(const chainop::ChainOperadPtr& p, int n, int cap) {
    if (n <= 1) {
        const auto w = chainop::w_pseudo(p, std::max(n, 1), cap);
        return {chainop::w_reduced(p, n, cap), n == 1 && w->truncated()};
    }
    const auto w = chainop::w_pseudo(p, n, cap);
    return {*w->complex(), w->truncated()};
}

Report chainw_build(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}};
    const auto p = load_chain_operad(o.operad, o.ring);
    const auto w = w_build(p, o.arity, o.cap);
    r.truncated = w.truncated;
    r.payload["ranks"] = ranks_json(w.complex);
    r.payload["euler_characteristic"] = euler(w.complex);
    r.payload["complex"] = chain::complex_to_json(w.complex);
    r.table.push_back("ranks:" + ranks_line(w.complex));
    r.table.push_back("euler characteristic: " + std::to_string(euler(w.complex)));
    return r;
}

Report chainw_verify(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}, {"check", o.check}};
    if (o.check != "d2" && o.check != "quasi-iso" && o.check != "all")
        throw UsageError("--check must be d2, quasi-iso or all");
    const auto p = load_chain_operad(o.operad, o.ring);
    r.payload["arities"] = json::array();
    for (int n = 0; n <= o.arity; ++n) {
        const auto w = w_build(p, n, o.cap);
        r.truncated = r.truncated || w.truncated;
        json entry = {{"arity", n}, {"ranks", ranks_json(w.complex)}};
        std::string line = "arity " + std::to_string(n) + ":";
        if (o.check != "quasi-iso") {
            const auto v = chain::verify_d_squared(w.complex);
            entry["d2"] = v.empty() ? "ok" : "fail";
            line += v.empty() ? " d^2 = 0" : " d^2 != 0";
            if (!v.empty() && r.status != "failed") {
                r.status = "failed";
                r.payload["counterexample"] = {{"arity", n}, {"check", "d2"}, {"entry", v.front().describe()}};
            }
        }
        if (o.check != "d2") {
            const auto hw = chain::homology(w.complex);
            const auto hp = chain::homology(chainop::operad_complex(*p, n, true));
            const bool same = hw.to_json() == hp.to_json();
            entry["homology"] = hw.to_json();
            entry["operad_homology"] = hp.to_json();
            entry["quasi_iso"] = same;
            line += same ? ", H(W) = H(P)" : ", H(W) != H(P)";
            if (!same && r.status != "failed" && !w.truncated) {
                r.status = "failed";
                r.payload["counterexample"] = {
                    {"arity", n}, {"check", "quasi-iso"}, {"w", hw.to_string()}, {"operad", hp.to_string()}};
            }
        }
        r.payload["arities"].push_back(entry);
        r.table.push_back(line);
    }
    if (r.truncated && r.status == "verified" && o.check != "d2") r.status = "inconclusive";
    return r;
}

Report chainw_homology(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}};
    const auto p = load_chain_operad(o.operad, o.ring);
    const auto w = w_build(p, o.arity, o.cap);
    r.truncated = w.truncated;
    const auto h = chain::homology(w.complex);
    r.payload["ranks"] = ranks_json(w.complex);
    r.payload["homology"] = h.to_json();
    r.table.push_back("ranks:" + ranks_line(w.complex));
    r.table.push_back(homology_line(h));
    return r;
}

// ---- bar / cobar

Report barcobar_build(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}};
    const auto p = load_chain_operad(o.operad, o.ring);
    const auto b = barcobar::bar(p, o.arity, o.cap);
    const auto c = barcobar::cobar(b, o.arity, o.cap);
    r.truncated = b->truncated() || c->truncated();
    r.payload["bar"] = json::object();
    for (int n = 1; n <= o.arity; ++n) {
        const auto& bn = *b->arity(n).complex();
        r.payload["bar"][std::to_string(n)] = ranks_json(bn);
        r.table.push_back("B(" + std::to_string(n) + ") ranks:" + ranks_line(bn));
    }
    r.payload["cobar_bar"] = ranks_json(*c->complex());
    r.table.push_back("cobar(B)(" + std::to_string(o.arity) + ") ranks:" + ranks_line(*c->complex()));
    return r;
}

Report barcobar_twisting(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}};
    const auto p = load_chain_operad(o.operad, o.ring);
    const auto b = barcobar::bar(p, o.arity, o.cap);
    r.truncated = b->truncated();
    const auto report = barcobar::check_twisting(barcobar::bar_counit_cochain(b));
    const auto lines = report.describe(*p);
    r.payload["mismatches"] = lines;
    if (!report.ok()) {
        r.status = "failed";
        r.payload["counterexample"] = lines.front();
        for (const auto& l : lines) r.table.push_back(l);
    } else {
        r.table.push_back("D tau = tau u tau in arities 1.." + std::to_string(o.arity));
    }
    return r;
}

Report barcobar_compare(const Options& o) {
    Report r;
    r.params = {{"operad", o.operad}, {"arity", o.arity}, {"cap", o.cap}, {"ring", o.ring}};
    const auto p = load_chain_operad(o.operad, o.ring);
    const auto run = barcobar::compare_w_barcobar(p, o.arity, o.cap);
    r.truncated = run.result.truncated;
    r.payload = run.result.to_json(*run.w, *run.cobar);
    r.status = run.result.status == "iso" ? "verified" : "failed";
    if (r.status == "failed") r.payload["counterexample"] = run.result.witness;
    std::ostringstream s;
    for (int x : run.result.w_ranks) s << " " << x;
    r.table.push_back("ranks:" + s.str());
    r.table.push_back("components: " + std::to_string(run.result.components));
    r.table.push_back(std::string("augmentations agree: ") + (run.result.augmentations_agree ? "yes" : "no"));
    if (run.result.rescalings_found >= 0)
        r.table.push_back("rescalings: " + std::to_string(run.result.rescalings_found) + " found, " +
                          std::to_string(run.result.rescalings_expected) + " expected");
    r.table.push_back("comparison: " + run.result.status + (run.result.witness.empty() ? "" : " (" + run.result.witness + ")"));
    return r;
}

// ---- homology of a complex file

Report homology_cmd(const Options& o) {
    Report r;
    r.params = {{"complex", o.complex}};
    json j = read_json(o.complex);
    if (j.contains("payload")) j = j["payload"].at("complex");
    chain::ChainComplex c;
    try {
        c = chain::complex_from_json(j);
    } catch (const json::exception& e) {
        throw InputError(o.complex + ": " + e.what());
    }
    const auto h = chain::homology(c);
    r.payload["ranks"] = ranks_json(c);
    r.payload["homology"] = h.to_json();
    r.table.push_back("ranks:" + ranks_line(c));
    r.table.push_back(homology_line(h));
    return r;
}

json report_json(const Report& r, const std::string& command) {
    return {{"status", r.status},
            {"payload", r.payload},
            {"provenance",
             {{"tool", "opw"},
              {"version", OPW_VERSION},
              {"command", command},
              {"params", r.params},
              {"truncated", r.truncated}}}};
}

int emit(const Report& r, const std::string& command, const std::string& path) {
    const std::string text = report_json(r, command).dump(2) + "\n";
    if (path == "-") {
        std::cout << text;
    } else {
        for (const auto& line : r.table) std::cout << line << "\n";
        if (r.truncated) std::cout << "truncated: yes\n";
        std::cout << "status: " << r.status << "\n";
        if (!path.empty()) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw InputError("cannot write " + path);
            out << text;
        }
    }
    return r.status == "verified" ? 0 : 1;
}

void threads_from_env() {
    const char* env = std::getenv("OPW_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end || t < 1) throw UsageError(std::string("OPW_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(static_cast<int>(t));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"W-construction, free operads, Godement and bar/cobar checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", OPW_VERSION);
    Options o;

    struct Action {
        CLI::App* app;
        std::string command;
        std::function<Report(const Options&)> run;
    };
    std::vector<Action> actions;

    auto common = [&](CLI::App* s) {
        s->add_option("--json", o.json_path, "write the JSON report to this path ('-' for stdout)");
        s->add_flag("--unsafe", o.unsafe, "lift the parameter ceilings");
    };
    auto arity = [&](CLI::App* s, bool required = true) {
        auto opt = s->add_option("--arity", o.arity, "arity n");
        if (required) opt->required();
    };
    auto operad = [&](CLI::App* s) {
        s->add_option("--operad", o.operad, "built-in name or JSON file")->required();
    };
    auto chain_flags = [&](CLI::App* s) {
        operad(s);
        arity(s);
        s->add_option("--ring", o.ring, "Z, Q or F<p> for built-in operads");
    };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                    std::function<Report(const Options&)> run, const std::function<void(CLI::App*)>& flags) {
        CLI::App* s = parent->add_subcommand(name, help);
        flags(s);
        common(s);
        actions.push_back({s, parent->get_name() + " " + name, std::move(run)});
    };

    auto* trees_cmd = app.add_subcommand("trees", "planar trees")->require_subcommand(1);
    auto tree_flags = [&](CLI::App* s) {
        arity(s);
        s->add_option("--max-edges", o.cap, "internal edge cap (-1: none)");
        s->add_option("--min-valence", o.min_valence, "smallest vertex valence");
    };
    leaf(trees_cmd, "enum", "enumerate planar trees", trees_enum, tree_flags);
    leaf(trees_cmd, "classes", "isomorphism classes with automorphism groups", trees_classes, tree_flags);
    leaf(trees_cmd, "aut", "automorphism group of a tree", trees_aut,
         [&](CLI::App* s) { s->add_option("--tree", o.tree, "tree notation, e.g. \"((| |) |)\"")->required(); });

    auto* seg_cmd = app.add_subcommand("segment", "finite segments")->require_subcommand(1);
    leaf(seg_cmd, "make", "build a standard segment", segment_make, [&](CLI::App* s) {
        s->add_option("--kind", o.kind, "chain, delta1 or diamond")->required();
        s->add_option("--size", o.size, "chain length, simplicial level or diamond base")->required();
    });
    leaf(seg_cmd, "check", "check the segment axioms", segment_check_cmd,
         [&](CLI::App* s) { s->add_option("--segment", o.segment, "segment JSON file")->required(); });

    auto* setw_cmd = app.add_subcommand("setw", "W-construction of set operads")->require_subcommand(1);
    auto setw_flags = [&](bool segment) {
        return [&, segment](CLI::App* s) {
            operad(s);
            arity(s);
            if (segment) s->add_option("--segment", o.segment, "chain:m, delta1:k, diamond:m or a file")->required();
            s->add_option("--cap", o.cap, "vertex weight cap (-1: none)");
        };
    };
    leaf(setw_cmd, "build", "tabulate W(H, P)", setw_build, setw_flags(true));
    leaf(setw_cmd, "compare-free", "W(I u I, P) against the free operad", setw_compare_free, setw_flags(false));
    leaf(setw_cmd, "diamond-compare", "W(H diamond, P) against F(U W(H, P))", setw_diamond, setw_flags(true));

    auto* god_cmd = app.add_subcommand("godement", "Godement resolution")->require_subcommand(1);
    auto god_flags = [&](CLI::App* s) {
        operad(s);
        arity(s);
        s->add_option("--level", o.level, "simplicial level k")->required();
    };
    leaf(god_cmd, "build", "sizes of the levels", godement_build, god_flags);
    leaf(god_cmd, "compare-w", "G_k(P) against W(delta1 level k, P)", godement_compare, god_flags);

    auto* chainw_cmd = app.add_subcommand("chainw", "W-construction of chain operads")->require_subcommand(1);
    auto chainw_flags = [&](CLI::App* s) {
        chain_flags(s);
        s->add_option("--cap", o.cap, "internal edge cap (-1: none)");
    };
    leaf(chainw_cmd, "build", "the complex W(n)", chainw_build, chainw_flags);
    leaf(chainw_cmd, "verify", "d^2 = 0 and H(W) = H(P) in arities 0..n", chainw_verify, [&](CLI::App* s) {
        chainw_flags(s);
        s->add_option("--check", o.check, "d2, quasi-iso or all");
    });
    leaf(chainw_cmd, "homology", "homology of W(n)", chainw_homology, chainw_flags);

    auto* bc_cmd = app.add_subcommand("barcobar", "bar and cobar constructions")->require_subcommand(1);
    leaf(bc_cmd, "build", "ranks of the bar and cobar-bar complexes", barcobar_build, [&](CLI::App* s) {
        chain_flags(s);
        s->add_option("--cap", o.cap, "vertex cap (-1: none)");
    });
    leaf(bc_cmd, "verify-twisting", "check that the bar counit is twisting", barcobar_twisting, [&](CLI::App* s) {
        chain_flags(s);
        s->add_option("--cap", o.cap, "vertex cap (-1: none)");
    });
    leaf(bc_cmd, "compare-w", "W against cobar(bar(P))", barcobar_compare, [&](CLI::App* s) {
        chain_flags(s);
        s->add_option("--cap", o.cap, "W internal edge cap (-1: none)");
    });

    CLI::App* hom = app.add_subcommand("homology", "homology of a complex JSON file");
    hom->add_option("--complex", o.complex, "complex JSON (or a report holding one)")->required();
    common(hom);
    actions.push_back({hom, "homology", homology_cmd});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        threads_from_env();
        limit(o, "--arity", o.arity);
        limit(o, "--cap", o.cap);
        limit(o, "--level", o.level);
        limit(o, "--size", o.size);
        if (o.arity < 0) throw UsageError("--arity must be non-negative");
        if (o.level < 0) throw UsageError("--level must be non-negative");
        for (const auto& a : actions)
            if (a.app->parsed()) return emit(a.run(o), a.command, o.json_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const trees::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
