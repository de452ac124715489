#include "opw/segments.hpp"

#include <algorithm>
#include <sstream>

#include "opw/errors.hpp"

namespace opw::seg {

std::string Violation::describe() const {
    std::ostringstream os;
    os << axiom;
    for (std::size_t i = 0; i < elements.size(); ++i) os << (i ? "," : " ") << elements[i];
    return os.str();
}

std::vector<Violation> segment_check(const FiniteSegment& h) {
    std::vector<Violation> out;
    const int n = h.size();
    if (n == 0) return {{"empty", {}}};
    if (h.zero < 0 || h.zero >= n) out.push_back({"zero-range", {h.zero}});
    if (h.one < 0 || h.one >= n) out.push_back({"one-range", {h.one}});
    if (static_cast<int>(h.join.size()) != n) out.push_back({"table-rows", {static_cast<int>(h.join.size())}});
    for (int a = 0; a < static_cast<int>(h.join.size()); ++a) {
        if (static_cast<int>(h.join[a].size()) != n) out.push_back({"table-row-length", {a}});
        for (int x : h.join[a])
            if (x < 0 || x >= n) out.push_back({"table-entry", {a, x}});
    }
    if (!out.empty()) return out;
    for (int x = 0; x < n; ++x) {
        if (h(h.zero, x) != x) out.push_back({"left-unit", {x}});
        if (h(x, h.zero) != x) out.push_back({"right-unit", {x}});
        if (h(h.one, x) != h.one) out.push_back({"left-absorbing", {x}});
        if (h(x, h.one) != h.one) out.push_back({"right-absorbing", {x}});
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (h(h(a, b), c) != h(a, h(b, c))) out.push_back({"associativity", {a, b, c}});
    if (n > 1 && h.zero == h.one) out.push_back({"zero-equals-one", {h.zero}});
    return out;
}

std::vector<Violation> map_check(const FiniteSegment& h, const FiniteSegment& k, const SegmentMap& f) {
    std::vector<Violation> out;
    if (static_cast<int>(f.size()) != h.size()) return {{"map-size", {static_cast<int>(f.size())}}};
    for (int x = 0; x < h.size(); ++x)
        if (f[x] < 0 || f[x] >= k.size()) out.push_back({"map-range", {x}});
    if (!out.empty()) return out;
    if (f[h.zero] != k.zero) out.push_back({"map-zero", {h.zero}});
    if (f[h.one] != k.one) out.push_back({"map-one", {h.one}});
    for (int a = 0; a < h.size(); ++a)
        for (int b = 0; b < h.size(); ++b)
            if (f[h(a, b)] != k(f[a], f[b])) out.push_back({"map-join", {a, b}});
    return out;
}

FiniteSegment chain_segment(int m) {
    if (m < 0) throw InputError("chain_segment: negative size");
    FiniteSegment h;
    for (int i = 0; i <= m; ++i) h.names.push_back(std::to_string(i));
    h.zero = 0;
    h.one = m;
    h.join.assign(m + 1, std::vector<int>(m + 1));
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= m; ++b) h.join[a][b] = std::max(a, b);
    return h;
}

FiniteSegment delta1_level(int k) {
    if (k < 0) throw InputError("delta1_level: negative level");
    FiniteSegment h = chain_segment(k + 1);
    for (int l = 0; l <= k + 1; ++l) h.names[l] = std::string(k + 1 - l, '0') + std::string(l, '1');
    return h;
}

SegmentMap delta1_operator(int k, const std::vector<int>& phi) {
    for (std::size_t y = 0; y < phi.size(); ++y) {
        if (phi[y] < 0 || phi[y] > k) throw InputError("delta1_operator: value out of range");
        if (y > 0 && phi[y] < phi[y - 1]) throw InputError("delta1_operator: map is not monotone");
    }
    SegmentMap f(k + 2);
    for (int l = 0; l <= k + 1; ++l) {
        const int threshold = k + 1 - l;
        f[l] = static_cast<int>(std::count_if(phi.begin(), phi.end(), [&](int x) { return x >= threshold; }));
    }
    return f;
}

SegmentMap delta1_face(int k, int j) {
    if (k < 1 || j < 0 || j > k) throw InputError("delta1_face: index out of range");
    std::vector<int> phi;
    for (int y = 0; y < k; ++y) phi.push_back(y < j ? y : y + 1);
    return delta1_operator(k, phi);
}

SegmentMap delta1_degeneracy(int k, int j) {
    if (k < 0 || j < 0 || j > k) throw InputError("delta1_degeneracy: index out of range");
    std::vector<int> phi;
    for (int y = 0; y <= k + 1; ++y) phi.push_back(y <= j ? y : y - 1);
    return delta1_operator(k, phi);
}

FiniteSegment diamond(const FiniteSegment& h) {
    FiniteSegment d;
    const int n = h.size();
    d.names = h.names;
    d.names.push_back("*");
    d.zero = h.zero;
    d.one = n;
    d.join.assign(n + 1, std::vector<int>(n + 1, n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d.join[a][b] = h(a, b);
    return d;
}

SegmentMap diamond_collapse(const FiniteSegment& h) {
    SegmentMap f(h.size() + 1);
    for (int x = 0; x < h.size(); ++x) f[x] = x;
    f[h.size()] = h.one;
    return f;
}

SegmentMap diamond_map(const FiniteSegment& k, const SegmentMap& f) {
    SegmentMap g(f.begin(), f.end());
    g.push_back(k.size());
    return g;
}

SegmentMap to_terminal(const FiniteSegment& h) { return SegmentMap(h.size(), 0); }

nlohmann::json to_json(const FiniteSegment& h) {
    return {{"elements", h.names}, {"zero", h.zero}, {"one", h.one}, {"join", h.join}};
}

FiniteSegment segment_from_json(const nlohmann::json& j) {
    FiniteSegment h;
    try {
        h.names = j.at("elements").get<std::vector<std::string>>();
        h.zero = j.at("zero").get<int>();
        h.one = j.at("one").get<int>();
        h.join = j.at("join").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("segment JSON: ") + e.what());
    }
    return h;
}

}  // namespace opw::seg
