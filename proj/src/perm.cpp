#include "opw/perm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace opw {

Perm identity_perm(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Perm compose(const Perm& a, const Perm& b) {
    if (a.size() != b.size()) throw std::invalid_argument("compose: size mismatch");
    Perm r(a.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
    return r;
}

Perm inverse(const Perm& p) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
    return r;
}

bool is_perm(const Perm& p) {
    std::vector<char> seen(p.size(), 0);
    for (int x : p) {
        if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

int perm_sign(const Perm& p) {
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

std::vector<Perm> all_perms(int n) {
    std::vector<Perm> out;
    Perm p = identity_perm(n);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::int64_t perm_rank(const Perm& p) {
    const int n = static_cast<int>(p.size());
    std::int64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (p[j] < p[i]) ++smaller;
        rank += smaller * factorial(n - 1 - i);
    }
    return rank;
}

Perm perm_unrank(int n, std::int64_t rank) {
    std::vector<int> pool = identity_perm(n);
    Perm p;
    for (int i = n - 1; i >= 0; --i) {
        const std::int64_t f = factorial(i);
        const auto k = static_cast<std::size_t>(rank / f);
        rank %= f;
        p.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return p;
}

std::string perm_to_string(const Perm& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(p[i] + 1);
    }
    return s;
}

}  // namespace opw

namespace opw {

int koszul_sign(const std::vector<Factor>& from, const std::vector<Factor>& to) {
    if (from.size() != to.size()) throw std::invalid_argument("koszul_sign: length mismatch");
    std::vector<std::pair<int, int>> pos;  // (key, position in `to`)
    pos.reserve(to.size());
    for (std::size_t i = 0; i < to.size(); ++i) pos.emplace_back(to[i].key, static_cast<int>(i));
    std::sort(pos.begin(), pos.end());
    std::vector<int> target(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        auto it = std::lower_bound(pos.begin(), pos.end(), std::make_pair(from[i].key, -1));
        if (it == pos.end() || it->first != from[i].key)
            throw std::invalid_argument("koszul_sign: key missing from target word");
        target[i] = it->second;
    }
    int parity = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (from[i].degree % 2 == 0) continue;
        for (std::size_t j = i + 1; j < from.size(); ++j)
            if (target[j] < target[i] && from[j].degree % 2 != 0) parity ^= 1;
    }
    return parity ? -1 : 1;
}

}  // namespace opw
