#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opw {

// A permutation of {0,...,n-1}, stored as its list of images.
using Perm = std::vector<int>;

Perm identity_perm(int n);
// (a*b)(x) = a(b(x))
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);
bool is_perm(const Perm& p);
int perm_sign(const Perm& p);

// All permutations of size n in lexicographic order of image lists.
std::vector<Perm> all_perms(int n);

std::int64_t factorial(int n);
// Rank of p in lexicographic order (Lehmer code).
std::int64_t perm_rank(const Perm& p);
Perm perm_unrank(int n, std::int64_t rank);

// One-line notation with 1-based images, e.g. "2 1 3".
std::string perm_to_string(const Perm& p);

}  // namespace opw

namespace opw {

// A graded factor in a tensor word: an identifying key and its degree.
struct Factor {
    int key;
    int degree;
};

// Koszul sign of reordering the word `from` into `to` (same keys, any order).
int koszul_sign(const std::vector<Factor>& from, const std::vector<Factor>& to);

}  // namespace opw
