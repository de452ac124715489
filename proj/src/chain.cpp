#include "opw/chain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "opw/errors.hpp"

namespace opw::chain {

std::string scalar_to_string(const Scalar& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

Scalar scalar_from_string(const std::string& s) {
    try {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Scalar(Integer(s));
        const Integer den(s.substr(slash + 1));
        if (den == 0) throw InputError("zero denominator in '" + s + "'");
        return Scalar(Integer(s.substr(0, slash)), den);
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const InputError*>(&e)) throw;
        throw InputError("bad number '" + s + "'");
    }
}

Ring Ring::prime_field(int p) {
    if (p < 2) throw InputError("F_p needs a prime p");
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) throw InputError(std::to_string(p) + " is not prime");
    return Ring(Kind::Fp, p);
}

Ring Ring::parse(const std::string& s) {
    if (s == "Z") return integers();
    if (s == "Q") return rationals();
    std::string digits;
    if (s.rfind("Fp:", 0) == 0)
        digits = s.substr(3);
    else if (s.size() > 1 && s[0] == 'F')
        digits = s.substr(1);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit) && digits.size() < 9)
        return prime_field(std::stoi(digits));
    throw InputError("unknown ring '" + s + "' (expected Z, Q or F<p>)");
}

std::string Ring::name() const {
    switch (kind_) {
        case Kind::Z: return "Z";
        case Kind::Q: return "Q";
        case Kind::Fp: return "F" + std::to_string(p_);
    }
    return "?";
}

Scalar Ring::reduce(const Scalar& x) const {
    switch (kind_) {
        case Kind::Q: return x;
        case Kind::Z:
            if (denominator(x) != 1) throw InputError("non-integer entry " + scalar_to_string(x) + " over Z");
            return x;
        case Kind::Fp: {
            const Integer p = p_;
            Integer den = denominator(x) % p;
            if (den == 0) throw InputError("entry " + scalar_to_string(x) + " is undefined in " + name());
            // Inverse by Fermat.
            Integer inv = boost::multiprecision::powm(den, p - 2, p);
            Integer r = (numerator(x) % p) * inv % p;
            if (r < 0) r += p;
            return Scalar(r);
        }
    }
    return x;
}

void SparseMatrix::add(int r, int c, const Scalar& v) {
    if (v == 0) return;
    auto& col = data_.at(c);
    auto [it, fresh] = col.emplace(r, v);
    if (!fresh) {
        it->second += v;
        if (it->second == 0) col.erase(it);
    }
}

void SparseMatrix::set(int r, int c, const Scalar& v) {
    auto& col = data_.at(c);
    if (v == 0)
        col.erase(r);
    else
        col[r] = v;
}

Scalar SparseMatrix::at(int r, int c) const {
    const auto& col = data_.at(c);
    auto it = col.find(r);
    return it == col.end() ? Scalar(0) : it->second;
}

void SparseMatrix::set_column(int c, std::map<int, Scalar> col) {
    for (auto it = col.begin(); it != col.end();) it = it->second == 0 ? col.erase(it) : std::next(it);
    data_.at(c) = std::move(col);
}

bool SparseMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const auto& c) { return c.empty(); });
}

std::size_t SparseMatrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : data_) n += c.size();
    return n;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& b) const {
    if (cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
    SparseMatrix r(rows(), b.cols());
    for (int c = 0; c < b.cols(); ++c)
        for (const auto& [k, bv] : b.data_[c])
            for (const auto& [i, av] : data_[k]) r.add(i, c, av * bv);
    return r;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& b) const {
    if (rows() != b.rows() || cols() != b.cols()) throw std::invalid_argument("matrix sum: dimension mismatch");
    SparseMatrix r = *this;
    for (int c = 0; c < b.cols(); ++c)
        for (const auto& [i, v] : b.data_[c]) r.add(i, c, v);
    return r;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& b) const { return *this + b.scaled(-1); }

SparseMatrix SparseMatrix::scaled(const Scalar& s) const {
    SparseMatrix r(rows(), cols());
    if (s == 0) return r;
    for (int c = 0; c < cols(); ++c)
        for (const auto& [i, v] : data_[c]) r.data_[c][i] = v * s;
    return r;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix r(cols(), rows());
    for (int c = 0; c < cols(); ++c)
        for (const auto& [i, v] : data_[c]) r.data_[i][c] = v;
    return r;
}

SparseMatrix SparseMatrix::reduced(const Ring& ring) const {
    SparseMatrix r(rows(), cols());
    for (int c = 0; c < cols(); ++c)
        for (const auto& [i, v] : data_[c]) r.set(i, c, ring.reduce(v));
    return r;
}

int GradedModule::rank(int n) const {
    auto it = basis.find(n);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<std::string>& GradedModule::labels(int n) const {
    static const std::vector<std::string> empty;
    auto it = basis.find(n);
    return it == basis.end() ? empty : it->second;
}

std::string MatrixViolation::describe() const {
    return "degree " + std::to_string(degree) + ", row " + std::to_string(row) + ", column " + std::to_string(col) +
           ": " + scalar_to_string(value);
}

namespace {

// Entries of (lhs - rhs), as violations at `degree`.
void collect(const SparseMatrix& lhs, const SparseMatrix& rhs, int degree, std::vector<MatrixViolation>& out) {
    const SparseMatrix diff = lhs - rhs;
    for (int c = 0; c < diff.cols() && out.size() < 10; ++c)
        for (const auto& [r, v] : diff.column(c)) {
            out.push_back({degree, r, c, v});
            if (out.size() >= 10) break;
        }
}

}  // namespace

ChainComplex::ChainComplex(Ring ring, GradedModule basis, std::map<int, SparseMatrix> d, bool check)
    : ring_(ring), basis_(std::move(basis)) {
    for (auto it = basis_.basis.begin(); it != basis_.basis.end();) {
        std::set<std::string> seen(it->second.begin(), it->second.end());
        if (seen.size() != it->second.size())
            throw InputError("duplicate basis label in degree " + std::to_string(it->first));
        it = it->second.empty() ? basis_.basis.erase(it) : std::next(it);
    }
    for (auto& [n, m] : d) {
        if (m.rows() != rank(n - 1) || m.cols() != rank(n))
            throw InputError("differential in degree " + std::to_string(n) + " has shape " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rank(n - 1)) + "x" +
                             std::to_string(rank(n)));
        SparseMatrix r = m.reduced(ring_);
        if (!r.is_zero()) d_.emplace(n, std::move(r));
    }
    if (check) {
        const auto bad = verify_d_squared(*this);
        if (!bad.empty()) throw InputError("d^2 != 0 at " + bad.front().describe());
    }
}

std::vector<int> ChainComplex::degrees() const {
    std::vector<int> out;
    for (const auto& [n, labels] : basis_.basis) out.push_back(n);
    return out;
}

SparseMatrix ChainComplex::d(int n) const {
    auto it = d_.find(n);
    return it == d_.end() ? SparseMatrix(rank(n - 1), rank(n)) : it->second;
}

bool ChainComplex::is_zero() const { return basis_.basis.empty(); }

SparseMatrix ChainMap::component(int n) const {
    auto it = f.find(n);
    return it == f.end() ? SparseMatrix(target->rank(n + degree), source->rank(n)) : it->second;
}

ChainMap identity_map(ComplexPtr c) {
    ChainMap m{c, c, 0, {}};
    for (int n : c->degrees()) {
        SparseMatrix id(c->rank(n), c->rank(n));
        for (int i = 0; i < c->rank(n); ++i) id.set(i, i, 1);
        m.f.emplace(n, std::move(id));
    }
    return m;
}

std::vector<MatrixViolation> verify_d_squared(const ChainComplex& c) {
    std::vector<MatrixViolation> out;
    for (int n : c.degrees()) {
        if (c.rank(n - 2) == 0) continue;
        const SparseMatrix dd = (c.d(n - 1) * c.d(n)).reduced(c.ring());
        collect(dd, SparseMatrix(dd.rows(), dd.cols()), n, out);
        if (out.size() >= 10) break;
    }
    return out;
}

std::vector<MatrixViolation> verify_chain_map(const ChainMap& f) {
    std::vector<MatrixViolation> out;
    const Ring& ring = f.target->ring();
    std::set<int> degrees;
    for (int n : f.source->degrees()) degrees.insert(n);
    for (int n : f.target->degrees()) degrees.insert(n - f.degree), degrees.insert(n - f.degree + 1);
    for (const auto& [n, m] : f.f) {
        if (m.rows() != f.target->rank(n + f.degree) || m.cols() != f.source->rank(n))
            throw InputError("chain map component in degree " + std::to_string(n) + " has the wrong shape");
    }
    const Scalar sign = f.degree % 2 ? -1 : 1;
    for (int n : degrees) {
        if (f.source->rank(n) == 0 || f.target->rank(n + f.degree - 1) == 0) continue;
        const SparseMatrix lhs = (f.target->d(n + f.degree) * f.component(n)).reduced(ring);
        const SparseMatrix rhs = (f.component(n - 1) * f.source->d(n)).scaled(sign).reduced(ring);
        collect(lhs, rhs, n, out);
        if (out.size() >= 10) break;
    }
    return out;
}

ChainComplex shift_complex(const ChainComplex& c, int d) {
    GradedModule b;
    std::map<int, SparseMatrix> dm;
    for (int n : c.degrees()) {
        b.basis[n + d] = c.module().labels(n);
        SparseMatrix m = c.d(n);
        if (!m.is_zero()) dm.emplace(n + d, d % 2 ? m.scaled(-1) : m);
    }
    return ChainComplex(c.ring(), std::move(b), std::move(dm));
}

ChainComplex tensor_complexes(const ChainComplex& c, const ChainComplex& e) {
    if (c.ring() != e.ring()) throw InputError("tensor product of complexes over different rings");
    std::map<std::tuple<int, int, int, int>, int> index;  // (p, q, i, j) -> position in degree p + q
    GradedModule b;
    for (int p : c.degrees())
        for (int q : e.degrees()) {
            auto& labels = b.basis[p + q];
            for (int i = 0; i < c.rank(p); ++i)
                for (int j = 0; j < e.rank(q); ++j) {
                    index[{p, q, i, j}] = static_cast<int>(labels.size());
                    labels.push_back("(" + c.module().labels(p)[i] + "," + e.module().labels(q)[j] + ")");
                }
        }
    std::map<int, SparseMatrix> dm;
    for (const auto& [n, labels] : b.basis) {
        if (b.rank(n - 1) == 0) continue;
        SparseMatrix m(b.rank(n - 1), b.rank(n));
        for (int p : c.degrees()) {
            const int q = n - p;
            if (e.rank(q) == 0) continue;
            const SparseMatrix dc = c.d(p), de = e.d(q);
            const Scalar sign = p % 2 ? -1 : 1;
            for (int i = 0; i < c.rank(p); ++i)
                for (int j = 0; j < e.rank(q); ++j) {
                    const int col = index.at({p, q, i, j});
                    for (const auto& [r, v] : dc.column(i)) m.add(index.at({p - 1, q, r, j}), col, v);
                    for (const auto& [r, v] : de.column(j)) m.add(index.at({p, q - 1, i, r}), col, sign * v);
                }
        }
        if (!m.is_zero()) dm.emplace(n, std::move(m));
    }
    return ChainComplex(c.ring(), std::move(b), std::move(dm));
}

namespace {

struct Overflow {};

// Checked machine integers; the big-integer instantiation never overflows.
inline std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
}
inline std::int64_t sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
    return r;
}
inline std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
    return r;
}
inline std::int64_t neg(std::int64_t a) { return sub(0, a); }
inline Integer mul(const Integer& a, const Integer& b) { return a * b; }
inline Integer sub(const Integer& a, const Integer& b) { return a - b; }
inline Integer add(const Integer& a, const Integer& b) { return a + b; }
inline Integer neg(const Integer& a) { return -a; }
template <class T>
T absval(const T& a) {
    return a < 0 ? neg(a) : a;
}

template <class T>
using Dense = std::vector<std::vector<T>>;

template <class T>
Dense<T> identity(int n) {
    Dense<T> m(n, std::vector<T>(n, T(0)));
    for (int i = 0; i < n; ++i) m[i][i] = T(1);
    return m;
}

template <class T>
Dense<T> product(const Dense<T>& a, const Dense<T>& b, int inner, int cols) {
    Dense<T> r(a.size(), std::vector<T>(cols, T(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < cols; ++j)
                if (b[k][j] != 0) r[i][j] = add(r[i][j], mul(a[i][k], b[k][j]));
        }
    return r;
}

template <class T>
std::vector<Integer> smith(const Dense<T>& a0, int m, int n) {
    Dense<T> a = a0, u = identity<T>(m), v = identity<T>(n);
    auto row_axpy = [&](int dst, int src, const T& q) {  // row dst -= q * row src
        for (int j = 0; j < n; ++j)
            if (a[src][j] != 0) a[dst][j] = sub(a[dst][j], mul(q, a[src][j]));
        for (int j = 0; j < m; ++j)
            if (u[src][j] != 0) u[dst][j] = sub(u[dst][j], mul(q, u[src][j]));
    };
    auto col_axpy = [&](int dst, int src, const T& q) {  // col dst -= q * col src
        for (int i = 0; i < m; ++i)
            if (a[i][src] != 0) a[i][dst] = sub(a[i][dst], mul(q, a[i][src]));
        for (int i = 0; i < n; ++i)
            if (v[i][src] != 0) v[i][dst] = sub(v[i][dst], mul(q, v[i][src]));
    };
    auto swap_rows = [&](int x, int y) {
        std::swap(a[x], a[y]);
        std::swap(u[x], u[y]);
    };
    auto swap_cols = [&](int x, int y) {
        for (auto& row : a) std::swap(row[x], row[y]);
        for (auto& row : v) std::swap(row[x], row[y]);
    };
    int t = 0;
    for (; t < std::min(m, n); ++t) {
        int pi = -1, pj = -1;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (a[i][j] != 0 && (pi < 0 || absval(a[i][j]) < absval(a[pi][pj]))) pi = i, pj = j;
        if (pi < 0) break;
        swap_rows(t, pi);
        swap_cols(t, pj);
        for (;;) {
            bool clean = true;
            for (int i = t + 1; i < m; ++i)
                if (a[i][t] != 0) {
                    row_axpy(i, t, T(a[i][t] / a[t][t]));
                    if (a[i][t] != 0) clean = false;
                }
            for (int j = t + 1; j < n; ++j)
                if (a[t][j] != 0) {
                    col_axpy(j, t, T(a[t][j] / a[t][t]));
                    if (a[t][j] != 0) clean = false;
                }
            if (!clean) {
                // A remainder is smaller than the pivot: move the smallest entry of row/column t in.
                int bi = t, bj = t;
                for (int i = t + 1; i < m; ++i)
                    if (a[i][t] != 0 && absval(a[i][t]) < absval(a[bi][bj])) bi = i, bj = t;
                for (int j = t + 1; j < n; ++j)
                    if (a[t][j] != 0 && absval(a[t][j]) < absval(a[bi][bj])) bi = t, bj = j;
                swap_rows(t, bi);
                swap_cols(t, bj);
                continue;
            }
            int bad = -1;
            for (int i = t + 1; i < m && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            row_axpy(t, bad, T(-1));
        }
        if (a[t][t] < 0) {
            for (auto& x : a[t]) x = neg(x);
            for (auto& x : u[t]) x = neg(x);
        }
    }
    const Dense<T> d = product(product(u, a0, m, n), v, n, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (d[i][j] != a[i][j] || (i != j && a[i][j] != 0))
                throw std::logic_error("Smith normal form: U A V is not the computed diagonal");
    std::vector<Integer> factors;
    for (int i = 0; i < t; ++i) {
        if (i > 0 && a[i][i] % a[i - 1][i - 1] != 0) throw std::logic_error("Smith normal form: divisibility fails");
        factors.emplace_back(a[i][i]);
    }
    return factors;
}

}  // namespace

SmithForm smith_normal_form(const SparseMatrix& a) {
    SmithForm s;
    s.rows = a.rows();
    s.cols = a.cols();
    bool small = true;
    for (int c = 0; c < a.cols() && small; ++c)
        for (const auto& [r, v] : a.column(c)) {
            if (denominator(v) != 1) throw InputError("Smith normal form needs integer entries");
            if (boost::multiprecision::abs(numerator(v)) > Integer(1) << 40) small = false;
        }
    if (small) {
        Dense<std::int64_t> d(a.rows(), std::vector<std::int64_t>(a.cols(), 0));
        for (int c = 0; c < a.cols(); ++c)
            for (const auto& [r, v] : a.column(c)) d[r][c] = static_cast<std::int64_t>(numerator(v));
        try {
            s.factors = smith(d, a.rows(), a.cols());
            return s;
        } catch (const Overflow&) {
        }
    }
    Dense<Integer> d(a.rows(), std::vector<Integer>(a.cols(), 0));
    for (int c = 0; c < a.cols(); ++c)
        for (const auto& [r, v] : a.column(c)) d[r][c] = numerator(v);
    s.factors = smith(d, a.rows(), a.cols());
    s.used_big_integers = true;
    return s;
}

int field_rank(const SparseMatrix& a, const Ring& ring) {
    if (ring.kind() == Ring::Kind::Z) throw std::invalid_argument("field_rank over Z");
    if (ring.kind() == Ring::Kind::Q) {
        SparseMatrix integral(a.rows(), a.cols());
        for (int c = 0; c < a.cols(); ++c) {
            Integer l = 1;
            for (const auto& [r, v] : a.column(c)) l = boost::multiprecision::lcm(l, denominator(v));
            for (const auto& [r, v] : a.column(c)) integral.set(r, c, v * l);
        }
        return static_cast<int>(smith_normal_form(integral).factors.size());
    }
    const std::int64_t p = ring.characteristic();
    Dense<std::int64_t> d(a.rows(), std::vector<std::int64_t>(a.cols(), 0));
    for (int c = 0; c < a.cols(); ++c)
        for (const auto& [r, v] : a.column(c)) d[r][c] = static_cast<std::int64_t>(numerator(ring.reduce(v)));
    auto inv = [&](std::int64_t x) {
        std::int64_t r = 1, e = p - 2;
        for (x %= p; e; e >>= 1, x = x * x % p)
            if (e & 1) r = r * x % p;
        return r;
    };
    int rank = 0;
    for (int c = 0; c < a.cols() && rank < a.rows(); ++c) {
        int piv = -1;
        for (int r = rank; r < a.rows(); ++r)
            if (d[r][c]) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(d[piv], d[rank]);
        const std::int64_t s = inv(d[rank][c]);
        for (int r = rank + 1; r < a.rows(); ++r) {
            if (!d[r][c]) continue;
            const std::int64_t q = d[r][c] * s % p;
            for (int j = c; j < a.cols(); ++j) d[r][j] = ((d[r][j] - q * d[rank][j]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

std::string HomologyGroup::to_string(const Ring& ring) const {
    std::vector<std::string> parts;
    if (rank > 0) parts.push_back(ring.name() + (rank > 1 ? "^" + std::to_string(rank) : ""));
    for (const auto& t : torsion) parts.push_back("Z/" + t.str());
    if (parts.empty()) return "0";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += " + " + parts[i];
    return s;
}

long HomologyReport::rank(int n) const {
    auto it = groups.find(n);
    return it == groups.end() ? 0 : it->second.rank;
}

nlohmann::json HomologyReport::to_json() const {
    nlohmann::json j;
    j["ring"] = ring.name();
    j["groups"] = nlohmann::json::object();
    for (const auto& [n, g] : groups) {
        std::vector<std::string> tor;
        for (const auto& t : g.torsion) tor.push_back(t.str());
        j["groups"][std::to_string(n)] = {{"rank", g.rank}, {"torsion", tor}};
    }
    return j;
}

std::string HomologyReport::to_string() const {
    if (groups.empty()) return "all homology vanishes";
    std::ostringstream os;
    for (const auto& [n, g] : groups) os << "H_" << n << " = " << g.to_string(ring) << "\n";
    return os.str();
}

HomologyReport homology(const ChainComplex& c) {
    const auto bad = verify_d_squared(c);
    if (!bad.empty()) throw Refusal("d^2 != 0 at " + bad.front().describe());
    HomologyReport h;
    h.ring = c.ring();
    const auto degs = c.degrees();
    if (degs.empty()) return h;
    // Rank and (over Z) invariant factors of each d(n).
    std::map<int, int> rank;
    std::map<int, std::vector<Integer>> factors;
    for (int n = degs.front(); n <= degs.back() + 1; ++n) {
        const SparseMatrix d = c.d(n);
        if (d.rows() == 0 || d.cols() == 0) {
            rank[n] = 0;
            continue;
        }
        if (c.ring().is_field()) {
            rank[n] = field_rank(d, c.ring());
        } else {
            factors[n] = smith_normal_form(d).factors;
            rank[n] = static_cast<int>(factors[n].size());
        }
    }
    for (int n : degs) {
        HomologyGroup g;
        g.rank = c.rank(n) - rank[n] - rank[n + 1];
        for (const auto& f : factors[n + 1])
            if (f > 1) g.torsion.push_back(f);
        if (g.rank != 0 || !g.torsion.empty()) h.groups[n] = std::move(g);
    }
    return h;
}

nlohmann::json matrix_to_json(const SparseMatrix& m) {
    std::vector<std::tuple<int, int, std::string>> entries;
    for (int c = 0; c < m.cols(); ++c)
        for (const auto& [r, v] : m.column(c)) entries.emplace_back(r, c, scalar_to_string(v));
    std::sort(entries.begin(), entries.end());
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [r, c, v] : entries) j.push_back({r, c, v});
    return j;
}

SparseMatrix matrix_from_json(const nlohmann::json& j, int rows, int cols) {
    SparseMatrix m(rows, cols);
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3) throw InputError("matrix entry must be [row, col, \"value\"]");
        const int r = e[0].get<int>(), c = e[1].get<int>();
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw InputError("matrix entry (" + std::to_string(r) + "," + std::to_string(c) + ") out of range");
        const Scalar v = e[2].is_string() ? scalar_from_string(e[2].get<std::string>()) : Scalar(e[2].get<long>());
        m.add(r, c, v);
    }
    return m;
}

nlohmann::json complex_to_json(const ChainComplex& c) {
    nlohmann::json j;
    j["ring"] = c.ring().name();
    j["basis"] = nlohmann::json::object();
    j["d"] = nlohmann::json::object();
    for (int n : c.degrees()) {
        j["basis"][std::to_string(n)] = c.module().labels(n);
        const SparseMatrix d = c.d(n);
        if (!d.is_zero()) j["d"][std::to_string(n)] = matrix_to_json(d);
    }
    return j;
}

ChainComplex complex_from_json(const nlohmann::json& j) {
    try {
        const Ring ring = Ring::parse(j.value("ring", std::string("Z")));
        GradedModule b;
        for (const auto& [key, labels] : j.at("basis").items())
            b.basis[std::stoi(key)] = labels.get<std::vector<std::string>>();
        std::map<int, SparseMatrix> d;
        if (j.contains("d"))
            for (const auto& [key, entries] : j.at("d").items()) {
                const int n = std::stoi(key);
                d.emplace(n, matrix_from_json(entries, b.rank(n - 1), b.rank(n)));
            }
        return ChainComplex(ring, std::move(b), std::move(d));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("complex JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw InputError("complex JSON: degrees must be integers");
    }
}

}  // namespace opw::chain
