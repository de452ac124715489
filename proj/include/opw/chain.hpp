#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

namespace opw::chain {

using Integer = boost::multiprecision::cpp_int;
using Scalar = boost::multiprecision::cpp_rational;

std::string scalar_to_string(const Scalar& x);
Scalar scalar_from_string(const std::string& s);

class Ring {
  public:
    enum class Kind { Z, Q, Fp };
    static Ring integers() { return Ring(Kind::Z, 0); }
    static Ring rationals() { return Ring(Kind::Q, 0); }
    static Ring prime_field(int p);
    // "Z", "Q", "F<p>" or "Fp:<p>"
    static Ring parse(const std::string& s);

    Kind kind() const { return kind_; }
    int characteristic() const { return p_; }
    bool is_field() const { return kind_ != Kind::Z; }
    std::string name() const;
    // Representative of x in the ring; throws InputError if x does not belong.
    Scalar reduce(const Scalar& x) const;
    friend bool operator==(const Ring& a, const Ring& b) { return a.kind_ == b.kind_ && a.p_ == b.p_; }
    friend bool operator!=(const Ring& a, const Ring& b) { return !(a == b); }

  private:
    Ring(Kind k, int p) : kind_(k), p_(p) {}
    Kind kind_;
    int p_;
};

// Column-major sparse matrix with exact entries; zero entries are never stored.
class SparseMatrix {
  public:
    SparseMatrix(int rows = 0, int cols = 0) : rows_(rows), data_(cols) {}
    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(data_.size()); }
    void add(int r, int c, const Scalar& v);
    void set(int r, int c, const Scalar& v);
    Scalar at(int r, int c) const;
    const std::map<int, Scalar>& column(int c) const { return data_[c]; }
    void set_column(int c, std::map<int, Scalar> col);
    bool is_zero() const;
    std::size_t nonzeros() const;
    SparseMatrix operator*(const SparseMatrix& b) const;
    SparseMatrix operator+(const SparseMatrix& b) const;
    SparseMatrix operator-(const SparseMatrix& b) const;
    SparseMatrix scaled(const Scalar& s) const;
    SparseMatrix transpose() const;
    // Entries reduced into `ring`, zeros dropped.
    SparseMatrix reduced(const Ring& ring) const;
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        return a.rows_ == b.rows_ && a.data_ == b.data_;
    }

  private:
    int rows_;
    std::vector<std::map<int, Scalar>> data_;
};

// Basis labels per degree.
struct GradedModule {
    std::map<int, std::vector<std::string>> basis;
    int rank(int n) const;
    const std::vector<std::string>& labels(int n) const;
};

struct MatrixViolation {
    int degree;
    int row;
    int col;
    Scalar value;
    std::string describe() const;
};

// d(n): degree n -> degree n-1. d(n-1) d(n) = 0 is checked on construction
// unless `check` is false.
class ChainComplex {
  public:
    ChainComplex() : ring_(Ring::integers()) {}
    ChainComplex(Ring ring, GradedModule basis, std::map<int, SparseMatrix> d, bool check = true);

    const Ring& ring() const { return ring_; }
    const GradedModule& module() const { return basis_; }
    int rank(int n) const { return basis_.rank(n); }
    // Degrees with non-zero rank, ascending.
    std::vector<int> degrees() const;
    SparseMatrix d(int n) const;
    bool is_zero() const;

  private:
    Ring ring_;
    GradedModule basis_;
    std::map<int, SparseMatrix> d_;
};

using ComplexPtr = std::shared_ptr<const ChainComplex>;

// f(n): source degree n -> target degree n + degree. A chain map satisfies
// d f = (-1)^degree f d.
struct ChainMap {
    ComplexPtr source;
    ComplexPtr target;
    int degree = 0;
    std::map<int, SparseMatrix> f;
    SparseMatrix component(int n) const;
};

ChainMap identity_map(ComplexPtr c);

std::vector<MatrixViolation> verify_d_squared(const ChainComplex& c);
std::vector<MatrixViolation> verify_chain_map(const ChainMap& f);

// C[d]_n = C_{n-d} with differential (-1)^d d.
ChainComplex shift_complex(const ChainComplex& c, int d);
// Basis labels "(c,d)" ordered by the degree of c, then c, then d.
ChainComplex tensor_complexes(const ChainComplex& c, const ChainComplex& d);

struct SmithForm {
    std::vector<Integer> factors;  // non-zero diagonal entries, positive, each dividing the next
    int rows = 0;
    int cols = 0;
    bool used_big_integers = false;
};
// Smith normal form of an integer matrix; the factorization U A V = D is
// re-multiplied and compared before returning (std::logic_error otherwise).
SmithForm smith_normal_form(const SparseMatrix& a);
// Rank over Q or F_p.
int field_rank(const SparseMatrix& a, const Ring& ring);

struct HomologyGroup {
    long rank = 0;
    std::vector<Integer> torsion;  // invariant factors > 1
    std::string to_string(const Ring& ring) const;
};

struct HomologyReport {
    Ring ring = Ring::integers();
    std::map<int, HomologyGroup> groups;  // only non-zero groups
    nlohmann::json to_json() const;
    std::string to_string() const;
    long rank(int n) const;
};

HomologyReport homology(const ChainComplex& c);

nlohmann::json complex_to_json(const ChainComplex& c);
ChainComplex complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const SparseMatrix& m);
SparseMatrix matrix_from_json(const nlohmann::json& j, int rows, int cols);

}  // namespace opw::chain
