#pragma once

#include "billiards/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace billiards {

bool is_prime(int n);

// Arithmetic in Z/p, p prime. Values live in [0, p).
class PrimeField {
public:
    explicit PrimeField(int p);
    int p() const { return p_; }
    int reduce(long long a) const {
        int r = static_cast<int>(a % p_);
        return r < 0 ? r + p_ : r;
    }
    int add(int a, int b) const { return (a + b) % p_; }
    int sub(int a, int b) const { return (a - b + p_) % p_; }
    int mul(int a, int b) const { return static_cast<int>((static_cast<long long>(a) * b) % p_); }
    int neg(int a) const { return (p_ - a) % p_; }
    int inv(int a) const; // a != 0 mod p

private:
    int p_;
    std::vector<int> inv_;
};

struct GradedGenerator {
    std::string name;
    int degree; // >= 1
};

// exponent per generator; the monomial x_1^{e_1} ... x_n^{e_n} in this order
using Exponents = std::vector<int>;

struct AlgebraTerm {
    int coeff; // in [1, p)
    Exponents mono;
};

// sorted by monomial, coefficients nonzero
using AlgebraElement = std::vector<AlgebraTerm>;

struct BettiTable {
    std::map<int, int> dims; // degree -> dimension, nonzero entries only
    int top_degree = 0;      // largest degree with nonzero dimension
    int dim(int degree) const;
    int total() const;
};

// Finitely presented graded-commutative algebra over F_p with a monomial
// basis computed per degree.
//
// Multiplication follows the Koszul sign rule: generators of odd degree
// anticommute (their squares vanish in odd characteristic and are pruned
// automatically), generators of even degree are central. Monomial-by-monomial
// products carry the sign of sorting the factors into increasing generator
// order.
//
// The quotient is computed degree by degree: single-monomial relations are
// absorbed into the admissible-monomial enumeration, the remaining relations
// are multiplied by every admissible monomial of complementary degree and the
// resulting coefficient matrix is row-reduced over F_p. The non-pivot
// monomials form the basis of the degree, and normal_form reduces arbitrary
// elements against the echelon rows.
class GradedAlgebra {
public:
    GradedAlgebra(int prime, std::vector<GradedGenerator> generators,
                  std::vector<AlgebraElement> relations, int max_degree);

    int prime() const { return field_.p(); }
    int max_degree() const { return max_degree_; }
    const std::vector<GradedGenerator>& generators() const { return generators_; }
    int generator_index(std::string_view name) const; // -1 if absent

    int degree_of(const Exponents& mono) const;
    const std::vector<Exponents>& monomials(int degree) const; // admissible, sorted
    std::vector<Exponents> basis(int degree) const;
    int dimension(int degree) const;
    BettiTable betti() const;
    int top_degree() const;

    AlgebraElement normal_form(const AlgebraElement& e) const;
    AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) const;
    AlgebraElement generator_element(int gen) const;
    AlgebraElement generator_power(int gen, int k) const; // normal form of the k-th power

    std::string to_string(const AlgebraElement& e) const;

    // Product of two monomials of the free graded-commutative algebra:
    // (sign, exponent sum), or nothing when an odd generator squares in odd
    // characteristic. Shared with the presentation builders.
    static std::optional<std::pair<int, Exponents>>
    free_product(const Exponents& a, const Exponents& b, const std::vector<int>& degrees, int prime);

private:
    struct DegreeData {
        std::vector<Exponents> monomials;        // sorted (lexicographic)
        std::map<int, std::vector<int>> echelon; // pivot column -> reduced row
    };

    bool admissible(const Exponents& mono) const;
    void enumerate_monomials(int degree, int gen, Exponents& current,
                             std::vector<Exponents>& out) const;
    void compute_degree(int degree);
    std::vector<int>& reduce_row(const DegreeData& data, std::vector<int>& row) const;

    PrimeField field_;
    std::vector<GradedGenerator> generators_;
    std::vector<int> degrees_;
    std::vector<AlgebraElement> relations_;      // non-monomial relations
    std::vector<Exponents> zero_monomials_;      // minimal monomials equal to zero
    int max_degree_;
    std::vector<DegreeData> by_degree_;
};

// H^*(G(R^d, p); F_p): p generators of degree d-1 with square-zero relations
// and one cyclic sum relation in degree (p-1)(d-1).
GradedAlgebra build_plane_config_algebra(int d, int p);

// H^*(G(S^{d-1}, p); F_p), p > 2:
//   even d >= 4: generators u (degree d-1) and s_i (degree i(d-2), i <= p-2),
//                u^2 = 0, s_i s_j = binom(i+j, i) s_{i+j} truncated above p-2;
//   odd  d >= 3: generators w (degree 2d-3) and t_i (degree i(2d-4),
//                i <= (p-3)/2) with the analogous rules.
GradedAlgebra build_sphere_config_algebra(int d, int p);

// normal form of the k-th power of a named generator
AlgebraElement power_check(const GradedAlgebra& algebra, std::string_view gen_name, int k);

// Closed-form index and bound arithmetic, cross-checked against the top
// degrees of the two presented algebras (throws std::logic_error on any
// mismatch):
//   hind_plane       = (d-1)(p-1)
//   hind_sphere      = (d-2)(p-1) + 1
//   dim_bound        = (d-2)(p-1) + 1   (CW dimension of the sphere space)
//   cat_bound        = hind_sphere + 1
//   trajectory_bound = (d-2)(p-1) + 2
struct IndexBounds {
    int d = 0;
    int p = 0;
    int hind_plane = 0;
    int hind_sphere = 0;
    int dim_bound = 0;
    int cat_bound = 0;
    int trajectory_bound = 0;
};

IndexBounds index_and_bound(int d, int p); // d >= 3, p an odd prime

} // namespace billiards
