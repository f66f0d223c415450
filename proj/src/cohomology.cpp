#include "billiards/cohomology.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

namespace billiards {

bool is_prime(int n) {
    if (n < 2)
        return false;
    for (int q = 2; static_cast<long long>(q) * q <= n; ++q)
        if (n % q == 0)
            return false;
    return true;
}

PrimeField::PrimeField(int p) : p_(p) {
    if (!is_prime(p))
        throw InvalidParams("coefficient modulus must be prime");
    inv_.assign(p, 0);
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b)
            if (a * b % p == 1) {
                inv_[a] = b;
                break;
            }
}

int PrimeField::inv(int a) const {
    a = reduce(a);
    if (a == 0)
        throw InvalidParams("zero is not invertible");
    return inv_[a];
}

int BettiTable::dim(int degree) const {
    const auto it = dims.find(degree);
    return it == dims.end() ? 0 : it->second;
}

int BettiTable::total() const {
    int t = 0;
    for (const auto& [deg, dim] : dims)
        t += dim;
    return t;
}

std::optional<std::pair<int, Exponents>>
GradedAlgebra::free_product(const Exponents& a, const Exponents& b, const std::vector<int>& degrees,
                            int prime) {
    const int n = static_cast<int>(degrees.size());
    Exponents sum(n);
    long long swaps = 0;
    for (int j = 0; j < n; ++j) {
        sum[j] = a[j] + b[j];
        if (degrees[j] % 2 == 1) {
            if (prime != 2 && sum[j] > 1)
                return std::nullopt; // odd square vanishes in odd characteristic
            if (b[j] > 0)
                for (int k = j + 1; k < n; ++k)
                    if (degrees[k] % 2 == 1)
                        swaps += static_cast<long long>(b[j]) * a[k];
        }
    }
    const int sign = (prime != 2 && (swaps & 1)) ? -1 : 1;
    return std::make_pair(sign, std::move(sum));
}

GradedAlgebra::GradedAlgebra(int prime, std::vector<GradedGenerator> generators,
                             std::vector<AlgebraElement> relations, int max_degree)
    : field_(prime), generators_(std::move(generators)), max_degree_(max_degree) {
    if (max_degree_ < 0)
        throw InvalidParams("max_degree must be >= 0");
    const int n = static_cast<int>(generators_.size());
    if (n == 0)
        throw InvalidParams("an algebra needs at least one generator");
    std::set<std::string> names;
    for (const auto& g : generators_) {
        if (g.name.empty() || !names.insert(g.name).second)
            throw InvalidParams("generator names must be nonempty and distinct");
        if (g.degree < 1)
            throw InvalidParams("generator degrees must be >= 1");
        degrees_.push_back(g.degree);
    }
    if (prime != 2)
        for (int i = 0; i < n; ++i)
            if (degrees_[i] % 2 == 1) {
                Exponents sq(n, 0);
                sq[i] = 2;
                zero_monomials_.push_back(std::move(sq));
            }

    for (const auto& rel : relations) {
        std::map<Exponents, int> acc;
        for (const auto& term : rel) {
            if (static_cast<int>(term.mono.size()) != n)
                throw InvalidParams("relation monomial has the wrong arity");
            for (int e : term.mono)
                if (e < 0)
                    throw InvalidParams("negative exponent in a relation");
            int& slot = acc[term.mono];
            slot = field_.add(slot, field_.reduce(term.coeff));
        }
        AlgebraElement norm;
        for (const auto& [mono, coeff] : acc)
            if (coeff != 0)
                norm.push_back(AlgebraTerm{coeff, mono});
        if (norm.empty())
            continue;
        const int deg = degree_of(norm.front().mono);
        if (deg < 1)
            throw InvalidParams("relations must have degree >= 1");
        for (const auto& term : norm)
            if (degree_of(term.mono) != deg)
                throw InvalidParams("relations must be homogeneous");
        if (norm.size() == 1)
            zero_monomials_.push_back(norm.front().mono);
        else
            relations_.push_back(std::move(norm));
    }

    by_degree_.resize(max_degree_ + 1);
    for (int deg = 0; deg <= max_degree_; ++deg)
        compute_degree(deg);
}

int GradedAlgebra::generator_index(std::string_view name) const {
    for (int i = 0; i < static_cast<int>(generators_.size()); ++i)
        if (generators_[i].name == name)
            return i;
    return -1;
}

namespace {

// Column order of the per-degree elimination: monomials with more generator
// factors come first, so relations like s_i s_j = binom(i+j,i) s_{i+j} pivot
// on the composite monomial and the basis keeps the fewest-factor
// representatives (the presentations name their bases that way).
bool elimination_order(const Exponents& a, const Exponents& b) {
    int fa = 0, fb = 0;
    for (const int e : a)
        fa += e;
    for (const int e : b)
        fb += e;
    if (fa != fb)
        return fa > fb;
    return a < b;
}

} // namespace

int GradedAlgebra::degree_of(const Exponents& mono) const {
    int deg = 0;
    for (std::size_t i = 0; i < mono.size(); ++i)
        deg += mono[i] * degrees_[i];
    return deg;
}

bool GradedAlgebra::admissible(const Exponents& mono) const {
    for (const auto& z : zero_monomials_) {
        bool divides = true;
        for (std::size_t i = 0; i < mono.size() && divides; ++i)
            if (mono[i] < z[i])
                divides = false;
        if (divides)
            return false;
    }
    return true;
}

void GradedAlgebra::enumerate_monomials(int degree, int gen, Exponents& current,
                                        std::vector<Exponents>& out) const {
    const int n = static_cast<int>(degrees_.size());
    if (gen == n) {
        if (degree == 0)
            out.push_back(current);
        return;
    }
    const bool odd = degrees_[gen] % 2 == 1 && field_.p() != 2;
    const int cap = odd ? 1 : degree / degrees_[gen];
    for (int e = 0; e <= cap && e * degrees_[gen] <= degree; ++e) {
        current[gen] = e;
        enumerate_monomials(degree - e * degrees_[gen], gen + 1, current, out);
    }
    current[gen] = 0;
}

std::vector<int>& GradedAlgebra::reduce_row(const DegreeData& data, std::vector<int>& row) const {
    for (const auto& [pivot, prow] : data.echelon) {
        const int c = row[pivot];
        if (c == 0)
            continue;
        for (std::size_t k = pivot; k < row.size(); ++k)
            if (prow[k] != 0)
                row[k] = field_.sub(row[k], field_.mul(c, prow[k]));
    }
    return row;
}

void GradedAlgebra::compute_degree(int degree) {
    DegreeData& data = by_degree_[degree];
    const int n = static_cast<int>(degrees_.size());

    Exponents current(n, 0);
    std::vector<Exponents> all;
    enumerate_monomials(degree, 0, current, all);
    for (auto& mono : all)
        if (admissible(mono))
            data.monomials.push_back(std::move(mono));
    std::sort(data.monomials.begin(), data.monomials.end(), elimination_order);
    const int cols = static_cast<int>(data.monomials.size());
    if (cols == 0)
        return;

    auto column_of = [&](const Exponents& mono) -> int {
        const auto it = std::lower_bound(data.monomials.begin(), data.monomials.end(), mono,
                                         elimination_order);
        assert(it != data.monomials.end() && *it == mono);
        return static_cast<int>(it - data.monomials.begin());
    };

    for (const auto& rel : relations_) {
        const int rdeg = degree_of(rel.front().mono);
        if (rdeg > degree)
            continue;
        for (const auto& mult : by_degree_[degree - rdeg].monomials) {
            std::vector<int> row(cols, 0);
            bool nonzero = false;
            for (const auto& term : rel) {
                const auto prod = free_product(mult, term.mono, degrees_, field_.p());
                if (!prod || !admissible(prod->second))
                    continue;
                const int col = column_of(prod->second);
                row[col] = field_.add(row[col], field_.reduce(static_cast<long long>(prod->first) *
                                                              term.coeff));
            }
            reduce_row(data, row);
            int pivot = -1;
            for (int c = 0; c < cols; ++c)
                if (row[c] != 0) {
                    pivot = c;
                    nonzero = true;
                    break;
                }
            if (!nonzero)
                continue;
            const int scale = field_.inv(row[pivot]);
            for (int c = pivot; c < cols; ++c)
                row[c] = field_.mul(row[c], scale);
            for (auto& [opc, orow] : data.echelon) {
                const int c = orow[pivot];
                if (c == 0)
                    continue;
                for (int k = pivot; k < cols; ++k)
                    if (row[k] != 0)
                        orow[k] = field_.sub(orow[k], field_.mul(c, row[k]));
            }
            data.echelon.emplace(pivot, std::move(row));
        }
    }
}

const std::vector<Exponents>& GradedAlgebra::monomials(int degree) const {
    if (degree < 0 || degree > max_degree_)
        throw InvalidParams("degree out of the computed range");
    return by_degree_[degree].monomials;
}

std::vector<Exponents> GradedAlgebra::basis(int degree) const {
    if (degree < 0 || degree > max_degree_)
        throw InvalidParams("degree out of the computed range");
    const DegreeData& data = by_degree_[degree];
    std::vector<Exponents> out;
    for (int c = 0; c < static_cast<int>(data.monomials.size()); ++c)
        if (!data.echelon.count(c))
            out.push_back(data.monomials[c]);
    return out;
}

int GradedAlgebra::dimension(int degree) const {
    if (degree < 0 || degree > max_degree_)
        throw InvalidParams("degree out of the computed range");
    const DegreeData& data = by_degree_[degree];
    return static_cast<int>(data.monomials.size() - data.echelon.size());
}

BettiTable GradedAlgebra::betti() const {
    BettiTable table;
    for (int deg = 0; deg <= max_degree_; ++deg) {
        const int dim = dimension(deg);
        if (dim > 0) {
            table.dims[deg] = dim;
            table.top_degree = deg;
        }
    }
    return table;
}

int GradedAlgebra::top_degree() const { return betti().top_degree; }

AlgebraElement GradedAlgebra::normal_form(const AlgebraElement& e) const {
    const int n = static_cast<int>(degrees_.size());
    std::map<int, std::vector<int>> rows;
    for (const auto& term : e) {
        if (static_cast<int>(term.mono.size()) != n)
            throw InvalidParams("monomial has the wrong arity");
        const int coeff = field_.reduce(term.coeff);
        if (coeff == 0 || !admissible(term.mono))
            continue;
        const int deg = degree_of(term.mono);
        if (deg > max_degree_)
            throw InvalidParams("element degree exceeds the computed range");
        const auto& monos = by_degree_[deg].monomials;
        auto& row = rows[deg];
        if (row.empty())
            row.assign(monos.size(), 0);
        const auto it = std::lower_bound(monos.begin(), monos.end(), term.mono, elimination_order);
        row[it - monos.begin()] = field_.add(row[it - monos.begin()], coeff);
    }
    AlgebraElement out;
    for (auto& [deg, row] : rows) {
        reduce_row(by_degree_[deg], row);
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != 0)
                out.push_back(AlgebraTerm{row[c], by_degree_[deg].monomials[c]});
    }
    std::sort(out.begin(), out.end(),
              [](const AlgebraTerm& a, const AlgebraTerm& b) { return a.mono < b.mono; });
    return out;
}

AlgebraElement GradedAlgebra::multiply(const AlgebraElement& a, const AlgebraElement& b) const {
    std::map<Exponents, int> acc;
    for (const auto& ta : a)
        for (const auto& tb : b) {
            const auto prod = free_product(ta.mono, tb.mono, degrees_, field_.p());
            if (!prod)
                continue;
            const int c = field_.reduce(static_cast<long long>(prod->first) * ta.coeff * tb.coeff);
            int& slot = acc[prod->second];
            slot = field_.add(slot, c);
        }
    AlgebraElement out;
    for (const auto& [mono, coeff] : acc)
        if (coeff != 0)
            out.push_back(AlgebraTerm{coeff, mono});
    return out;
}

AlgebraElement GradedAlgebra::generator_element(int gen) const {
    if (gen < 0 || gen >= static_cast<int>(generators_.size()))
        throw InvalidParams("generator index out of range");
    Exponents mono(generators_.size(), 0);
    mono[gen] = 1;
    return {AlgebraTerm{1, std::move(mono)}};
}

AlgebraElement GradedAlgebra::generator_power(int gen, int k) const {
    if (k < 0)
        throw InvalidParams("power must be >= 0");
    AlgebraElement acc = {AlgebraTerm{1, Exponents(generators_.size(), 0)}};
    const AlgebraElement g = generator_element(gen);
    for (int i = 0; i < k; ++i)
        acc = multiply(acc, g);
    return normal_form(acc);
}

std::string GradedAlgebra::to_string(const AlgebraElement& e) const {
    if (e.empty())
        return "0";
    std::ostringstream os;
    bool first_term = true;
    for (const auto& term : e) {
        if (!first_term)
            os << " + ";
        first_term = false;
        bool constant = true;
        for (int x : term.mono)
            if (x != 0)
                constant = false;
        if (term.coeff != 1 || constant)
            os << term.coeff;
        bool first_factor = term.coeff == 1 && !constant;
        for (std::size_t i = 0; i < term.mono.size(); ++i) {
            if (term.mono[i] == 0)
                continue;
            if (!first_factor)
                os << "*";
            first_factor = false;
            os << generators_[i].name;
            if (term.mono[i] > 1)
                os << "^" << term.mono[i];
        }
    }
    return os.str();
}

namespace {

int binom_mod(int n, int k, const PrimeField& field) {
    long long num = 1;
    for (int i = 0; i < k; ++i)
        num = num * ((n - i) % field.p()) % field.p();
    long long den = 1;
    for (int i = 1; i <= k; ++i)
        den = den * (i % field.p()) % field.p();
    return field.mul(field.reduce(num), field.inv(field.reduce(den)));
}

} // namespace

GradedAlgebra build_plane_config_algebra(int d, int p) {
    if (d < 2)
        throw InvalidParams("plane configuration algebra needs d >= 2");
    if (!is_prime(p))
        throw InvalidParams("p must be prime");
    const int gdeg = d - 1;
    std::vector<GradedGenerator> gens;
    std::vector<int> degrees;
    for (int i = 1; i <= p; ++i) {
        gens.push_back(GradedGenerator{"s" + std::to_string(i), gdeg});
        degrees.push_back(gdeg);
    }

    std::vector<AlgebraElement> rels;
    for (int i = 0; i < p; ++i) {
        Exponents sq(p, 0);
        sq[i] = 2;
        rels.push_back({AlgebraTerm{1, std::move(sq)}});
    }

    // sum over i of s_i s_{i+1} ... s_{i+p-2}, each product sorted with the
    // Koszul sign of the sorting permutation
    AlgebraElement cyclic;
    for (int i = 0; i < p; ++i) {
        int coeff = 1;
        Exponents acc(p, 0);
        for (int j = 0; j < p - 1; ++j) {
            Exponents factor(p, 0);
            factor[(i + j) % p] = 1;
            const auto prod = GradedAlgebra::free_product(acc, factor, degrees, p);
            if (!prod)
                throw std::logic_error("cyclic product hit a vanishing square");
            coeff *= prod->first;
            acc = prod->second;
        }
        cyclic.push_back(AlgebraTerm{coeff < 0 ? p - 1 : 1, std::move(acc)});
    }
    rels.push_back(std::move(cyclic));

    return GradedAlgebra(p, std::move(gens), std::move(rels), gdeg * p);
}

GradedAlgebra build_sphere_config_algebra(int d, int p) {
    if (d < 3)
        throw InvalidParams("sphere configuration algebra needs d >= 3");
    if (!is_prime(p) || p == 2)
        throw InvalidParams("p must be an odd prime");
    const bool even = d % 2 == 0;
    const int odd_deg = even ? d - 1 : 2 * d - 3;
    const int unit = even ? d - 2 : 2 * d - 4;
    const int k_max = even ? p - 2 : (p - 3) / 2;
    const std::string base = even ? "s" : "t";

    std::vector<GradedGenerator> gens;
    gens.push_back(GradedGenerator{even ? "u" : "w", odd_deg});
    for (int i = 1; i <= k_max; ++i)
        gens.push_back(GradedGenerator{base + std::to_string(i), i * unit});
    const int n = k_max + 1;

    PrimeField field(p);
    std::vector<AlgebraElement> rels;
    {
        Exponents sq(n, 0);
        sq[0] = 2;
        rels.push_back({AlgebraTerm{1, std::move(sq)}});
    }
    for (int i = 1; i <= k_max; ++i)
        for (int j = i; j <= k_max; ++j) {
            Exponents prod(n, 0);
            prod[i] += 1;
            prod[j] += 1;
            if (i + j <= k_max) {
                Exponents target(n, 0);
                target[i + j] = 1;
                const int c = binom_mod(i + j, i, field);
                rels.push_back({AlgebraTerm{1, std::move(prod)},
                                AlgebraTerm{field.neg(c), std::move(target)}});
            } else {
                rels.push_back({AlgebraTerm{1, std::move(prod)}});
            }
        }

    const int top = (d - 2) * (p - 1) + 1;
    const int max_degree = std::max(top, 2 * odd_deg);
    return GradedAlgebra(p, std::move(gens), std::move(rels), max_degree);
}

AlgebraElement power_check(const GradedAlgebra& algebra, std::string_view gen_name, int k) {
    const int gen = algebra.generator_index(gen_name);
    if (gen < 0)
        throw InvalidParams("unknown generator name");
    return algebra.generator_power(gen, k);
}

IndexBounds index_and_bound(int d, int p) {
    if (d < 3)
        throw InvalidParams("bounds require d >= 3");
    if (!is_prime(p) || p == 2)
        throw InvalidParams("bounds require an odd prime p");
    IndexBounds b;
    b.d = d;
    b.p = p;
    b.hind_plane = (d - 1) * (p - 1);
    b.hind_sphere = (d - 2) * (p - 1) + 1;
    b.dim_bound = (d - 2) * (p - 1) + 1;
    b.cat_bound = b.hind_sphere + 1;
    b.trajectory_bound = (d - 2) * (p - 1) + 2;

    const int plane_top = build_plane_config_algebra(d, p).top_degree();
    if (plane_top != b.hind_plane)
        throw std::logic_error("plane algebra top degree disagrees with the index formula");
    const int sphere_top = build_sphere_config_algebra(d, p).top_degree();
    if (sphere_top != b.hind_sphere)
        throw std::logic_error("sphere algebra top degree disagrees with the index formula");
    return b;
}

} // namespace billiards
