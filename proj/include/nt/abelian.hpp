#pragma once

#include <string>
#include <vector>

#include "nt/int128.hpp"

namespace nt {

using ZMatrix = std::vector<std::vector<mpz_class>>;

/* Finite abelian group as a decreasing divisor chain d_1, d_2, ... with
 * d_{i+1} | d_i and every d_i >= 2, printed as [d_1,d_2,...]. */
struct AbelianGroupStructure {
    std::vector<i128> divisors;

    i128 order() const;
    int rank(i128 p) const;        /* p-rank */
    int vp(i128 p) const;          /* v_p(order) */
    AbelianGroupStructure p_part(i128 p) const;
    std::string str() const;
    bool trivial() const { return divisors.empty(); }
    bool operator==(const AbelianGroupStructure&) const = default;

    /* Canonical chain from arbitrary cyclic factor orders (zeros rejected). */
    static AbelianGroupStructure from_cyclic(const std::vector<i128>& orders);
    static AbelianGroupStructure parse(const std::string& s); /* "[12,2,2,2]" */
};

/* Smith normal form of Z^k modulo the row space of `rel` (r x k).
 * After construction: coordinates of x (row vector over the original
 * generators) are x*Q; the i-th new generator is row i of Qinv. */
class SmithForm {
  public:
    SmithForm(ZMatrix rel, std::size_t k);

    std::size_t columns() const { return k_; }
    const std::vector<mpz_class>& diagonal() const { return diag_; } /* d_1 | d_2 | ..., 0 = free */
    const ZMatrix& Q() const { return Q_; }
    const ZMatrix& Qinv() const { return Qinv_; }
    bool finite() const;

  private:
    std::size_t k_;
    std::vector<mpz_class> diag_;
    ZMatrix Q_, Qinv_;
};

/* Finite quotient Z^k / L with coordinates in the canonical chain order. */
class FiniteAbelianQuotient {
  public:
    FiniteAbelianQuotient() = default;
    FiniteAbelianQuotient(const ZMatrix& relations, std::size_t k); /* throws if infinite */

    const AbelianGroupStructure& structure() const { return structure_; }
    std::size_t ngens() const { return k_; }

    /* coordinates of an element given in old generators, reduced mod d_i */
    std::vector<i128> coords(const std::vector<mpz_class>& x) const;
    std::vector<i128> coords(const std::vector<i128>& x) const;
    /* old-generator exponent vector of the i-th canonical generator */
    const std::vector<mpz_class>& generator(std::size_t i) const { return gens_[i]; }

  private:
    std::size_t k_ = 0;
    AbelianGroupStructure structure_;
    std::vector<std::size_t> cols_;   /* SNF column for each chain entry */
    std::vector<std::vector<mpz_class>> qcols_;
    std::vector<std::vector<mpz_class>> gens_;
};

} // namespace nt
