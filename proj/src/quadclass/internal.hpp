#pragma once

#include <functional>
#include <memory>

#include "nt/quadclass.hpp"

namespace nt::detail {

using MulFn = std::function<QuadForm(const QuadForm&, const QuadForm&)>;

/* Grows a subgroup of a finite abelian p-group one generator at a time,
 * keeping every element with its exponent vector over the generators. */
class SylowBuilder {
  public:
    SylowBuilder(i128 p, QuadForm one, MulFn mul);

    /* x must be a p-element; returns true when the subgroup grew */
    bool add(const QuadForm& x);
    u128 size() const { return part_.coords.size(); }
    bool contains(const QuadForm& x) const { return part_.index.count(form_key(x)) != 0; }
    SylowPart finish() &&;

  private:
    SylowPart part_;
    std::vector<QuadForm> elems_;
    QuadForm one_;
    MulFn mul_;
};

std::shared_ptr<const SmallFactorTable> small_factor_table(std::uint32_t needed);

/* divisors of n (n >= 1) */
std::vector<u128> divisors_of(u128 n);

QuadForm pow_with(const MulFn& mul, const QuadForm& one, QuadForm g, u128 e);

/* Fill in canonical generators and quotient data of a group assembled
 * from its Sylow parts. */
void finalize_class_group(ClassGroup& G);

i128 inv_mod(i128 a, i128 m);

std::vector<std::pair<i128, int>> factor_small(i128 h);
std::vector<mpz_class> sylow_raw_coords(const ClassGroup& G, std::size_t si, const QuadForm& x);
void build_sylows_known_order(ClassGroup& G, i128 h, const std::vector<QuadForm>& cands,
                              std::optional<i128> only_p);

/* cyclic structure for prime p with no table: generator only */
SylowPart prime_cyclic_part(i128 p, const QuadForm& gen);

} // namespace nt::detail
