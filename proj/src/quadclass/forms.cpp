#include "nt/forms.hpp"
#include "nt/arith.hpp"

#include <stdexcept>

namespace nt {

std::string to_string(const QuadForm& f)
{
    return "(" + to_string(f.a) + "," + to_string(f.b) + "," + to_string(f.c) + ")";
}

QuadForm reduce(const QuadForm& f)
{
    i128 D = f.disc();
    if (D == 0) throw std::invalid_argument("reduce: degenerate form");
    if (D < 0) {
        if (f.a < 0) throw std::invalid_argument("reduce: negative definite form");
        return reduce_imag(f);
    }
    u128 r;
    if (is_square((u128)D, &r)) throw std::invalid_argument("reduce: square discriminant");
    return reduce_real<i128>(f, D, (i128)isqrt((u128)D));
}

QuadForm compose(const QuadForm& f, const QuadForm& g)
{
    if (f.disc() != g.disc()) throw std::invalid_argument("compose: discriminants differ");
    return reduce(compose_raw(f, g));
}

} // namespace nt
