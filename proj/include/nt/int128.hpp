#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <gmpxx.h>

namespace nt {

using i128 = __int128;
using u128 = unsigned __int128;
using u64 = std::uint64_t;
using i64 = std::int64_t;

std::string to_string(i128 x);
std::string to_string(u128 x);

/* Accepts an optional sign followed by decimal digits. Throws
 * std::invalid_argument on anything else, std::out_of_range on overflow. */
i128 parse_i128(std::string_view s);

mpz_class to_mpz(i128 x);
i128 to_i128(const mpz_class& z); /* throws std::overflow_error */

inline i128 abs128(i128 x) { return x < 0 ? -x : x; }

u64 isqrt(u64 n);
u128 isqrt(u128 n);
bool is_square(u128 n, u128* root = nullptr);

u128 gcd(u128 a, u128 b);
inline i128 gcd(i128 a, i128 b) { return (i128)gcd((u128)abs128(a), (u128)abs128(b)); }

/* Extended gcd: returns g = gcd(a,b) >= 0 with u*a + v*b = g. */
template <class I> I xgcd(I a, I b, I& u, I& v)
{
    I u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        I q = a / b;
        I t = a - q * b; a = b; b = t;
        t = u0 - q * u1; u0 = u1; u1 = t;
        t = v0 - q * v1; v0 = v1; v1 = t;
    }
    if (a < 0) { a = -a; u0 = -u0; v0 = -v0; }
    u = u0; v = v0;
    return a;
}

/* Floor division and nonnegative remainder. */
template <class I> I fdiv(I a, I b)
{
    I q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
template <class I> I pmod(I a, I m)
{
    I r = a % m;
    return r < 0 ? r + (m < 0 ? -m : m) : r;
}

int valuation(u128 n, u128 p);
u128 ipow(u128 b, unsigned e); /* throws std::overflow_error */

} // namespace nt
