#include "nt/int128.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nt {

std::string to_string(u128 x)
{
    if (x == 0) return "0";
    std::string s;
    while (x) { s.push_back(char('0' + int(x % 10))); x /= 10; }
    std::reverse(s.begin(), s.end());
    return s;
}

std::string to_string(i128 x)
{
    if (x < 0) return "-" + to_string((u128)(-(x + 1)) + 1);
    return to_string((u128)x);
}

i128 parse_i128(std::string_view s)
{
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) { neg = s[i] == '-'; ++i; }
    if (i == s.size()) throw std::invalid_argument("empty integer");
    const u128 lim = (u128)1 << 126;
    u128 v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("bad digit in integer '" + std::string(s) + "'");
        v = v * 10 + u128(s[i] - '0');
        if (v >= lim) throw std::out_of_range("integer too large: " + std::string(s));
    }
    return neg ? -(i128)v : (i128)v;
}

mpz_class to_mpz(i128 x)
{
    bool neg = x < 0;
    u128 u = neg ? (u128)(-(x + 1)) + 1 : (u128)x;
    mpz_class hi((unsigned long)(u64)(u >> 64)), lo((unsigned long)(u64)u);
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

i128 to_i128(const mpz_class& z)
{
    if (mpz_sizeinbase(z.get_mpz_t(), 2) > 126)
        throw std::overflow_error("value exceeds 126 bits");
    mpz_class a = abs(z);
    mpz_class hi = a >> 64;
    mpz_class lo = a - (hi << 64);
    u128 u = ((u128)hi.get_ui() << 64) | (u128)lo.get_ui();
    return sgn(z) < 0 ? -(i128)u : (i128)u;
}

u64 isqrt(u64 n)
{
    u64 r = (u64)std::sqrt((double)n);
    while (r > 0 && (u128)r * r > n) --r;
    while ((u128)(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u128 isqrt(u128 n)
{
    if (n < ((u128)1 << 64)) return isqrt((u64)n);
    long double est = std::sqrt((long double)n);
    u128 r = est >= 18446744073709551615.0L ? (u128)UINT64_MAX : (u128)est;
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(u128 n, u128* root)
{
    static const bool qr64[64] = {
        1,1,0,0,1,0,0,0,0,1,0,0,0,0,0,0,1,1,0,0,0,0,0,0,0,1,0,0,0,0,0,0,
        0,1,0,0,1,0,0,0,0,1,0,0,0,0,0,0,0,1,0,0,0,0,0,0,0,1,0,0,0,0,0,0};
    if (!qr64[(unsigned)(n & 63)]) return false;
    u128 r = isqrt(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

u128 gcd(u128 a, u128 b)
{
    while (b) { u128 t = a % b; a = b; b = t; }
    return a;
}

int valuation(u128 n, u128 p)
{
    if (n == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

u128 ipow(u128 b, unsigned e)
{
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (b != 0 && r > (~(u128)0) / b) throw std::overflow_error("ipow overflow");
        r *= b;
    }
    return r;
}

} // namespace nt
