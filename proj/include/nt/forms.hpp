#pragma once

#include <functional>
#include <string>
#include <utility>

#include "nt/int128.hpp"

namespace nt {

/* Binary quadratic form a x^2 + b x y + c y^2. */
template <class I> struct BQF {
    I a = 0, b = 0, c = 0;
    bool operator==(const BQF& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const BQF& o) const { return a != o.a ? a < o.a : (b != o.b ? b < o.b : c < o.c); }
    I disc() const { return b * b - 4 * a * c; }
};

using QuadForm = BQF<i128>;

std::string to_string(const QuadForm& f);

/* (a, b) determines a form of known discriminant. */
using FormKey = std::pair<i128, i128>;
inline FormKey form_key(const QuadForm& f) { return {f.a, f.b}; }
struct FormKeyHash {
    std::size_t operator()(const FormKey& k) const
    {
        u64 x = (u64)k.first * 0x9E3779B97F4A7C15ULL ^ ((u64)(k.first >> 64) + 0x632BE59BD9B4E019ULL);
        u64 y = (u64)k.second * 0xC2B2AE3D27D4EB4FULL ^ (u64)(k.second >> 64);
        x ^= y + 0x9E3779B97F4A7C15ULL + (x << 6) + (x >> 2);
        return (std::size_t)(x ^ (x >> 31));
    }
};

template <class I> BQF<I> bqf_cast(const QuadForm& f) { return {(I)f.a, (I)f.b, (I)f.c}; }
template <class I> QuadForm widen(const BQF<I>& f) { return {(i128)f.a, (i128)f.b, (i128)f.c}; }

namespace detail {

template <class I> inline I mulmod_small(I a, I b, I m)
{
    /* a, b already reduced mod m; m^2 must fit in I */
    return pmod<I>(a * b, m);
}

} // namespace detail

/* Gauss composition (Dirichlet/Shanks), unreduced result.
 * Ideal-wise, the product of the ideals attached to f and g equals
 * d1 times the ideal attached to the result; d1 is returned via `content`. */
template <class I> BQF<I> compose_raw(const BQF<I>& f0, const BQF<I>& g0, I* content = nullptr)
{
    BQF<I> f = f0, g = g0;
    auto absv = [](I x) { return x < 0 ? -x : x; };
    if (absv(f.a) > absv(g.a)) std::swap(f, g);
    const I a1 = f.a, b1 = f.b, a2 = g.a, b2 = g.b, c2 = g.c;
    const I s = (b1 + b2) / 2, n = b2 - s;
    I y1, d;
    if (a2 % a1 == 0) {
        y1 = 0; d = absv(a1);
    } else {
        I u, v;
        d = xgcd<I>(a2, a1, u, v);
        y1 = u;
    }
    I x2, y2, d1;
    if (s % d == 0) {
        y2 = -1; x2 = 0; d1 = d;
    } else {
        I u, v;
        d1 = xgcd<I>(s, d, u, v);
        x2 = u; y2 = -v;
    }
    const I v1 = a1 / d1, v2 = a2 / d1;
    const I av1 = absv(v1);
    I r = 0;
    if (av1 != 1) {
        I t1 = detail::mulmod_small<I>(pmod<I>(y1, av1), pmod<I>(y2, av1), av1);
        t1 = detail::mulmod_small<I>(t1, pmod<I>(n, av1), av1);
        I t2 = detail::mulmod_small<I>(pmod<I>(x2, av1), pmod<I>(c2, av1), av1);
        r = pmod<I>(t1 - t2, av1);
    }
    BQF<I> h;
    h.b = b2 + 2 * v2 * r;
    h.a = v1 * v2;
    h.c = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    if (content) *content = d1;
    return h;
}

/* Definite forms (a > 0). */
template <class I> BQF<I> reduce_imag(BQF<I> f)
{
    auto normalize = [](BQF<I>& g) {
        if (-g.a < g.b && g.b <= g.a) return;
        I k = fdiv<I>(g.a - g.b, 2 * g.a);
        g.c = g.c + k * (g.b + g.a * k);
        g.b = g.b + 2 * g.a * k;
    };
    normalize(f);
    while (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        normalize(f);
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

template <class I> BQF<I> compose_imag(const BQF<I>& f, const BQF<I>& g)
{
    return reduce_imag(compose_raw(f, g));
}

template <class I> BQF<I> identity_form(I D)
{
    I b = pmod<I>(D, 2);
    return {1, b, (b * b - D) / 4};
}

template <class I> BQF<I> inverse_form(const BQF<I>& f) { return {f.a, -f.b, f.c}; }

template <class I, class Mul> BQF<I> power_form(BQF<I> g, u128 e, const BQF<I>& one, Mul mul)
{
    BQF<I> r = one;
    while (e) {
        if (e & 1) r = mul(r, g);
        e >>= 1;
        if (e) g = mul(g, g);
    }
    return r;
}

/* Indefinite forms. sqrtD = floor(sqrt(D)), D not a square. */
template <class I> bool is_reduced_real(const BQF<I>& f, I sqrtD)
{
    I aa = f.a < 0 ? -f.a : f.a;
    return f.b > 0 && f.b <= sqrtD && 2 * aa + f.b > sqrtD && 2 * aa - f.b <= sqrtD;
}

/* One step of the proper reduction operator rho. */
template <class I> BQF<I> rho_real(const BQF<I>& f, I D, I sqrtD)
{
    const I c = f.c, ac = c < 0 ? -c : c, m = 2 * ac;
    I r;
    if (ac > sqrtD) {
        r = pmod<I>(-f.b, m);
        if (r > ac) r -= m;
    } else {
        /* r in (sqrtD - 2|c|, sqrtD] */
        I lo = sqrtD - m + 1;
        r = lo + pmod<I>(-f.b - lo, m);
    }
    BQF<I> g;
    g.a = c;
    g.b = r;
    g.c = (I)(((i128)r * r - (i128)D) / (4 * (i128)c));
    return g;
}

template <class I> BQF<I> reduce_real(BQF<I> f, I D, I sqrtD)
{
    while (!is_reduced_real(f, sqrtD)) f = rho_real(f, D, sqrtD);
    return f;
}

/* Reduced representative of f (definite: unique; indefinite: some form on
 * the cycle of f). */
QuadForm reduce(const QuadForm& f);
QuadForm compose(const QuadForm& f, const QuadForm& g);

} // namespace nt
