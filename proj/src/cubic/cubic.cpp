#include "nt/cubic.hpp"

#include <algorithm>

namespace nt {

std::string poly_str(const Poly& P)
{
    std::string s;
    const int d = (int)P.size() - 1;
    for (int i = 0; i <= d; ++i) {
        i128 c = P[i];
        if (c == 0) continue;
        const int k = d - i;
        const bool neg = c < 0;
        i128 a = abs128(c);
        if (!s.empty() || neg) s += neg ? "-" : "+";
        if (k == 0) { s += to_string(a); continue; }
        if (a != 1) s += to_string(a) + "*";
        s += "x";
        if (k > 1) s += "^" + std::to_string(k);
    }
    return s.empty() ? "0" : s;
}

int poly_degree(const Poly& P) { return (int)P.size() - 1; }

bool is_cubic_conductor(i128 f)
{
    if (f < 7) return false;
    int e = valuation((u128)f, 3);
    if (e != 0 && e != 2) return false;
    i128 F = f;
    for (int i = 0; i < e; ++i) F /= 3;
    if (F == 1) {
        if (e != 2) return false;
    } else {
        auto fac = factor((u128)F);
        for (auto& [q, k] : fac.factors)
            if (k != 1 || q % 3 != 1) return false;
    }
    return !cubic_polynomials(f).empty();
}

std::vector<CubicField> cubic_polynomials(i128 f)
{
    std::vector<CubicField> out;
    if (f < 7) return out;
    const int e = valuation((u128)f, 3);
    if (e != 0 && e != 2) return out;
    const i128 bmax = (i128)isqrt((u128)(4 * f / 27));
    for (i128 b = 1; b <= bmax; ++b) {
        if (e == 2 && b % 3 == 0) continue;
        const i128 A = 4 * f - 27 * b * b;
        if (A < 0) break;
        u128 r;
        if (!is_square((u128)A, &r)) continue;
        i128 a = (i128)r;
        CubicField F;
        F.f = f;
        F.e = e;
        F.b = b;
        if (e == 0) {
            if (pmod<i128>(a, 3) == 1) a = -a;
            /* x^3 + x^2 + (1-f)/3 x + (f(a-3)+1)/27 */
            F.poly = {1, 1, (1 - f) / 3, (f * (a - 3) + 1) / 27};
        } else {
            if (pmod<i128>(a, 9) == 3) a = -a;
            F.poly = {1, 0, -f / 3, -f * a / 27};
        }
        F.a = a;
        out.push_back(std::move(F));
    }
    return out;
}

mpz_class cubic_discriminant(const Poly& P)
{
    if (P.size() != 4) throw std::invalid_argument("cubic_discriminant: degree must be 3");
    mpz_class a = to_mpz(P[0]), b = to_mpz(P[1]), c = to_mpz(P[2]), d = to_mpz(P[3]);
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
}

namespace {

mpz_class eval(const Poly& P, const mpz_class& x)
{
    mpz_class r = 0;
    for (i128 c : P) r = r * x + to_mpz(c);
    return r;
}

} // namespace

bool cubic_irreducible(const Poly& P)
{
    if (P.size() != 4 || P[0] != 1) throw std::invalid_argument("cubic_irreducible: monic cubic expected");
    /* reducible iff there is an integer root, and such a root divides P(0) */
    const i128 d = P[3];
    if (d == 0) return false;
    std::vector<u128> divs{1};
    for (auto& [q, k] : factor((u128)abs128(d)).factors) {
        size_t cur = divs.size();
        u128 qk = 1;
        for (int i = 0; i < k; ++i) {
            qk *= q;
            for (size_t j = 0; j < cur; ++j) divs.push_back(divs[j] * qk);
        }
    }
    for (u128 t : divs) {
        if (eval(P, to_mpz((i128)t)) == 0 || eval(P, -to_mpz((i128)t)) == 0) return false;
    }
    return true;
}

bool discriminant_filter(const CubicField& F)
{
    if (!cubic_irreducible(F.poly)) throw std::domain_error("discriminant_filter: reducible polynomial " + poly_str(F.poly));
    mpz_class disc = cubic_discriminant(F.poly);
    mpz_class f2 = to_mpz(F.f) * to_mpz(F.f);
    if (disc <= 0 || disc % f2 != 0) return false;
    mpz_class q = disc / f2;
    return mpz_perfect_square_p(q.get_mpz_t()) != 0;
}

i128 ambiguous_number(i128 f, i128 p)
{
    int N = factor((u128)f).omega();
    i128 r = 1;
    for (int i = 1; i < N; ++i) r *= p;
    return r;
}

std::pair<int, int> rank_window(int N, int p)
{
    if (N < 1) throw std::invalid_argument("rank_window: N must be >= 1");
    return {N - 1, (p - 1) * (N - 1)};
}

} // namespace nt
