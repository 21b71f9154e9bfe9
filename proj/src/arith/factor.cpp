#include "nt/arith.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace nt {

namespace {

/* Brent's variant of Pollard rho on 64-bit moduli. Returns a nontrivial
 * factor or 0 when the iteration budget is spent. */
u64 rho64(u64 n, u64& budget)
{
    if (n % 2 == 0) return 2;
    for (u64 c = 1; budget > 0; ++c) {
        u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
        u64 r = 1;
        const u64 m = 128;
        auto f = [&](u64 v) { return (u64)(((u128)v * v + c) % n); };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = (u64)gcd((u128)q, (u128)n);
                k += m;
                budget = budget > lim ? budget - lim : 0;
            } while (k < r && g == 1 && budget > 0);
            r *= 2;
        } while (g == 1 && budget > 0);
        if (g == n) {
            do {
                ys = f(ys);
                g = (u64)gcd((u128)(x > ys ? x - ys : ys - x), (u128)n);
            } while (g == 1);
        }
        if (g != 1 && g != n) return g;
    }
    return 0;
}

mpz_class rho_mpz(const mpz_class& n, u64& budget)
{
    for (unsigned long c = 1; budget > 0; ++c) {
        mpz_class y = 2, x = 2, q = 1, g = 1, ys = 2, t;
        u64 r = 1;
        const u64 m = 128;
        auto f = [&](mpz_class& v) { v = (v * v + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) f(y);
            u64 k = 0;
            do {
                ys = y;
                u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    f(y);
                    t = abs(x - y);
                    q = q * t % n;
                }
                g = gcd(q, n);
                k += m;
                budget = budget > lim ? budget - lim : 0;
            } while (k < r && g == 1 && budget > 0);
            r *= 2;
        } while (g == 1 && budget > 0);
        if (g == n) {
            do {
                f(ys);
                t = abs(x - ys);
                g = gcd(t, n);
            } while (g == 1);
        }
        if (g != 1 && g != n) return g;
    }
    return 0;
}

void split(u128 n, std::map<u128, int>& acc, u64& budget)
{
    if (n == 1) return;
    if (is_prime(n)) { acc[n] += 1; return; }
    u128 d;
    if (n >> 64 == 0) {
        d = rho64((u64)n, budget);
    } else {
        mpz_class g = rho_mpz(to_mpz((i128)n), budget);
        d = (u128)to_i128(g);
    }
    if (d == 0) throw budget_error("factor: cofactor " + to_string(n) + " resisted the rho budget");
    split(d, acc, budget);
    split(n / d, acc, budget);
}

} // namespace

std::string Factorization::str() const
{
    std::ostringstream os;
    for (size_t i = 0; i < factors.size(); ++i) {
        if (i) os << '*';
        os << to_string(factors[i].first);
        if (factors[i].second > 1) os << '^' << factors[i].second;
    }
    return os.str();
}

Factorization factor(u128 n, const FactorConfig& cfg)
{
    if (n == 0) throw std::invalid_argument("factor: n must be positive");
    Factorization out;
    out.value = n;
    std::map<u128, int> acc;
    auto take = [&](u64 p) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e) acc[p] += e;
    };
    take(2);
    take(3);
    for (u64 p = 5; p <= cfg.trial_bound && (u128)p * p <= n; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) {
        u64 budget = cfg.rho_iterations;
        split(n, acc, budget);
    }
    for (auto& [p, e] : acc) out.factors.emplace_back(p, e);
    return out;
}

std::pair<i128, u128> squarefree_core(i128 n, const FactorConfig& cfg)
{
    if (n == 0) throw std::invalid_argument("squarefree_core: n must be nonzero");
    Factorization f = factor((u128)abs128(n), cfg);
    i128 core = 1;
    u128 cof = 1;
    for (auto& [p, e] : f.factors) {
        if (e & 1) core *= (i128)p;
        for (int i = 0; i < e / 2; ++i) cof *= p;
    }
    return {n < 0 ? -core : core, cof};
}

bool is_squarefree(i128 n, const FactorConfig& cfg)
{
    return squarefree_core(n, cfg).second == 1;
}

} // namespace nt
