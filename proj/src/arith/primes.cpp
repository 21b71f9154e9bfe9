#include "nt/arith.hpp"

#include <cmath>
#include <random>

namespace nt {

u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

u64 powmod(u64 b, u64 e, u64 m)
{
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

u64 invmod(u64 a, u64 m)
{
    i128 u, v;
    i128 g = xgcd<i128>((i128)(a % m), (i128)m, u, v);
    if (g != 1) throw std::domain_error("invmod: not invertible");
    return (u64)pmod<i128>(u, (i128)m);
}

static bool mr_round64(u64 n, u64 a, u64 d, int s)
{
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

static bool mr_round_mpz(const mpz_class& n, const mpz_class& a, const mpz_class& d, int s)
{
    mpz_class x, nm1 = n - 1;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return true;
    for (int r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == nm1) return true;
    }
    return false;
}

bool is_prime(u128 n)
{
    static const unsigned small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (unsigned p : small) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 41 * 41) return true;
    if (n >> 64 == 0) {
        /* the first twelve prime bases are a proof below 3.3e24 */
        u64 m = (u64)n, d = m - 1;
        int s = 0;
        while ((d & 1) == 0) { d >>= 1; ++s; }
        for (unsigned a : small)
            if (!mr_round64(m, a, d, s)) return false;
        return true;
    }
    mpz_class N = to_mpz((i128)n), d = N - 1;
    int s = 0;
    while (mpz_even_p(d.get_mpz_t())) { d >>= 1; ++s; }
    for (unsigned a : small)
        if (!mr_round_mpz(N, a, d, s)) return false;
    /* 64 extra rounds with bases from a generator seeded by n itself,
     * so the answer is reproducible */
    std::mt19937_64 rng((u64)n ^ (u64)(n >> 64));
    gmp_randclass gr(gmp_randinit_default);
    gr.seed(rng());
    for (int round = 0; round < 64; ++round) {
        mpz_class a = gr.get_z_range(N - 3) + 2;
        if (!mr_round_mpz(N, a, d, s)) return false;
    }
    return true;
}

int kronecker(i128 a, i128 n)
{
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int res = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) res = -res;
    }
    if ((n & 1) == 0) {
        if ((a & 1) == 0) return 0;
        int v = 0;
        while ((n & 1) == 0) { n >>= 1; ++v; }
        int a8 = (int)pmod<i128>(a, 8);
        if ((v & 1) && (a8 == 3 || a8 == 5)) res = -res;
    }
    /* Jacobi symbol (a | n), n odd positive */
    u128 m = (u128)n;
    u128 x = (u128)pmod<i128>(a, n);
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            unsigned r = (unsigned)(m & 7);
            if (r == 3 || r == 5) res = -res;
        }
        std::swap(x, m);
        if ((x & 3) == 3 && (m & 3) == 3) res = -res;
        x %= m;
    }
    return m == 1 ? res : 0;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t n)
{
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back((std::uint32_t)i);
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

SmallFactorTable::SmallFactorTable(std::uint32_t limit) : limit_(limit), spf_(limit + 1, 0)
{
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i]) continue;
        for (std::uint64_t j = i; j <= limit; j += i)
            if (!spf_[j]) spf_[j] = (std::uint32_t)i;
    }
}

void SmallFactorTable::factor(std::uint32_t n, std::vector<std::pair<std::uint32_t, int>>& out) const
{
    out.clear();
    while (n > 1) {
        std::uint32_t p = spf_[n];
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.emplace_back(p, e);
    }
}

/* primes == 1 mod p up to bound (for p == 2: odd primes) */
static std::vector<u64> class_primes_up_to(u64 p, u64 bound)
{
    std::vector<u64> out;
    for (std::uint32_t q : primes_up_to((std::uint32_t)bound)) {
        if (p == 2 ? q != 2 : q % p == 1) out.push_back(q);
    }
    return out;
}

PrimeClassSequence primes_in_class(u64 p, std::size_t count)
{
    if (!is_prime(p)) throw std::invalid_argument("primes_in_class: modulus must be prime");
    PrimeClassSequence seq{p, {}};
    if (count == 0) return seq;
    /* Dirichlet density 1/(p-1); start from a generous estimate and grow */
    double est = (double)count * (double)(p == 2 ? 1 : p - 1) *
                 std::log((double)count * (double)p + 10.0) * 1.3 + 100.0;
    u64 bound = (u64)est;
    for (;;) {
        if (bound > 0xFFFFFFF0ULL) throw budget_error("primes_in_class: bound exceeds 32 bits");
        auto v = class_primes_up_to(p, bound);
        if (v.size() >= count) {
            v.resize(count);
            seq.primes = std::move(v);
            return seq;
        }
        bound *= 2;
    }
}

u64 pi_class_count(u64 x, u64 p)
{
    if (x > 0xFFFFFFF0ULL) throw budget_error("pi_class_count: bound exceeds 32 bits");
    return class_primes_up_to(p, x).size();
}

MVReport mv_bounds_hold(u64 k_max, u64 p)
{
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("mv_bounds_hold: p must be an odd prime");
    MVReport rep;
    auto seq = primes_in_class(p, k_max);
    const double half = double(p - 1) / 2.0;
    for (u64 k = 1; k <= k_max; ++k) {
        double l = (double)seq.primes[k - 1];
        double lg = std::log(l / (double)p);
        rep.checked = k;
        if (!(l > half * (double)k * lg)) {
            rep.holds = false; rep.first_violation_k = k; rep.which = "lower";
            return rep;
        }
        /* pi(l_k; 1, p) = k */
        if (!((double)k <= 2.0 * l / (double(p - 1) * lg))) {
            rep.holds = false; rep.first_violation_k = k; rep.which = "pi";
            return rep;
        }
    }
    return rep;
}

} // namespace nt
