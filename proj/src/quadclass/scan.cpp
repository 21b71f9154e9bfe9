#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nt {

namespace {

/* n -> true when -n is a fundamental discriminant */
std::vector<char> fundamental_mask(std::uint32_t maxAbs)
{
    std::vector<char> sf(maxAbs + 1, 1);
    for (std::uint64_t q = 2; q * q <= maxAbs; ++q)
        for (std::uint64_t k = q * q; k <= maxAbs; k += q * q) sf[k] = 0;
    std::vector<char> fund(maxAbs + 1, 0);
    for (std::uint32_t n = 3; n <= maxAbs; ++n) {
        if (n % 4 == 3) fund[n] = sf[n];
        else if (n % 4 == 0) {
            std::uint32_t m = n / 4;
            if (m % 4 == 1 || m % 4 == 2) fund[n] = sf[m];
        }
    }
    return fund;
}

void sweep_forms(std::uint32_t maxAbs, std::uint64_t a_lo, std::uint64_t a_hi, std::vector<std::uint32_t>& cnt)
{
    for (std::uint64_t a = a_lo; a < a_hi; ++a) {
        for (std::uint64_t b = 0; b <= a; ++b) {
            const std::uint64_t b2 = b * b;
            std::uint64_t n = 4 * a * a - b2;
            if (n > maxAbs) continue;
            /* c == a */
            cnt[n] += 1;
            const std::uint32_t w = (b == 0 || b == a) ? 1 : 2;
            for (n += 4 * a; n <= maxAbs; n += 4 * a) cnt[n] += w;
        }
    }
}

} // namespace

std::vector<std::uint32_t> class_numbers_imag_upto(std::uint32_t maxAbs, unsigned workers)
{
    std::vector<std::uint32_t> h(maxAbs + 1, 0);
    if (maxAbs < 3) return h;
    const std::uint64_t amax = (std::uint64_t)std::sqrt((double)maxAbs / 3.0) + 2;
    workers = std::max(1u, std::min<unsigned>(workers, (unsigned)amax));
    if (workers == 1) {
        sweep_forms(maxAbs, 1, amax + 1, h);
    } else {
        std::vector<std::vector<std::uint32_t>> parts(workers, std::vector<std::uint32_t>(maxAbs + 1, 0));
        std::vector<std::thread> th;
        for (unsigned w = 0; w < workers; ++w) {
            std::uint64_t lo = 1 + amax * w / workers, hi = 1 + amax * (w + 1) / workers;
            th.emplace_back(sweep_forms, maxAbs, lo, hi, std::ref(parts[w]));
        }
        for (auto& t : th) t.join();
        for (auto& part : parts)
            for (std::uint32_t n = 0; n <= maxAbs; ++n) h[n] += part[n];
    }
    auto fund = fundamental_mask(maxAbs);
    for (std::uint32_t n = 0; n <= maxAbs; ++n)
        if (!fund[n]) h[n] = 0;
    return h;
}

double c_kp(i128 h_p, i128 D)
{
    if (h_p <= 1) return 0.0;
    long double ad = (long double)abs128(D);
    return (double)(std::log((long double)h_p) / (0.5L * std::log(ad)));
}

std::vector<ScanRecord> scan_local_maxima(std::uint32_t minAbs, std::uint32_t maxAbs,
                                          const ScanStatistic& st, unsigned workers)
{
    std::vector<ScanRecord> out;
    if (maxAbs < 3) return out;
    auto h = class_numbers_imag_upto(maxAbs, workers);
    auto tab = detail::small_factor_table(maxAbs);
    std::vector<std::pair<std::uint32_t, int>> fac;

    long double best = st.kind == StatKind::p_exponent ? 1.0L : 0.0L;
    for (std::uint32_t n = std::max<std::uint32_t>(minAbs, 3); n <= maxAbs; ++n) {
        if (h[n] == 0) continue;
        const long double sq = std::sqrt((long double)n);
        ScanRecord r;
        r.D = -(i128)n;
        r.h = h[n];
        long double key = 0;
        if (st.kind == StatKind::p_exponent) {
            i128 hp = 1;
            for (std::uint32_t x = h[n]; x % (std::uint32_t)st.p == 0; x /= (std::uint32_t)st.p) hp *= st.p;
            key = (long double)hp;
            if (key <= best) continue;
            r.h_p = hp;
            r.stat = c_kp(hp, r.D);
        } else {
            tab->factor(n, fac);
            r.N = (int)fac.size();
            long double v = (long double)h[n] / std::pow(sq, (long double)st.eps);
            if (st.kind == StatKind::genus) v /= std::ldexp(1.0L, r.N - 1);
            key = v;
            if (key <= best) continue;
            r.stat = (double)v;
        }
        best = key;
        if (r.N == 0) {
            tab->factor(n, fac);
            r.N = (int)fac.size();
        }
        r.prime_disc = is_prime((u128)n);
        try {
            r.structure = class_group_imaginary(discriminant_from_value(r.D)).structure;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

PrimeDiscReport prime_disc_report(const std::vector<ScanRecord>& recs)
{
    PrimeDiscReport rep;
    for (auto& r : recs) {
        if (!is_prime((u128)abs128(r.D))) {
            rep.all_prime = false;
            rep.violations.push_back(r.D);
        }
    }
    return rep;
}

std::vector<NormicRow> normic_search(i128 p, int rho, i128 q, i128 a_min, i128 a_max,
                                     const ClassGroupConfig& cfg)
{
    if (p < 2 || rho < 1 || q < 2) throw std::invalid_argument("normic_search: need p >= 2, rho >= 1, q >= 2");
    const u128 ex = ipow((u128)p, (unsigned)rho);
    if (ex > 124) throw budget_error("normic_search: q^(p^rho) exceeds 128-bit range");
    const u128 qq = ipow((u128)q, (unsigned)ex);
    if (qq > ((u128)1 << 124)) throw budget_error("normic_search: 4*q^(p^rho) exceeds 128-bit range");
    const i128 Y = 4 * (i128)qq;
    const i128 top = (i128)isqrt((u128)Y);
    a_min = std::max<i128>(a_min, 1);
    a_max = a_max <= 0 ? top : std::min(a_max, top);

    std::vector<NormicRow> out;
    i128 H = 1;
    for (i128 a = a_min; a <= a_max; ++a) {
        const i128 B = Y - a * a;
        if (B <= 0) break;
        NormicRow r;
        r.a = a;
        try {
            auto [m, b] = squarefree_core(B);
            r.m = m;
            r.b = (i128)b;
            if (gcd(a, r.b) > 2) continue;
            r.D = pmod<i128>(m, 4) == 3 ? -m : -4 * m;
            ClassGroup G = class_group_imaginary_p(fundamental_discriminant(-m), p, cfg);
            r.h = G.ambient_order;
            r.h_p = G.structure.order();
            if (r.h_p <= H) continue;
            H = r.h_p;
            r.C = c_kp(r.h_p, r.D);
            r.hp_structure = G.structure;
        } catch (const std::exception& e) {
            if (r.m == 0) throw;
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace nt
