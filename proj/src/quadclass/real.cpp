#include "internal.hpp"

#include <algorithm>
#include <stdexcept>

namespace nt {

namespace {

bool canon_less(const QuadForm& x, const QuadForm& y)
{
    bool nx = x.a < 0, ny = y.a < 0;
    if (nx != ny) return !nx;
    i128 ax = abs128(x.a), ay = abs128(y.a);
    if (ax != ay) return ax < ay;
    return x.b < y.b;
}

} // namespace

RealCycles real_cycles(i128 D, const ClassGroupConfig& cfg)
{
    if (D <= 0) throw std::invalid_argument("real_cycles: D must be positive");
    if (D > cfg.enumeration_cap) throw budget_error("real class group: D exceeds the enumeration cap");
    u128 r;
    if (is_square((u128)D, &r)) throw std::invalid_argument("real_cycles: square discriminant");
    RealCycles rc;
    rc.D = D;
    rc.sqrtD = (i128)isqrt((u128)D);
    const i128 s = rc.sqrtD;
    for (i128 b = (D & 1) ? 1 : 2; b <= s; b += 2) {
        i128 N = (D - b * b) / 4;
        for (u128 ua : detail::divisors_of((u128)N)) {
            i128 a = (i128)ua;
            if (2 * a - b > s) break;
            if (2 * a + b <= s) continue;
            i128 c = N / a;
            if (gcd(gcd(a, b), c) != 1) continue;
            rc.reduced.push_back({a, b, -c});
            rc.reduced.push_back({-a, b, c});
        }
    }
    std::sort(rc.reduced.begin(), rc.reduced.end());
    for (auto& f : rc.reduced) rc.cycle_of.emplace(form_key(f), -1);
    const bool small = D < ((i128)1 << 40);
    for (auto& f : rc.reduced) {
        if (rc.cycle_of[form_key(f)] >= 0) continue;
        std::int32_t id = (std::int32_t)rc.canon.size();
        QuadForm best = f, g = f;
        std::int32_t len = 0;
        do {
            rc.cycle_of[form_key(g)] = id;
            if (canon_less(g, best)) best = g;
            ++len;
            g = small ? widen(rho_real(bqf_cast<i64>(g), (i64)D, (i64)s)) : rho_real(g, D, s);
            if (!rc.cycle_of.count(form_key(g))) throw std::logic_error("real_cycles: rho left the reduced set");
        } while (!(g == f));
        rc.canon.push_back(best);
        rc.length.push_back(len);
    }
    return rc;
}

namespace {

ClassGroup narrow_group(const Discriminant& d, const ClassGroupConfig& cfg, std::optional<i128> only_p)
{
    if (d.D <= 0) throw std::invalid_argument("narrow class group: D must be positive");
    auto rc = std::make_shared<RealCycles>(real_cycles(d.D, cfg));
    ClassGroup G;
    G.disc = d;
    G.method = "cycles";
    const i128 D = d.D, s = rc->sqrtD;
    const bool small = D < ((i128)1 << 40);
    G.canon_fn = [rc, D, s, small](const QuadForm& f) {
        QuadForm r = small ? widen(reduce_real(bqf_cast<i64>(f), (i64)D, (i64)s)) : reduce_real(f, D, s);
        return rc->canon[rc->cycle_of.at(form_key(r))];
    };
    auto canon = G.canon_fn;
    G.mul_fn = [canon, small](const QuadForm& f, const QuadForm& g) {
        QuadForm h = small ? widen(compose_raw(bqf_cast<i64>(f), bqf_cast<i64>(g))) : compose_raw(f, g);
        return canon(h);
    };
    detail::build_sylows_known_order(G, (i128)rc->canon.size(), rc->canon, only_p);
    return G;
}

} // namespace

ClassGroup narrow_class_group_real(const Discriminant& d, const ClassGroupConfig& cfg)
{
    return narrow_group(d, cfg, std::nullopt);
}

ClassGroup narrow_class_group_real_p(const Discriminant& d, i128 p, const ClassGroupConfig& cfg)
{
    return narrow_group(d, cfg, p);
}

ClassGroup ordinary_class_group_real(const Discriminant& d, const ClassGroupConfig& cfg)
{
    ClassGroup G = narrow_group(d, cfg, std::nullopt);
    QuadForm one = identity_form<i128>(d.D);
    QuadForm fminus{-1, one.b, -one.c};
    if (G.canonical(fminus) == G.canonical(one)) {
        G.method = "cycles/ordinary";
        return G;
    }
    for (size_t si = 0; si < G.sylows.size(); ++si) {
        if (G.sylows[si].p != 2) continue;
        G.extra_rows.resize(G.sylows.size());
        G.extra_rows[si].push_back(detail::sylow_raw_coords(G, si, fminus));
    }
    detail::finalize_class_group(G);
    G.method = "cycles/ordinary";
    return G;
}

} // namespace nt
