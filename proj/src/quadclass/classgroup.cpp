#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace nt {

/* ---------------------------------------------------------------- discriminants */

bool is_fundamental(i128 D)
{
    if (D == 0 || D == 1) return false;
    i128 r = pmod<i128>(D, 4);
    if (r == 1) return is_squarefree(D);
    if (r != 0) return false;
    i128 m = D / 4;
    i128 r4 = pmod<i128>(m, 4);
    if (r4 != 2 && r4 != 3) return false;
    return is_squarefree(m);
}

Discriminant fundamental_discriminant(i128 m)
{
    if (m == 0 || m == 1) throw std::invalid_argument("fundamental_discriminant: m must not be 0 or 1");
    if (!is_squarefree(m)) throw std::invalid_argument("fundamental_discriminant: m is not squarefree");
    Discriminant d;
    d.m = m;
    d.D = pmod<i128>(m, 4) == 1 ? m : 4 * m;
    d.N = factor((u128)abs128(d.D)).omega();
    return d;
}

Discriminant discriminant_from_value(i128 D)
{
    if (!is_fundamental(D)) throw std::invalid_argument("not a fundamental discriminant: " + to_string(D));
    return fundamental_discriminant(pmod<i128>(D, 4) == 1 ? D : D / 4);
}

ClassGroupConfig class_group_config_from_env()
{
    ClassGroupConfig cfg;
    if (const char* s = std::getenv("NT_ENUM_CAP")) cfg.enumeration_cap = parse_i128(s);
    if (const char* s = std::getenv("NT_BSGS_CAP")) cfg.bsgs_cap = parse_i128(s);
    return cfg;
}

/* ---------------------------------------------------------------- helpers */

namespace detail {

std::shared_ptr<const SmallFactorTable> small_factor_table(std::uint32_t needed)
{
    static std::mutex mu;
    static std::shared_ptr<const SmallFactorTable> tab;
    std::lock_guard<std::mutex> lk(mu);
    if (!tab || tab->limit() < needed) {
        std::uint64_t lim = std::max<std::uint64_t>(needed, tab ? 2ULL * tab->limit() : 1u << 16);
        lim = std::min<std::uint64_t>(lim, 0xFFFFFFF0ULL);
        tab = std::make_shared<SmallFactorTable>((std::uint32_t)lim);
    }
    return tab;
}

std::vector<u128> divisors_of(u128 n)
{
    std::vector<std::pair<u128, int>> fac;
    if (n <= 50000000) {
        auto tab = small_factor_table((std::uint32_t)n);
        std::vector<std::pair<std::uint32_t, int>> f;
        tab->factor((std::uint32_t)n, f);
        for (auto& [p, e] : f) fac.emplace_back(p, e);
    } else {
        fac = factor(n).factors;
    }
    std::vector<u128> divs{1};
    for (auto& [p, e] : fac) {
        size_t cur = divs.size();
        u128 pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < cur; ++j) divs.push_back(divs[j] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

QuadForm pow_with(const MulFn& mul, const QuadForm& one, QuadForm g, u128 e)
{
    QuadForm r = one;
    while (e) {
        if (e & 1) r = mul(r, g);
        e >>= 1;
        if (e) g = mul(g, g);
    }
    return r;
}

SylowBuilder::SylowBuilder(i128 p, QuadForm one, MulFn mul) : one_(one), mul_(std::move(mul))
{
    part_.p = p;
    part_.index[form_key(one_)] = 0;
    part_.coords.push_back({});
    elems_.push_back(one_);
}

bool SylowBuilder::add(const QuadForm& x)
{
    if (contains(x)) return false;
    QuadForm y = x;
    u128 k = 1;
    while (!contains(y)) {
        y = mul_(y, x);
        ++k;
        if (k > ((u128)1 << 40)) throw std::runtime_error("SylowBuilder: element order out of range");
    }
    const size_t j = part_.raw_gens.size();
    std::vector<std::int32_t> yc = part_.coords[part_.index.at(form_key(y))];
    part_.raw_gens.push_back(x);
    for (auto& row : part_.relations) row.push_back(0);
    std::vector<mpz_class> rel(j + 1, 0);
    for (size_t i = 0; i < j; ++i) rel[i] = -yc[i];
    rel[j] = to_mpz((i128)k);
    part_.relations.push_back(std::move(rel));
    for (auto& c : part_.coords) c.push_back(0);

    const size_t oldn = elems_.size();
    elems_.reserve(oldn * (size_t)k);
    part_.coords.reserve(oldn * (size_t)k);
    for (u128 i = 1; i < k; ++i) {
        for (size_t idx = 0; idx < oldn; ++idx) {
            QuadForm e = mul_(elems_[(size_t)(i - 1) * oldn + idx], x);
            std::vector<std::int32_t> c = part_.coords[idx];
            c[j] = (std::int32_t)i;
            part_.index.emplace(form_key(e), (std::uint32_t)elems_.size());
            elems_.push_back(e);
            part_.coords.push_back(std::move(c));
        }
    }
    return true;
}

SylowPart SylowBuilder::finish() &&
{
    u128 n = part_.coords.size();
    int e = 0;
    while (n > 1) {
        if (n % (u128)part_.p) throw std::logic_error("SylowBuilder: subgroup order is not a p-power");
        n /= (u128)part_.p;
        ++e;
    }
    part_.e = e;
    return std::move(part_);
}

SylowPart prime_cyclic_part(i128 p, const QuadForm& gen)
{
    SylowPart s;
    s.p = p;
    s.e = 1;
    s.tabled = false;
    s.raw_gens = {gen};
    s.relations = {{to_mpz(p)}};
    return s;
}

i128 inv_mod(i128 a, i128 m)
{
    if (m == 1) return 0;
    i128 u, v;
    if (xgcd<i128>(pmod<i128>(a, m), m, u, v) != 1) throw std::logic_error("inv_mod: not invertible");
    return pmod<i128>(u, m);
}

void finalize_class_group(ClassGroup& G)
{
    G.extra_rows.resize(G.sylows.size());
    G.quotients.clear();
    for (size_t si = 0; si < G.sylows.size(); ++si) {
        ZMatrix rel = G.sylows[si].relations;
        for (auto& r : G.extra_rows[si]) rel.push_back(r);
        G.quotients.emplace_back(rel, G.sylows[si].raw_gens.size());
    }
    size_t len = 0;
    for (auto& q : G.quotients) len = std::max(len, q.structure().divisors.size());
    G.structure.divisors.assign(len, 1);
    G.generators.assign(len, G.one());
    for (size_t si = 0; si < G.sylows.size(); ++si) {
        const auto& s = G.sylows[si];
        const auto& q = G.quotients[si];
        i128 pe = 1;
        for (int i = 0; i < s.e; ++i) pe *= s.p;
        for (size_t i = 0; i < q.structure().divisors.size(); ++i) {
            G.structure.divisors[i] *= q.structure().divisors[i];
            QuadForm g = G.one();
            const auto& ex = q.generator(i);
            for (size_t r = 0; r < ex.size(); ++r) {
                mpz_class e = ex[r];
                mpz_class m = to_mpz(pe);
                mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
                if (sgn(e) != 0) g = G.mul(g, G.pow(s.raw_gens[r], (u128)to_i128(e)));
            }
            G.generators[i] = G.mul(G.generators[i], g);
        }
    }
    G.order_full = G.structure.order();
}

} // namespace detail

/* ---------------------------------------------------------------- ClassGroup */

QuadForm ClassGroup::one() const { return identity_form<i128>(disc.D); }
QuadForm ClassGroup::canonical(const QuadForm& f) const { return canon_fn(f); }
QuadForm ClassGroup::mul(const QuadForm& f, const QuadForm& g) const { return mul_fn(f, g); }
QuadForm ClassGroup::pow(const QuadForm& f, u128 e) const
{
    return detail::pow_with(mul_fn, canonical(one()), canonical(f), e);
}

std::vector<mpz_class> detail::sylow_raw_coords(const ClassGroup& G, size_t si, const QuadForm& x)
{
    const SylowPart& s = G.sylows[si];
    i128 pe = 1;
    for (int i = 0; i < s.e; ++i) pe *= s.p;
    i128 c = G.ambient_order / pe;
    QuadForm y = G.pow(x, (u128)c);
    i128 t = detail::inv_mod(c, pe);
    std::vector<mpz_class> raw(s.raw_gens.size(), 0);
    if (s.tabled) {
        auto it = s.index.find(form_key(y));
        if (it == s.index.end()) throw std::logic_error("dlog: projection missing from Sylow table");
        const auto& rc = s.coords[it->second];
        for (size_t i = 0; i < rc.size(); ++i) raw[i] = rc[i];
    } else {
        QuadForm g = G.canonical(s.raw_gens[0]);
        QuadForm cur = G.canonical(G.one());
        i128 k = 0;
        while (!(cur == y)) {
            cur = G.mul(cur, g);
            if (++k > s.p) throw std::logic_error("dlog: element outside cyclic Sylow");
        }
        raw[0] = to_mpz(k);
    }
    for (auto& r : raw) r *= to_mpz(t);
    return raw;
}

std::vector<i128> ClassGroup::dlog(const QuadForm& f) const
{
    QuadForm x = canonical(f);
    std::vector<i128> out(structure.divisors.size(), 0);
    std::vector<i128> mod(structure.divisors.size(), 1);
    for (size_t si = 0; si < sylows.size(); ++si) {
        auto q = quotients[si].coords(detail::sylow_raw_coords(*this, si, x));
        const auto& pd = quotients[si].structure().divisors;
        for (size_t i = 0; i < q.size(); ++i) {
            /* CRT: out[i] mod mod[i], q[i] mod pd[i] */
            i128 m1 = mod[i], m2 = pd[i];
            i128 t = pmod<i128>((q[i] - out[i]) % m2 * detail::inv_mod(m1 % m2, m2), m2);
            out[i] = out[i] + m1 * t;
            mod[i] = m1 * m2;
        }
    }
    return out;
}

QuadForm ClassGroup::element(const std::vector<i128>& coords) const
{
    QuadForm r = canonical(one());
    for (size_t i = 0; i < coords.size() && i < generators.size(); ++i) {
        i128 e = pmod<i128>(coords[i], structure.divisors[i]);
        if (e) r = mul(r, pow(generators[i], (u128)e));
    }
    return r;
}

AbelianGroupStructure ClassGroup::quotient_structure(const std::vector<QuadForm>& classes) const
{
    std::vector<i128> cyc;
    for (size_t si = 0; si < sylows.size(); ++si) {
        ZMatrix rel = sylows[si].relations;
        if (si < extra_rows.size())
            for (auto& rr : extra_rows[si]) rel.push_back(rr);
        for (auto& c : classes) rel.push_back(detail::sylow_raw_coords(*this, si, c));
        FiniteAbelianQuotient q(rel, sylows[si].raw_gens.size());
        for (i128 d : q.structure().divisors) cyc.push_back(d);
    }
    return AbelianGroupStructure::from_cyclic(cyc);
}

std::vector<std::pair<i128, int>> detail::factor_small(i128 h)
{
    std::vector<std::pair<i128, int>> out;
    for (auto& [p, e] : factor((u128)h).factors) out.emplace_back((i128)p, e);
    return out;
}

/* Build every Sylow subgroup of a group of known order h from a candidate
 * list that generates the group. */
void detail::build_sylows_known_order(ClassGroup& G, i128 h, const std::vector<QuadForm>& cands,
                              std::optional<i128> only_p)
{
    const QuadForm one = G.canonical(G.one());
    for (auto& [p, e] : detail::factor_small(h)) {
        if (only_p && *only_p != p) continue;
        i128 pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        i128 c = h / pe;
        if (e == 1 && p > 1000) {
            for (auto& f : cands) {
                QuadForm x = G.pow(f, (u128)c);
                if (!(x == one)) { G.sylows.push_back(detail::prime_cyclic_part(p, x)); break; }
            }
            if (G.sylows.empty() || G.sylows.back().p != p)
                throw std::runtime_error("class group: candidates do not generate the group");
            continue;
        }
        detail::SylowBuilder sb(p, one, G.mul_fn);
        for (auto& f : cands) {
            if (sb.size() == (u128)pe) break;
            sb.add(G.pow(f, (u128)c));
        }
        if (sb.size() != (u128)pe) throw std::runtime_error("class group: candidates do not generate the group");
        G.sylows.push_back(std::move(sb).finish());
    }
    G.ambient_order = h;
    G.only_p = only_p;
    detail::finalize_class_group(G);
}

/* ---------------------------------------------------------------- prime forms */

u64 sqrt_mod_prime(u64 a, u64 p)
{
    a %= p;
    if (p == 2 || a == 0) return a;
    if (powmod(a, (p - 1) / 2, p) != 1) throw std::domain_error("sqrt_mod_prime: nonresidue");
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 m = (u64)s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) { tt = mulmod(tt, tt, p); ++i; }
        u64 b = c;
        for (u64 j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

std::optional<QuadForm> prime_form(i128 D, i128 l)
{
    if (kronecker(D, l) == -1) return std::nullopt;
    i128 b;
    if (l == 2) {
        i128 r = pmod<i128>(D, 8);
        if (r == 1) b = 1;
        else if (r == 0) b = 0;
        else if (r == 4) b = 2;
        else return std::nullopt;
    } else {
        b = (i128)sqrt_mod_prime((u64)pmod<i128>(D, l), (u64)l);
        if (pmod<i128>(b - D, 2) != 0) b = l - b;
    }
    QuadForm f{l, b, (b * b - D) / (4 * l)};
    return reduce(f);
}

/* ---------------------------------------------------------------- imaginary */

std::vector<QuadForm> reduced_forms_imag(i128 D)
{
    if (D >= 0 || pmod<i128>(D, 4) > 1) throw std::invalid_argument("reduced_forms_imag: bad discriminant");
    const u128 n = (u128)(-D);
    const u128 bmax = isqrt(n / 3);
    std::vector<QuadForm> out;
    for (u128 b = n & 1; b <= bmax; b += 2) {
        u128 N = (b * b + n) / 4;
        for (u128 a : detail::divisors_of(N)) {
            if (a < b || a == 0) continue;
            if (a * a > N) break;
            u128 c = N / a;
            if (gcd(gcd(a, b), c) != 1) continue;
            out.push_back({(i128)a, (i128)b, (i128)c});
            if (b != 0 && b != a && a != c) out.push_back({(i128)a, -(i128)b, (i128)c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

i128 class_number_imag(i128 D, const ClassGroupConfig& cfg)
{
    return class_group_imaginary(discriminant_from_value(D), cfg).order_full;
}

namespace {

struct ImagOps {
    i128 D;
    bool small;
    QuadForm operator()(const QuadForm& f, const QuadForm& g) const
    {
        if (small) return widen(compose_imag(bqf_cast<i64>(f), bqf_cast<i64>(g)));
        return compose_imag(f, g);
    }
};

void setup_imag(ClassGroup& G, const Discriminant& d)
{
    G.disc = d;
    ImagOps ops{d.D, abs128(d.D) < ((i128)1 << 40)};
    G.mul_fn = ops;
    G.canon_fn = [](const QuadForm& f) { return reduce_imag(f); };
}

} // namespace

namespace {

std::vector<QuadForm> prime_forms_upto(i128 D, i128 count_limit)
{
    std::vector<QuadForm> out;
    for (i128 l = 2; (i128)out.size() < count_limit; ++l) {
        if (!is_prime((u128)l)) continue;
        if (auto f = prime_form(D, l)) out.push_back(*f);
        if (l > 10000000) break;
    }
    return out;
}

/* Order of g given that g^h = 1 for some h in [lo, hi]. */
i128 bsgs_order(const ClassGroup& G, const QuadForm& g, i128 lo, i128 hi)
{
    const QuadForm one = G.canonical(G.one());
    if (g == one) return 1;
    i128 width = hi - lo + 1;
    i128 s = (i128)isqrt((u128)width) + 1;
    std::unordered_map<FormKey, i128, FormKeyHash> baby;
    QuadForm x = one;
    for (i128 j = 0; j < s; ++j) {
        /* store g^{-j} */
        QuadForm inv = G.canonical(inverse_form(x));
        baby.emplace(form_key(inv), j);
        x = G.mul(x, g);
    }
    QuadForm gs = x; /* g^s */
    QuadForm y = G.pow(g, (u128)lo);
    i128 k = -1;
    for (i128 i = 0; i * s <= width + s; ++i) {
        auto it = baby.find(form_key(y));
        if (it != baby.end()) { k = lo + i * s + it->second; break; }
        y = G.mul(y, gs);
    }
    if (k < 0) throw std::runtime_error("bsgs: no multiple of the order in the bracket");
    for (auto& [q, e] : detail::factor_small(k)) {
        for (int i = 0; i < e; ++i) {
            if (G.pow(g, (u128)(k / q)) == one) k /= q; else break;
        }
    }
    return k;
}

i128 lcm128(i128 a, i128 b) { return a / gcd(a, b) * b; }

void build_imag_bsgs(ClassGroup& G, const ClassGroupConfig& cfg, std::optional<i128> only_p)
{
    const i128 D = G.disc.D;
    const double absD = (double)abs128(D);
    double L = 1.0;
    for (std::uint32_t l : primes_up_to(cfg.euler_bound)) {
        int chi = kronecker(D, (i128)l);
        L *= 1.0 / (1.0 - (double)chi / (double)l);
    }
    const double hstar = std::sqrt(absD) * L / M_PI;
    const double lx = std::log((double)cfg.euler_bound);
    double delta = std::min(0.3, std::max(0.02, 8.0 * std::log(absD) / (std::sqrt((double)cfg.euler_bound) * lx)));
    i128 lo = std::max<i128>(1, (i128)std::floor(hstar * (1 - delta)));
    i128 hi = (i128)std::ceil(hstar * (1 + delta));

    const double lg = std::log(absD);
    const i128 bach = (i128)(6.0 * lg * lg) + 50;
    std::vector<QuadForm> cands = prime_forms_upto(D, bach);
    const QuadForm one = G.canonical(G.one());

    i128 E = 1;
    std::vector<std::pair<i128, detail::SylowBuilder>> builders;
    i128 h = 0;
    for (auto& g : cands) {
        i128 o = bsgs_order(G, g, lo, hi);
        E = lcm128(E, o);
        for (auto& [p, e] : detail::factor_small(o)) {
            i128 pe = 1;
            for (int i = 0; i < e; ++i) pe *= p;
            auto it = std::find_if(builders.begin(), builders.end(), [&](auto& b) { return b.first == p; });
            if (it == builders.end()) {
                builders.emplace_back(p, detail::SylowBuilder(p, one, G.mul_fn));
                it = builders.end() - 1;
            }
            it->second.add(G.pow(g, (u128)(o / pe)));
        }
        i128 P = 1;
        for (auto& b : builders) P *= (i128)b.second.size();
        if (P >= lo && 2 * P > hi) { h = P; break; }
    }
    if (h == 0) throw budget_error("class group (bsgs): candidates exhausted before the bracket was reached");
    std::sort(builders.begin(), builders.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (auto& [p, b] : builders) {
        if (only_p && *only_p != p) continue;
        G.sylows.push_back(std::move(b).finish());
    }
    G.ambient_order = h;
    G.only_p = only_p;
    G.grh = true;
    detail::finalize_class_group(G);
}

ClassGroup imag_group(const Discriminant& d, const ClassGroupConfig& cfg, std::optional<i128> only_p)
{
    if (d.D >= 0) throw std::invalid_argument("class_group_imaginary: D must be negative");
    ClassGroup G;
    setup_imag(G, d);
    const i128 a = abs128(d.D);
    if (a <= cfg.enumeration_cap) {
        auto forms = reduced_forms_imag(d.D);
        G.method = "enumeration";
        detail::build_sylows_known_order(G, (i128)forms.size(), forms, only_p);
    } else if (a <= cfg.bsgs_cap) {
        G.method = "bsgs";
        build_imag_bsgs(G, cfg, only_p);
    } else {
        throw budget_error("class group: |D| = " + to_string(a) + " exceeds the BSGS cap");
    }
    return G;
}

} // namespace

ClassGroup class_group_imaginary(const Discriminant& d, const ClassGroupConfig& cfg)
{
    return imag_group(d, cfg, std::nullopt);
}

ClassGroup class_group_imaginary_p(const Discriminant& d, i128 p, const ClassGroupConfig& cfg)
{
    return imag_group(d, cfg, p);
}

ClassGroup class_group(const Discriminant& d, const ClassGroupConfig& cfg)
{
    return d.D < 0 ? class_group_imaginary(d, cfg) : narrow_class_group_real(d, cfg);
}

AbelianGroupStructure p_part(const AbelianGroupStructure& g, i128 p) { return g.p_part(p); }

GenusDelta genus_delta(const Discriminant& d, const ClassGroupConfig& cfg)
{
    ClassGroup G = d.D < 0 ? class_group_imaginary_p(d, 2, cfg) : narrow_class_group_real_p(d, 2, cfg);
    GenusDelta g;
    g.N = d.N;
    g.two_rank = G.structure.rank(2);
    if (g.two_rank != d.N - 1)
        throw std::logic_error("genus theory violated: 2-rank " + std::to_string(g.two_rank) +
                               " != N-1 for D=" + to_string(d.D));
    g.delta2 = G.structure.vp(2) - (d.N - 1);
    return g;
}

} // namespace nt
