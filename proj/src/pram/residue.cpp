#include "nt/pram.hpp"

#include <algorithm>

namespace nt {

Splitting splitting_type(const Discriminant& d, i128 p)
{
    int k = kronecker(d.D, p);
    return k == 0 ? Splitting::ramified : (k == 1 ? Splitting::split : Splitting::inert);
}

std::string to_string(Splitting s)
{
    switch (s) {
    case Splitting::split: return "split";
    case Splitting::inert: return "inert";
    default: return "ramified";
    }
}

namespace {

u128 reduce(const mpz_class& z, u128 mod)
{
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), to_mpz((i128)mod).get_mpz_t());
    return (u128)to_i128(r);
}

u128 reduce(i128 x, u128 mod) { return (u128)pmod<i128>(x, (i128)mod); }

} // namespace

ResidueRing::ResidueRing(const Discriminant& d, i128 p, int n) : p_(p), n_(n)
{
    if (n < 1) throw std::invalid_argument("ResidueRing: n >= 1 required");
    if (p < 2 || !is_prime((u128)p)) throw std::invalid_argument("ResidueRing: p must be prime");
    u128 m = 1;
    for (int i = 0; i < n; ++i) {
        m *= (u128)p;
        if (m >= ((u128)1 << 62)) throw budget_error("ResidueRing: p^n exceeds 2^62");
    }
    mod_ = m;
    split_ = splitting_type(d, p);

    /* omega^2 = A omega + B */
    const i128 A = pmod<i128>(d.D, 4) == 1 ? 1 : 0;
    const i128 B = A ? (d.D - 1) / 4 : d.D / 4;
    i128 r = 0;
    if (split_ == Splitting::ramified) {
        bool found = false;
        for (i128 c = 0; c < p * p && !found; ++c) {
            const i128 f = c * c - A * c - B;
            if (f % p == 0 && (f / p) % p != 0) {
                r = c;
                found = true;
            }
        }
        if (!found) throw std::logic_error("ResidueRing: no uniformizer omega - r");
    }
    r_ = reduce(r, mod_);
    s_ = reduce(A - 2 * r, mod_);
    t_ = reduce(B + A * r - r * r, mod_);
    layers_ = split_ == Splitting::ramified ? 2 * n : n;

    expo_ = 1;
    for (int i = 0; i < layers_; ++i) expo_ *= (u128)p;
    auto ppow = [&](int j) {
        u128 x = 1;
        for (int i = 0; i < j; ++i) x *= (u128)p;
        return x % mod_;
    };
    for (int i = 1; i < layers_; ++i) {
        if (split_ == Splitting::ramified) {
            const bool th = i % 2 == 1;
            const int j = i / 2;
            Gen g{i, th, j, th ? Elt{1 % mod_, ppow(j)} : Elt{(1 + ppow(j)) % mod_, 0}, {}};
            gens_.push_back(g);
        } else {
            gens_.push_back(Gen{i, false, i, Elt{(1 + ppow(i)) % mod_, 0}, {}});
            gens_.push_back(Gen{i, true, i, Elt{1 % mod_, ppow(i)}, {}});
        }
    }
    pow2_ = p == 2;
    mask_ = (u64)(mod_ - 1);
    for (auto& g : gens_) {
        Elt inv = inverse(g.g);
        g.inv_pow.push_back(one());
        for (i128 c = 1; c < p; ++c) g.inv_pow.push_back(mul(g.inv_pow.back(), inv));
    }
    const std::size_t k = gens_.size();
    rels_.assign(k, std::vector<i128>(k, 0));
    for (std::size_t j = 0; j < k; ++j) {
        auto dg = digits(pow(gens_[j].g, (u128)p));
        for (std::size_t c = 0; c < k; ++c) rels_[j][c] = -dg[c];
        rels_[j][j] += p;
    }

    tproj_ = (u128)(p * p - 1);
    mpz_class ti, tm = to_mpz((i128)tproj_), em = to_mpz((i128)expo_);
    if (!mpz_invert(ti.get_mpz_t(), tm.get_mpz_t(), em.get_mpz_t())) throw std::logic_error("ResidueRing: projection");
    tinv_ = (u128)to_i128(ti);
}

ResidueRing::Elt ResidueRing::from_omega(const mpz_class& u, const mpz_class& v) const
{
    const u128 vv = reduce(v, mod_);
    return {(reduce(u, mod_) + vv * r_) % mod_, vv};
}

u128 ResidueRing::mulmod(u128 a, u128 b) const
{
    if (pow2_) return (u128)((u64)a * (u64)b & mask_);
    if (mod_ < ((u128)1 << 32)) return (u128)((u64)a * (u64)b % (u64)mod_);
    return a * b % mod_;
}

ResidueRing::Elt ResidueRing::mul(const Elt& x, const Elt& y) const
{
    auto add = [this](u128 u, u128 v) {
        const u128 w = u + v;
        return w >= mod_ ? w - mod_ : w;
    };
    const u128 bb = mulmod(x.b, y.b);
    return {add(mulmod(x.a, y.a), mulmod(bb, t_)), add(add(mulmod(x.a, y.b), mulmod(x.b, y.a)), mulmod(bb, s_))};
}

/* conj(a + b theta) = (a + b s) - b theta, x * conj(x) = N(x) */
ResidueRing::Elt ResidueRing::inverse(const Elt& x) const
{
    const u128 N = (mulmod(x.a, x.a) + mulmod(mulmod(s_, x.a), x.b) + mod_ - mulmod(mulmod(t_, x.b), x.b)) % mod_;
    i128 u, v;
    if (xgcd<i128>((i128)N, (i128)mod_, u, v) != 1) throw std::domain_error("ResidueRing::inverse: not a unit");
    const u128 Ni = (u128)pmod<i128>(u, (i128)mod_);
    const Elt c{(x.a + mulmod(x.b, s_)) % mod_, (mod_ - x.b) % mod_};
    return {mulmod(c.a, Ni), mulmod(c.b, Ni)};
}

ZMatrix ResidueRing::u1_relations() const
{
    ZMatrix Z;
    for (auto& r : rels_) {
        std::vector<mpz_class> z;
        for (auto x : r) z.push_back(to_mpz(x));
        Z.push_back(z);
    }
    return Z;
}

ResidueRing::Elt ResidueRing::pow(Elt x, u128 e) const
{
    Elt r = one();
    while (e) {
        if (e & 1) r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

bool ResidueRing::is_unit(const Elt& x) const
{
    const u128 P = (u128)p_;
    const u128 a = x.a % P, b = x.b % P, s = s_ % P, t = t_ % P;
    /* norm a^2 + s a b - t b^2 mod p */
    const u128 N = (a * a + s * a % P * b + (P - t) % P * b % P * b) % P;
    return N != 0;
}

std::vector<ResidueRing::Elt> ResidueRing::elements() const
{
    if (mod_ > 4096) throw budget_error("ResidueRing::elements: ring too large");
    std::vector<Elt> out;
    for (u128 a = 0; a < mod_; ++a)
        for (u128 b = 0; b < mod_; ++b) out.push_back({a, b});
    return out;
}

std::vector<i128> ResidueRing::digits(Elt y) const
{
    std::vector<i128> d(gens_.size(), 0);
    const u128 P = (u128)p_;
    std::size_t gi = 0;
    auto pp = [&](int j) {
        u128 x = 1;
        for (int i = 0; i < j; ++i) x *= P;
        return x;
    };
    while (gi < gens_.size()) {
        const int layer = gens_[gi].layer;
        std::size_t end = gi;
        while (end < gens_.size() && gens_[end].layer == layer) ++end;
        const u128 a = (y.a + mod_ - 1) % mod_, b = y.b;
        std::vector<u128> cs;
        for (std::size_t j = gi; j < end; ++j) {
            const u128 q = pp(gens_[j].j);
            const u128 x = gens_[j].theta ? b : a;
            if (x % q != 0) throw std::logic_error("ResidueRing::digits: element outside the layer");
            cs.push_back(x / q % P);
        }
        for (std::size_t j = gi; j < end; ++j) {
            const u128 c = cs[j - gi];
            d[j] = (i128)c;
            if (c) y = mul(y, gens_[j].inv_pow[(std::size_t)c]);
        }
        gi = end;
    }
    if (!(y == one())) throw std::logic_error("ResidueRing::digits: residue left over");
    return d;
}

std::vector<i128> ResidueRing::dlog_p(const Elt& x) const
{
    if (!is_unit(x)) throw std::domain_error("ResidueRing::dlog_p: not a unit");
    auto d = digits(pow(x, tproj_));
    for (auto& c : d) c = (i128)((u128)c * tinv_ % expo_);
    return d;
}

std::vector<i128> ResidueRing::residue_field_units() const
{
    std::vector<i128> out;
    switch (split_) {
    case Splitting::split:
        if (p_ > 2) out = {p_ - 1, p_ - 1};
        break;
    case Splitting::inert: out = {p_ * p_ - 1}; break;
    default:
        if (p_ > 2) out = {p_ - 1};
    }
    return out;
}

AbelianGroupStructure residue_units(const Discriminant& d, i128 p, int n)
{
    ResidueRing R(d, p, n);
    std::vector<i128> cyc = R.residue_field_units();
    if (R.u1_rank()) {
        FiniteAbelianQuotient Q(R.u1_relations(), R.u1_rank());
        for (i128 x : Q.structure().divisors) cyc.push_back(x);
    }
    return AbelianGroupStructure::from_cyclic(cyc);
}

i128 local_mu_order(const Discriminant& d, i128 p)
{
    auto tors = [&](int n) {
        AbelianGroupStructure u = residue_units(d, p, n).p_part(p);
        i128 o = 1;
        for (std::size_t i = 2; i < u.divisors.size(); ++i) o *= u.divisors[i];
        return o;
    };
    const int n0 = p == 2 ? 6 : 4;
    const i128 a = tors(n0), b = tors(n0 + 1);
    if (a != b) throw std::logic_error("local_mu_order: torsion not stable");
    return a;
}

} // namespace nt
